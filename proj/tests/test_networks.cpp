// netcore, touchstone, synthesis, interconnect, distributed and json_io
#include <doctest.h>

#include "qnet/distributed.hpp"
#include "qnet/fixtures.hpp"
#include "qnet/interconnect.hpp"
#include "qnet/json_io.hpp"
#include "qnet/synthesis.hpp"
#include "qnet/touchstone.hpp"

#include <random>

using namespace qnet;
using doctest::Approx;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double fF = 1e-15, nH = 1e-9;

double max_rel(const CMat& a, const CMat& b) { return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff(); }

RationalImpedance two_port_example() {
    RationalImpedance z;
    z.port_names = {"A", "B"};
    Mat c(2, 2);
    c << 80 * fF, -3 * fF, -3 * fF, 90 * fF;
    z.dc_residue = c.inverse();
    Vec r1(2), r2(2);
    r1 << 2.0e6, -1.5e6;
    r2 << 1.0e6, 2.5e6;
    z.modes = {{two_pi * 5e9, r1}, {two_pi * 7e9, r2}};
    canonicalize(z);
    return z;
}

}  // namespace

TEST_SUITE("netcore") {
    TEST_CASE("matched load has zero reflection") {
        CMat z = CMat::Constant(1, 1, cplx(50, 0));
        CHECK(std::abs(z_to_s(z, 50.0)(0, 0)) < 1e-15);
        z(0, 0) = cplx(0, 50);
        CHECK(std::abs(z_to_s(z, 50.0)(0, 0) - cplx(0, 1)) < 1e-15);  // (jZ0 - Z0)/(jZ0 + Z0) = j
    }

    TEST_CASE("Z, S and Y conversions round trip") {
        const RationalImpedance z = two_port_example();
        const SampledNetwork zs = sample_rational(z, linspace(1.1e9, 9.1e9, 11));
        const SampledNetwork back = s_to_z(z_to_s(zs, 50.0), 50.0);
        const SampledNetwork yz = y_to_z(z_to_y(zs));
        for (size_t f = 0; f < zs.data.size(); ++f) {
            CHECK(max_rel(back.data[f], zs.data[f]) < 1e-10);
            CHECK(max_rel(yz.data[f], zs.data[f]) < 1e-10);
        }
    }

    TEST_CASE("Maxwell and mutual forms") {
        Mat m(2, 2);
        m << 74 * fF, -4 * fF, -4 * fF, 76 * fF;
        const MaxwellCapacitance c = make_maxwell(m, {"a", "b"});
        const MutualCapacitance mu = maxwell_to_mutual(c);
        CHECK(mu.matrix(0, 0) == Approx(70 * fF));
        CHECK(mu.matrix(0, 1) == Approx(4 * fF));
        CHECK((mutual_to_maxwell(mu).matrix - m).norm() < 1e-27);
        Mat bad = m;
        bad(0, 1) = 1 * fF;
        CHECK_THROWS_AS(make_maxwell(bad, {"a", "b"}), Error);
    }

    TEST_CASE("grid capacitance is banded") {
        const MaxwellCapacitance g = grid_capacitance(2, 3, 100 * fF, 5 * fF);
        CHECK(g.size() == 6);
        CHECK(g.matrix(0, 1) == Approx(-5 * fF));
        CHECK(g.matrix(0, 3) == Approx(-5 * fF));
        CHECK(g.matrix(0, 4) == 0.0);
        CHECK(g.matrix(0, 0) == Approx(110 * fF));
        CHECK(g.matrix(1, 1) == Approx(115 * fF));
    }

    TEST_CASE("rational evaluation and canonical order") {
        const RationalImpedance z = two_port_example();
        CHECK(z.modes[0].omega < z.modes[1].omega);
        for (const auto& m : z.modes) CHECK(m.r.cwiseAbs().maxCoeff() == m.r.maxCoeff());
        const cplx s(0, two_pi * 3e9);
        CMat expect = z.dc_residue.cast<cplx>() / s;
        for (const auto& m : z.modes) expect += s * (m.r * m.r.transpose()).cast<cplx>() / (s * s + m.omega * m.omega);
        CHECK(max_rel(eval_rational(z, s), expect) < 1e-14);
    }

    TEST_CASE("invalid rational model") {
        RationalImpedance z = two_port_example();
        z.dc_residue(0, 0) = -1;
        CHECK_THROWS_AS(z.validate(), Error);
    }
}

TEST_SUITE("touchstone") {
    TEST_CASE("format and parse round trip in every number format") {
        const SampledNetwork s = z_to_s(sample_rational(two_port_example(), linspace(1e9, 9.5e9, 7)), 50.0);
        for (auto fmt : {TouchstoneFormat::RI, TouchstoneFormat::MA, TouchstoneFormat::DB}) {
            const TouchstoneData td = parse_touchstone(format_touchstone(s, fmt, "GHZ", {"note"}), 2);
            REQUIRE(td.network.data.size() == s.data.size());
            CHECK(td.network.freqs[3] == Approx(s.freqs[3]));
            for (size_t f = 0; f < s.data.size(); ++f) CHECK(max_rel(td.network.data[f], s.data[f]) < 1e-9);
        }
    }

    TEST_CASE("two-port ordering is 11 21 12 22") {
        const std::string text = "# MHZ S RI R 50\n100 0.1 0 0.2 0 0.3 0 0.4 0\n";
        const TouchstoneData td = parse_touchstone(text, 2);
        CHECK(td.network.freqs[0] == Approx(1e8));
        CHECK(td.network.data[0](1, 0).real() == Approx(0.2));
        CHECK(td.network.data[0](0, 1).real() == Approx(0.3));
    }

    TEST_CASE("Z data is denormalized by the reference") {
        const TouchstoneData td = parse_touchstone("# HZ Z RI R 25\n1 2 0\n", 1);
        CHECK(td.network.kind == ParamKind::Z);
        CHECK(td.network.data[0](0, 0).real() == Approx(50.0));
    }

    TEST_CASE("port count from extension and malformed input") {
        CHECK(ports_from_extension("a/b.s4p") == 4);
        CHECK_THROWS_AS(ports_from_extension("a.txt"), Error);
        CHECK_THROWS_AS(parse_touchstone("# HZ S RI R 50\n1 0.5\n", 1), Error);
    }
}

TEST_SUITE("synthesis") {
    TEST_CASE("one port with one resonator against the closed form") {
        // mutual: C_p = 100 fF, C_r = 1 F, C_c = 10 fF, L = 1 nH
        const double Cp = 100 * fF, Cr = 1.0, Cc = 10 * fF, L = 1 * nH;
        Mat m(2, 2);
        m << Cp + Cc, -Cc, -Cc, Cr + Cc;
        const CLCascade c = make_cascade(m, 1, Vec::Constant(1, L));
        const RationalImpedance z = cascade_to_rational(c).first;
        const double det = (Cp + Cc) * (Cr + Cc) - Cc * Cc;
        REQUIRE(z.n_modes() == 1);
        CHECK(z.modes[0].omega == Approx(std::sqrt((Cp + Cc) / (det * L))).epsilon(1e-12));
        CHECK(z.dc_residue(0, 0) == Approx(1.0 / (Cp + Cc)).epsilon(1e-12));
        const double r2 = Cc * Cc / (det * (Cp + Cc));  // (C^-1)_PP - 1/C_PP without the cancellation
        CHECK(z.modes[0].r(0) * z.modes[0].r(0) == Approx(r2).epsilon(1e-9));
    }

    TEST_CASE("synthesis round trip preserves the impedance") {
        const RationalImpedance z = two_port_example();
        const CLCascade c = synthesize_cascade(z);
        CHECK(c.n_resonators() == 2);
        CHECK(c.shunt_inductors(0) == Approx(1.0 / (z.modes[0].omega * z.modes[0].omega)));
        const RationalImpedance back = cascade_to_rational(c).first;
        for (double f : {1e9, 4e9, 6e9, 12e9}) {
            const cplx s(0, two_pi * f);
            CHECK(max_rel(eval_rational(back, s), eval_rational(z, s)) < 1e-9);
        }
    }

    TEST_CASE("closed-form inverse capacitance matches numerical inverse") {
        const RationalImpedance z = two_port_example();
        const Mat closed = hamiltonian_cap_inverse(z);
        const Mat numeric = synthesize_cascade(z).capacitance.matrix.inverse();
        CHECK((closed - numeric).norm() / closed.norm() < 1e-8);
        CHECK((closed.bottomRightCorner(2, 2) - Mat::Identity(2, 2)).norm() == 0.0);
    }

    TEST_CASE("random cascade round trip") {
        std::mt19937_64 rng(11);
        const CLCascade c = fixtures::random_cascade(rng, 3, 4);
        const auto [z, tr] = cascade_to_rational(c);
        CHECK(tr.omega.size() == 4);
        const RationalImpedance z2 = cascade_to_rational(synthesize_cascade(z)).first;
        const cplx s(0, two_pi * 2.3e9);
        CHECK(max_rel(eval_rational(z2, s), eval_rational(z, s)) < 1e-9);
    }

    TEST_CASE("singular capacitance of the full Lagrangian") {
        std::mt19937_64 rng(5);
        const RationalImpedance z = fixtures::random_rational(rng, 2, 2, 3e9, 6e9);
        Mat T(2, 2);
        T << 0.3, -1.2, 0.7, 0.4;
        CHECK(full_lagrangian_capacitance(z, T).deficiency == 2);
        const RankCertificate none = full_lagrangian_capacitance(z, Mat::Zero(0, 2));
        CHECK(none.deficiency == 0);
        CHECK(is_spd(none.matrix));
    }

    TEST_CASE("tetrahedral degeneracy") {
        const RationalImpedance z = cascade_to_rational(fixtures::tetrahedral(70 * fF, 4 * fF, 4 * nH)).first;
        REQUIRE(z.n_modes() == 3);
        CHECK(z.modes[1].omega / z.modes[0].omega - 1 < 1e-12);
        CHECK(z.modes[2].omega / z.modes[1].omega - 1 > 1e-4);
    }
}

TEST_SUITE("interconnect") {
    TEST_CASE("joining two capacitors gives their sum") {
        RationalImpedance a, b;
        a.port_names = {"p"};
        a.dc_residue = Mat::Constant(1, 1, 1.0 / (70 * fF));
        b = a;
        b.dc_residue(0, 0) = 1.0 / (30 * fF);
        ConnectionPlan plan;
        plan.networks = {"x", "y"};
        plan.joins = {{"x.p", "y.p"}};
        const RationalImpedance z = connect_rational({a, b}, plan);
        REQUIRE(z.ports() == 1);
        CHECK(z.port_names[0] == joined_name("x.p", "y.p"));
        CHECK(z.dc_residue(0, 0) == Approx(1.0 / (100 * fF)));
    }

    TEST_CASE("merge is independent of join order") {
        const MaxwellCapacitance g = grid_capacitance(2, 3, 100 * fF, 5 * fF);
        std::vector<std::pair<std::string, std::string>> j1 = {{g.names[0], g.names[5]}, {g.names[1], g.names[3]}};
        auto j2 = j1;
        std::swap(j2[0], j2[1]);
        CHECK(merge_capacitance_ports(g, j1).matrix == merge_capacitance_ports(g, j2).matrix);
        const MaxwellCapacitance one = merge_capacitance_ports(g, g.names[0], g.names[1]);
        CHECK(one.size() == 5);
        CHECK(one.matrix.sum() == Approx(g.matrix.sum()));
    }

    TEST_CASE("Filipsson join of a through line and a load") {
        CMat s = CMat::Zero(3, 3);
        s(0, 1) = s(1, 0) = 1.0;  // ideal through
        const cplx gamma(0.3, -0.4);
        s(2, 2) = gamma;
        const CMat out = filipsson_connect(s, 1, 2);
        REQUIRE(out.rows() == 1);
        CHECK(std::abs(out(0, 0) - gamma) < 1e-14);
    }

    TEST_CASE("cascade load with matched termination") {
        CMat sigma(2, 2);
        sigma << cplx(0.1, 0.2), cplx(0.5, 0), cplx(0.5, 0), cplx(-0.2, 0.1);
        const CMat out = cascade_load_s(sigma, CMat::Zero(1, 1));
        CHECK(std::abs(out(0, 0) - sigma(0, 0)) < 1e-15);
    }

    TEST_CASE("bad plans are rejected") {
        RationalImpedance a = two_port_example();
        ConnectionPlan plan;
        plan.networks = {"x", "y"};
        plan.joins = {{"x.A", "x.A"}};
        CHECK_THROWS_AS(connect_rational({a, a}, plan), Error);
        plan.joins = {{"x.A", "y.nope"}};
        CHECK_THROWS_AS(connect_rational({a, a}, plan), Error);
    }
}

TEST_SUITE("distributed") {
    TEST_CASE("quarter-wave line ABCD") {
        const double L = 4.38e-7, C = 1.59e-10, len = 0.012;
        const double z0 = std::sqrt(L / C), v = 1.0 / std::sqrt(L * C);
        const double omega = two_pi * v / (4 * len);
        const auto abcd = element_abcd(ChainElement::line(L, C, len), omega);
        CHECK(std::abs(abcd(0, 0)) < 1e-12);
        CHECK(std::abs(abcd(0, 1) - cplx(0, z0)) < 1e-9 * z0);
    }

    TEST_CASE("shunt capacitor two-port impedance") {
        TwoPortChain ch;
        ch.elements = {ChainElement::shunt(70 * fF)};
        const SampledNetwork z = sweep_chain(ch, {5e9});
        const cplx zc = 1.0 / cplx(0, two_pi * 5e9 * 70 * fF);
        CHECK(std::abs(z.data[0](0, 0) - zc) < 1e-9 * std::abs(zc));
        CHECK(std::abs(z.data[0](0, 1) - zc) < 1e-9 * std::abs(zc));
    }

    TEST_CASE("analytic line poles are k pi / tau") {
        const fixtures::TLCoupler p;
        const auto m = make_analytic_tl(p.c_series, p.c_series, p.L_per_m, p.C_per_m, p.length, 6);
        const double tau = p.length * std::sqrt(p.L_per_m * p.C_per_m);
        CHECK(m.omega(3) == Approx(3 * std::numbers::pi / tau));
        const RationalImpedance z = analytic_tl_rational(m);
        CHECK(z.n_modes() == 6);
        // residue rows alternate in sign on the second port
        for (int k = 0; k + 1 < z.n_modes(); ++k) CHECK(z.modes[k].r(1) * z.modes[k + 1].r(1) < 0);
    }

    TEST_CASE("truncation error falls with order") {
        const fixtures::TLCoupler p;
        TwoPortChain bare;
        bare.elements = {ChainElement::series_capacitor(p.c_series), ChainElement::line(p.L_per_m, p.C_per_m, p.length),
                         ChainElement::series_capacitor(p.c_series)};
        const double f = 3e9;
        const CMat ref = sweep_chain(bare, {f}).data[0];
        double prev = 1e300;
        for (int K : {12, 48, 200}) {
            const auto m = make_analytic_tl(p.c_series, p.c_series, p.L_per_m, p.C_per_m, p.length, K);
            const double err = (eval_rational(analytic_tl_rational(m), cplx(0, two_pi * f)) - ref).norm() / ref.norm();
            CHECK(err < prev);
            prev = err;
        }
        CHECK(prev < 1e-3);
    }

    TEST_CASE("port shunts diverge linearly") {
        const fixtures::TLCoupler p;
        const Mat d = tl_cascade_divergence(make_analytic_tl(p.c_series, p.c_series, p.L_per_m, p.C_per_m, p.length, 1), 40);
        CHECK(std::abs(d(39, 0) / d(9, 0)) == Approx(4.0).epsilon(1e-3));
    }
}

TEST_SUITE("json_io") {
    TEST_CASE("rational model round trip") {
        const RationalImpedance z = two_port_example();
        const RationalImpedance back = json::parse_rational(json::dump(z));
        CHECK(back.port_names == z.port_names);
        CHECK((back.dc_residue - z.dc_residue).norm() == Approx(0.0));
        CHECK(back.modes[1].r == z.modes[1].r);
    }

    TEST_CASE("cascade, chain, spec and plan round trip") {
        const CLCascade c = fixtures::decay_circuit(false);
        const CLCascade cb = json::parse_cascade(json::dump(c));
        CHECK(cb.capacitance.matrix == c.capacitance.matrix);
        CHECK(cb.port_names() == c.port_names());

        const TwoPortChain ch = json::parse_chain(json::dump(fixtures::tl_coupler_chain()));
        CHECK(ch.elements.size() == 5);
        CHECK(ch.elements[2].type == ChainElement::Type::tline);

        const TransmonSpec s = json::parse_transmon_spec(
            R"({"schema":"transmon_spec.v1","junctions":[{"port":"Q1","L_J":10e-9},{"port":"QC","E_J":2e-23}],"couplers":["QC"]})");
        CHECK(s.junctions[0].E_J == Approx(ej_from_inductance(10e-9)));
        CHECK(s.couplers == std::vector<std::string>{"QC"});

        json::PlanFile pf;
        pf.plan.networks = {"a", "b"};
        pf.plan.joins = {{"a.P1", "b.P2"}};
        pf.paths = {"a.json", "b.json"};
        const json::PlanFile pb = json::parse_plan(json::dump(pf));
        CHECK(pb.plan.joins == pf.plan.joins);
        CHECK(pb.paths == pf.paths);
    }

    TEST_CASE("schema mismatch and malformed documents") {
        const std::string m = json::dump(make_maxwell(Mat::Identity(1, 1) * 1e-13, {"a"}));
        CHECK_THROWS_AS(json::parse_rational(m), Error);
        CHECK_THROWS_AS(json::parse_rational("{"), Error);
        CHECK_THROWS_AS(json::parse_chain(R"({"schema":"chain.v1","elements":[{"type":"bogus"}]})"), Error);
    }
}
