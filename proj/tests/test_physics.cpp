// vfit, qham, decay and the command line
#include <doctest.h>

#include "cli_util.hpp"
#include "qnet/decay.hpp"
#include "qnet/fixtures.hpp"
#include "qnet/qham.hpp"
#include "qnet/vfit.hpp"

#include <cstdlib>
#include <filesystem>
#include <random>

using namespace qnet;
using doctest::Approx;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double fF = 1e-15, nH = 1e-9, GHz = 1e9, MHz = 1e6;

// Two qubits and one mode, filled directly.
HamiltonianParams toy_params(double g1, double g2, double g12) {
    HamiltonianParams hp;
    hp.qubit_names = {"A", "B"};
    hp.mode_names = {"R"};
    hp.omega_J = Vec(2);
    hp.omega_J << two_pi * 4.0 * GHz, two_pi * 4.2 * GHz;
    hp.beta_J = Vec::Constant(2, -two_pi * 200 * MHz);
    hp.E_J = hp.E_C = Vec::Ones(2);
    hp.omega_R = Vec::Constant(1, two_pi * 6 * GHz);
    hp.alpha_R = Vec::Zero(1);
    hp.E_L = Vec::Ones(1);
    hp.g_qq = Mat::Zero(2, 2);
    hp.g_qq(0, 1) = hp.g_qq(1, 0) = g12;
    hp.g_qr = Mat(2, 1);
    hp.g_qr << g1, g2;
    hp.g_rr = Mat::Zero(1, 1);
    hp.eff_C = Vec::Ones(3);
    hp.cap_inverse = Mat::Identity(3, 3);
    return hp;
}

}  // namespace

TEST_SUITE("vfit") {
    TEST_CASE("exact lossless data is recovered") {
        std::mt19937_64 rng(21);
        const RationalImpedance truth = fixtures::random_rational(rng, 2, 3, 3 * GHz, 7 * GHz);
        const SampledNetwork data = sample_rational(truth, linspace(2 * GHz, 8 * GHz, 600));
        FitConfig cfg;
        cfg.n_pole_pairs = 3;
        cfg.band_lo_hz = 2 * GHz;
        cfg.band_hi_hz = 8 * GHz;
        FitReport rep;
        const RationalImpedance z = fit(data, cfg, &rep);
        REQUIRE(z.n_modes() == 3);
        for (int k = 0; k < 3; ++k) CHECK(z.modes[k].omega == Approx(truth.modes[k].omega).epsilon(1e-8));
        CHECK((z.dc_residue - truth.dc_residue).norm() / truth.dc_residue.norm() < 1e-6);
        CHECK(rep.converged);
        CHECK(logmag_rms(z, data) < 1e-6);
        CHECK(z.port_names == truth.port_names);
    }

    TEST_CASE("initial poles span the band") {
        FitConfig cfg;
        cfg.n_pole_pairs = 5;
        cfg.band_lo_hz = 1 * GHz;
        cfg.band_hi_hz = 11 * GHz;
        const auto p = initial_poles(cfg);
        REQUIRE(p.size() == 5);
        for (const auto& x : p) {
            CHECK(x.real() < 0);
            CHECK(x.imag() >= two_pi * 1 * GHz * 0.999);
            CHECK(x.imag() <= two_pi * 11 * GHz * 1.001);
        }
    }

    TEST_CASE("lossless projection keeps rank-one residues") {
        GeneralRational gr;
        const double w = two_pi * 5 * GHz;
        gr.poles = {cplx(-1e-3 * w, w)};
        Vec r(2);
        r << 3e5, -2e5;
        // s r r^T / (s^2 + w^2) = (R/2)/(s - jw) + (R/2)/(s + jw)
        gr.residues = {(0.5 * r * r.transpose()).cast<cplx>()};
        gr.h = Mat::Identity(2, 2) * 1e13;
        gr.d = gr.e = Mat::Zero(2, 2);
        FitConfig cfg;
        cfg.band_lo_hz = 1 * GHz;
        cfg.band_hi_hz = 10 * GHz;
        const RationalImpedance z = enforce_lossless(gr, cfg);
        REQUIRE(z.n_modes() == 1);
        CHECK(z.modes[0].omega == Approx(gr.poles[0].imag()).epsilon(1e-12));
        CHECK(std::abs(z.modes[0].r(0)) == Approx(3e5).epsilon(1e-9));
        CHECK(z.dc_residue(0, 0) == Approx(1e13));
    }

    TEST_CASE("configuration errors") {
        FitConfig cfg;
        cfg.band_lo_hz = 5 * GHz;
        cfg.band_hi_hz = 1 * GHz;
        CHECK_THROWS_AS(cfg.validate(), Error);
        cfg.band_hi_hz = 6 * GHz;
        cfg.n_pole_pairs = 0;
        CHECK_THROWS_AS(cfg.validate(), Error);
    }
}

TEST_SUITE("qham") {
    TEST_CASE("junction energy relations") {
        const double ec = phys.h * 200 * MHz;
        const double w = two_pi * 4.5 * GHz;
        const double ej = ej_for_frequency(w, ec);
        CHECK(std::sqrt(8 * ej * ec) - ec == Approx(phys.h_bar * w));
        CHECK(ej_from_inductance(lj_from_ej(ej)) == Approx(ej));
        CHECK(ej_from_inductance(10 * nH) == Approx(std::pow(phys.Phi0 / two_pi, 2) / (10 * nH)));
    }

    TEST_CASE("single transmon on a capacitor") {
        RationalImpedance z;
        z.port_names = {"Q"};
        z.dc_residue = Mat::Constant(1, 1, 1.0 / (80 * fF));
        TransmonSpec spec;
        spec.junctions = {{"Q", ej_from_inductance(12 * nH)}};
        const HamiltonianParams hp = hamiltonian_params(z, spec);
        const double ec = phys.e_charge * phys.e_charge / (2 * 80 * fF);
        CHECK(hp.E_C(0) == Approx(ec));
        CHECK(hp.omega_J(0) == Approx((std::sqrt(8 * hp.E_J(0) * ec) - ec) / phys.h_bar));
        CHECK(hp.beta_J(0) == Approx(-ec / phys.h_bar));
    }

    TEST_CASE("frequency targeting") {
        const RationalImpedance z = fixtures::random_rational(*std::make_unique<std::mt19937_64>(2), 2, 2, 5 * GHz, 8 * GHz);
        TransmonSpec spec;
        spec.junctions = {{"P1", 1.0}, {"P2", 1.0}};
        spec = tune_junctions(junction_charging_energies(z, spec), spec, {{"P1", two_pi * 4 * GHz}, {"P2", two_pi * 4.4 * GHz}});
        const HamiltonianParams hp = hamiltonian_params(z, spec);
        CHECK(hp.omega_J(0) == Approx(two_pi * 4 * GHz));
        CHECK(hp.omega_J(1) == Approx(two_pi * 4.4 * GHz));
        CHECK(hp.n_modes() == 2);
        CHECK(hp.g_rr.norm() == 0.0);
    }

    TEST_CASE("effective coupling against the hand-evaluated formula") {
        const double g1 = two_pi * 60 * MHz, g2 = two_pi * 50 * MHz, g12 = two_pi * 1 * MHz;
        const HamiltonianParams hp = toy_params(g1, g2, g12);
        const EffectiveParams ep = effective_params(hp);
        const double w1 = hp.omega_J(0), w2 = hp.omega_J(1), wr = hp.omega_R(0);
        const double expect = g12 + 0.5 * g1 * g2 * (1 / (w1 - wr) + 1 / (w2 - wr) - 1 / (w1 + wr) - 1 / (w2 + wr));
        CHECK(ep.g_eff_qq(0, 1) == Approx(expect));
        const double b = hp.beta_J(0), d = w1 - wr, s = w1 + wr;
        CHECK(ep.chi(0, 0) == Approx(2 * g1 * g1 * b * (1 / (d * d) + 1 / (s * s))));
        CHECK(ep.max_g_over_delta == Approx(std::max(std::abs(g1 / (w1 - wr)), std::abs(g2 / (w2 - wr)))));
    }

    TEST_CASE("effective coupling against the Fock oracle") {
        const HamiltonianParams hp = toy_params(two_pi * 40 * MHz, two_pi * 40 * MHz, 0.0);
        HamiltonianParams res = hp;
        res.omega_J(1) = res.omega_J(0);
        const double formula = effective_params(res).g_eff_qq(0, 1);
        const ResonantOracle o = oracle_resonant_coupling(res, "A", "B", two_pi * 50 * MHz);
        CHECK(std::abs(o.coupling - formula) < 0.05 * std::abs(formula));
    }

    TEST_CASE("Fock Hamiltonian structure") {
        const HamiltonianParams hp = toy_params(two_pi * 40 * MHz, two_pi * 30 * MHz, 0.0);
        const FockModel fm = fock_hamiltonian(hp, 3);
        CHECK(fm.dim == 27);
        CHECK((fm.H - fm.H.transpose()).norm() == 0.0);
        const auto idx = fm.index_of({1, 0, 2});
        CHECK(fm.occupation(idx) == std::vector<int>{1, 0, 2});
        CHECK_THROWS_AS(fock_hamiltonian(hp, 3, 20), Error);
    }

    TEST_CASE("dispersive shift in the weak-anharmonicity limit") {
        HamiltonianParams hp = toy_params(two_pi * 20 * MHz, 0.0, 0.0);
        hp.beta_J(0) = -two_pi * 20 * MHz;  // |beta/Delta| = 0.01
        const double chi = effective_params(hp).chi(0, 0);
        const double oracle = oracle_dispersive_shift(hp, 0, 0, 5);
        CHECK(chi == Approx(oracle).epsilon(0.03));
    }

    TEST_CASE("couplers move to the mode block") {
        HamiltonianParams hp = toy_params(two_pi * 40 * MHz, two_pi * 30 * MHz, two_pi * 2 * MHz);
        const HamiltonianParams rg = regroup_couplers(hp, {"B"});
        CHECK(rg.n_qubits() == 1);
        CHECK(rg.n_modes() == 2);
        CHECK(rg.mode_names[0] == "B");
        CHECK(rg.alpha_R(0) == hp.beta_J(1));
        CHECK(rg.g_qr(0, 0) == hp.g_qq(0, 1));
        CHECK(rg.g_rr(0, 1) == hp.g_qr(1, 0));
        CHECK_THROWS_AS(regroup_couplers(hp, {"nope"}), Error);
    }
}

TEST_SUITE("decay") {
    TEST_CASE("parallel RLC poles and rates") {
        const double C = 80 * fF, L = 10 * nH, R = 5e4;
        LossyNetwork net;
        net.names = {"Q"};
        net.C = Mat::Constant(1, 1, C);
        net.M = Mat::Constant(1, 1, 1 / L);
        net.G = Mat::Constant(1, 1, 1 / R);
        net.junction_nodes = {0};
        const LossyModeSet set = lossy_mode_poles(net);
        REQUIRE(set.n_pairs() == 1);
        const double a = 1 / (2 * R * C);
        CHECK(set.poles[0].real() == Approx(-a));
        CHECK(set.poles[0].imag() == Approx(std::sqrt(1 / (L * C) - a * a)));
        CHECK(set.poles[1] == std::conj(set.poles[0]));
        CHECK(sum_rule_kappa(net, set, 0) == Approx(1 / (R * C)));
        CHECK(classical_t1(C, 1 / R) == Approx(R * C));
        CHECK(driving_point_admittance(net, "Q", 1e10).real() == Approx(1 / R));
        CHECK(set.attribution[0] == "Q");
    }

    TEST_CASE("decay fixture poles are attributed and on the impedance peaks") {
        const CLCascade c = fixtures::decay_circuit(false);
        const LossyNetwork net = make_lossy_network(c, fixtures::decay_loss());
        CHECK(net.size() == 9);
        const LossyModeSet set = lossy_mode_poles(net);
        REQUIRE(set.n_pairs() == 5);
        for (double k : set.kappa) CHECK(k > 0);
        const int q1 = set.dominant_pole("Q1");
        CHECK(set.attribution[q1] == "Q1");
        const GridPeak gp = pole_grid_peak(net, set.poles[q1], net.index_of("Q1"), 60);
        CHECK(std::abs(gp.di) <= 1);
        CHECK(std::abs(gp.dj) <= 1);
    }

    TEST_CASE("open ports are eliminated") {
        const CLCascade c = fixtures::decay_circuit(false);
        LossSpec loss = fixtures::decay_loss();
        loss.external_ports.pop_back();  // ED2 left open
        const LossyNetwork net = make_lossy_network(c, loss);
        CHECK(net.size() == 8);
        CHECK_THROWS_AS(net.index_of("ED2"), Error);
    }

    TEST_CASE("admittance view and T1 estimates") {
        const CLCascade c = fixtures::decay_circuit(false);
        const LossSpec loss = fixtures::decay_loss();
        const auto freqs = linspace(3 * GHz, 6 * GHz, 31);
        const SampledNetwork y = lossy_port_admittance(c, loss, false, freqs);
        CHECK(y.port_names == std::vector<std::string>{"Q1", "Q2"});
        for (const auto& m : y.data) CHECK(driving_point_admittance(m, 0).real() > 0);
        // without junction inductors the other transmon no longer resonates near its own frequency
        const LossyModeSet set = lossy_mode_poles(c, loss);
        const std::vector<double> f2 = {set.omega[set.dominant_pole("Q2")] / two_pi};
        const double with = driving_point_admittance(lossy_port_admittance(c, loss, false, f2).data[0], 0).real();
        const double without = driving_point_admittance(lossy_port_admittance(c, loss, true, f2).data[0], 0).real();
        CHECK(std::abs(with / without - 1) > 0.1);
    }

    TEST_CASE("inductance sweep keeps mode labels") {
        const CLCascade c = fixtures::decay_circuit(false);
        const auto sets = sweep_junction_inductance(c, fixtures::decay_loss(), "Q1", linspace(16 * nH, 20 * nH, 5));
        REQUIRE(sets.size() == 5);
        for (const auto& s : sets) {
            std::vector<int> ids = s.mode_id;
            std::sort(ids.begin(), ids.end());
            CHECK(std::unique(ids.begin(), ids.end()) - ids.begin() == s.n_pairs());
        }
        CHECK_THROWS_AS(sweep_junction_inductance(c, fixtures::decay_loss(), "ER1", {1e-9}), Error);
    }
}

TEST_SUITE("cli") {
    TEST_CASE("SI parsing") {
        CHECK(cli::parse_si("4GHz") == Approx(4e9));
        CHECK(cli::parse_si("18nH") == Approx(18e-9));
        CHECK(cli::parse_si("50") == 50.0);
        CHECK(cli::parse_si("1.5e9") == 1.5e9);
        CHECK(cli::parse_si("250M") == Approx(2.5e8));
        CHECK_THROWS_AS(cli::parse_si("4 bananas"), Error);
        CHECK_THROWS_AS(cli::parse_si("GHz"), Error);
    }

    TEST_CASE("ranges and assignments") {
        const cli::Range r = cli::parse_range("10nH:14nH:5", true);
        CHECK(r.lo == Approx(10e-9));
        CHECK(r.points == 5);
        CHECK_THROWS_AS(cli::parse_range("5:1", false), Error);
        CHECK_THROWS_AS(cli::parse_range("1:5", true), Error);
        const auto a = cli::parse_assignments({"Q1=4GHz,Q2=4.2GHz", "QC=6GHz"});
        CHECK(a.size() == 3);
        CHECK(a.at("Q2") == Approx(4.2e9));
        CHECK_THROWS_AS(cli::parse_assignments({"=3"}), Error);
    }

    TEST_CASE("hash and formatting") {
        CHECK(cli::hex64(cli::fnv1a64("")) == "cbf29ce484222325");
        CHECK(cli::hex64(cli::fnv1a64("a")) == "af63dc4c8601ec8c");
        CHECK(cli::format_double(0.1) == "0.1");
    }

#ifdef QNET_CLI_PATH
    TEST_CASE("exit codes") {
        const std::string exe = QNET_CLI_PATH;
        const auto tmp = std::filesystem::temp_directory_path() / "qnet_cli_test";
        std::filesystem::create_directories(tmp);
        auto run = [&](const std::string& args) {
            const int st = std::system((exe + " " + args + " > " + (tmp / "out.txt").string() + " 2>&1").c_str());
            return WEXITSTATUS(st);
        };
        CHECK(run("--help") == 0);
        CHECK(run("synth --model " + (tmp / "missing.json").string()) == 2);
        CHECK(run("sweep --chain x.json") == 2);
        CHECK(run("analyze --random 2,3 --seed 4 --out " + (tmp / "m.json").string()) == 0);
        CHECK(run("synth --model " + (tmp / "m.json").string()) == 0);
        CHECK(run("fit --in " + (tmp / "m.json").string() + " --band 1GHz:2GHz") == 2);
    }
#endif
}
