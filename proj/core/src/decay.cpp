#include "qnet/decay.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace qnet {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

Mat select(const Mat& m, const std::vector<int>& r, const std::vector<int>& c) {
    Mat out(r.size(), c.size());
    for (size_t i = 0; i < r.size(); ++i)
        for (size_t j = 0; j < c.size(); ++j) out(i, j) = m(r[i], c[j]);
    return out;
}

CMat nodal_admittance(const LossyNetwork& net, cplx s) {
    return s * net.C.cast<cplx>() + net.M.cast<cplx>() / s + net.G.cast<cplx>();
}

// Flux vector spanning the null space of s^2 C + s G + M.
CVec null_vector(const LossyNetwork& net, cplx s) {
    const CVec d = net.C.diagonal().cwiseSqrt().cwiseInverse().cast<cplx>();
    const CMat K = d.asDiagonal() * (s * s * net.C.cast<cplx>() + s * net.G.cast<cplx>() + net.M.cast<cplx>()) *
                   d.asDiagonal();
    Eigen::JacobiSVD<CMat> svd(K, Eigen::ComputeFullV);
    return d.asDiagonal() * svd.matrixV().col(K.cols() - 1);
}

}  // namespace

void LossSpec::validate() const {
    std::set<std::string> seen;
    for (const auto& e : external_ports) {
        if (!(e.resistance > 0)) fail_validation("loss spec: resistance must be positive at " + e.port);
        if (!seen.insert(e.port).second) fail_validation("loss spec: port listed twice: " + e.port);
    }
    for (const auto& j : junction_ports) {
        if (!(j.L_J > 0)) fail_validation("loss spec: inductance must be positive at " + j.port);
        if (!seen.insert(j.port).second) fail_validation("loss spec: port listed twice: " + j.port);
    }
}

double LossSpec::inductance(const std::string& port) const {
    for (const auto& j : junction_ports)
        if (j.port == port) return j.L_J;
    fail_validation("loss spec: no junction at " + port);
}

void LossSpec::set_inductance(const std::string& port, double L) {
    for (auto& j : junction_ports)
        if (j.port == port) {
            j.L_J = L;
            return;
        }
    fail_validation("loss spec: no junction at " + port);
}

int LossyNetwork::index_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) fail_validation("lossy network: unknown node " + name);
    return static_cast<int>(it - names.begin());
}

LossyNetwork make_lossy_network(const CLCascade& c, const LossSpec& loss, bool include_junction_inductors) {
    c.validate();
    loss.validate();
    const auto& names = c.capacitance.names;
    const int n = c.capacitance.size();
    std::vector<int> role(n, 0);  // 0 open port, 1 junction, 2 external, 3 resonator
    std::vector<double> value(n, 0.0);
    auto port_of = [&](const std::string& p) {
        auto it = std::find(names.begin(), names.begin() + c.n_ports, p);
        if (it == names.begin() + c.n_ports) fail_validation("loss spec: port " + p + " not in network");
        return static_cast<int>(it - names.begin());
    };
    for (const auto& j : loss.junction_ports) {
        const int i = port_of(j.port);
        role[i] = 1;
        value[i] = j.L_J;
    }
    for (const auto& e : loss.external_ports) {
        const int i = port_of(e.port);
        role[i] = 2;
        value[i] = e.resistance;
    }
    for (int k = 0; k < c.n_resonators(); ++k) {
        role[c.n_ports + k] = 3;
        value[c.n_ports + k] = c.shunt_inductors(k);
    }
    std::vector<int> keep, open;
    for (int i = 0; i < n; ++i) (role[i] == 0 ? open : keep).push_back(i);

    const Mat& C = c.capacitance.matrix;
    LossyNetwork net;
    net.C = select(C, keep, keep);
    if (!open.empty()) {
        // open nodes carry no charge
        const Mat coo = select(C, open, open);
        const Mat cok = select(C, open, keep);
        net.C -= cok.transpose() * Eigen::LLT<Mat>(coo).solve(cok);
        net.C = 0.5 * (net.C + net.C.transpose());
    }
    const auto m = static_cast<Eigen::Index>(keep.size());
    net.M = Mat::Zero(m, m);
    net.G = Mat::Zero(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        const int i = keep[a];
        net.names.push_back(names[i]);
        switch (role[i]) {
            case 1:
                net.junction_nodes.push_back(static_cast<int>(a));
                if (include_junction_inductors) net.M(a, a) = 1.0 / value[i];
                break;
            case 2:
                net.external_nodes.push_back(static_cast<int>(a));
                net.G(a, a) = 1.0 / value[i];
                break;
            default:
                net.resonator_nodes.push_back(static_cast<int>(a));
                net.M(a, a) = 1.0 / value[i];
        }
    }
    if (!is_spd(net.C)) fail_numerical("lossy network: capacitance not positive definite");
    return net;
}

LossyNetwork make_lossy_network(const RationalImpedance& z, const LossSpec& loss, bool include_junction_inductors) {
    return make_lossy_network(synthesize_cascade(z), loss, include_junction_inductors);
}

CVec LossyModeSet::weighted_flux(int pole) const {
    CVec v = node_weight.cast<cplx>().asDiagonal() * flux.col(pole);
    const double nv = v.norm();
    return nv > 0 ? CVec(v / nv) : v;
}

double LossyModeSet::participation(int pole, int node) const {
    return std::norm(weighted_flux(pole)(node));
}

int LossyModeSet::dominant_pole(const std::string& node) const {
    auto it = std::find(node_names.begin(), node_names.end(), node);
    if (it == node_names.end()) fail_validation("mode set: unknown node " + node);
    const int n = static_cast<int>(it - node_names.begin());
    int best = -1;
    double bp = -1.0;
    for (int p = 0; p < static_cast<int>(poles.size()); p += 2) {
        const double v = participation(p, n);
        if (v > bp) {
            bp = v;
            best = p;
        }
    }
    if (best < 0) fail_numerical("mode set: no oscillating modes");
    return best;
}

LossyModeSet lossy_mode_poles(const LossyNetwork& net) {
    const int n = net.size();
    // symmetric scaling by diag(C)^-1/2: synthesized cascades mix fF port nodes with unit resonator nodes
    const Vec d = net.C.diagonal().cwiseSqrt().cwiseInverse();
    const Mat Cs = d.asDiagonal() * net.C * d.asDiagonal();
    // and time by w0 so both halves of the companion matrix are O(1)
    const Mat Ms = d.asDiagonal() * net.M * d.asDiagonal();
    const double w0 = std::max(std::sqrt(Ms.diagonal().maxCoeff()), 1.0);
    Mat A = Mat::Zero(2 * n, 2 * n);
    Eigen::LLT<Mat> llt(Cs);
    A.topRightCorner(n, n).setIdentity();
    A.bottomLeftCorner(n, n) = -llt.solve(Ms) / (w0 * w0);
    A.bottomRightCorner(n, n) = -llt.solve(Mat(d.asDiagonal() * net.G * d.asDiagonal())) / w0;

    LossyModeSet set;
    set.node_names = net.names;
    set.node_weight = net.C.diagonal().cwiseSqrt();
    Eigen::EigenSolver<Mat> es(A, true);
    CVec ev;
    CMat V;
    bool fallback = es.info() != Eigen::Success;
    if (!fallback) {
        ev = es.eigenvalues() * w0;
        V = es.eigenvectors();
        Eigen::JacobiSVD<CMat> svd(V);
        const Vec sv = svd.singularValues();
        if (!(sv(sv.size() - 1) > 1e-12 * sv(0))) fallback = true;
    }
    if (fallback) {
        set.warnings.push_back("eigenvector matrix near-defective; Schur eigenvalues with null-space vectors used");
        Eigen::ComplexSchur<CMat> cs(A.cast<cplx>());
        ev = cs.matrixT().diagonal() * w0;
    }

    int n_inductive = 0;
    for (int i = 0; i < n; ++i) n_inductive += net.M(i, i) > 0 ? 1 : 0;

    std::vector<std::pair<cplx, CVec>> upper;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const cplx s = ev(i);
        // zero modes of uninductive nodes come out as tiny complex pairs
        if (s.imag() <= 1e-9 * std::abs(s) || std::abs(s) < 1e-8 * w0) continue;
        CVec v = fallback ? null_vector(net, s) : CVec(d.cast<cplx>().asDiagonal() * V.col(i).head(n));
        v /= v.norm();
        upper.emplace_back(s, v);
    }
    std::sort(upper.begin(), upper.end(), [](const auto& a, const auto& b) { return a.first.imag() < b.first.imag(); });
    if (static_cast<int>(upper.size()) != n_inductive) {
        std::ostringstream os;
        os << "found " << upper.size() << " oscillating pole pairs for " << n_inductive << " inductive branches";
        set.warnings.push_back(os.str());
    }

    set.flux.resize(n, 2 * static_cast<Eigen::Index>(upper.size()));
    for (size_t k = 0; k < upper.size(); ++k) {
        const auto& [s, v] = upper[k];
        set.poles.push_back(s);
        set.poles.push_back(std::conj(s));
        set.flux.col(2 * k) = v;
        set.flux.col(2 * k + 1) = v.conjugate();
        for (int c = 0; c < 2; ++c) {
            set.kappa.push_back(-2.0 * s.real());
            set.omega.push_back(s.imag());
            set.mode_id.push_back(static_cast<int>(k));
            set.discontinuity.push_back(false);
        }
        // junction when its node holds more than half of the weighted flux norm, otherwise the dominant resonator
        const CVec vw = set.weighted_flux(static_cast<int>(2 * k));
        std::string who;
        for (int j : net.junction_nodes)
            if (std::norm(vw(j)) > 0.5) who = net.names[j];
        if (who.empty()) {
            const auto& pool = net.resonator_nodes;
            int best = -1;
            double bp = -1;
            for (int i = 0; i < n; ++i) {
                if (!pool.empty() && std::find(pool.begin(), pool.end(), i) == pool.end()) continue;
                if (std::norm(vw(i)) > bp) {
                    bp = std::norm(vw(i));
                    best = i;
                }
            }
            who = net.names[best];
        }
        set.attribution.push_back(who);
        set.attribution.push_back(who);
    }
    return set;
}

LossyModeSet lossy_mode_poles(const CLCascade& c, const LossSpec& loss) {
    return lossy_mode_poles(make_lossy_network(c, loss, true));
}

double sum_rule_kappa(const LossyNetwork& net, const LossyModeSet& set, int pole) {
    const CVec v = set.poles[pole] * set.flux.col(pole);
    const double num = (v.adjoint() * net.G.cast<cplx>() * v)(0).real();
    const double den = (v.adjoint() * net.C.cast<cplx>() * v)(0).real();
    return num / den;
}

cplx shunted_impedance(const LossyNetwork& net, int node, cplx s) {
    CVec e = CVec::Zero(net.size());
    e(node) = 1.0;
    return nodal_admittance(net, s).partialPivLu().solve(e)(node);
}

GridPeak pole_grid_peak(const LossyNetwork& net, cplx pole, int node, int n, double half_width_kappas) {
    if (n < 3) fail_validation("pole_grid_peak: grid too small");
    const double kappa = -2.0 * pole.real();
    if (!(kappa > 0)) fail_validation("pole_grid_peak: pole has no damping");
    const double hw = half_width_kappas * kappa;
    GridPeak gp;
    gp.cell_sigma = gp.cell_omega = 2.0 * hw / (n - 1);
    const double s0 = pole.real() - hw, w0 = pole.imag() - hw;
    double best = -1.0;
    int bi = 0, bj = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx s(s0 + i * gp.cell_sigma, w0 + j * gp.cell_omega);
            const double a = std::abs(shunted_impedance(net, node, s));
            if (a > best) {
                best = a;
                bi = i;
                bj = j;
            }
        }
    const int pi = static_cast<int>(std::lround((pole.real() - s0) / gp.cell_sigma));
    const int pj = static_cast<int>(std::lround((pole.imag() - w0) / gp.cell_omega));
    gp.di = bi - pi;
    gp.dj = bj - pj;
    return gp;
}

SampledNetwork lossy_port_admittance(const LossyNetwork& net, const std::vector<double>& freqs_hz) {
    const std::vector<int>& jn = net.junction_nodes;
    if (jn.empty()) fail_validation("lossy_port_admittance: no junction ports");
    std::vector<int> rest;
    for (int i = 0; i < net.size(); ++i)
        if (std::find(jn.begin(), jn.end(), i) == jn.end()) rest.push_back(i);
    SampledNetwork y;
    y.kind = ParamKind::Y;
    y.reciprocal = true;
    for (int j : jn) y.port_names.push_back(net.names[j]);
    for (double f : freqs_hz) {
        if (!(f > 0)) fail_validation("lossy_port_admittance: frequencies must be positive");
        const CMat Yn = nodal_admittance(net, cplx(0.0, two_pi * f));
        CMat yj(jn.size(), jn.size());
        for (size_t a = 0; a < jn.size(); ++a)
            for (size_t b = 0; b < jn.size(); ++b) yj(a, b) = Yn(jn[a], jn[b]);
        if (!rest.empty()) {
            CMat yrr(rest.size(), rest.size()), yrj(rest.size(), jn.size());
            for (size_t a = 0; a < rest.size(); ++a) {
                for (size_t b = 0; b < rest.size(); ++b) yrr(a, b) = Yn(rest[a], rest[b]);
                for (size_t b = 0; b < jn.size(); ++b) yrj(a, b) = Yn(rest[a], jn[b]);
            }
            Eigen::PartialPivLU<CMat> lu(yrr);
            if (!(lu.rcond() > 1e-15)) {
                std::ostringstream os;
                os << "lossy_port_admittance: singular internal block at " << f << " Hz";
                fail_numerical(os.str());
            }
            yj -= yrj.transpose() * lu.solve(yrj);
        }
        y.freqs.push_back(f);
        y.data.push_back(0.5 * (yj + yj.transpose()));
    }
    return y;
}

SampledNetwork lossy_port_admittance(const CLCascade& c, const LossSpec& loss, bool omit_junction_inductors,
                                     const std::vector<double>& freqs_hz) {
    return lossy_port_admittance(make_lossy_network(c, loss, !omit_junction_inductors), freqs_hz);
}

SampledNetwork lossy_port_admittance(const RationalImpedance& z, const LossSpec& loss, bool omit_junction_inductors,
                                     const std::vector<double>& freqs_hz) {
    return lossy_port_admittance(make_lossy_network(z, loss, !omit_junction_inductors), freqs_hz);
}

cplx driving_point_admittance(const CMat& y, int i) {
    if (y.rows() == 1) return y(0, 0);
    CVec e = CVec::Zero(y.rows());
    e(i) = 1.0;
    return 1.0 / y.partialPivLu().solve(e)(i);
}

cplx driving_point_admittance(const LossyNetwork& net, const std::string& port, double omega) {
    return 1.0 / shunted_impedance(net, net.index_of(port), cplx(0.0, omega));
}

double classical_t1(double capacitance, double re_admittance) {
    if (!(re_admittance > 0)) fail_numerical("classical_t1: nonpositive Re(Y), admittance not physical");
    return capacitance / re_admittance;
}

Vec t1_estimates(const HamiltonianParams& hp, const SampledNetwork& y, const Vec& capacitance) {
    if (y.kind != ParamKind::Y) fail_validation("t1_estimates: admittance data required");
    if (capacitance.size() != hp.n_qubits()) fail_validation("t1_estimates: one capacitance per qubit required");
    if (y.freqs.size() < 2) fail_validation("t1_estimates: at least two samples required");
    Vec out(hp.n_qubits());
    for (int q = 0; q < hp.n_qubits(); ++q) {
        auto it = std::find(y.port_names.begin(), y.port_names.end(), hp.qubit_names[q]);
        if (it == y.port_names.end()) fail_validation("t1_estimates: no admittance port for " + hp.qubit_names[q]);
        const int p = static_cast<int>(it - y.port_names.begin());
        const double f = hp.omega_J(q) / two_pi;
        auto hi = std::lower_bound(y.freqs.begin(), y.freqs.end(), f);
        if (hi == y.freqs.end() || (hi == y.freqs.begin() && *hi != f)) {
            std::ostringstream os;
            os << "t1_estimates: qubit frequency " << f << " Hz outside the sampled range";
            fail_validation(os.str());
        }
        const size_t k1 = static_cast<size_t>(hi - y.freqs.begin());
        const size_t k0 = k1 == 0 ? 0 : k1 - 1;
        const double y0 = driving_point_admittance(y.data[k0], p).real();
        const double y1 = driving_point_admittance(y.data[k1], p).real();
        const double t = k1 == k0 ? 0.0 : (f - y.freqs[k0]) / (y.freqs[k1] - y.freqs[k0]);
        out(q) = classical_t1(capacitance(q), y0 + t * (y1 - y0));
    }
    return out;
}

std::vector<LossyModeSet> sweep_junction_inductance(const CLCascade& c, const LossSpec& loss, const std::string& port,
                                                    const std::vector<double>& l_values) {
    LossSpec spec = loss;
    spec.inductance(port);
    std::vector<LossyModeSet> out;
    for (double L : l_values) {
        spec.set_inductance(port, L);
        out.push_back(lossy_mode_poles(c, spec));
    }
    int next_id = out.empty() ? 0 : out.front().n_pairs();
    for (size_t t = 1; t < out.size(); ++t) {
        const LossyModeSet& prev = out[t - 1];
        LossyModeSet& cur = out[t];
        const int np = prev.n_pairs(), nc = cur.n_pairs();
        std::vector<std::tuple<double, int, int>> cand;
        for (int a = 0; a < np; ++a)
            for (int b = 0; b < nc; ++b)
                cand.emplace_back(std::abs(prev.weighted_flux(2 * a).dot(cur.weighted_flux(2 * b))), a, b);
        std::sort(cand.begin(), cand.end(), [](const auto& x, const auto& y) { return std::get<0>(x) > std::get<0>(y); });
        std::vector<int> used_prev(np, 0), assigned(nc, -1);
        std::vector<double> ov(nc, 0.0);
        for (const auto& [o, a, b] : cand) {
            if (used_prev[a] || assigned[b] >= 0) continue;
            used_prev[a] = 1;
            assigned[b] = prev.mode_id[2 * a];
            ov[b] = o;
        }
        for (int b = 0; b < nc; ++b) {
            const int id = assigned[b] >= 0 ? assigned[b] : next_id++;
            const bool jump = assigned[b] < 0 || ov[b] < 0.5;
            for (int c2 = 0; c2 < 2; ++c2) {
                cur.mode_id[2 * b + c2] = id;
                cur.discontinuity[2 * b + c2] = jump;
            }
        }
    }
    return out;
}

}  // namespace qnet
