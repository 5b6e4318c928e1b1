#include "qnet/qham.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace qnet {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double flux_quantum_sq() {
    const double p = phys.Phi0 / two_pi;
    return p * p;
}

// Shared core: C^-1 over (junction ports ++ resonators), inductive energies of
// the resonators and their names.
struct NodeData {
    Mat cinv;
    std::vector<std::string> qubit_names, mode_names;
    Vec E_J, E_L;
};

HamiltonianParams build(const NodeData& nd) {
    const int nq = static_cast<int>(nd.qubit_names.size());
    const int nm = static_cast<int>(nd.mode_names.size());
    const double hb = phys.h_bar, e2 = phys.e_charge * phys.e_charge;
    HamiltonianParams hp;
    hp.qubit_names = nd.qubit_names;
    hp.mode_names = nd.mode_names;
    hp.cap_inverse = nd.cinv;
    const int n = nq + nm;
    Vec ec(n), energy(n);
    hp.eff_C.resize(n);
    for (int i = 0; i < n; ++i) {
        if (!(nd.cinv(i, i) > 0)) fail_numerical("hamiltonian_params: nonpositive diagonal of inverse capacitance");
        ec(i) = e2 * nd.cinv(i, i) / 2.0;
        hp.eff_C(i) = 1.0 / nd.cinv(i, i);
        energy(i) = i < nq ? nd.E_J(i) : nd.E_L(i - nq);
    }
    hp.E_J = nd.E_J;
    hp.E_L = nd.E_L;
    hp.E_C = ec.head(nq);
    hp.omega_J.resize(nq);
    hp.beta_J.resize(nq);
    for (int i = 0; i < nq; ++i) {
        hp.omega_J(i) = (std::sqrt(8.0 * nd.E_J(i) * ec(i)) - ec(i)) / hb;
        hp.beta_J(i) = -ec(i) / hb;
        if (!(hp.omega_J(i) > 0))
            fail_validation("hamiltonian_params: E_J too small for a transmon at " + nd.qubit_names[i]);
    }
    hp.omega_R.resize(nm);
    hp.alpha_R = Vec::Zero(nm);
    for (int k = 0; k < nm; ++k) hp.omega_R(k) = std::sqrt(8.0 * nd.E_L(k) * ec(nq + k)) / hb;

    Mat g = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && nd.cinv(i, j) != 0.0)
                g(i, j) = e2 * nd.cinv(i, j) * std::pow(energy(i) * energy(j) / (4.0 * ec(i) * ec(j)), 0.25) / hb;
    g = 0.5 * (g + g.transpose());
    hp.g_qq = g.topLeftCorner(nq, nq);
    hp.g_qr = g.topRightCorner(nq, nm);
    hp.g_rr = g.bottomRightCorner(nm, nm);
    return hp;
}

std::vector<int> junction_rows(const std::vector<std::string>& port_names, const TransmonSpec& spec) {
    spec.validate_against(port_names);
    std::vector<int> rows;
    for (const auto& j : spec.junctions)
        rows.push_back(static_cast<int>(std::find(port_names.begin(), port_names.end(), j.port) - port_names.begin()));
    return rows;
}

Mat select(const Mat& m, const std::vector<int>& idx) {
    Mat out(idx.size(), idx.size());
    for (size_t i = 0; i < idx.size(); ++i)
        for (size_t j = 0; j < idx.size(); ++j) out(i, j) = m(idx[i], idx[j]);
    return out;
}

NodeData node_data(const RationalImpedance& z, const TransmonSpec& spec) {
    z.validate();
    const auto rows = junction_rows(z.port_names, spec);
    const Mat full = hamiltonian_cap_inverse(z);
    std::vector<int> idx = rows;
    for (int k = 0; k < z.n_modes(); ++k) idx.push_back(z.ports() + k);
    NodeData nd;
    nd.cinv = select(full, idx);
    nd.qubit_names = spec.junction_names();
    nd.E_J.resize(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) nd.E_J(i) = spec.junctions[i].E_J;
    nd.E_L.resize(z.n_modes());
    for (int k = 0; k < z.n_modes(); ++k) {
        nd.mode_names.push_back("R" + std::to_string(k + 1));
        // unit effective capacitance, L = 1/omega^2
        nd.E_L(k) = flux_quantum_sq() * z.modes[k].omega * z.modes[k].omega;
    }
    return nd;
}

NodeData node_data(const CLCascade& c, const TransmonSpec& spec) {
    c.validate();
    const auto ports = c.port_names();
    const auto rows = junction_rows(ports, spec);
    const Mat C = spd_checked(c.capacitance.matrix, "cascade capacitance");
    const Mat full = Eigen::LLT<Mat>(C).solve(Mat::Identity(C.rows(), C.cols()));
    std::vector<int> idx = rows;
    for (int k = 0; k < c.n_resonators(); ++k) idx.push_back(c.n_ports + k);
    NodeData nd;
    nd.cinv = select(0.5 * (full + full.transpose()), idx);
    nd.qubit_names = spec.junction_names();
    nd.mode_names = c.resonator_names();
    nd.E_J.resize(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) nd.E_J(i) = spec.junctions[i].E_J;
    nd.E_L.resize(c.n_resonators());
    for (int k = 0; k < c.n_resonators(); ++k) nd.E_L(k) = flux_quantum_sq() / c.shunt_inductors(k);
    return nd;
}

std::map<std::string, double> charging_from(const NodeData& nd) {
    std::map<std::string, double> out;
    const double e2 = phys.e_charge * phys.e_charge;
    for (size_t i = 0; i < nd.qubit_names.size(); ++i) out[nd.qubit_names[i]] = e2 * nd.cinv(i, i) / 2.0;
    return out;
}

int find_name(const std::vector<std::string>& names, const std::string& n, const char* what) {
    auto it = std::find(names.begin(), names.end(), n);
    if (it == names.end()) fail_validation(std::string(what) + " '" + n + "' not found");
    return static_cast<int>(it - names.begin());
}

}  // namespace

void TransmonSpec::validate() const {
    std::set<std::string> seen;
    for (const auto& j : junctions) {
        if (!seen.insert(j.port).second) fail_validation("transmon spec: duplicate junction port " + j.port);
        if (!(j.E_J > 0)) fail_validation("transmon spec: E_J must be positive at " + j.port);
    }
    for (const auto& c : couplers)
        if (!seen.count(c)) fail_validation("transmon spec: coupler " + c + " is not a junction port");
    for (const auto& o : open_ports)
        if (seen.count(o)) fail_validation("transmon spec: port " + o + " is both open and a junction");
}

void TransmonSpec::validate_against(const std::vector<std::string>& network_ports) const {
    validate();
    auto has = [&](const std::string& p) {
        return std::find(network_ports.begin(), network_ports.end(), p) != network_ports.end();
    };
    for (const auto& j : junctions)
        if (!has(j.port)) fail_validation("transmon spec: junction port " + j.port + " missing from network");
    for (const auto& o : open_ports)
        if (!has(o)) fail_validation("transmon spec: open port " + o + " missing from network");
}

std::vector<std::string> TransmonSpec::junction_names() const {
    std::vector<std::string> out;
    for (const auto& j : junctions) out.push_back(j.port);
    return out;
}

double ej_from_inductance(double L_J) {
    if (!(L_J > 0)) fail_validation("junction inductance must be positive");
    return flux_quantum_sq() / L_J;
}

double lj_from_ej(double E_J) {
    if (!(E_J > 0)) fail_validation("junction energy must be positive");
    return flux_quantum_sq() / E_J;
}

double ej_for_frequency(double omega, double E_C) {
    if (!(omega > 0) || !(E_C > 0)) fail_validation("ej_for_frequency: omega and E_C must be positive");
    const double a = phys.h_bar * omega + E_C;
    return a * a / (8.0 * E_C);
}

int HamiltonianParams::qubit_index(const std::string& name) const { return find_name(qubit_names, name, "qubit"); }

std::map<std::string, double> junction_charging_energies(const RationalImpedance& z, const TransmonSpec& spec) {
    TransmonSpec s = spec;
    for (auto& j : s.junctions) j.E_J = 1.0;
    return charging_from(node_data(z, s));
}

std::map<std::string, double> junction_charging_energies(const CLCascade& c, const TransmonSpec& spec) {
    TransmonSpec s = spec;
    for (auto& j : s.junctions) j.E_J = 1.0;
    return charging_from(node_data(c, s));
}

TransmonSpec tune_junctions(const std::map<std::string, double>& charging, TransmonSpec spec,
                            const std::map<std::string, double>& target_omega) {
    for (const auto& [port, w] : target_omega) {
        auto it = std::find_if(spec.junctions.begin(), spec.junctions.end(),
                               [&](const JunctionPort& j) { return j.port == port; });
        if (it == spec.junctions.end()) fail_validation("tune_junctions: no junction at " + port);
        auto ec = charging.find(port);
        if (ec == charging.end()) fail_validation("tune_junctions: no charging energy for " + port);
        it->E_J = ej_for_frequency(w, ec->second);
    }
    return spec;
}

HamiltonianParams hamiltonian_params(const RationalImpedance& z, const TransmonSpec& spec) {
    HamiltonianParams hp = build(node_data(z, spec));
    // identity resonator block: no direct mode-mode coupling
    hp.g_rr.setZero();
    return hp;
}

HamiltonianParams hamiltonian_params(const CLCascade& c, const TransmonSpec& spec) { return build(node_data(c, spec)); }

HamiltonianParams regroup_couplers(const HamiltonianParams& hp, const std::vector<std::string>& couplers) {
    if (couplers.empty()) return hp;
    const int nq = hp.n_qubits(), nm = hp.n_modes();
    std::vector<int> is_c(nq, 0);
    for (const auto& c : couplers) is_c[hp.qubit_index(c)] = 1;
    std::vector<int> q, m;  // positions in the combined (qubit ++ mode) ordering
    for (int i = 0; i < nq; ++i)
        if (!is_c[i]) q.push_back(i);
    for (int i = 0; i < nq; ++i)
        if (is_c[i]) m.push_back(i);
    for (int k = 0; k < nm; ++k) m.push_back(nq + k);

    const int n = nq + nm;
    Mat g(n, n);
    g << hp.g_qq, hp.g_qr, hp.g_qr.transpose(), hp.g_rr;
    Vec omega(n), anh(n);
    omega << hp.omega_J, hp.omega_R;
    anh << hp.beta_J, hp.alpha_R;
    std::vector<std::string> names = hp.qubit_names;
    names.insert(names.end(), hp.mode_names.begin(), hp.mode_names.end());

    HamiltonianParams out;
    const auto nq2 = static_cast<Eigen::Index>(q.size()), nm2 = static_cast<Eigen::Index>(m.size());
    out.omega_J.resize(nq2);
    out.beta_J.resize(nq2);
    out.E_J.resize(nq2);
    out.E_C.resize(nq2);
    out.omega_R.resize(nm2);
    out.alpha_R.resize(nm2);
    out.E_L.resize(nm2);
    out.g_qq.resize(nq2, nq2);
    out.g_qr.resize(nq2, nm2);
    out.g_rr.resize(nm2, nm2);
    out.eff_C.resize(n);
    std::vector<int> order = q;
    order.insert(order.end(), m.begin(), m.end());
    out.cap_inverse = hp.cap_inverse.size() ? select(hp.cap_inverse, order) : Mat();
    for (int a = 0; a < n; ++a) out.eff_C(a) = hp.eff_C(order[a]);
    for (Eigen::Index a = 0; a < nq2; ++a) {
        out.qubit_names.push_back(names[q[a]]);
        out.omega_J(a) = omega(q[a]);
        out.beta_J(a) = anh(q[a]);
        out.E_J(a) = hp.E_J(q[a]);
        out.E_C(a) = hp.E_C(q[a]);
        for (Eigen::Index b = 0; b < nq2; ++b) out.g_qq(a, b) = g(q[a], q[b]);
        for (Eigen::Index b = 0; b < nm2; ++b) out.g_qr(a, b) = g(q[a], m[b]);
    }
    for (Eigen::Index a = 0; a < nm2; ++a) {
        out.mode_names.push_back(names[m[a]]);
        out.omega_R(a) = omega(m[a]);
        out.alpha_R(a) = anh(m[a]);
        out.E_L(a) = m[a] < nq ? hp.E_J(m[a]) : hp.E_L(m[a] - nq);
        for (Eigen::Index b = 0; b < nm2; ++b) out.g_rr(a, b) = g(m[a], m[b]);
    }
    return out;
}

EffectiveParams effective_params(const HamiltonianParams& hp_in, const std::vector<std::string>& couplers) {
    const HamiltonianParams hp = regroup_couplers(hp_in, couplers);
    const int nq = hp.n_qubits(), nm = hp.n_modes();
    EffectiveParams ep;
    ep.qubit_names = hp.qubit_names;
    ep.mode_names = hp.mode_names;
    ep.delta.resize(nq, nm);
    ep.sigma.resize(nq, nm);
    for (int i = 0; i < nq; ++i)
        for (int k = 0; k < nm; ++k) {
            ep.delta(i, k) = hp.omega_J(i) - hp.omega_R(k);
            ep.sigma(i, k) = hp.omega_J(i) + hp.omega_R(k);
            if (std::abs(ep.delta(i, k)) <= 1e-12 * ep.sigma(i, k) && hp.g_qr(i, k) != 0.0)
                fail_numerical("effective_params: resonant degeneracy between " + hp.qubit_names[i] + " and " +
                               hp.mode_names[k]);
        }
    const Mat& g = hp.g_qr;
    const Mat& D = ep.delta;
    const Mat& S = ep.sigma;
    auto inv = [](double x) { return x == 0.0 ? 0.0 : 1.0 / x; };
    for (int i = 0; i < nq; ++i)
        for (int k = 0; k < nm; ++k)
            if (g(i, k) != 0.0) ep.max_g_over_delta = std::max(ep.max_g_over_delta, std::abs(g(i, k) / D(i, k)));

    ep.omega_J_eff = hp.omega_J;
    ep.beta_eff = hp.beta_J;
    for (int i = 0; i < nq; ++i) {
        double shift = 0.0, fac = 0.0;
        for (int k = 0; k < nm; ++k) {
            const double g2 = g(i, k) * g(i, k);
            if (g2 == 0.0) continue;
            shift += g2 * (1.0 / D(i, k) - 1.0 / S(i, k)) + 2.0 * hp.beta_J(i) * g2 / (S(i, k) * S(i, k));
            fac += g2 / (D(i, k) * D(i, k));
        }
        ep.omega_J_eff(i) += shift;
        ep.beta_eff(i) *= 1.0 - 2.0 * fac;
    }
    ep.omega_R_eff = hp.omega_R;
    ep.alpha_eff = hp.alpha_R;
    for (int k = 0; k < nm; ++k) {
        double shift = 0.0, fac = 0.0;
        for (int i = 0; i < nq; ++i) {
            const double g2 = g(i, k) * g(i, k);
            if (g2 == 0.0) continue;
            shift += -g2 * (1.0 / D(i, k) + 1.0 / S(i, k)) + 2.0 * hp.alpha_R(k) * g2 / (S(i, k) * S(i, k));
            fac += g2 / (D(i, k) * D(i, k));
        }
        ep.omega_R_eff(k) += shift;
        ep.alpha_eff(k) *= 1.0 - 2.0 * fac;
    }

    ep.g_eff_qq = hp.g_qq;
    ep.cross_kerr = Mat::Zero(nq, nq);
    for (int i = 0; i < nq; ++i)
        for (int j = i + 1; j < nq; ++j) {
            double add = 0.0, ck = 0.0;
            for (int k = 0; k < nm; ++k) {
                const double gg = g(i, k) * g(j, k);
                if (gg == 0.0) continue;
                add += 0.5 * gg * (inv(D(i, k)) + inv(D(j, k)) - inv(S(i, k)) - inv(S(j, k)));
                const double x = gg / (D(i, k) * D(j, k));
                ck += 0.5 * x * x * (hp.beta_J(i) + hp.beta_J(j) + 4.0 * hp.alpha_R(k));
            }
            ep.g_eff_qq(i, j) += add;
            ep.g_eff_qq(j, i) = ep.g_eff_qq(i, j);
            ep.cross_kerr(i, j) = ep.cross_kerr(j, i) = ck;
        }
    ep.g_eff_rr = hp.g_rr;
    for (int k = 0; k < nm; ++k)
        for (int l = k + 1; l < nm; ++l) {
            double add = 0.0;
            for (int i = 0; i < nq; ++i) {
                const double gg = g(i, k) * g(i, l);
                if (gg == 0.0) continue;
                add -= 0.5 * gg * (inv(D(i, k)) + inv(D(i, l)) + inv(S(i, k)) + inv(S(i, l)));
            }
            ep.g_eff_rr(k, l) += add;
            ep.g_eff_rr(l, k) = ep.g_eff_rr(k, l);
        }
    ep.chi = Mat::Zero(nq, nm);
    for (int i = 0; i < nq; ++i)
        for (int k = 0; k < nm; ++k) {
            const double g2 = g(i, k) * g(i, k);
            if (g2 == 0.0) continue;
            ep.chi(i, k) = 2.0 * g2 * (hp.beta_J(i) + hp.alpha_R(k)) *
                           (1.0 / (D(i, k) * D(i, k)) + 1.0 / (S(i, k) * S(i, k)));
        }
    return ep;
}

Eigen::Index FockModel::index_of(const std::vector<int>& occ) const {
    Eigen::Index idx = 0;
    for (int m = 0; m < n_modes; ++m) idx = idx * levels + occ[m];
    return idx;
}

std::vector<int> FockModel::occupation(Eigen::Index index) const {
    std::vector<int> occ(n_modes);
    for (int m = n_modes - 1; m >= 0; --m) {
        occ[m] = static_cast<int>(index % levels);
        index /= levels;
    }
    return occ;
}

FockModel fock_hamiltonian(const HamiltonianParams& hp, int levels, Eigen::Index cap) {
    if (levels < 2) fail_validation("fock_hamiltonian: levels must be >= 2");
    const int nq = hp.n_qubits(), nm = hp.n_modes();
    const int n = nq + nm;
    FockModel fm;
    fm.levels = levels;
    fm.n_modes = n;
    double dim = std::pow(static_cast<double>(levels), n);
    if (dim > static_cast<double>(cap)) {
        std::ostringstream os;
        os << "fock_hamiltonian: dimension " << dim << " exceeds cap " << cap;
        fail_validation(os.str());
    }
    fm.dim = static_cast<Eigen::Index>(dim);
    Vec omega(n), anh(n);
    omega << hp.omega_J, hp.omega_R;
    anh << hp.beta_J, hp.alpha_R;
    Mat g(n, n);
    g << hp.g_qq, hp.g_qr, hp.g_qr.transpose(), hp.g_rr;

    Mat& H = fm.H;
    H = Mat::Zero(fm.dim, fm.dim);
    std::vector<Eigen::Index> stride(n);
    for (int m = n - 1, s = 1; m >= 0; --m, s *= levels) stride[m] = s;
    for (Eigen::Index idx = 0; idx < fm.dim; ++idx) {
        const auto occ = fm.occupation(idx);
        double diag = 0.0;
        for (int m = 0; m < n; ++m) diag += omega(m) * occ[m] + 0.5 * anh(m) * occ[m] * (occ[m] - 1);
        H(idx, idx) += diag;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double c = g(p, q);
                if (c == 0.0) continue;
                const int np = occ[p], nq_ = occ[q];
                // g (p^dag q + p q^dag - p^dag q^dag - p q), written as the action on |idx>
                if (nq_ > 0 && np + 1 < levels)
                    H(idx + stride[p] - stride[q], idx) += c * std::sqrt((np + 1.0) * nq_);
                if (np > 0 && nq_ + 1 < levels)
                    H(idx - stride[p] + stride[q], idx) += c * std::sqrt(np * (nq_ + 1.0));
                if (np + 1 < levels && nq_ + 1 < levels)
                    H(idx + stride[p] + stride[q], idx) -= c * std::sqrt((np + 1.0) * (nq_ + 1.0));
                if (np > 0 && nq_ > 0) H(idx - stride[p] - stride[q], idx) -= c * std::sqrt(1.0 * np * nq_);
            }
    }
    const double asym = (H - H.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(H.cwiseAbs().maxCoeff(), 1e-300))
        fail_numerical("fock_hamiltonian: assembled matrix not Hermitian");
    return fm;
}

namespace {

struct PairStates {
    double e_sym = 0.0, e_anti = 0.0;
};

PairStates single_excitation_pair(const HamiltonianParams& hp, int a, int b, int levels) {
    const FockModel fm = fock_hamiltonian(hp, levels);
    Eigen::SelfAdjointEigenSolver<Mat> es(fm.H);
    std::vector<int> occ(fm.n_modes, 0);
    occ[a] = 1;
    const Eigen::Index ia = fm.index_of(occ);
    occ[a] = 0;
    occ[b] = 1;
    const Eigen::Index ib = fm.index_of(occ);
    const Mat& V = es.eigenvectors();
    // the two eigenvectors with the largest weight in span{|a>, |b>}
    Eigen::Index best[2] = {-1, -1};
    double w[2] = {-1, -1};
    for (Eigen::Index c = 0; c < V.cols(); ++c) {
        const double s = V(ia, c) * V(ia, c) + V(ib, c) * V(ib, c);
        if (s > w[0]) {
            best[1] = best[0];
            w[1] = w[0];
            best[0] = c;
            w[0] = s;
        } else if (s > w[1]) {
            best[1] = c;
            w[1] = s;
        }
    }
    if (w[1] < 0.5) {
        std::ostringstream os;
        os << "oracle: single-excitation states not identifiable (support " << w[0] << ", " << w[1]
           << "); outside the dispersive regime";
        fail_numerical(os.str());
    }
    PairStates ps;
    const bool first_sym = V(ia, best[0]) * V(ib, best[0]) > 0;
    const double e0 = es.eigenvalues()(best[0]), e1 = es.eigenvalues()(best[1]);
    ps.e_sym = first_sym ? e0 : e1;
    ps.e_anti = first_sym ? e1 : e0;
    return ps;
}

}  // namespace

double oracle_effective_coupling(const HamiltonianParams& hp, const std::string& qa, const std::string& qb,
                                 int levels) {
    const int a = hp.qubit_index(qa), b = hp.qubit_index(qb);
    if (a == b) fail_validation("oracle: qubits must differ");
    const PairStates ps = single_excitation_pair(hp, a, b, levels);
    return 0.5 * (ps.e_sym - ps.e_anti);
}

ResonantOracle oracle_resonant_coupling(const HamiltonianParams& hp, const std::string& qa, const std::string& qb,
                                        double window, int levels) {
    const int a = hp.qubit_index(qa), b = hp.qubit_index(qb);
    if (a == b) fail_validation("oracle: qubits must differ");
    auto at = [&](double d) {
        HamiltonianParams h = hp;
        h.omega_J(b) += d;
        return single_excitation_pair(h, a, b, levels);
    };
    auto gap = [&](double d) {
        const PairStates ps = at(d);
        return std::abs(ps.e_sym - ps.e_anti);
    };
    const auto r = boost::math::tools::brent_find_minima(gap, -window, window, 40);
    ResonantOracle out;
    out.detuning = r.first;
    const PairStates ps = at(r.first);
    out.coupling = 0.5 * (ps.e_sym - ps.e_anti);
    return out;
}

double oracle_dispersive_shift(const HamiltonianParams& hp, int qubit, int mode, int levels) {
    const FockModel fm = fock_hamiltonian(hp, levels);
    Eigen::SelfAdjointEigenSolver<Mat> es(fm.H);
    const Mat& V = es.eigenvectors();
    const int m = hp.n_qubits() + mode;
    auto energy = [&](int nq_, int nm_) {
        std::vector<int> occ(fm.n_modes, 0);
        occ[qubit] = nq_;
        occ[m] = nm_;
        Eigen::Index row = fm.index_of(occ), col = 0;
        const double w = V.row(row).cwiseAbs2().maxCoeff(&col);
        if (w < 0.5) fail_numerical("oracle: dressed state not identifiable; outside the dispersive regime");
        return es.eigenvalues()(col);
    };
    return energy(1, 1) - energy(1, 0) - energy(0, 1) + energy(0, 0);
}

}  // namespace qnet
