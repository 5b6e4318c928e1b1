#include "qnet/fixtures.hpp"

#include <algorithm>
#include <cmath>

namespace qnet::fixtures {

namespace {

constexpr double fF = 1e-15;
constexpr double nH = 1e-9;

// Maxwell matrix from node shunts (diagonal of m) and pair couplings (off-diagonal).
Mat maxwell_from_mutual(const Mat& m) {
    Mat c = -m;
    for (Eigen::Index i = 0; i < m.rows(); ++i) c(i, i) = m.row(i).sum();
    return c;
}

}  // namespace

TwoPortChain tl_coupler_chain(const TLCoupler& p) {
    TwoPortChain ch;
    ch.elements = {ChainElement::shunt(p.c1), ChainElement::series_capacitor(p.c_series),
                   ChainElement::line(p.L_per_m, p.C_per_m, p.length), ChainElement::series_capacitor(p.c_series),
                   ChainElement::shunt(p.c2)};
    return ch;
}

CLCascade tc_circuit() {
    Mat m = Mat::Zero(3, 3);
    m(0, 0) = 70 * fF;
    m(1, 1) = 200 * fF;
    m(2, 2) = 72 * fF;
    m(0, 1) = m(1, 0) = 4 * fF;
    m(1, 2) = m(2, 1) = 4.2 * fF;
    m(0, 2) = m(2, 0) = 0.1 * fF;
    return make_cascade(maxwell_from_mutual(m), 3, Vec(), {"Q1", "QC", "Q2"});
}

CLCascade decay_circuit(bool all_to_all) {
    const std::vector<std::string> names = {"Q1", "Q2", "ER1", "ER2", "ED1", "ED2", "R1", "Rc", "R2"};
    auto ix = [&](const char* n) { return static_cast<int>(std::find(names.begin(), names.end(), n) - names.begin()); };
    Mat m = Mat::Zero(9, 9);
    auto shunt = [&](const char* a, double c) { m(ix(a), ix(a)) += c; };
    auto couple = [&](const char* a, const char* b, double c) {
        m(ix(a), ix(b)) += c;
        m(ix(b), ix(a)) += c;
    };
    shunt("Q1", 70 * fF);
    shunt("Q2", 75 * fF);
    for (const char* p : {"ER1", "ER2", "ED1", "ED2"}) shunt(p, 100 * fF);
    for (const char* r : {"R1", "Rc", "R2"}) shunt(r, 300 * fF);
    couple("ER1", "R1", 10 * fF);
    couple("R1", "Q1", 10 * fF);
    couple("Q1", "Rc", 10 * fF);
    couple("Rc", "Q2", 10 * fF);
    couple("Q2", "R2", 10 * fF);
    couple("R2", "ER2", 10 * fF);
    couple("Q1", "ED1", 0.15 * fF);
    couple("Q2", "ED2", 0.15 * fF);
    if (all_to_all)
        for (int i = 0; i < 9; ++i)
            for (int j = i + 1; j < 9; ++j)
                if (m(i, j) == 0.0) m(i, j) = m(j, i) = 1 * fF;
    Vec L(3);
    L << 2.1 * nH, 3.25 * nH, 1.6 * nH;
    return make_cascade(maxwell_from_mutual(m), 6, L, names);
}

LossSpec decay_loss(double L_J1, double L_J2, double R) {
    LossSpec s;
    for (const char* p : {"ER1", "ER2", "ED1", "ED2"}) s.external_ports.push_back({p, R});
    s.junction_ports = {{"Q1", L_J1}, {"Q2", L_J2}};
    return s;
}

CLCascade tetrahedral(double C, double Cc, double L_R, double coupling_override) {
    // matrix as printed: C on the diagonal, +Cc between each port and its two resonators
    Mat m = C * Mat::Identity(6, 6);
    const int links[3][2] = {{3, 4}, {4, 5}, {3, 5}};
    for (int p = 0; p < 3; ++p)
        for (int r : links[p]) m(p, r) = m(r, p) = Cc;
    if (coupling_override >= 0) m(0, 3) = m(3, 0) = coupling_override;
    return make_cascade(m, 3, Vec::Constant(3, L_R), {"P1", "P2", "P3", "R1", "R2", "R3"});
}

CLCascade random_cascade(std::mt19937_64& rng, int n_ports, int n_modes) {
    const int n = n_ports + n_modes;
    std::uniform_real_distribution<double> shunt(100 * fF, 200 * fF), couple(0.0, 10 * fF), ind(0.4 * nH, 5 * nH);
    Mat m = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = shunt(rng);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) m(i, j) = m(j, i) = couple(rng);
    Vec L(n_modes);
    for (int k = 0; k < n_modes; ++k) L(k) = ind(rng);
    return make_cascade(maxwell_from_mutual(m), n_ports, L);
}

RationalImpedance random_rational(std::mt19937_64& rng, int n_ports, int n_modes, double f_lo, double f_hi) {
    std::normal_distribution<double> nrm(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double scale = 1.0 / (150 * fF);
    Mat A(n_ports, n_ports);
    for (int i = 0; i < n_ports; ++i)
        for (int j = 0; j < n_ports; ++j) A(i, j) = nrm(rng);
    RationalImpedance z;
    z.dc_residue = scale * (0.2 * A * A.transpose() / n_ports + Mat::Identity(n_ports, n_ports));
    for (int i = 0; i < n_ports; ++i) z.port_names.push_back("P" + std::to_string(i + 1));
    const double w = (f_hi - f_lo) / n_modes;
    for (int k = 0; k < n_modes; ++k) {
        const double f = f_lo + w * (k + 0.2 + 0.6 * uni(rng));
        Vec r(n_ports);
        for (int i = 0; i < n_ports; ++i) r(i) = nrm(rng);
        r *= std::sqrt(scale * (0.1 + 0.9 * uni(rng))) / r.norm();
        z.modes.push_back({2.0 * std::numbers::pi * f, r});
    }
    canonicalize(z);
    return z;
}

}  // namespace qnet::fixtures
