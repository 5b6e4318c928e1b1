#include "qnet/synthesis.hpp"

#include <cmath>
#include <sstream>

namespace qnet {

std::vector<std::string> CLCascade::port_names() const {
    return {capacitance.names.begin(), capacitance.names.begin() + n_ports};
}

std::vector<std::string> CLCascade::resonator_names() const {
    return {capacitance.names.begin() + n_ports, capacitance.names.end()};
}

void CLCascade::validate() const {
    if (n_ports < 0 || n_ports > capacitance.size()) fail_validation("cascade: bad port count");
    if (shunt_inductors.size() != n_resonators()) fail_validation("cascade: one inductor per resonator node required");
    for (Eigen::Index k = 0; k < shunt_inductors.size(); ++k)
        if (!(shunt_inductors(k) > 0) || !std::isfinite(shunt_inductors(k)))
            fail_validation("cascade: inductors must be positive and finite");
    if (!is_spd(capacitance.matrix)) fail_numerical("cascade: capacitance is not positive definite");
}

CLCascade make_cascade(const Mat& maxwell, int n_ports, const Vec& inductors, std::vector<std::string> names) {
    if (names.empty()) {
        for (int i = 0; i < n_ports; ++i) names.push_back("P" + std::to_string(i + 1));
        for (Eigen::Index k = 0; k < inductors.size(); ++k) names.push_back("R" + std::to_string(k + 1));
    }
    CLCascade c{make_maxwell(maxwell, std::move(names), false), n_ports, inductors};
    c.validate();
    return c;
}

CLCascade synthesize_cascade(const RationalImpedance& z) {
    z.validate();
    const int n = z.ports(), m = z.n_modes();
    const Mat R = z.turns_ratio();
    Eigen::LLT<Mat> r0(z.dc_residue);
    const Mat R0inv = r0.solve(Mat::Identity(n, n));
    const Mat R0invRt = r0.solve(R.transpose());
    Mat C(n + m, n + m);
    C.topLeftCorner(n, n) = R0inv;
    C.topRightCorner(n, m) = -R0invRt;
    C.bottomLeftCorner(m, n) = -R0invRt.transpose();
    C.bottomRightCorner(m, m) = Mat::Identity(m, m) + R * R0invRt;
    C = 0.5 * (C + C.transpose());

    std::vector<std::string> names = z.port_names;
    Vec L(m);
    for (int k = 0; k < m; ++k) {
        names.push_back("R" + std::to_string(k + 1));
        L(k) = 1.0 / (z.modes[k].omega * z.modes[k].omega);
    }
    CLCascade out{make_maxwell(C, names, false), n, L};
    if (!is_spd(C)) fail_numerical("synthesize_cascade: synthesized capacitance lost definiteness numerically");
    return out;
}

std::pair<RationalImpedance, ModeTransform> cascade_to_rational(const CLCascade& c) {
    c.validate();
    const int n = c.n_ports, m = c.n_resonators();
    const Mat& C = c.capacitance.matrix;
    Eigen::LLT<Mat> llt(C);
    const Mat Cinv = llt.solve(Mat::Identity(n + m, n + m));

    RationalImpedance z;
    z.port_names = c.port_names();
    const Mat CP = C.topLeftCorner(n, n);
    Eigen::LLT<Mat> cp(CP);
    z.dc_residue = cp.solve(Mat::Identity(n, n));
    z.dc_residue = 0.5 * (z.dc_residue + z.dc_residue.transpose());

    ModeTransform mt;
    mt.S = Mat::Zero(m, m);
    mt.omega = Vec::Zero(m);
    if (m == 0) return {z, mt};

    // 1. (C^-1)_R = O_C D O_C^T   2. T = O_C D^1/2
    Mat CinvR = Cinv.bottomRightCorner(m, m);
    CinvR = 0.5 * (CinvR + CinvR.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> ec(CinvR);
    if (ec.eigenvalues().minCoeff() <= 0) fail_numerical("cascade_to_rational: (C^-1)_R not positive definite");
    const Mat T = ec.eigenvectors() * ec.eigenvalues().cwiseSqrt().asDiagonal();
    // 3. T^T M_R T = O_M Omega^2 O_M^T   4. S = T O_M
    const Vec MR = c.shunt_inductors.cwiseInverse();
    Mat TMT = T.transpose() * MR.asDiagonal() * T;
    TMT = 0.5 * (TMT + TMT.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> em(TMT);
    mt.S = T * em.eigenvectors();
    mt.omega = em.eigenvalues().cwiseMax(0.0).cwiseSqrt();

    // R = -S^T C_PR^T C_P^-1
    const Mat CPR = C.topRightCorner(n, m);
    const Mat R = -(mt.S.transpose() * CPR.transpose()) * z.dc_residue;
    for (int k = 0; k < m; ++k) {
        if (!(mt.omega(k) > 0)) fail_numerical("cascade_to_rational: zero resonance frequency");
        z.modes.push_back({mt.omega(k), R.row(k).transpose()});
    }
    // eigenvalues come sorted ascending; normalize row signs and keep S consistent
    for (int k = 0; k < m; ++k) {
        Vec r = z.modes[k].r;
        normalize_sign(r);
        if (r.dot(z.modes[k].r) < 0) mt.S.col(k) *= -1.0;
        z.modes[k].r = r;
    }
    return {z, mt};
}

Mat hamiltonian_cap_inverse(const RationalImpedance& z) {
    const int n = z.ports(), m = z.n_modes();
    const Mat R = z.turns_ratio();
    Mat out(n + m, n + m);
    out.topLeftCorner(n, n) = z.dc_residue + R.transpose() * R;
    out.topRightCorner(n, m) = R.transpose();
    out.bottomLeftCorner(m, n) = R;
    out.bottomRightCorner(m, m) = Mat::Identity(m, m);
    return out;
}

RankCertificate numerical_rank(const Mat& m, double rel_threshold) {
    RankCertificate rc;
    rc.matrix = m;
    Eigen::JacobiSVD<Mat> svd(m);
    rc.singular_values = svd.singularValues();
    const double smax = rc.singular_values.size() ? rc.singular_values(0) : 0.0;
    for (Eigen::Index i = 0; i < rc.singular_values.size(); ++i)
        if (rc.singular_values(i) > rel_threshold * smax) ++rc.rank;
    rc.deficiency = static_cast<int>(std::min(m.rows(), m.cols())) - rc.rank;
    return rc;
}

RankCertificate full_lagrangian_capacitance(const RationalImpedance& z, const Mat& t_rows) {
    z.validate();
    const int n = z.ports(), m = z.n_modes();
    if (t_rows.cols() != n) fail_validation("full_lagrangian_capacitance: T must have one column per port");
    const int l = static_cast<int>(t_rows.rows());
    const Mat R = z.turns_ratio();
    const Mat& T = t_rows;
    Eigen::LLT<Mat> r0(z.dc_residue);
    const Mat A = r0.solve(Mat::Identity(n, n));
    Mat C = Mat::Zero(n + m + l, n + m + l);
    C.block(0, 0, n, n) = A;
    C.block(0, n, n, m) = -A * R.transpose();
    C.block(0, n + m, n, l) = -A * T.transpose();
    C.block(n, 0, m, n) = -R * A;
    C.block(n, n, m, m) = Mat::Identity(m, m) + R * A * R.transpose();
    C.block(n, n + m, m, l) = R * A * T.transpose();
    C.block(n + m, 0, l, n) = -T * A;
    C.block(n + m, n, l, m) = T * A * R.transpose();
    C.block(n + m, n + m, l, l) = T * A * T.transpose();
    C = 0.5 * (C + C.transpose());
    // rank is taken after a diagonal congruence: port entries are ~1e-13 F next to unit resonator entries
    Vec d = C.diagonal().cwiseAbs().cwiseSqrt();
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = d(i) > 0 ? 1.0 / d(i) : 1.0;
    RankCertificate rc = numerical_rank(d.asDiagonal() * C * d.asDiagonal());
    rc.matrix = C;
    return rc;
}

}  // namespace qnet
