#include "qnet/netcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qnet {

void fail_validation(const std::string& msg) { throw Error(ErrorKind::validation, msg); }
void fail_numerical(const std::string& msg) { throw Error(ErrorKind::numerical, msg); }

namespace {

void require_square_symmetric(const Mat& m, const char* what) {
    if (m.rows() != m.cols()) fail_validation(std::string(what) + ": matrix is not square");
    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        fail_validation(std::string(what) + ": matrix is not symmetric");
}

std::vector<std::string> default_names(int n, const std::string& prefix) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i + 1));
    return out;
}

}  // namespace

int MaxwellCapacitance::index_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) fail_validation("unknown node '" + name + "'");
    return static_cast<int>(it - names.begin());
}

bool is_spd(const Mat& m) {
    if (m.rows() == 0) return true;
    Eigen::LLT<Mat> llt(0.5 * (m + m.transpose()));
    return llt.info() == Eigen::Success;
}

Mat spd_checked(const Mat& m, const std::string& what, std::vector<std::string>* warnings) {
    Mat sym = 0.5 * (m + m.transpose());
    if (sym.rows() == 0 || is_spd(sym)) return sym;
    Eigen::SelfAdjointEigenSolver<Mat> es(sym);
    const double lmin = es.eigenvalues().minCoeff();
    const double tr = sym.trace();
    if (lmin >= -1e-12 * std::abs(tr)) {
        Vec ev = es.eigenvalues().cwiseMax(0.0);
        if (warnings) {
            std::ostringstream os;
            os << what << ": smallest eigenvalue " << lmin << " clamped to PSD boundary";
            warnings->push_back(os.str());
        }
        return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    }
    std::ostringstream os;
    os << what << ": not positive definite (smallest eigenvalue " << lmin << ")";
    fail_numerical(os.str());
}

MaxwellCapacitance make_maxwell(Mat m, std::vector<std::string> names, bool check_pd) {
    require_square_symmetric(m, "maxwell capacitance");
    if (names.empty()) names = default_names(static_cast<int>(m.rows()), "n");
    if (static_cast<int>(names.size()) != m.rows()) fail_validation("maxwell capacitance: name count mismatch");
    if (check_pd && !is_spd(m)) fail_numerical("maxwell capacitance: not positive definite");
    return {std::move(m), std::move(names)};
}

MutualCapacitance maxwell_to_mutual(const MaxwellCapacitance& c) {
    require_square_symmetric(c.matrix, "maxwell_to_mutual");
    Mat out = -c.matrix;
    for (int i = 0; i < out.rows(); ++i) out(i, i) = c.matrix.row(i).sum();
    return {out, c.names};
}

MaxwellCapacitance mutual_to_maxwell(const MutualCapacitance& c) {
    require_square_symmetric(c.matrix, "mutual_to_maxwell");
    Mat out = -c.matrix;
    for (int i = 0; i < out.rows(); ++i) {
        double s = c.matrix(i, i);
        for (int j = 0; j < out.cols(); ++j)
            if (j != i) s += c.matrix(i, j);
        out(i, i) = s;
    }
    return {out, c.names};
}

MaxwellCapacitance grid_capacitance(int rows, int cols, double c_shunt, double c_couple) {
    if (rows < 1 || cols < 1) fail_validation("grid_capacitance: rows and cols must be >= 1");
    if (!(c_shunt > 0) || !(c_couple > 0)) fail_validation("grid_capacitance: capacitances must be positive");
    const int n = rows * cols;
    Mat mutual = Mat::Zero(n, n);
    std::vector<std::string> names;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const int i = r * cols + c;
            names.push_back("g" + std::to_string(r) + "_" + std::to_string(c));
            mutual(i, i) = c_shunt;
            if (c + 1 < cols) mutual(i, i + 1) = mutual(i + 1, i) = c_couple;
            if (r + 1 < rows) mutual(i, i + cols) = mutual(i + cols, i) = c_couple;
        }
    return mutual_to_maxwell({mutual, names});
}

const char* kind_name(ParamKind k) {
    switch (k) {
        case ParamKind::S: return "S";
        case ParamKind::Z: return "Z";
        case ParamKind::Y: return "Y";
    }
    return "?";
}

void SampledNetwork::validate() const {
    if (data.size() != freqs.size()) fail_validation("sampled network: data and frequency counts differ");
    for (size_t i = 1; i < freqs.size(); ++i)
        if (!(freqs[i] > freqs[i - 1])) fail_validation("sampled network: frequencies not strictly increasing");
    const int n = ports();
    for (const auto& m : data)
        if (m.rows() != n || m.cols() != n) fail_validation("sampled network: inconsistent matrix size");
    if (!port_names.empty() && static_cast<int>(port_names.size()) != n)
        fail_validation("sampled network: port name count mismatch");
    if (reciprocal)
        for (size_t i = 0; i < data.size(); ++i) {
            const double scale = std::max(data[i].cwiseAbs().maxCoeff(), 1e-300);
            if ((data[i] - data[i].transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
                fail_validation("sampled network: non-symmetric sample at index " + std::to_string(i));
        }
}

namespace {

CMat solve_checked(const CMat& a, const CMat& b, const char* what, int index) {
    Eigen::PartialPivLU<CMat> lu(a);
    const double rc = lu.rcond();
    if (!(rc > 1e-15)) {
        std::ostringstream os;
        os << what << ": singular matrix at frequency index " << index;
        fail_numerical(os.str());
    }
    return lu.solve(b);
}

SampledNetwork map_samples(const SampledNetwork& in, ParamKind out_kind,
                           CMat (*f)(const CMat&, double, int), double arg) {
    in.validate();
    SampledNetwork out = in;
    out.kind = out_kind;
    for (size_t i = 0; i < in.data.size(); ++i) out.data[i] = f(in.data[i], arg, static_cast<int>(i));
    return out;
}

CMat z_to_s_at(const CMat& z, double z0, int idx) {
    const auto n = z.rows();
    const CMat id = CMat::Identity(n, n);
    // S = (Z + Z0)^-1 (Z - Z0); the factors commute.
    return solve_checked(z + z0 * id, z - z0 * id, "z_to_s", idx);
}

CMat s_to_z_at(const CMat& s, double z0, int idx) {
    const auto n = s.rows();
    const CMat id = CMat::Identity(n, n);
    return z0 * solve_checked(id - s, id + s, "s_to_z", idx);
}

CMat inverse_at(const CMat& m, double, int idx) {
    return solve_checked(m, CMat::Identity(m.rows(), m.cols()), "matrix inverse", idx);
}

}  // namespace

CMat z_to_s(const CMat& z, double z0) { return z_to_s_at(z, z0, -1); }
CMat s_to_z(const CMat& s, double z0) { return s_to_z_at(s, z0, -1); }

SampledNetwork z_to_s(const SampledNetwork& z, double z0) {
    if (z.kind != ParamKind::Z) fail_validation("z_to_s: input is not Z data");
    if (!(z0 > 0)) fail_validation("z_to_s: z0 must be positive");
    SampledNetwork out = map_samples(z, ParamKind::S, z_to_s_at, z0);
    out.z_ref = z0;
    return out;
}

SampledNetwork s_to_z(const SampledNetwork& s, double z0) {
    if (s.kind != ParamKind::S) fail_validation("s_to_z: input is not S data");
    if (!(z0 > 0)) fail_validation("s_to_z: z0 must be positive");
    SampledNetwork out = map_samples(s, ParamKind::Z, s_to_z_at, z0);
    out.z_ref = z0;
    return out;
}

SampledNetwork z_to_y(const SampledNetwork& z) {
    if (z.kind != ParamKind::Z) fail_validation("z_to_y: input is not Z data");
    return map_samples(z, ParamKind::Y, inverse_at, 0.0);
}

SampledNetwork y_to_z(const SampledNetwork& y) {
    if (y.kind != ParamKind::Y) fail_validation("y_to_z: input is not Y data");
    return map_samples(y, ParamKind::Z, inverse_at, 0.0);
}

Mat RationalImpedance::turns_ratio() const {
    Mat r(n_modes(), ports());
    for (int k = 0; k < n_modes(); ++k) r.row(k) = modes[k].r.transpose();
    return r;
}

int RationalImpedance::port_index(const std::string& name) const {
    auto it = std::find(port_names.begin(), port_names.end(), name);
    if (it == port_names.end()) fail_validation("unknown port '" + name + "'");
    return static_cast<int>(it - port_names.begin());
}

void RationalImpedance::validate() const {
    if (dc_residue.rows() != dc_residue.cols()) fail_validation("rational impedance: R0 not square");
    if (static_cast<int>(port_names.size()) != ports()) fail_validation("rational impedance: port name count mismatch");
    require_square_symmetric(dc_residue, "rational impedance R0");
    if (!is_spd(dc_residue)) fail_numerical("rational impedance: R0 is not positive definite");
    for (size_t k = 0; k < modes.size(); ++k) {
        if (!(modes[k].omega > 0) || !std::isfinite(modes[k].omega))
            fail_validation("rational impedance: mode " + std::to_string(k) + " has nonpositive omega");
        if (modes[k].r.size() != ports())
            fail_validation("rational impedance: mode " + std::to_string(k) + " row length mismatch");
    }
}

void normalize_sign(Vec& r) {
    if (r.size() == 0) return;
    const double m = r.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < r.size(); ++i)
        if (std::abs(r(i)) >= (1.0 - 1e-9) * m) {
            if (r(i) < 0) r = -r;
            return;
        }
}

void canonicalize(RationalImpedance& z) {
    std::stable_sort(z.modes.begin(), z.modes.end(),
                     [](const Mode& a, const Mode& b) { return a.omega < b.omega; });
    for (auto& m : z.modes) normalize_sign(m.r);
}

CMat eval_rational(const RationalImpedance& z, cplx s) {
    if (s == cplx(0.0)) fail_validation("eval_rational: s = 0 is the DC pole");
    CMat out = z.dc_residue.cast<cplx>() / s;
    for (size_t k = 0; k < z.modes.size(); ++k) {
        const double w = z.modes[k].omega;
        const cplx den = s * s + w * w;
        if (std::abs(den) <= 1e-14 * w * w)
            fail_numerical("eval_rational: evaluation at the pole of mode " + std::to_string(k));
        const Vec& r = z.modes[k].r;
        out.noalias() += ((s / den) * (r * r.transpose()).cast<cplx>());
    }
    return out;
}

SampledNetwork sample_rational(const RationalImpedance& z, const std::vector<double>& freqs_hz) {
    SampledNetwork out;
    out.kind = ParamKind::Z;
    out.freqs = freqs_hz;
    out.port_names = z.port_names;
    out.reciprocal = true;
    out.data.reserve(freqs_hz.size());
    for (double f : freqs_hz) out.data.push_back(eval_rational(z, cplx(0.0, 2.0 * std::numbers::pi * f)));
    return out;
}

CauerFactorization cauer_factorize(const RationalImpedance& z) {
    z.validate();
    Eigen::SelfAdjointEigenSolver<Mat> es(z.dc_residue);
    CauerFactorization f;
    f.U = es.eigenvectors();
    f.C0 = es.eigenvalues().cwiseInverse();
    f.L_R.resize(z.n_modes());
    for (int k = 0; k < z.n_modes(); ++k) f.L_R(k) = 1.0 / (z.modes[k].omega * z.modes[k].omega);
    f.C_R = Vec::Ones(z.n_modes());
    return f;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(std::max(n, 0));
    if (n == 1) out[0] = lo;
    for (int i = 0; i < n && n > 1; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
    return out;
}

}  // namespace qnet
