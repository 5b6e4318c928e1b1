#include "qnet/vfit.hpp"

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qnet {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct Entry {
    int i, j;
};

std::vector<Entry> upper_entries(int n) {
    std::vector<Entry> out;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) out.push_back({i, j});
    return out;
}

bool is_real_pole(cplx p) { return std::abs(p.imag()) <= 1e-12 * std::abs(p); }

int real_unknowns(const std::vector<cplx>& poles) {
    int n = 0;
    for (auto p : poles) n += is_real_pole(p) ? 1 : 2;
    return n;
}

// Columns of the partial-fraction basis at normalized points s (one column per
// real unknown): pairs contribute 1/(s-p) + 1/(s-p*) and j/(s-p) - j/(s-p*).
CMat pole_basis(const std::vector<cplx>& poles, const CVec& s) {
    CMat out(s.size(), real_unknowns(poles));
    int c = 0;
    for (auto p : poles) {
        if (is_real_pole(p)) {
            const double pr = p.real();
            for (Eigen::Index k = 0; k < s.size(); ++k) out(k, c) = 1.0 / (s(k) - pr);
            ++c;
        } else {
            for (Eigen::Index k = 0; k < s.size(); ++k) {
                const cplx a = 1.0 / (s(k) - p), b = 1.0 / (s(k) - std::conj(p));
                out(k, c) = a + b;
                out(k, c + 1) = cplx(0, 1) * (a - b);
            }
            c += 2;
        }
    }
    return out;
}

// Stack real and imaginary parts of a complex block.
Mat stack_ri(const CMat& m) {
    Mat out(2 * m.rows(), m.cols());
    out.topRows(m.rows()) = m.real();
    out.bottomRows(m.rows()) = m.imag();
    return out;
}

Vec stack_ri(const CVec& v) {
    Vec out(2 * v.size());
    out.head(v.size()) = v.real();
    out.tail(v.size()) = v.imag();
    return out;
}

struct Prepared {
    CVec s;                 // normalized Laplace points
    std::vector<CVec> h;    // per upper-triangle entry
    std::vector<Vec> w;     // per entry sample weights
    std::vector<Entry> entries;
    double omega_s = 1.0;
    int n_ports = 0;
};

Prepared prepare(const SampledNetwork& data, WeightMode mode) {
    if (data.kind != ParamKind::Z) fail_validation("vector fitting: data must be Z parameters");
    data.validate();
    if (data.freqs.empty()) fail_validation("vector fitting: no samples in band");
    Prepared p;
    p.n_ports = data.ports();
    p.omega_s = two_pi * data.freqs.back();
    const auto ns = static_cast<Eigen::Index>(data.freqs.size());
    p.s.resize(ns);
    for (Eigen::Index k = 0; k < ns; ++k) p.s(k) = cplx(0.0, two_pi * data.freqs[k] / p.omega_s);
    p.entries = upper_entries(p.n_ports);
    for (const auto& e : p.entries) {
        CVec h(ns);
        for (Eigen::Index k = 0; k < ns; ++k) h(k) = 0.5 * (data.data[k](e.i, e.j) + data.data[k](e.j, e.i));
        // each entry carries equal total weight; uniform mode is flat across samples
        Vec w(ns);
        if (mode == WeightMode::inverse_magnitude) {
            for (Eigen::Index k = 0; k < ns; ++k) w(k) = 1.0 / std::max(std::abs(h(k)), 1e-300);
        } else {
            const double rms = std::sqrt(h.squaredNorm() / ns);
            w.setConstant(1.0 / std::max(rms, 1e-300));
        }
        p.h.push_back(h);
        p.w.push_back(w);
    }
    return p;
}

CMat extra_basis(const CVec& s) {
    CMat out(s.size(), 3);
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        out(k, 0) = 1.0 / s(k);
        out(k, 1) = 1.0;
        out(k, 2) = s(k);
    }
    return out;
}

std::vector<cplx> scale_poles(const std::vector<cplx>& poles, double f) {
    std::vector<cplx> out;
    for (auto p : poles) out.push_back(p * f);
    return out;
}

Vec column_norms(const Mat& m) {
    Vec n(m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) n(c) = std::max(m.col(c).norm(), 1e-300);
    return n;
}

std::vector<cplx> canonical_poles(const CVec& ev) {
    std::vector<cplx> out;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        cplx p = ev(i);
        if (p.real() > 0) p = cplx(-p.real(), p.imag());
        if (is_real_pole(p)) out.emplace_back(p.real(), 0.0);
        else if (p.imag() > 0) out.push_back(p);
    }
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
        return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
    });
    return out;
}

}  // namespace

double FitConfig::capture_radius() const {
    return dc_capture_radius >= 0 ? dc_capture_radius : 0.5 * two_pi * band_lo_hz;
}

void FitConfig::validate() const {
    if (n_pole_pairs < 1) fail_validation("fit config: n_pole_pairs must be >= 1");
    if (!(band_hi_hz > band_lo_hz) || band_lo_hz < 0) fail_validation("fit config: empty band");
    if (max_iterations < 0 || refine_max_evals < 0) fail_validation("fit config: negative iteration limits");
    if (!(pole_convergence_tol > 0 && pole_convergence_tol < 1)) fail_validation("fit config: tolerance outside (0,1)");
    if (!(rank1_eig_threshold > 0 && rank1_eig_threshold < 1)) fail_validation("fit config: threshold outside (0,1)");
}

CMat GeneralRational::eval(cplx s) const {
    CMat out = h.cast<cplx>() / s + d.cast<cplx>() + s * e.cast<cplx>();
    for (size_t n = 0; n < poles.size(); ++n) {
        if (is_real_pole(poles[n])) out += residues[n] / (s - poles[n].real());
        else out += residues[n] / (s - poles[n]) + residues[n].conjugate() / (s - std::conj(poles[n]));
    }
    return out;
}

std::vector<cplx> initial_poles(const FitConfig& cfg) {
    cfg.validate();
    std::vector<cplx> out;
    const int n = cfg.n_pole_pairs;
    for (int i = 0; i < n; ++i) {
        const double f = n == 1 ? 0.5 * (cfg.band_lo_hz + cfg.band_hi_hz)
                                : cfg.band_lo_hz + (cfg.band_hi_hz - cfg.band_lo_hz) * i / (n - 1);
        const double w = two_pi * f;
        out.emplace_back(-w / 100.0, w);
    }
    return out;
}

SampledNetwork band_limited(const SampledNetwork& data, const FitConfig& cfg) {
    SampledNetwork in = data;
    if (in.kind == ParamKind::S) in = s_to_z(in, in.z_ref);
    if (in.kind != ParamKind::Z) fail_validation("fit: data must be Z or S parameters");
    SampledNetwork out = in;
    out.freqs.clear();
    out.data.clear();
    for (size_t k = 0; k < in.freqs.size(); ++k)
        if (in.freqs[k] >= cfg.band_lo_hz && in.freqs[k] <= cfg.band_hi_hz) {
            out.freqs.push_back(in.freqs[k]);
            out.data.push_back(in.data[k]);
        }
    if (out.freqs.size() < 2) fail_validation("fit: fewer than two samples inside the band");
    return out;
}

VFState vf_relocate(const SampledNetwork& data, const VFState& state, WeightMode weights, bool relaxed) {
    const Prepared p = prepare(data, weights);
    const std::vector<cplx> poles = scale_poles(state.poles, 1.0 / p.omega_s);
    const int np = real_unknowns(poles);
    const int nx = 3;
    const int nc = np + (relaxed ? 1 : 0);
    const CMat phi = pole_basis(poles, p.s);
    const CMat extra = extra_basis(p.s);
    const auto ns = p.s.size();

    // element columns and sigma columns per entry; sigma scaling shared by all entries
    std::vector<Mat> blocks;
    std::vector<Vec> rhs;
    Vec sig_norm2 = Vec::Zero(nc);
    for (size_t e = 0; e < p.entries.size(); ++e) {
        const CVec wh = p.w[e].cast<cplx>().cwiseProduct(p.h[e]);
        CMat m(ns, np + nx + nc);
        m.leftCols(np) = p.w[e].cast<cplx>().asDiagonal() * phi;
        m.middleCols(np, nx) = p.w[e].cast<cplx>().asDiagonal() * extra;
        m.middleCols(np + nx, np) = -(wh.asDiagonal() * phi);
        if (relaxed) m.col(np + nx + np) = -wh;
        Mat mr = stack_ri(m);
        sig_norm2 += mr.rightCols(nc).colwise().squaredNorm().transpose();
        blocks.push_back(std::move(mr));
        rhs.push_back(relaxed ? Vec(Vec::Zero(2 * ns)) : stack_ri(CVec(wh)));
    }
    const Vec sig_scale = sig_norm2.cwiseSqrt().cwiseMax(1e-300);

    Mat reduced(nc * static_cast<Eigen::Index>(p.entries.size()) + (relaxed ? 1 : 0), nc);
    Vec reduced_rhs = Vec::Zero(reduced.rows());
    double hnorm2 = 0.0;
    for (size_t e = 0; e < blocks.size(); ++e) {
        Mat& m = blocks[e];
        const Vec local = column_norms(m.leftCols(np + nx));
        for (int c = 0; c < np + nx; ++c) m.col(c) /= local(c);
        for (int c = 0; c < nc; ++c) m.col(np + nx + c) /= sig_scale(c);
        Eigen::HouseholderQR<Mat> qr(m);
        const Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
        const Vec qtb = qr.householderQ().transpose() * rhs[e];
        reduced.block(nc * e, 0, nc, nc) = R.block(np + nx, np + nx, nc, nc);
        reduced_rhs.segment(nc * e, nc) = qtb.segment(np + nx, nc);
        hnorm2 += (p.w[e].cast<cplx>().cwiseProduct(p.h[e])).squaredNorm();
    }
    if (relaxed) {
        // Re sum_k sigma(s_k) = ns, weighted like the data
        const double wgt = std::sqrt(hnorm2) / static_cast<double>(ns);
        const Eigen::Index last = reduced.rows() - 1;
        for (int c = 0; c < np; ++c) reduced(last, c) = wgt * phi.col(c).real().sum() / sig_scale(c);
        reduced(last, np) = wgt * static_cast<double>(ns) / sig_scale(np);
        reduced_rhs(last) = wgt * static_cast<double>(ns);
    }
    Eigen::JacobiSVD<Mat> svd(reduced, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 1e-14 * sv(0))) {
        std::ostringstream os;
        os << "vf_relocate: rank-deficient relocation system (singular values " << sv(0) << " .. "
           << sv(sv.size() - 1) << ")";
        fail_numerical(os.str());
    }
    Vec c = svd.solve(reduced_rhs).cwiseQuotient(sig_scale);
    double dsig = 1.0;
    if (relaxed) {
        dsig = c(np);
        if (std::abs(dsig) < 1e-8) dsig = dsig < 0 ? -1e-8 : 1e-8;
    }

    Mat A = Mat::Zero(np, np);
    Vec b = Vec::Zero(np);
    int col = 0;
    for (auto q : poles) {
        if (is_real_pole(q)) {
            A(col, col) = q.real();
            b(col) = 1.0;
            ++col;
        } else {
            A(col, col) = A(col + 1, col + 1) = q.real();
            A(col, col + 1) = q.imag();
            A(col + 1, col) = -q.imag();
            b(col) = 2.0;
            col += 2;
        }
    }
    const Mat H = A - b * c.head(np).transpose() / dsig;
    Eigen::EigenSolver<Mat> es(H, false);
    if (es.info() != Eigen::Success) fail_numerical("vf_relocate: eigenvalue computation failed");

    VFState out;
    out.poles = scale_poles(canonical_poles(es.eigenvalues()), p.omega_s);
    out.sigma_residues.clear();
    for (int i = 0; i < np; ++i) out.sigma_residues.emplace_back(c(i), 0.0);
    out.d = dsig;
    out.iteration = state.iteration + 1;
    return out;
}

GeneralRational vf_residues(const SampledNetwork& data, const std::vector<cplx>& poles_in, WeightMode weights) {
    const Prepared p = prepare(data, weights);
    const std::vector<cplx> poles = scale_poles(poles_in, 1.0 / p.omega_s);
    const int np = real_unknowns(poles);
    const CMat phi = pole_basis(poles, p.s);
    const CMat extra = extra_basis(p.s);
    const auto ns = p.s.size();
    const int n = p.n_ports;

    GeneralRational gr;
    gr.poles = poles_in;
    gr.residues.assign(poles_in.size(), CMat::Zero(n, n));
    gr.h = gr.d = gr.e = Mat::Zero(n, n);

    CMat base(ns, np + 3);
    base.leftCols(np) = phi;
    base.rightCols(3) = extra;

    auto solve_entry = [&](const Vec& w, const CVec& h) -> Vec {
        const Mat m = stack_ri(CMat(w.cast<cplx>().asDiagonal() * base));
        const Vec rhs = stack_ri(CVec(w.cast<cplx>().cwiseProduct(h)));
        const Vec norms = column_norms(m);
        const Mat ms = m * norms.cwiseInverse().asDiagonal();
        Eigen::ColPivHouseholderQR<Mat> qr(ms);
        const Vec diag = qr.matrixQR().diagonal().cwiseAbs();
        if (!(diag.minCoeff() > 1e-15 * diag.maxCoeff()))
            fail_numerical("vf_residues: ill-conditioned basis (rank " + std::to_string(qr.rank()) + ")");
        return qr.solve(rhs).cwiseQuotient(norms);
    };

    for (size_t e = 0; e < p.entries.size(); ++e) {
        const Vec x = solve_entry(p.w[e], p.h[e]);
        const auto [i, j] = p.entries[e];
        int col = 0;
        for (size_t q = 0; q < poles.size(); ++q) {
            cplx r;
            if (is_real_pole(poles[q])) r = cplx(x(col++), 0.0);
            else {
                r = cplx(x(col), x(col + 1));
                col += 2;
            }
            gr.residues[q](i, j) = gr.residues[q](j, i) = r * p.omega_s;
        }
        gr.h(i, j) = gr.h(j, i) = x(np) * p.omega_s;
        gr.d(i, j) = gr.d(j, i) = x(np + 1);
        gr.e(i, j) = gr.e(j, i) = x(np + 2) / p.omega_s;
    }
    return gr;
}

RationalImpedance enforce_lossless(const GeneralRational& gr, const FitConfig& cfg, std::vector<std::string>* log) {
    const double radius = cfg.capture_radius();
    const auto n = gr.h.rows();
    RationalImpedance z;
    for (int i = 0; i < n; ++i) z.port_names.push_back("P" + std::to_string(i + 1));
    Mat R0 = 0.5 * (gr.h + gr.h.transpose());
    auto note = [&](const std::string& s) {
        if (log) log->push_back(s);
    };
    for (size_t q = 0; q < gr.poles.size(); ++q) {
        const cplx p = gr.poles[q];
        const Mat re = gr.residues[q].real();
        const Mat sym = 0.5 * (re + re.transpose());
        if (is_real_pole(p) || std::abs(p) < radius) {
            R0 += is_real_pole(p) ? sym : Mat(2.0 * sym);
            std::ostringstream os;
            os << "pole " << p << " mapped to s=0";
            note(os.str());
            continue;
        }
        const double w = std::abs(p.imag());
        const Mat Rk = 2.0 * sym;
        Eigen::SelfAdjointEigenSolver<Mat> es(Rk);
        const Vec lam = es.eigenvalues();
        const double lmax = lam.maxCoeff();
        if (!(lmax > 0)) {
            std::ostringstream os;
            os << "pole " << p << ": residue has no positive component, dropped";
            note(os.str());
            continue;
        }
        for (Eigen::Index c = 0; c < lam.size(); ++c) {
            if (lam(c) < -cfg.rank1_eig_threshold * lmax) {
                std::ostringstream os;
                os << "warning: pole " << p << ": negative residue component " << lam(c) << " dropped";
                note(os.str());
                continue;
            }
            if (lam(c) < cfg.rank1_eig_threshold * lmax) continue;
            z.modes.push_back({w, std::sqrt(lam(c)) * es.eigenvectors().col(c)});
        }
    }
    R0 = 0.5 * (R0 + R0.transpose());
    if (!is_spd(R0)) {
        Eigen::SelfAdjointEigenSolver<Mat> es(R0);
        std::ostringstream os;
        os << "enforce_lossless: DC residue not positive definite (smallest eigenvalue " << es.eigenvalues().minCoeff()
           << "); widen dc_capture_radius";
        fail_numerical(os.str());
    }
    z.dc_residue = R0;
    canonicalize(z);
    return z;
}

Vec log_magnitude_residuals(const RationalImpedance& z, const SampledNetwork& data) {
    const auto entries = upper_entries(data.ports());
    const auto ne = static_cast<Eigen::Index>(entries.size());
    Vec out(2 * ne * static_cast<Eigen::Index>(data.freqs.size()));
    Eigen::Index o = 0;
    for (size_t k = 0; k < data.freqs.size(); ++k) {
        const cplx s(0.0, two_pi * data.freqs[k]);
        const CMat zm = eval_rational(z, s);
        const CMat sm = z_to_s(zm, data.z_ref);
        const CMat sd = z_to_s(data.data[k], data.z_ref);
        for (const auto& e : entries) {
            out(o++) = std::log10(std::abs(zm(e.i, e.j))) - std::log10(std::abs(data.data[k](e.i, e.j)));
            out(o++) = std::log10(std::abs(sm(e.i, e.j))) - std::log10(std::abs(sd(e.i, e.j)));
        }
    }
    return out;
}

double logmag_rms(const RationalImpedance& z, const SampledNetwork& data) {
    const auto entries = upper_entries(data.ports());
    double acc = 0.0;
    size_t count = 0;
    for (size_t k = 0; k < data.freqs.size(); ++k) {
        const CMat zm = eval_rational(z, cplx(0.0, two_pi * data.freqs[k]));
        for (const auto& e : entries) {
            const double d = std::log10(std::abs(zm(e.i, e.j))) - std::log10(std::abs(data.data[k](e.i, e.j)));
            acc += d * d;
            ++count;
        }
    }
    return std::sqrt(acc / std::max<size_t>(count, 1));
}

double relative_rms(const RationalImpedance& z, const SampledNetwork& data) {
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < data.freqs.size(); ++k) {
        const CMat zm = eval_rational(z, cplx(0.0, two_pi * data.freqs[k]));
        num += (zm - data.data[k]).squaredNorm();
        den += data.data[k].squaredNorm();
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

namespace {

double relative_rms_general(const GeneralRational& gr, const SampledNetwork& data) {
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < data.freqs.size(); ++k) {
        const CMat zm = gr.eval(cplx(0.0, two_pi * data.freqs[k]));
        num += (zm - data.data[k]).squaredNorm();
        den += data.data[k].squaredNorm();
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

// Parameter layout: upper-triangular U (R0 = U^T U), rows r_k, log of each
// distinct omega relative to omega_s. Values are scaled to order one.
struct Layout {
    int n = 0;
    int n_modes = 0;
    int n_omegas = 0;
    std::vector<int> omega_of_mode;
    double u_scale = 1.0, r_scale = 1.0, omega_s = 1.0;
    std::vector<std::string> names;

    int size() const { return n * (n + 1) / 2 + n_modes * n + n_omegas; }

    RationalImpedance unpack(const Vec& x) const {
        Mat U = Mat::Zero(n, n);
        int o = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) U(i, j) = x(o++) * u_scale;
        RationalImpedance z;
        z.port_names = names;
        z.dc_residue = U.transpose() * U;
        std::vector<double> om(n_omegas);
        const int ro = o;
        for (int w = 0; w < n_omegas; ++w) om[w] = omega_s * std::exp(x(ro + n_modes * n + w));
        for (int k = 0; k < n_modes; ++k) {
            Vec r = x.segment(ro + k * n, n) * r_scale;
            z.modes.push_back({om[omega_of_mode[k]], r});
        }
        return z;
    }
};

struct LogMagFunctor {
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = Vec;
    using ValueType = Vec;
    using JacobianType = Mat;

    const Layout* layout;
    const SampledNetwork* data;
    int n_inputs, n_values;

    int inputs() const { return n_inputs; }
    int values() const { return n_values; }

    int operator()(const Vec& x, Vec& f) const {
        try {
            f = log_magnitude_residuals(layout->unpack(x), *data);
            for (Eigen::Index i = 0; i < f.size(); ++i)
                if (!std::isfinite(f(i))) f(i) = 1e3;
        } catch (const Error&) {
            f.setConstant(n_values, 1e3);
        }
        return 0;
    }
};

}  // namespace

RefineResult refine_lossless(const RationalImpedance& z0, const SampledNetwork& data, const FitConfig& cfg) {
    z0.validate();
    if (data.kind != ParamKind::Z) fail_validation("refine_lossless: data must be Z parameters");
    RefineResult res;
    res.model = z0;

    Layout lay;
    lay.n = z0.ports();
    lay.names = z0.port_names;
    lay.omega_s = two_pi * data.freqs.back();
    lay.u_scale = std::sqrt(z0.dc_residue.trace() / lay.n);
    double rmax = 0.0;
    for (const auto& m : z0.modes) rmax = std::max(rmax, m.r.norm());
    lay.r_scale = rmax > 0 ? rmax : lay.u_scale;

    RationalImpedance start = z0;
    std::vector<double> omegas;
    for (const auto& m : start.modes) {
        lay.omega_of_mode.push_back(static_cast<int>(omegas.size()));
        omegas.push_back(m.omega);
    }
    if (cfg.allow_degenerate_hf_pole) {
        const double w = 1.5 * two_pi * cfg.band_hi_hz;
        const int idx = static_cast<int>(omegas.size());
        omegas.push_back(w);
        for (int i = 0; i < lay.n; ++i) {
            Vec r = Vec::Zero(lay.n);
            r(i) = 1e-3 * lay.r_scale;
            start.modes.push_back({w, r});
            lay.omega_of_mode.push_back(idx);
        }
    }
    lay.n_modes = static_cast<int>(start.modes.size());
    lay.n_omegas = static_cast<int>(omegas.size());

    Vec x(lay.size());
    const Mat U = Eigen::LLT<Mat>(start.dc_residue).matrixU();
    int o = 0;
    for (int i = 0; i < lay.n; ++i)
        for (int j = i; j < lay.n; ++j) x(o++) = U(i, j) / lay.u_scale;
    for (int k = 0; k < lay.n_modes; ++k, o += lay.n) x.segment(o, lay.n) = start.modes[k].r / lay.r_scale;
    for (int w = 0; w < lay.n_omegas; ++w) x(o++) = std::log(omegas[w] / lay.omega_s);

    LogMagFunctor fun{&lay, &data, static_cast<int>(x.size()), 0};
    fun.n_values = static_cast<int>(log_magnitude_residuals(z0, data).size());
    Vec f0;
    fun(x, f0);
    res.initial_cost = 0.5 * log_magnitude_residuals(z0, data).squaredNorm();
    res.final_cost = res.initial_cost;
    if (cfg.refine_max_evals <= 0) return res;

    Eigen::NumericalDiff<LogMagFunctor> nd(fun);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<LogMagFunctor>> lm(nd);
    lm.parameters.maxfev = cfg.refine_max_evals;
    lm.parameters.xtol = 1e-12;
    lm.parameters.ftol = 1e-14;
    lm.minimize(x);
    res.evaluations = static_cast<int>(lm.nfev);

    RationalImpedance cand = lay.unpack(x);
    if (!is_spd(cand.dc_residue)) return res;
    Vec f1;
    try {
        f1 = log_magnitude_residuals(cand, data);
    } catch (const Error&) {
        return res;
    }
    const double c1 = 0.5 * f1.squaredNorm();
    if (!std::isfinite(c1) || c1 > res.initial_cost) return res;
    canonicalize(cand);
    res.model = cand;
    res.final_cost = c1;
    res.improved = c1 < res.initial_cost;
    return res;
}

RationalImpedance fit(const SampledNetwork& data_in, const FitConfig& cfg, FitReport* report) {
    cfg.validate();
    FitReport rep;
    SampledNetwork data;
    try {
        data = band_limited(data_in, cfg);
    } catch (const Error& e) {
        throw Error(e.kind(), std::string("fit [input]: ") + e.what());
    }
    auto stage = [](const char* name, auto&& fn) {
        try {
            return fn();
        } catch (const Error& e) {
            throw Error(e.kind(), std::string("fit [") + name + "]: " + e.what());
        }
    };

    VFState st;
    st.poles = initial_poles(cfg);
    for (int it = 0; it < cfg.max_iterations; ++it) {
        VFState next = stage("vf_relocate", [&] { return vf_relocate(data, st, cfg.weight_mode, cfg.relaxed); });
        bool same = next.poles.size() == st.poles.size();
        double move = 0.0;
        if (same)
            for (size_t i = 0; i < st.poles.size(); ++i)
                move = std::max(move, std::abs(next.poles[i] - st.poles[i]) / std::abs(st.poles[i]));
        st = next;
        rep.iterations = it + 1;
        if (same && move < cfg.pole_convergence_tol) {
            rep.converged = true;
            break;
        }
    }
    rep.vf_poles = st.poles;
    const GeneralRational gr = stage("vf_residues", [&] { return vf_residues(data, st.poles, cfg.weight_mode); });
    rep.rms_vf = relative_rms_general(gr, data);
    RationalImpedance z = stage("enforce_lossless", [&] { return enforce_lossless(gr, cfg, &rep.log); });
    if (!data_in.port_names.empty()) z.port_names = data_in.port_names;
    rep.rms_lossless = relative_rms(z, data);
    if (cfg.refine_max_evals > 0) {
        const RefineResult rr = stage("refine_lossless", [&] { return refine_lossless(z, data, cfg); });
        rep.refined = true;
        rep.refine_improved = rr.improved;
        if (!rr.improved) rep.log.push_back("refinement did not improve the objective; lossless projection kept");
        z = rr.model;
    }
    rep.rms_final = relative_rms(z, data);
    rep.logmag_rms_final = logmag_rms(z, data);
    if (report) *report = rep;
    return z;
}

}  // namespace qnet
