#include "qnet/distributed.hpp"

#include "qnet/synthesis.hpp"

#include <cmath>

namespace qnet {

ChainElement ChainElement::series_capacitor(double c) {
    ChainElement e;
    e.type = Type::series_capacitor;
    e.C = c;
    return e;
}

ChainElement ChainElement::shunt(std::optional<double> c, std::optional<double> l, std::optional<double> r) {
    ChainElement e;
    e.type = Type::shunt_branch;
    e.C = c;
    e.L = l;
    e.R = r;
    return e;
}

ChainElement ChainElement::line(double l_per_m, double c_per_m, double length, double z0) {
    ChainElement e;
    e.type = Type::tline;
    e.L_per_m = l_per_m;
    e.C_per_m = c_per_m;
    e.length = length;
    e.z0 = z0;
    return e;
}

void TwoPortChain::validate() const {
    if (elements.empty()) fail_validation("chain: at least one element required");
    auto pos = [](const std::optional<double>& v) { return !v || *v > 0; };
    for (size_t i = 0; i < elements.size(); ++i) {
        const auto& e = elements[i];
        const std::string at = " (element " + std::to_string(i) + ")";
        switch (e.type) {
            case ChainElement::Type::series_capacitor:
                if (!e.C || !(*e.C > 0)) fail_validation("chain: series capacitor needs C > 0" + at);
                break;
            case ChainElement::Type::shunt_branch:
                if (!e.C && !e.L && !e.R) fail_validation("chain: empty shunt branch" + at);
                if (!pos(e.C) || !pos(e.L) || !pos(e.R)) fail_validation("chain: shunt values must be positive" + at);
                break;
            case ChainElement::Type::tline:
                if (!(e.L_per_m > 0) || !(e.C_per_m > 0) || e.length < 0 || e.z0 < 0)
                    fail_validation("chain: line needs L, C > 0 and length >= 0" + at);
                break;
        }
    }
}

Eigen::Matrix2cd element_abcd(const ChainElement& e, double omega) {
    const cplx s(0.0, omega);
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
    switch (e.type) {
        case ChainElement::Type::series_capacitor:
            m(0, 1) = 1.0 / (s * *e.C);
            break;
        case ChainElement::Type::shunt_branch: {
            cplx y = 0.0;
            if (e.C) y += s * *e.C;
            if (e.L) y += 1.0 / (s * *e.L);
            if (e.R) y += 1.0 / *e.R;
            m(1, 0) = y;
            break;
        }
        case ChainElement::Type::tline: {
            const double z0 = e.z0 > 0 ? e.z0 : std::sqrt(e.L_per_m / e.C_per_m);
            const double bl = omega * std::sqrt(e.L_per_m * e.C_per_m) * e.length;
            m(0, 0) = m(1, 1) = std::cos(bl);
            m(0, 1) = cplx(0.0, z0 * std::sin(bl));
            m(1, 0) = cplx(0.0, std::sin(bl) / z0);
            break;
        }
    }
    return m;
}

Eigen::Matrix2cd chain_abcd(const TwoPortChain& chain, double omega) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
    for (const auto& e : chain.elements) m = m * element_abcd(e, omega);
    return m;
}

SampledNetwork sweep_chain(const TwoPortChain& chain, const std::vector<double>& freqs_hz) {
    chain.validate();
    SampledNetwork out;
    out.kind = ParamKind::Z;
    out.freqs = freqs_hz;
    out.port_names = {"P1", "P2"};
    out.reciprocal = true;
    for (size_t i = 0; i < freqs_hz.size(); ++i) {
        if (!(freqs_hz[i] > 0)) fail_validation("sweep_chain: frequencies must be positive");
        const Eigen::Matrix2cd t = chain_abcd(chain, 2.0 * std::numbers::pi * freqs_hz[i]);
        const cplx a = t(0, 0), b = t(0, 1), c = t(1, 0), d = t(1, 1);
        const double scale = std::max({std::abs(a), std::abs(d), 1.0});
        if (std::abs(c) * 1e14 < scale)
            fail_numerical("sweep_chain: Z undefined (C = 0) at frequency index " + std::to_string(i));
        CMat z(2, 2);
        z << a / c, (a * d - b * c) / c, 1.0 / c, d / c;
        out.data.push_back(z);
    }
    out.validate();
    return out;
}

double AnalyticTLModel::omega(int k) const { return k * std::numbers::pi / tau; }

AnalyticTLModel make_analytic_tl(double c1, double c2, double l_per_m, double c_per_m, double length, int order) {
    if (!(c1 > 0) || !(c2 > 0) || !(l_per_m > 0) || !(c_per_m > 0) || !(length > 0) || order < 0)
        fail_validation("analytic line model: invalid parameters");
    AnalyticTLModel m;
    m.c1 = c1;
    m.c2 = c2;
    m.tau = length * std::sqrt(l_per_m * c_per_m);
    const double z0 = std::sqrt(l_per_m / c_per_m);
    m.c_t = m.tau / z0;
    m.order = order;
    return m;
}

RationalImpedance analytic_tl_rational(const AnalyticTLModel& model) {
    RationalImpedance z;
    z.port_names = {"P1", "P2"};
    const double it = 1.0 / model.c_t;
    z.dc_residue.resize(2, 2);
    z.dc_residue << 1.0 / model.c1 + it, it, it, 1.0 / model.c2 + it;
    const double a = std::sqrt(2.0 / model.c_t);
    for (int k = 1; k <= model.order; ++k) {
        Vec r(2);
        r << a, (k % 2 == 0 ? a : -a);
        z.modes.push_back({model.omega(k), r});
    }
    return z;
}

Mat tl_cascade_divergence(const AnalyticTLModel& model, int k_max) {
    if (k_max < 1) fail_validation("tl_cascade_divergence: k_max must be >= 1");
    Mat out(k_max, 2);
    AnalyticTLModel m = model;
    for (int k = 1; k <= k_max; ++k) {
        m.order = k;
        const CLCascade c = synthesize_cascade(analytic_tl_rational(m));
        const Mat& C = c.capacitance.matrix;
        out(k - 1, 0) = C.row(0).sum();
        out(k - 1, 1) = C.row(1).sum();
    }
    return out;
}

}  // namespace qnet
