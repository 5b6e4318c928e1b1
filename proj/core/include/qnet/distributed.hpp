#pragma once

#include "qnet/netcore.hpp"

#include <optional>
#include <vector>

namespace qnet {

struct ChainElement {
    enum class Type { series_capacitor, shunt_branch, tline };
    Type type = Type::series_capacitor;
    // series_capacitor: C. shunt_branch: parallel combination of any of C, L, R.
    std::optional<double> C, L, R;
    // tline: L_per_m, C_per_m and length; z0 overrides sqrt(L/C) when given.
    double z0 = 0.0, L_per_m = 0.0, C_per_m = 0.0, length = 0.0;

    static ChainElement series_capacitor(double c);
    static ChainElement shunt(std::optional<double> c, std::optional<double> l = {}, std::optional<double> r = {});
    static ChainElement line(double l_per_m, double c_per_m, double length, double z0 = 0.0);
};

struct TwoPortChain {
    std::vector<ChainElement> elements;
    void validate() const;
};

Eigen::Matrix2cd element_abcd(const ChainElement& e, double omega);
Eigen::Matrix2cd chain_abcd(const TwoPortChain& chain, double omega);
SampledNetwork sweep_chain(const TwoPortChain& chain, const std::vector<double>& freqs_hz);

struct AnalyticTLModel {
    double c1 = 0.0, c2 = 0.0;  // series capacitors at the two ends
    double c_t = 0.0;           // tau / Z0
    double tau = 0.0;           // l sqrt(LC)
    int order = 0;              // number of modes kept

    double omega(int k) const;  // k * pi / tau
};

AnalyticTLModel make_analytic_tl(double c1, double c2, double l_per_m, double c_per_m, double length, int order);
RationalImpedance analytic_tl_rational(const AnalyticTLModel& model);

// Port-shunt capacitances (mutual form) of the synthesized cascade for
// truncation orders 1..k_max; row k-1 holds both ports.
Mat tl_cascade_divergence(const AnalyticTLModel& model, int k_max);

}  // namespace qnet
