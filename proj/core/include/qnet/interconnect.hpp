#pragma once

#include "qnet/netcore.hpp"
#include "qnet/synthesis.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qnet {

// Port names in a plan are qualified as "<network id>.<port>".
struct ConnectionPlan {
    std::vector<std::string> networks;
    std::vector<std::pair<std::string, std::string>> joins;
    std::vector<std::string> leave_open;

    void validate(const std::vector<std::string>& available_ports) const;
};

std::string joined_name(const std::string& a, const std::string& b);

// Row k added to row j, column k to column j, then k removed; j keeps its name.
MaxwellCapacitance merge_capacitance_ports(const MaxwellCapacitance& c, const std::string& j, const std::string& k);
// Applies a set of disjoint joins at once. Each entry is summed over the merged
// nodes in ascending original index, so the result does not depend on the order
// of the joins.
MaxwellCapacitance merge_capacitance_ports(const MaxwellCapacitance& c,
                                           const std::vector<std::pair<std::string, std::string>>& joins);

// zs[i] is referred to by plan.networks[i].
RationalImpedance connect_rational(const std::vector<RationalImpedance>& zs, const ConnectionPlan& plan);

// Block-diagonal cascade of several networks, ports first then resonators.
CLCascade disconnected_cascade(const std::vector<RationalImpedance>& zs, const std::vector<std::string>& ids);

// S = S11 + S12 (I - Sl S22)^-1 Sl S21 with the last M ports of sigma loaded.
CMat cascade_load_s(const CMat& sigma, const CMat& s_load);

CMat filipsson_connect(const CMat& s, int k, int l);
SampledNetwork filipsson_connect(const SampledNetwork& s, const std::string& port_k, const std::string& port_l);

// Block-diagonal S data of several networks sampled on the same grid.
SampledNetwork block_diagonal(const std::vector<SampledNetwork>& nets, const std::vector<std::string>& ids);

}  // namespace qnet
