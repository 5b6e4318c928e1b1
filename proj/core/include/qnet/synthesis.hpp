#pragma once

#include "qnet/netcore.hpp"

#include <utility>

namespace qnet {

// Capacitive network over (ports ++ resonators) with inductors shunting the
// resonator nodes.
struct CLCascade {
    MaxwellCapacitance capacitance;
    int n_ports = 0;
    Vec shunt_inductors;  // H, one per resonator node

    int n_resonators() const { return capacitance.size() - n_ports; }
    std::vector<std::string> port_names() const;
    std::vector<std::string> resonator_names() const;
    void validate() const;
};

CLCascade make_cascade(const Mat& maxwell, int n_ports, const Vec& inductors,
                       std::vector<std::string> names = {});

struct ModeTransform {
    Mat S;      // resonator flux transform
    Vec omega;  // rad/s
};

CLCascade synthesize_cascade(const RationalImpedance& z);
std::pair<RationalImpedance, ModeTransform> cascade_to_rational(const CLCascade& c);

// Closed form [[R0 + R^T R, R^T], [R, I]].
Mat hamiltonian_cap_inverse(const RationalImpedance& z);

struct RankCertificate {
    Mat matrix;
    Vec singular_values;  // descending
    int rank = 0;
    int deficiency = 0;
};

// Capacitance over (P, R, L) fluxes when an infinite-frequency residue with
// turns ratios t_rows (one row per inductive-stage branch) is present.
RankCertificate full_lagrangian_capacitance(const RationalImpedance& z, const Mat& t_rows);

RankCertificate numerical_rank(const Mat& m, double rel_threshold = 1e-12);

}  // namespace qnet
