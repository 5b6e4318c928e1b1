#pragma once

#include "qnet/netcore.hpp"
#include "qnet/qham.hpp"
#include "qnet/synthesis.hpp"

#include <string>
#include <vector>

namespace qnet {

struct ExternalPort {
    std::string port;
    double resistance = 50.0;  // ohm
};

struct JunctionInductor {
    std::string port;
    double L_J = 0.0;  // H
};

struct LossSpec {
    std::vector<ExternalPort> external_ports;
    std::vector<JunctionInductor> junction_ports;

    void validate() const;
    double inductance(const std::string& port) const;
    void set_inductance(const std::string& port, double L);
};

// Nodal description after open ports are eliminated: C phi'' + G phi' + M phi = 0.
struct LossyNetwork {
    std::vector<std::string> names;
    Mat C, M, G;
    std::vector<int> junction_nodes, external_nodes, resonator_nodes;

    int size() const { return static_cast<int>(names.size()); }
    int index_of(const std::string& name) const;
};

LossyNetwork make_lossy_network(const CLCascade& c, const LossSpec& loss, bool include_junction_inductors = true);
LossyNetwork make_lossy_network(const RationalImpedance& z, const LossSpec& loss,
                                bool include_junction_inductors = true);

// Poles come as (p, conj p) with Im p > 0, ordered by Im p.
struct LossyModeSet {
    std::vector<cplx> poles;
    std::vector<std::string> attribution;  // per pole
    std::vector<double> kappa;             // 1/s, -2 Re p
    std::vector<double> omega;             // rad/s, |Im p|
    std::vector<int> mode_id;              // tracking label, shared by a conjugate pair
    std::vector<bool> discontinuity;       // set by sweep tracking
    CMat flux;                             // node flux eigenvectors, one column per pole
    Vec node_weight;                       // sqrt(C_nn); shares are taken in this weighted norm
    std::vector<std::string> node_names;
    std::vector<std::string> warnings;

    int n_pairs() const { return static_cast<int>(poles.size() / 2); }
    // Flux participation of node n in pole p, |w_n v_n|^2 / |w v|^2 with w = node_weight.
    double participation(int pole, int node) const;
    // Weighted, unit-norm flux vector of a pole.
    CVec weighted_flux(int pole) const;
    // Upper pole of the pair with the largest participation of the named node.
    int dominant_pole(const std::string& node) const;
};

LossyModeSet lossy_mode_poles(const LossyNetwork& net);
LossyModeSet lossy_mode_poles(const CLCascade& c, const LossSpec& loss);

// kappa from the eigenvector: v^H G v / v^H C v with v the node voltages.
double sum_rule_kappa(const LossyNetwork& net, const LossyModeSet& set, int pole);

// Driving-point impedance [(sC + M/s + G)^-1]_nn of the shunted network.
cplx shunted_impedance(const LossyNetwork& net, int node, cplx s);

struct GridPeak {
    int di = 0, dj = 0;  // grid offset of the |Z| maximum from the pole cell
    double cell_sigma = 0.0, cell_omega = 0.0;
};

// |Z| on an n x n grid spanning +-half_width_kappas * kappa around the pole.
GridPeak pole_grid_peak(const LossyNetwork& net, cplx pole, int node, int n = 200, double half_width_kappas = 5.0);

// Y over the junction ports with every other node eliminated.
SampledNetwork lossy_port_admittance(const LossyNetwork& net, const std::vector<double>& freqs_hz);
SampledNetwork lossy_port_admittance(const CLCascade& c, const LossSpec& loss, bool omit_junction_inductors,
                                     const std::vector<double>& freqs_hz);
SampledNetwork lossy_port_admittance(const RationalImpedance& z, const LossSpec& loss,
                                     bool omit_junction_inductors, const std::vector<double>& freqs_hz);

// Admittance seen by junction port i with the other junction ports open: 1/(Y^-1)_ii.
cplx driving_point_admittance(const CMat& y, int i);
cplx driving_point_admittance(const LossyNetwork& net, const std::string& port, double omega);

double classical_t1(double capacitance, double re_admittance);

// T1 per qubit from Re Y_dp linearly interpolated at omega_J. capacitance holds
// the value per qubit (effective or plain shunt capacitance).
Vec t1_estimates(const HamiltonianParams& hp, const SampledNetwork& y, const Vec& capacitance);

// Poles for each inductance value of the junction at port, modes tracked by
// eigenvector overlap.
std::vector<LossyModeSet> sweep_junction_inductance(const CLCascade& c, const LossSpec& loss, const std::string& port,
                                                    const std::vector<double>& l_values);

}  // namespace qnet
