#pragma once

#include "qnet/decay.hpp"
#include "qnet/distributed.hpp"
#include "qnet/netcore.hpp"
#include "qnet/synthesis.hpp"

#include <random>

namespace qnet::fixtures {

// Two qubits coupled through an ideal line with series coupling capacitors.
struct TLCoupler {
    double c1 = 70e-15, c2 = 72e-15;
    double c_series = 6.5e-15;
    double L_per_m = 0.438e-6, C_per_m = 0.159e-9, length = 12e-3;
};
TwoPortChain tl_coupler_chain(const TLCoupler& p = {});

// Qubit / tunable coupler / qubit capacitive network, nodes Q1, QC, Q2.
CLCascade tc_circuit();

// Two transmons, three resonators, two readout and two drive lines.
// Ports Q1, Q2, ER1, ER2, ED1, ED2; resonators R1, Rc, R2.
CLCascade decay_circuit(bool all_to_all = false);
LossSpec decay_loss(double L_J1 = 18e-9, double L_J2 = 15.5e-9, double R = 50.0);

// Six-node network with two degenerate resonances; coupling_override changes
// the P1-R1 coupling only.
CLCascade tetrahedral(double C = 70e-15, double Cc = 4e-15, double L_R = 4e-9, double coupling_override = -1.0);

// Random CL cascade: node shunts 100-200 fF, pair couplings 0-10 fF, inductors 0.4-5 nH.
CLCascade random_cascade(std::mt19937_64& rng, int n_ports, int n_modes);

// Random lossless model with SPD R0 and modes spread over [f_lo, f_hi].
RationalImpedance random_rational(std::mt19937_64& rng, int n_ports, int n_modes, double f_lo, double f_hi);

}  // namespace qnet::fixtures
