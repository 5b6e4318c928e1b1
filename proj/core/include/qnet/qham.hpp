#pragma once

#include "qnet/netcore.hpp"
#include "qnet/synthesis.hpp"

#include <map>
#include <string>
#include <vector>

namespace qnet {

struct JunctionPort {
    std::string port;
    double E_J = 0.0;  // J
};

struct TransmonSpec {
    std::vector<JunctionPort> junctions;
    std::vector<std::string> couplers;    // subset of junction ports
    std::vector<std::string> open_ports;  // left open; any port without a junction is open

    void validate() const;
    void validate_against(const std::vector<std::string>& network_ports) const;
    std::vector<std::string> junction_names() const;
};

// E_J = (Phi0 / 2 pi)^2 / L_J
double ej_from_inductance(double L_J);
double lj_from_ej(double E_J);
// Positive root of hbar*omega = sqrt(8 E_J E_C) - E_C.
double ej_for_frequency(double omega, double E_C);

// All rates in rad/s (hbar = 1 after construction). Qubits are the junction
// ports in spec order; modes follow the network's resonator order.
struct HamiltonianParams {
    std::vector<std::string> qubit_names, mode_names;
    Vec omega_J, beta_J, E_J, E_C;  // E_C is the effective charging energy, J
    Vec omega_R, alpha_R, E_L;
    Mat g_qq, g_qr, g_rr;
    Vec eff_C;  // F, qubits then modes
    Mat cap_inverse;  // 1/F over qubits ++ modes

    int n_qubits() const { return static_cast<int>(omega_J.size()); }
    int n_modes() const { return static_cast<int>(omega_R.size()); }
    int qubit_index(const std::string& name) const;
};

// Charging energies e^2 (C^-1)_ii / 2 of the junction ports, for frequency targeting.
std::map<std::string, double> junction_charging_energies(const RationalImpedance& z, const TransmonSpec& spec);
std::map<std::string, double> junction_charging_energies(const CLCascade& c, const TransmonSpec& spec);
// Sets E_J of the listed ports so that omega_J hits the target (rad/s).
TransmonSpec tune_junctions(const std::map<std::string, double>& charging, TransmonSpec spec,
                            const std::map<std::string, double>& target_omega);

HamiltonianParams hamiltonian_params(const RationalImpedance& z, const TransmonSpec& spec);
HamiltonianParams hamiltonian_params(const CLCascade& c, const TransmonSpec& spec);

// Couplers leave the qubit block and join the mode block with alpha = beta.
HamiltonianParams regroup_couplers(const HamiltonianParams& hp, const std::vector<std::string>& couplers);

struct EffectiveParams {
    std::vector<std::string> qubit_names, mode_names;
    Vec omega_J_eff, omega_R_eff, beta_eff, alpha_eff;
    Mat g_eff_qq, g_eff_rr;
    Mat chi;         // qubit x mode
    Mat cross_kerr;  // qubit x qubit, zero diagonal
    Mat delta, sigma;
    double max_g_over_delta = 0.0;
};

EffectiveParams effective_params(const HamiltonianParams& hp, const std::vector<std::string>& couplers = {});

struct FockModel {
    int levels = 3;
    int n_modes = 0;  // qubits ++ modes
    Eigen::Index dim = 0;
    Mat H;

    Eigen::Index index_of(const std::vector<int>& occupation) const;
    std::vector<int> occupation(Eigen::Index index) const;
};

inline constexpr Eigen::Index default_fock_cap = 2187;  // 3^7

FockModel fock_hamiltonian(const HamiltonianParams& hp, int levels = 3, Eigen::Index cap = default_fock_cap);

// Half the splitting of the single-excitation pair on qubits a and b, signed so
// that a positive value means the symmetric combination lies higher.
double oracle_effective_coupling(const HamiltonianParams& hp, const std::string& qubit_a, const std::string& qubit_b,
                                 int levels = 3);

struct ResonantOracle {
    double coupling = 0.0;  // rad/s, signed
    double detuning = 0.0;  // rad/s applied to qubit b at the minimum gap
};

// Retunes omega_J of qubit b within +-window to minimize the dressed splitting,
// then evaluates the signed oracle there.
ResonantOracle oracle_resonant_coupling(const HamiltonianParams& hp, const std::string& qubit_a,
                                        const std::string& qubit_b, double window, int levels = 3);

// E11 - E10 - E01 + E00 for qubit q and mode m, states identified by overlap.
double oracle_dispersive_shift(const HamiltonianParams& hp, int qubit, int mode, int levels = 3);

}  // namespace qnet
