#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnet {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

struct PhysicalConstants {
    double h = 6.62607015e-34;
    double e_charge = 1.602176634e-19;
    double h_bar = 6.62607015e-34 / (2.0 * std::numbers::pi);
    double Phi0 = 6.62607015e-34 / (2.0 * 1.602176634e-19);
};

inline constexpr PhysicalConstants phys{};

enum class ErrorKind { validation, numerical };

// Exit code mapping used by the CLI: validation -> 2, numerical -> 3.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail_validation(const std::string& msg);
[[noreturn]] void fail_numerical(const std::string& msg);

struct MaxwellCapacitance {
    Mat matrix;
    std::vector<std::string> names;
    int size() const { return static_cast<int>(matrix.rows()); }
    int index_of(const std::string& name) const;
};

struct MutualCapacitance {
    Mat matrix;  // diagonal: ground capacitances, off-diagonal: node-to-node values
    std::vector<std::string> names;
};

// Checks shape and symmetry; with check_pd also positive definiteness.
MaxwellCapacitance make_maxwell(Mat m, std::vector<std::string> names, bool check_pd = true);

MutualCapacitance maxwell_to_mutual(const MaxwellCapacitance& c);
MaxwellCapacitance mutual_to_maxwell(const MutualCapacitance& c);

// Nearest-neighbour grid, row-major node order.
MaxwellCapacitance grid_capacitance(int rows, int cols, double c_shunt, double c_couple);

// Symmetric part of m, verified SPD by Cholesky. A smallest eigenvalue within
// -1e-12 * trace is clamped to the PSD boundary and reported in warnings.
Mat spd_checked(const Mat& m, const std::string& what, std::vector<std::string>* warnings = nullptr);
bool is_spd(const Mat& m);

enum class ParamKind { S, Z, Y };
const char* kind_name(ParamKind k);

struct SampledNetwork {
    ParamKind kind = ParamKind::Z;
    std::vector<double> freqs;  // Hz
    std::vector<CMat> data;
    double z_ref = 50.0;
    std::vector<std::string> port_names;
    bool reciprocal = false;

    int ports() const { return data.empty() ? static_cast<int>(port_names.size()) : static_cast<int>(data.front().rows()); }
    void validate() const;
};

CMat z_to_s(const CMat& z, double z0);
CMat s_to_z(const CMat& s, double z0);
SampledNetwork z_to_s(const SampledNetwork& z, double z0);
SampledNetwork s_to_z(const SampledNetwork& s, double z0);
SampledNetwork z_to_y(const SampledNetwork& z);
SampledNetwork y_to_z(const SampledNetwork& y);

struct Mode {
    double omega = 0.0;  // rad/s
    Vec r;               // residue R_k = r r^T
};

struct RationalImpedance {
    std::vector<std::string> port_names;
    Mat dc_residue;  // R0
    std::vector<Mode> modes;

    int ports() const { return static_cast<int>(dc_residue.rows()); }
    int n_modes() const { return static_cast<int>(modes.size()); }
    Mat turns_ratio() const;  // rows r_k
    int port_index(const std::string& name) const;
    void validate() const;
};

// Sorts modes by omega and sign-normalizes every row.
void canonicalize(RationalImpedance& z);
// Largest-magnitude entry made positive; ties go to the lowest index.
void normalize_sign(Vec& r);

CMat eval_rational(const RationalImpedance& z, cplx s);
SampledNetwork sample_rational(const RationalImpedance& z, const std::vector<double>& freqs_hz);

struct CauerFactorization {
    Mat U;     // orthonormal columns
    Vec C0;    // port-stage capacitances
    Vec L_R;   // 1 / omega^2
    Vec C_R;   // all ones
};

CauerFactorization cauer_factorize(const RationalImpedance& z);

std::vector<double> linspace(double lo, double hi, int n);

}  // namespace qnet
