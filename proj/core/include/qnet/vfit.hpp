#pragma once

#include "qnet/netcore.hpp"

#include <string>
#include <vector>

namespace qnet {

enum class WeightMode { uniform, inverse_magnitude };

struct FitConfig {
    int n_pole_pairs = 4;
    double band_lo_hz = 0.0;
    double band_hi_hz = 0.0;
    int max_iterations = 30;
    double pole_convergence_tol = 1e-6;
    double dc_capture_radius = -1.0;  // rad/s; negative selects 0.5 * 2*pi*band_lo
    double rank1_eig_threshold = 1e-4;
    int refine_max_evals = 200;       // 0 disables the log-magnitude refinement
    WeightMode weight_mode = WeightMode::uniform;
    bool relaxed = false;
    bool allow_degenerate_hf_pole = false;

    double capture_radius() const;
    void validate() const;
};

// Entries with Im(p) > 0 stand for the pair (p, conj p) with residues (R, conj R);
// real entries are real poles with real residues. h is the fixed 1/s term.
struct VFState {
    std::vector<cplx> poles;
    std::vector<cplx> sigma_residues;
    double d = 1.0;
    int iteration = 0;
};

struct GeneralRational {
    std::vector<cplx> poles;
    std::vector<CMat> residues;
    Mat h, d, e;  // coefficients of 1/s, 1 and s

    CMat eval(cplx s) const;
};

std::vector<cplx> initial_poles(const FitConfig& cfg);

// Samples of data restricted to the band, in the form the fitting routines use.
SampledNetwork band_limited(const SampledNetwork& data, const FitConfig& cfg);

// One pole relocation over all upper-triangle entries with a shared pole set.
VFState vf_relocate(const SampledNetwork& data, const VFState& state, WeightMode weights = WeightMode::uniform,
                    bool relaxed = false);
GeneralRational vf_residues(const SampledNetwork& data, const std::vector<cplx>& poles,
                            WeightMode weights = WeightMode::uniform);

RationalImpedance enforce_lossless(const GeneralRational& gr, const FitConfig& cfg,
                                   std::vector<std::string>* log = nullptr);

struct RefineResult {
    RationalImpedance model;
    double initial_cost = 0.0;
    double final_cost = 0.0;
    bool improved = false;
    int evaluations = 0;
};

RefineResult refine_lossless(const RationalImpedance& z0, const SampledNetwork& data, const FitConfig& cfg);

// Stacked log10|Z_ij| and log10|S_ij| residuals (upper triangle) of model vs data.
Vec log_magnitude_residuals(const RationalImpedance& z, const SampledNetwork& data);
double logmag_rms(const RationalImpedance& z, const SampledNetwork& data);   // Z entries only
double relative_rms(const RationalImpedance& z, const SampledNetwork& data);

struct FitReport {
    int iterations = 0;
    bool converged = false;
    std::vector<cplx> vf_poles;
    double rms_vf = 0.0;
    double rms_lossless = 0.0;
    double rms_final = 0.0;
    double logmag_rms_final = 0.0;
    bool refined = false;
    bool refine_improved = false;
    std::vector<std::string> log;
};

RationalImpedance fit(const SampledNetwork& data, const FitConfig& cfg, FitReport* report = nullptr);

}  // namespace qnet
