#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "qmem/detection.hpp"
#include "qmem/errors.hpp"
#include "qmem/polarization.hpp"

namespace qmem {

enum class TomographyMethod { linear_inversion, max_likelihood };

/// Dark-corrected detection rate: (p_meas - p_dark) / (1 - p_dark),
/// clamped at zero (clamped flags when the raw difference was negative).
struct DarkSubtracted {
    double rate;
    bool clamped;
};

DarkSubtracted dark_subtract(const CountRecord& rec);

/// Canonical state transmitted by an analyzer setting; throws InvalidInput
/// when the setting matches none of the six canonical projectors.
StateLabel setting_transmitted_state(const MeasurementSetting& s);

/// Extract the six canonical projector rates (order H,V,D,A,R,L) from a
/// record set, optionally dark-subtracted. Rejects sets with a missing or
/// duplicated projector, naming the absent one.
std::array<double, 6> rates_from_records(std::span<const CountRecord> records,
                                         bool dark_subtracted);

/// Stokes reconstruction S_i from rate imbalances; the result is Hermitian
/// with unit trace but NOT guaranteed positive for noisy rates. Callers
/// should check is_physical().
DensityMatrix2 linear_inversion(const std::array<double, 6>& rates);

/// Nearest physical state: negative eigenvalue clipped to zero, trace
/// renormalized.
DensityMatrix2 psd_project(const DensityMatrix2& rho);

struct MleResult {
    DensityMatrix2 rho;
    double loglik = 0.0;
    int iterations = 0;
    double grad_norm = 0.0;
    bool converged = false;
};

/// Thrown when the likelihood optimizer stalls; carries the best iterate.
class MleFailure : public NumericalError {
public:
    MleFailure(const std::string& what, MleResult best_so_far)
        : NumericalError(what), best(std::move(best_so_far)) {}
    MleResult best;
};

/// Maximum-likelihood state estimate from canonical-projector counts
/// (order H,V,D,A,R,L; fractional values allowed for dark-corrected data).
/// The likelihood conditions each basis pair (H/V, D/A, R/L) on its total,
/// which cancels the unknown overall detection scale. The state is
/// parameterized as T^dag T / tr so the estimate is physical by
/// construction; optimization is Nelder-Mead started from PSD-projected
/// linear inversion.
MleResult max_likelihood(const std::array<double, 6>& counts);

struct FidelityEstimate {
    double fidelity;
    double err;              ///< bootstrap standard deviation
    int failed_resamples;
};

/// Max-likelihood fidelity against a pure target with a parametric-bootstrap
/// error bar. Each resample redraws clicks (and dark-reference clicks when
/// dark_subtracted) binomially and multiplies rates by (1 + sigma_tech * g),
/// g ~ N(0,1), to model slow technical drift. Throws NumericalError when
/// more than 5% of resamples fail to converge.
FidelityEstimate fidelity_with_error(std::span<const CountRecord> records,
                                     const PureQubit& target, int resamples,
                                     uint64_t seed, double sigma_tech,
                                     bool dark_subtracted);

/// Result of the least-squares fringe fit p(theta) = (A/2)(1 + V cos(4 theta - phase)).
struct FringeFit {
    double amplitude;      ///< A, twice the mean level
    double visibility;     ///< V = (p_max - p_min)/(p_max + p_min) of the fit
    double phase_rad;
    double visibility_err; ///< parametric-bootstrap standard deviation

    double value_at(double angle_rad) const;
};

/// Fit a detection-probability fringe versus half-wave-plate angle.
/// Linear least squares in the (1, cos 4theta, sin 4theta) basis; requires
/// at least 8 distinct angles spanning >= pi/4. shots_per_point drives the
/// bootstrap error (0 disables it).
FringeFit fit_fringe(std::span<const double> angles_rad, std::span<const double> rates,
                     long long shots_per_point, int bootstrap_resamples, uint64_t seed);

/// Full per-state tomography summary as assembled by the pipeline.
struct TomographyResult {
    StateLabel input;
    TomographyMethod method = TomographyMethod::max_likelihood;
    DensityMatrix2 rho;                    ///< dark-subtracted MLE state
    double fidelity_raw = 0.0;
    double fidelity_raw_err = 0.0;
    double fidelity_dark_subtracted = 0.0;
    double fidelity_dark_subtracted_err = 0.0;
    double loglik = 0.0;
    int iterations = 0;
};

} // namespace qmem
