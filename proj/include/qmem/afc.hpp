#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qmem/polarization.hpp"
#include "qmem/rng.hpp"

namespace qmem {

/// Dual-rail atomic-frequency-comb memory parameters. The comb re-emits at
/// t = 1 / comb_spacing_hz, so storage_time_s and comb_spacing_hz are locked
/// together (validate() enforces the product to be 1 within 1e-9).
struct MemoryParams {
    double comb_spacing_hz = 2.0e6;
    double storage_time_s = 5.0e-7;
    double eta_mem_h = 0.10;       ///< intensity recall efficiency, H rail
    double eta_mem_v = 0.10;       ///< intensity recall efficiency, V rail
    double phase_noise_sigma_rad = 0.61045815285159956;
    int n_teeth = 4;
    double tooth_fwhm_hz = 5.0e5;
    double peak_od = 6.0;          ///< optical depth at a tooth centre

    void validate() const;

    /// Set the spacing and keep storage_time_s in sync.
    void set_comb_spacing(double hz);
};

/// Output amplitudes of the parametric storage model for one shot.
struct RetrievedAmplitudes {
    complexd out_h;
    complexd out_v;
    double survival;  ///< |out|^2, the recalled intensity fraction
};

/// Parametric dual-rail recall: each rail is scaled by sqrt(eta) and the V
/// rail acquires the given differential phase. Deterministic; pair with
/// sample_differential_phase for the stochastic model.
RetrievedAmplitudes store_and_retrieve(const PureQubit& q, const MemoryParams& p,
                                       double differential_phase_rad);

/// One draw of the shot-to-shot differential phase, N(0, sigma).
double sample_differential_phase(const MemoryParams& p, Rng& rng);

/// Optical depth profile of the comb at detuning f from the carrier:
/// Gaussian teeth of equal peak_od on a grid of spacing comb_spacing_hz,
/// centred symmetrically about zero detuning.
double comb_od_profile(const MemoryParams& p, double detuning_hz);

/// Amplitude transmission t(f) = exp(-d(f)/2) on a caller-supplied detuning
/// grid. The grid must be symmetric about zero and fine enough to resolve a
/// tooth (step <= tooth_fwhm/10); violations are rejected with a diagnostic.
std::vector<complexd> comb_transfer_function(const MemoryParams& p,
                                             std::span<const double> detuning_hz);

/// Complex field envelope on a uniform time grid.
struct PulseShape {
    double dt_s = 0.0;
    double t0_s = 0.0;               ///< time of samples[0]
    double fwhm_s = 0.0;             ///< intensity FWHM of the nominal input
    std::vector<complexd> samples;

    double energy() const;           ///< sum |E|^2 dt
    double time_at(size_t i) const { return t0_s + dt_s * static_cast<double>(i); }
};

/// Gaussian envelope with the given intensity FWHM, unit peak amplitude.
/// Rejects grids that clip the pulse (boundary sample above 1e-6 of peak).
PulseShape gaussian_pulse(double fwhm_s, double center_s, double dt_s, size_t n_samples);

struct PropagationResult {
    PulseShape output;
    double echo_delay_s;      ///< peak time minus input centre; meaningful only
                              ///< when echo_efficiency is above numerical floor
    double echo_efficiency;   ///< energy in the echo window / input energy
    double input_energy;
};

/// Frequency-domain propagation through the comb: FFT, apply t(f), inverse
/// FFT. The grid is zero-padded to a power of two long enough to hold the
/// echo and fine enough in frequency to resolve a tooth. The echo peak is
/// searched for at t > centre + 2 fwhm; efficiency integrates a +-fwhm
/// window around centre + storage time.
PropagationResult propagate_pulse(const PulseShape& input, const MemoryParams& p);

} // namespace qmem
