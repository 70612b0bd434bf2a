#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qmem/afc.hpp"
#include "qmem/polarization.hpp"
#include "qmem/rng.hpp"

namespace qmem {

/// Transmission channel, detector and acquisition parameters.
struct ChannelParams {
    double eta_t = 0.40;                ///< channel transmission
    double eta_d = 0.50;                ///< detector quantum efficiency
    double dark_prob_per_window = 1e-4;
    double window_s = 4.0e-7;           ///< counting gate
    double rep_rate_hz = 5.0e4;
    long long shots = 100000;
    /// Extra neutral-density attenuation in front of the memory (intensity
    /// factor, 1 = none). Enables large-mu runs in the linear regime.
    double extra_attenuation = 1.0;
    /// When set, clicks are deterministic expected values
    /// round(shots * mean p) instead of Bernoulli samples.
    bool analytic_rates = false;

    void validate() const;
};

/// Click tally for one (input state, analyzer setting) cell, together with a
/// same-length dark reference acquisition (input blocked).
struct CountRecord {
    StateLabel input;
    MeasurementSetting setting;
    long long shots = 0;
    long long clicks = 0;
    long long dark_reference_clicks = 0;

    void validate() const;
};

/// Arrival-time histogram with uniform bins.
struct TimeHistogram {
    double bin_s = 0.0;
    double t0_s = 0.0;
    std::vector<long long> counts;

    double time_at(size_t i) const { return t0_s + (static_cast<double>(i) + 0.5) * bin_s; }
};

/// Mean photon number that produces the given per-window detection
/// probability through the bare channel (no memory): the calibration
/// inverse of p = 1 - exp(-mu eta_t eta_d).
double mu_from_detection_probability(double p_det, const ChannelParams& ch);

/// Per-shot click probability for a coherent input of mean photon number mu
/// stored in the memory (fixed differential phase) and analyzed by `setting`:
/// p = 1 - (1 - dark) exp(-mu eta_t eta_d att |<port|U out>|^2).
double click_probability(const PureQubit& input, double mu, const MemoryParams& mem,
                         const ChannelParams& ch, const MeasurementSetting& setting,
                         double differential_phase_rad);

/// click_probability averaged over the memory phase distribution
/// (Gauss-Hermite quadrature).
double mean_click_probability(const PureQubit& input, double mu, const MemoryParams& mem,
                              const ChannelParams& ch, const MeasurementSetting& setting);

/// Simulate counts for every (input, setting) cell in the given order. Each
/// cell consumes its own seed-derived substream, so results do not depend on
/// evaluation order; an equal-shots dark reference is tallied per cell.
std::vector<CountRecord> run_counts(std::span<const StateLabel> inputs,
                                    std::span<const MeasurementSetting> settings,
                                    double mu, const MemoryParams& mem,
                                    const ChannelParams& ch, uint64_t seed);

/// Arrival-time histogram of detector clicks for a propagated pulse shape.
/// Expected counts per bin are proportional to the windowed |E|^2 fraction of
/// `input_energy` plus the uniform dark floor; counts are Poisson samples
/// (deterministic expected values in analytic mode).
TimeHistogram build_histogram(const PulseShape& pulse, double input_energy, double mu,
                              const ChannelParams& ch, uint64_t seed, size_t n_bins,
                              double t_start_s, double t_stop_s);

} // namespace qmem
