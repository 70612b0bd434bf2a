#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmem/afc.hpp"
#include "qmem/detection.hpp"
#include "qmem/polarization.hpp"

namespace qmem {

struct PulseConfig {
    double fwhm_s = 140e-9;
    double center_s = 700e-9;
    double dt_s = 2e-9;
    double mu = 1.0;        ///< mean photon number for the echo histogram
};

struct TomoConfig {
    double mu = 0.4;
    int resamples = 200;
    double sigma_tech = 0.005;           ///< relative technical drift per rate
    std::vector<double> fringe_angles_deg = {0,  15, 30,  45,  60,  75,
                                             90, 105, 120, 135, 150, 165};
};

struct SweepConfig {
    std::vector<double> mu_list = {0.01, 0.04, 0.1, 0.4, 1.0, 3.5, 10.0, 36.0};
    std::vector<StateLabel> inputs = {StateLabel::V, StateLabel::D, StateLabel::R};
    std::vector<double> eta_lines = {0.02, 0.08, 0.10, 0.12};
    double verdict_eta = 0.10;      ///< benchmark line used for the verdict column
    double nd_threshold_mu = 1.0;   ///< apply the ND filter above this mu
    double nd_factor = 0.1;         ///< its intensity transmission
};

struct BenchConfig {
    std::vector<double> eta_lines = {0.001, 0.01, 0.1, 0.25, 0.5, 1.0};
    double mu_min = 0.05;
    double mu_max = 30.0;
    int mu_points = 61;             ///< log-spaced
};

struct RunConfig {
    MemoryParams memory;
    ChannelParams channel;
    PulseConfig pulse;
    TomoConfig tomo;
    SweepConfig sweep;
    BenchConfig benchmark;
    uint64_t seed = 1;
    std::string output_dir = "out";
    int threads = 1;

    void validate() const;
};

/// Parse `key = value` lines with '#' comments and dotted keys
/// (e.g. `memory.comb_spacing_hz = 2e6`). Unknown keys and malformed values
/// raise ConfigError with the line number. Setting memory.comb_spacing_hz
/// keeps storage_time_s in sync unless memory.storage_time_ns is given too.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// The default config, serialized with comments; round-trips through
/// parse_config_text.
std::string default_config_text();

} // namespace qmem
