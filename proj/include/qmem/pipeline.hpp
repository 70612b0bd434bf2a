#pragma once

#include <string>
#include <vector>

#include "qmem/benchmark.hpp"
#include "qmem/config.hpp"
#include "qmem/io.hpp"
#include "qmem/tomography.hpp"

namespace qmem {

/// Deterministic sub-seed for one pipeline activity.
uint64_t derive_seed(uint64_t seed, uint64_t tag);

struct BenchmarkRun {
    std::vector<double> mu_grid;
    std::vector<double> etas;
    std::vector<std::vector<BenchmarkPoint>> curves;  ///< parallel to etas
    std::string csv_path;
    std::string svg_path;  ///< empty when plots disabled
};

/// Classical-bound curves over a log-spaced mu grid, one per configured eta.
BenchmarkRun run_benchmark(const RunConfig& cfg, bool write_plots);

struct EchoRun {
    PropagationResult with_afc;
    PropagationResult reference;       ///< comb absent (zero optical depth)
    TimeHistogram hist_with_afc;
    TimeHistogram hist_reference;
    long long echo_window_counts = 0;  ///< AFC histogram, echo +- fwhm
    long long input_window_counts = 0; ///< reference histogram, input +- 2 fwhm
    double count_ratio = 0.0;          ///< echo / input window counts
    std::string histogram_csv_path;
    std::string intensity_csv_path;
    std::string report_json_path;
    std::string svg_path;
};

/// Pulse storage and recall: propagation through the comb, a comb-free
/// reference, and simulated arrival-time histograms of both.
EchoRun run_echo(const RunConfig& cfg, bool write_plots);

struct FringeScan {
    StateLabel input;
    bool with_qwp;
    std::vector<double> angles_deg;
    std::vector<double> rates;
    FringeFit fit;
    std::string csv_path;
};

struct TomoRun {
    std::vector<CountRecord> records;        ///< all (input, setting) cells
    std::vector<TomographyResult> states;    ///< one per canonical input
    std::vector<FringeScan> fringes;         ///< V, D, R and R-without-QWP
    std::string counts_csv_path;
    std::string results_csv_path;
    std::string report_json_path;
    std::string fringe_svg_path;
};

/// Six-state tomography at tomo.mu plus the four visibility fringes.
TomoRun run_tomo(const RunConfig& cfg, bool write_plots);

struct SweepRow {
    double mu;
    double f_raw, f_raw_err;
    double f_ds, f_ds_err;
    std::vector<double> f_class_lines;  ///< parallel to sweep.eta_lines
    Verdict verdict;
};

struct SweepStateRow {
    double mu;
    StateLabel input;
    double f_raw, f_raw_err;
    double f_ds, f_ds_err;
};

struct SweepRun {
    std::vector<SweepRow> rows;
    std::vector<SweepStateRow> per_state;
    std::string csv_path;
    std::string states_csv_path;
    std::string svg_path;
};

/// Mean stored-state fidelity versus mu with classical-bound columns and a
/// quantum/classical verdict per point.
SweepRun run_sweep(const RunConfig& cfg, bool write_plots);

} // namespace qmem
