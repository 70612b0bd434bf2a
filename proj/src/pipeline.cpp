#include "qmem/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "qmem/rng.hpp"
#include "qmem/svgplot.hpp"

namespace qmem {

namespace {

constexpr double kPi = 3.14159265358979323846;

const char* kPalette[8] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                           "#ff7f0e", "#8c564b", "#17becf", "#e377c2"};

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

/// Run fn(0..n-1) on up to `threads` workers. Work items own their output
/// slots, so the result is schedule-independent; the first exception wins.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    size_t n_workers = std::min<size_t>(static_cast<size_t>(threads), n);
    pool.reserve(n_workers);
    for (size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::string eta_column_name(double eta) {
    std::string s = "fclass_" + format_double(eta);
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

/// Consecutive six-record slice for one input of a cross-product record set.
std::span<const CountRecord> state_slice(const std::vector<CountRecord>& records, size_t state_idx,
                                         size_t n_settings) {
    return {records.data() + state_idx * n_settings, n_settings};
}

std::vector<MeasurementSetting> canonical_settings() {
    std::vector<MeasurementSetting> s;
    s.reserve(6);
    for (StateLabel x : kAllStates) s.push_back(canonical_setting(x));
    return s;
}

} // namespace

uint64_t derive_seed(uint64_t seed, uint64_t tag) {
    return splitmix64(splitmix64(seed ^ 0x6a09e667f3bcc908ULL) ^ splitmix64(tag));
}

BenchmarkRun run_benchmark(const RunConfig& cfg, bool write_plots) {
    cfg.validate();
    BenchmarkRun out;
    int n = cfg.benchmark.mu_points;
    out.mu_grid.reserve(n);
    double ratio = cfg.benchmark.mu_max / cfg.benchmark.mu_min;
    for (int i = 0; i < n; ++i)
        out.mu_grid.push_back(cfg.benchmark.mu_min *
                              std::pow(ratio, static_cast<double>(i) / (n - 1)));
    out.etas = cfg.benchmark.eta_lines;
    for (double eta : out.etas) out.curves.push_back(benchmark_curve(out.mu_grid, eta));

    std::vector<BenchmarkPoint> all;
    for (const auto& curve : out.curves) all.insert(all.end(), curve.begin(), curve.end());
    out.csv_path = join_path(cfg.output_dir, "benchmark.csv");
    write_benchmark_csv(out.csv_path, all);

    if (write_plots) {
        SvgPlot plot("Classical storage bound", "mean photon number mu", "classical fidelity bound");
        plot.set_log_x(true);
        for (size_t i = 0; i < out.curves.size(); ++i) {
            std::vector<double> y;
            for (const auto& p : out.curves[i]) y.push_back(p.f_class);
            std::ostringstream label;
            label << "eta = " << format_double(out.etas[i]);
            plot.add_series(out.mu_grid, y, kPalette[i % 8], label.str());
        }
        plot.add_hline(2.0 / 3.0, "#777777", "single-photon limit 2/3");
        out.svg_path = join_path(cfg.output_dir, "benchmark.svg");
        plot.write(out.svg_path);
    }
    return out;
}

EchoRun run_echo(const RunConfig& cfg, bool write_plots) {
    cfg.validate();
    EchoRun out;
    double center = cfg.pulse.center_s;
    double dt = cfg.pulse.dt_s;
    auto n_in = static_cast<size_t>(std::ceil(2.0 * center / dt));
    PulseShape input = gaussian_pulse(cfg.pulse.fwhm_s, center, dt, n_in);

    out.with_afc = propagate_pulse(input, cfg.memory);
    MemoryParams no_comb = cfg.memory;
    no_comb.peak_od = 0.0;
    out.reference = propagate_pulse(input, no_comb);

    double stop = center + cfg.memory.storage_time_s + 4.0 * cfg.pulse.fwhm_s;
    auto n_bins = static_cast<size_t>(std::ceil(stop / 1e-8));
    double mu = cfg.pulse.mu;
    out.hist_with_afc = build_histogram(out.with_afc.output, out.with_afc.input_energy, mu,
                                        cfg.channel, derive_seed(cfg.seed, 50), n_bins, 0.0,
                                        n_bins * 1e-8);
    out.hist_reference = build_histogram(out.reference.output, out.reference.input_energy, mu,
                                         cfg.channel, derive_seed(cfg.seed, 51), n_bins, 0.0,
                                         n_bins * 1e-8);

    double t_echo = center + cfg.memory.storage_time_s;
    for (size_t i = 0; i < n_bins; ++i) {
        double t = out.hist_with_afc.time_at(i);
        if (std::abs(t - t_echo) <= cfg.pulse.fwhm_s)
            out.echo_window_counts += out.hist_with_afc.counts[i];
        if (std::abs(t - center) <= 2.0 * cfg.pulse.fwhm_s)
            out.input_window_counts += out.hist_reference.counts[i];
    }
    out.count_ratio = out.input_window_counts > 0
                          ? static_cast<double>(out.echo_window_counts) /
                                static_cast<double>(out.input_window_counts)
                          : 0.0;

    out.histogram_csv_path = join_path(cfg.output_dir, "echo_histogram.csv");
    write_dual_histogram_csv(out.histogram_csv_path, out.hist_with_afc, out.hist_reference);

    {
        CsvTable t;
        t.header = {"time_s", "intensity_with_afc", "intensity_reference"};
        for (size_t i = 0; i < out.with_afc.output.samples.size(); ++i) {
            double time = out.with_afc.output.time_at(i);
            if (time > stop) break;
            t.rows.push_back({format_double(time),
                              format_double(std::norm(out.with_afc.output.samples[i])),
                              format_double(std::norm(out.reference.output.samples[i]))});
        }
        out.intensity_csv_path = join_path(cfg.output_dir, "echo_intensity.csv");
        write_csv(out.intensity_csv_path, t);
    }

    {
        nlohmann::json j;
        j["echo_delay_ns"] = out.with_afc.echo_delay_s * 1e9;
        j["echo_efficiency"] = out.with_afc.echo_efficiency;
        j["storage_time_ns"] = cfg.memory.storage_time_s * 1e9;
        j["echo_window_counts"] = out.echo_window_counts;
        j["input_window_counts"] = out.input_window_counts;
        j["count_ratio"] = out.count_ratio;
        out.report_json_path = join_path(cfg.output_dir, "echo_report.json");
        ensure_parent_dir(out.report_json_path);
        std::ofstream os(out.report_json_path);
        if (!os) throw InvalidInput("run_echo: cannot open '" + out.report_json_path + "'");
        os << j.dump(2) << "\n";
    }

    if (write_plots) {
        SvgPlot plot("Pulse storage and recall", "time (ns)", "counts per bin");
        std::vector<double> t, ca, cr;
        for (size_t i = 0; i < n_bins; ++i) {
            t.push_back(out.hist_with_afc.time_at(i) * 1e9);
            ca.push_back(static_cast<double>(out.hist_with_afc.counts[i]));
            cr.push_back(static_cast<double>(out.hist_reference.counts[i]));
        }
        plot.add_series(t, cr, kPalette[0], "comb absent (reference)");
        plot.add_series(t, ca, kPalette[1], "comb present");
        out.svg_path = join_path(cfg.output_dir, "echo.svg");
        plot.write(out.svg_path);
    }
    return out;
}

namespace {

FringeScan run_fringe_scan(const RunConfig& cfg, StateLabel input, bool with_qwp,
                           uint64_t counts_tag, uint64_t fit_tag) {
    FringeScan scan;
    scan.input = input;
    scan.with_qwp = with_qwp;
    scan.angles_deg = cfg.tomo.fringe_angles_deg;

    std::vector<MeasurementSetting> settings;
    std::vector<double> angles_rad;
    settings.reserve(scan.angles_deg.size());
    for (double deg : scan.angles_deg) {
        double rad = deg * kPi / 180.0;
        angles_rad.push_back(rad);
        std::vector<WaveplateSetting> plates;
        if (with_qwp)
            plates.emplace_back(WaveplateKind::quarter_wave, 45.0 * kPi / 180.0);
        plates.emplace_back(WaveplateKind::half_wave, rad);
        settings.emplace_back(std::move(plates), Port::transmitted);
    }

    std::array<StateLabel, 1> inputs = {input};
    auto records = run_counts(inputs, settings, cfg.tomo.mu, cfg.memory, cfg.channel,
                              derive_seed(cfg.seed, counts_tag));
    scan.rates.reserve(records.size());
    for (const auto& rec : records)
        scan.rates.push_back(static_cast<double>(rec.clicks) / static_cast<double>(rec.shots));
    scan.fit = fit_fringe(angles_rad, scan.rates, cfg.channel.shots, cfg.tomo.resamples,
                          derive_seed(cfg.seed, fit_tag));
    return scan;
}

} // namespace

TomoRun run_tomo(const RunConfig& cfg, bool write_plots) {
    cfg.validate();
    TomoRun out;
    auto settings = canonical_settings();
    out.records = run_counts(kAllStates, settings, cfg.tomo.mu, cfg.memory, cfg.channel,
                             derive_seed(cfg.seed, 1));

    out.counts_csv_path = join_path(cfg.output_dir, "tomo_counts.csv");
    write_count_records_csv(out.counts_csv_path, out.records);

    for (size_t i = 0; i < kAllStates.size(); ++i) {
        StateLabel label = kAllStates[i];
        auto slice = state_slice(out.records, i, settings.size());
        PureQubit target = canonical_state(label);
        FidelityEstimate raw = fidelity_with_error(slice, target, cfg.tomo.resamples,
                                                   derive_seed(cfg.seed, 10 + 2 * i),
                                                   cfg.tomo.sigma_tech, false);
        FidelityEstimate ds = fidelity_with_error(slice, target, cfg.tomo.resamples,
                                                  derive_seed(cfg.seed, 11 + 2 * i),
                                                  cfg.tomo.sigma_tech, true);
        std::array<double, 6> rates = rates_from_records(slice, true);
        std::array<double, 6> counts;
        for (int k = 0; k < 6; ++k)
            counts[k] = rates[k] * static_cast<double>(cfg.channel.shots);
        MleResult mle = max_likelihood(counts);

        TomographyResult res;
        res.input = label;
        res.method = TomographyMethod::max_likelihood;
        res.rho = mle.rho;
        res.fidelity_raw = raw.fidelity;
        res.fidelity_raw_err = raw.err;
        res.fidelity_dark_subtracted = ds.fidelity;
        res.fidelity_dark_subtracted_err = ds.err;
        res.loglik = mle.loglik;
        res.iterations = mle.iterations;
        out.states.push_back(res);

        nlohmann::json extra;
        extra["input"] = to_string(label);
        extra["method"] = to_string(res.method);
        extra["fidelity_raw"] = res.fidelity_raw;
        extra["fidelity_dark_subtracted"] = res.fidelity_dark_subtracted;
        write_density_matrix_json(join_path(cfg.output_dir, "tomo_rho_" + to_string(label) + ".json"),
                                  res.rho, extra);
    }

    {
        CsvTable t;
        t.header = {"input", "method", "fidelity_raw", "fidelity_raw_err", "fidelity_dark_sub",
                    "fidelity_dark_sub_err", "loglik", "iterations"};
        for (const auto& r : out.states)
            t.rows.push_back({to_string(r.input), to_string(r.method),
                              format_double(r.fidelity_raw), format_double(r.fidelity_raw_err),
                              format_double(r.fidelity_dark_subtracted),
                              format_double(r.fidelity_dark_subtracted_err),
                              format_double(r.loglik), std::to_string(r.iterations)});
        out.results_csv_path = join_path(cfg.output_dir, "tomo_results.csv");
        write_csv(out.results_csv_path, t);
    }

    // Visibility fringes: V and D rotate the HWP only; R is scanned twice,
    // with and without the circular-to-linear QWP.
    out.fringes.push_back(run_fringe_scan(cfg, StateLabel::V, false, 30, 40));
    out.fringes.push_back(run_fringe_scan(cfg, StateLabel::D, false, 31, 41));
    out.fringes.push_back(run_fringe_scan(cfg, StateLabel::R, true, 32, 42));
    out.fringes.push_back(run_fringe_scan(cfg, StateLabel::R, false, 33, 43));
    for (auto& scan : out.fringes) {
        std::string name = "fringe_" + to_string(scan.input) + (scan.with_qwp || scan.input != StateLabel::R ? "" : "_noqwp");
        scan.csv_path = join_path(cfg.output_dir, name + ".csv");
        write_fringe_csv(scan.csv_path, scan.angles_deg, scan.rates, scan.fit);
    }

    {
        nlohmann::json j;
        j["mu"] = cfg.tomo.mu;
        j["states"] = nlohmann::json::array();
        for (const auto& r : out.states) {
            nlohmann::json s;
            s["input"] = to_string(r.input);
            s["method"] = to_string(r.method);
            s["fidelity_raw"] = r.fidelity_raw;
            s["fidelity_raw_err"] = r.fidelity_raw_err;
            s["fidelity_dark_subtracted"] = r.fidelity_dark_subtracted;
            s["fidelity_dark_subtracted_err"] = r.fidelity_dark_subtracted_err;
            s["loglik"] = r.loglik;
            s["iterations"] = r.iterations;
            s["rho"] = density_matrix_to_json(r.rho);
            j["states"].push_back(s);
        }
        j["fringes"] = nlohmann::json::array();
        for (const auto& scan : out.fringes) {
            nlohmann::json f;
            f["input"] = to_string(scan.input);
            f["with_qwp"] = scan.with_qwp;
            f["amplitude"] = scan.fit.amplitude;
            f["visibility"] = scan.fit.visibility;
            f["visibility_err"] = scan.fit.visibility_err;
            f["phase_rad"] = scan.fit.phase_rad;
            j["fringes"].push_back(f);
        }
        out.report_json_path = join_path(cfg.output_dir, "tomo_report.json");
        ensure_parent_dir(out.report_json_path);
        std::ofstream os(out.report_json_path);
        if (!os) throw InvalidInput("run_tomo: cannot open '" + out.report_json_path + "'");
        os << j.dump(2) << "\n";
    }

    if (write_plots) {
        SvgPlot plot("Polarization fringes", "half-wave plate angle (deg)", "detection probability");
        for (size_t i = 0; i < out.fringes.size(); ++i) {
            const auto& scan = out.fringes[i];
            std::string label = to_string(scan.input) + std::string(scan.with_qwp ? " (QWP in)" : "");
            if (scan.input == StateLabel::R && !scan.with_qwp) label = "R (QWP out)";
            plot.add_series(scan.angles_deg, scan.rates, kPalette[i % 8], label);
            std::vector<double> fx, fy;
            for (double a = 0.0; a <= 180.0; a += 2.0) {
                fx.push_back(a);
                fy.push_back(scan.fit.value_at(a * kPi / 180.0));
            }
            plot.add_series(fx, fy, kPalette[i % 8], "", true);
        }
        out.fringe_svg_path = join_path(cfg.output_dir, "fringes.svg");
        plot.write(out.fringe_svg_path);
    }
    return out;
}

SweepRun run_sweep(const RunConfig& cfg, bool write_plots) {
    cfg.validate();
    SweepRun out;
    auto settings = canonical_settings();
    size_t n_mu = cfg.sweep.mu_list.size();
    size_t n_states = cfg.sweep.inputs.size();
    out.rows.resize(n_mu);
    out.per_state.resize(n_mu * n_states);

    parallel_for(n_mu, cfg.threads, [&](size_t i) {
        double mu = cfg.sweep.mu_list[i];
        ChannelParams ch = cfg.channel;
        if (mu > cfg.sweep.nd_threshold_mu) ch.extra_attenuation *= cfg.sweep.nd_factor;
        auto records = run_counts(cfg.sweep.inputs, settings, mu, cfg.memory, ch,
                                  derive_seed(cfg.seed, 100 + i));
        SweepRow row;
        row.mu = mu;
        row.f_raw = row.f_raw_err = row.f_ds = row.f_ds_err = 0.0;
        for (size_t j = 0; j < n_states; ++j) {
            auto slice = state_slice(records, j, settings.size());
            PureQubit target = canonical_state(cfg.sweep.inputs[j]);
            FidelityEstimate raw =
                fidelity_with_error(slice, target, cfg.tomo.resamples,
                                    derive_seed(cfg.seed, 1000 + 16 * i + 2 * j),
                                    cfg.tomo.sigma_tech, false);
            FidelityEstimate ds =
                fidelity_with_error(slice, target, cfg.tomo.resamples,
                                    derive_seed(cfg.seed, 1001 + 16 * i + 2 * j),
                                    cfg.tomo.sigma_tech, true);
            out.per_state[i * n_states + j] = {mu, cfg.sweep.inputs[j], raw.fidelity, raw.err,
                                               ds.fidelity, ds.err};
            row.f_raw += raw.fidelity;
            row.f_ds += ds.fidelity;
            row.f_raw_err += raw.err * raw.err;
            row.f_ds_err += ds.err * ds.err;
        }
        auto nd = static_cast<double>(n_states);
        row.f_raw /= nd;
        row.f_ds /= nd;
        row.f_raw_err = std::sqrt(row.f_raw_err) / nd;
        row.f_ds_err = std::sqrt(row.f_ds_err) / nd;
        for (double eta : cfg.sweep.eta_lines)
            row.f_class_lines.push_back(f_class(mu, eta).f_class);
        row.verdict = assess_storage(row.f_raw, mu, cfg.sweep.verdict_eta);
        out.rows[i] = std::move(row);
    });

    {
        CsvTable t;
        t.header = {"mu", "f_raw", "f_raw_err", "f_ds", "f_ds_err"};
        for (double eta : cfg.sweep.eta_lines) t.header.push_back(eta_column_name(eta));
        t.header.push_back("verdict");
        for (const auto& row : out.rows) {
            std::vector<std::string> cells = {format_double(row.mu), format_double(row.f_raw),
                                              format_double(row.f_raw_err), format_double(row.f_ds),
                                              format_double(row.f_ds_err)};
            for (double f : row.f_class_lines) cells.push_back(format_double(f));
            cells.push_back(to_string(row.verdict));
            t.rows.push_back(std::move(cells));
        }
        out.csv_path = join_path(cfg.output_dir, "sweep.csv");
        write_csv(out.csv_path, t);
    }
    {
        CsvTable t;
        t.header = {"mu", "input", "f_raw", "f_raw_err", "f_ds", "f_ds_err"};
        for (const auto& r : out.per_state)
            t.rows.push_back({format_double(r.mu), to_string(r.input), format_double(r.f_raw),
                              format_double(r.f_raw_err), format_double(r.f_ds),
                              format_double(r.f_ds_err)});
        out.states_csv_path = join_path(cfg.output_dir, "sweep_states.csv");
        write_csv(out.states_csv_path, t);
    }

    if (write_plots) {
        SvgPlot plot("Stored-state fidelity vs input photon number", "mean photon number mu",
                     "fidelity");
        std::vector<double> mus, raw, ds;
        for (const auto& row : out.rows) {
            mus.push_back(row.mu);
            raw.push_back(row.f_raw);
            ds.push_back(row.f_ds);
        }
        plot.set_log_x(true);
        plot.add_series(mus, raw, kPalette[0], "measured (raw)");
        plot.add_series(mus, ds, kPalette[1], "dark-subtracted");
        for (size_t e = 0; e < cfg.sweep.eta_lines.size(); ++e) {
            std::vector<double> y;
            for (const auto& row : out.rows) y.push_back(row.f_class_lines[e]);
            std::ostringstream label;
            label << "classical bound, eta = " << format_double(cfg.sweep.eta_lines[e]);
            plot.add_series(mus, y, kPalette[(2 + e) % 8], label.str(), true);
        }
        plot.add_hline(2.0 / 3.0, "#777777", "single-photon limit 2/3");
        out.svg_path = join_path(cfg.output_dir, "sweep.svg");
        plot.write(out.svg_path);
    }
    return out;
}

} // namespace qmem
