#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "qmem/config.hpp"
#include "qmem/errors.hpp"
#include "qmem/io.hpp"
#include "qmem/pipeline.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string output_dir;
    uint64_t seed = 0;
    bool seed_set = false;
    bool no_plot = false;
};

void attach_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "Configuration file (key = value lines)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opts.output_dir, "Output directory (overrides run.output_dir)");
    cmd->add_option("--seed", opts.seed, "Random seed (overrides run.seed)")
        ->each([&opts](const std::string&) { opts.seed_set = true; });
    cmd->add_flag("--no-plot", opts.no_plot, "Skip SVG plot generation");
}

qmem::RunConfig make_config(const CommonOpts& opts) {
    qmem::RunConfig cfg =
        opts.config_path.empty() ? qmem::RunConfig{} : qmem::load_config(opts.config_path);
    if (opts.seed_set) cfg.seed = opts.seed;
    if (!opts.output_dir.empty()) cfg.output_dir = opts.output_dir;
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator and analysis toolkit for polarization-qubit storage in an "
                 "atomic-frequency-comb memory"};
    app.require_subcommand(1);

    CommonOpts bench_opts, echo_opts, tomo_opts, sweep_opts;
    CLI::App* bench = app.add_subcommand(
        "benchmark", "Classical storage bound versus mean photon number");
    attach_common(bench, bench_opts);
    CLI::App* echo = app.add_subcommand(
        "echo", "Pulse propagation through the comb with arrival-time histograms");
    attach_common(echo, echo_opts);
    CLI::App* tomo = app.add_subcommand(
        "tomo", "Six-state tomography and visibility fringes");
    attach_common(tomo, tomo_opts);
    CLI::App* sweep = app.add_subcommand(
        "sweep", "Fidelity versus mu against the classical bounds");
    attach_common(sweep, sweep_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (bench->parsed()) {
            auto cfg = make_config(bench_opts);
            auto run = qmem::run_benchmark(cfg, !bench_opts.no_plot);
            std::cout << "benchmark: " << run.curves.size() << " curves x "
                      << run.mu_grid.size() << " points -> " << run.csv_path << "\n";
        } else if (echo->parsed()) {
            auto cfg = make_config(echo_opts);
            auto run = qmem::run_echo(cfg, !echo_opts.no_plot);
            std::cout << "echo: delay " << qmem::format_double(run.with_afc.echo_delay_s * 1e9)
                      << " ns, efficiency "
                      << qmem::format_double(run.with_afc.echo_efficiency) << ", count ratio "
                      << qmem::format_double(run.count_ratio) << " -> "
                      << run.histogram_csv_path << "\n";
        } else if (tomo->parsed()) {
            auto cfg = make_config(tomo_opts);
            auto run = qmem::run_tomo(cfg, !tomo_opts.no_plot);
            std::cout << "tomo: mu " << qmem::format_double(cfg.tomo.mu) << "\n";
            for (const auto& s : run.states)
                std::cout << "  " << qmem::to_string(s.input) << ": F_raw "
                          << qmem::format_double(s.fidelity_raw) << " +- "
                          << qmem::format_double(s.fidelity_raw_err) << ", F_ds "
                          << qmem::format_double(s.fidelity_dark_subtracted) << " +- "
                          << qmem::format_double(s.fidelity_dark_subtracted_err) << "\n";
            for (const auto& f : run.fringes)
                std::cout << "  fringe " << qmem::to_string(f.input)
                          << (f.with_qwp ? " (QWP in)" : "") << ": V "
                          << qmem::format_double(f.fit.visibility) << " +- "
                          << qmem::format_double(f.fit.visibility_err) << "\n";
            std::cout << "  -> " << run.results_csv_path << "\n";
        } else if (sweep->parsed()) {
            auto cfg = make_config(sweep_opts);
            auto run = qmem::run_sweep(cfg, !sweep_opts.no_plot);
            for (const auto& row : run.rows)
                std::cout << "  mu " << qmem::format_double(row.mu) << ": F_raw "
                          << qmem::format_double(row.f_raw) << " ("
                          << qmem::to_string(row.verdict) << ")\n";
            std::cout << "sweep -> " << run.csv_path << "\n";
        }
    } catch (const qmem::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const qmem::InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const qmem::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
