#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qmem/config.hpp"
#include "qmem/errors.hpp"
#include "qmem/io.hpp"
#include "qmem/pipeline.hpp"

using namespace qmem;

namespace {

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<int> counter{0};
        auto base = std::filesystem::temp_directory_path();
        std::ostringstream name;
        name << "qmem_test_" << ::getpid() << "_" << counter.fetch_add(1);
        path = base / name.str();
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(static_cast<bool>(is));
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    REQUIRE(static_cast<bool>(os));
    os << text;
}

/// A configuration that runs every pipeline stage in well under a second.
RunConfig quick_config(const TempDir& dir) {
    RunConfig cfg;
    cfg.output_dir = dir.file("out");
    cfg.channel.shots = 20000;
    cfg.tomo.resamples = 10;
    cfg.sweep.mu_list = {0.04, 0.4, 3.5};
    cfg.sweep.inputs = {StateLabel::V, StateLabel::D};
    cfg.sweep.eta_lines = {0.02, 0.1};
    cfg.benchmark.mu_points = 7;
    cfg.benchmark.eta_lines = {0.1, 1.0};
    return cfg;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(QMEMSIM_BIN) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

} // namespace

TEST_SUITE_BEGIN("pipeline");

TEST_CASE("the default config text parses back to the built-in defaults") {
    RunConfig parsed = parse_config_text(default_config_text());
    RunConfig def;
    CHECK(parsed.memory.comb_spacing_hz == def.memory.comb_spacing_hz);
    CHECK(parsed.memory.storage_time_s == def.memory.storage_time_s);
    CHECK(parsed.memory.eta_mem_h == def.memory.eta_mem_h);
    CHECK(parsed.memory.eta_mem_v == def.memory.eta_mem_v);
    CHECK(parsed.memory.phase_noise_sigma_rad ==
          doctest::Approx(def.memory.phase_noise_sigma_rad).epsilon(1e-11));
    CHECK(parsed.memory.n_teeth == def.memory.n_teeth);
    CHECK(parsed.memory.tooth_fwhm_hz == def.memory.tooth_fwhm_hz);
    CHECK(parsed.memory.peak_od == def.memory.peak_od);
    CHECK(parsed.channel.eta_t == def.channel.eta_t);
    CHECK(parsed.channel.eta_d == def.channel.eta_d);
    CHECK(parsed.channel.dark_prob_per_window == def.channel.dark_prob_per_window);
    CHECK(parsed.channel.window_s == doctest::Approx(def.channel.window_s).epsilon(1e-11));
    CHECK(parsed.channel.rep_rate_hz == def.channel.rep_rate_hz);
    CHECK(parsed.channel.shots == def.channel.shots);
    CHECK(parsed.channel.analytic_rates == def.channel.analytic_rates);
    CHECK(parsed.channel.extra_attenuation == def.channel.extra_attenuation);
    CHECK(parsed.pulse.fwhm_s == doctest::Approx(def.pulse.fwhm_s).epsilon(1e-11));
    CHECK(parsed.pulse.center_s == doctest::Approx(def.pulse.center_s).epsilon(1e-11));
    CHECK(parsed.pulse.dt_s == doctest::Approx(def.pulse.dt_s).epsilon(1e-11));
    CHECK(parsed.pulse.mu == def.pulse.mu);
    CHECK(parsed.tomo.mu == def.tomo.mu);
    CHECK(parsed.tomo.resamples == def.tomo.resamples);
    CHECK(parsed.tomo.sigma_tech == def.tomo.sigma_tech);
    CHECK(parsed.tomo.fringe_angles_deg == def.tomo.fringe_angles_deg);
    CHECK(parsed.sweep.mu_list == def.sweep.mu_list);
    CHECK(parsed.sweep.inputs == def.sweep.inputs);
    CHECK(parsed.sweep.eta_lines == def.sweep.eta_lines);
    CHECK(parsed.sweep.verdict_eta == def.sweep.verdict_eta);
    CHECK(parsed.sweep.nd_threshold_mu == def.sweep.nd_threshold_mu);
    CHECK(parsed.sweep.nd_factor == def.sweep.nd_factor);
    CHECK(parsed.benchmark.eta_lines == def.benchmark.eta_lines);
    CHECK(parsed.benchmark.mu_min == def.benchmark.mu_min);
    CHECK(parsed.benchmark.mu_max == def.benchmark.mu_max);
    CHECK(parsed.benchmark.mu_points == def.benchmark.mu_points);
    CHECK(parsed.seed == def.seed);
    CHECK(parsed.output_dir == def.output_dir);
    CHECK(parsed.threads == def.threads);
}

TEST_CASE("config parsing: overrides, unit conversions and spacing sync") {
    RunConfig cfg = parse_config_text(
        "# comment line\n"
        "memory.comb_spacing_hz = 4e6  # storage time follows\n"
        "channel.shots = 5000\n"
        "channel.window_ns = 200\n"
        "pulse.fwhm_ns = 70\n"
        "tomo.resamples = 25\n"
        "sweep.mu_list = 0.1, 1, 10\n"
        "sweep.inputs = H, L\n"
        "run.seed = 99\n"
        "run.output_dir = results\n"
        "run.threads = 3\n");
    CHECK(cfg.memory.comb_spacing_hz == 4e6);
    CHECK(cfg.memory.storage_time_s == doctest::Approx(2.5e-7).epsilon(1e-12));
    CHECK(cfg.channel.shots == 5000);
    CHECK(cfg.channel.window_s == doctest::Approx(2e-7).epsilon(1e-12));
    CHECK(cfg.pulse.fwhm_s == doctest::Approx(70e-9).epsilon(1e-12));
    CHECK(cfg.tomo.resamples == 25);
    CHECK(cfg.sweep.mu_list == std::vector<double>{0.1, 1.0, 10.0});
    REQUIRE(cfg.sweep.inputs.size() == 2);
    CHECK(cfg.sweep.inputs[0] == StateLabel::H);
    CHECK(cfg.sweep.inputs[1] == StateLabel::L);
    CHECK(cfg.seed == 99);
    CHECK(cfg.output_dir == "results");
    CHECK(cfg.threads == 3);

    // An explicit storage time need not follow the spacing, but the pair
    // must still be consistent.
    RunConfig both = parse_config_text(
        "memory.comb_spacing_hz = 4e6\nmemory.storage_time_ns = 250\n");
    CHECK(both.memory.storage_time_s == doctest::Approx(2.5e-7).epsilon(1e-12));
    CHECK_THROWS_AS(parse_config_text("memory.storage_time_ns = 400\n"), ConfigError);
}

TEST_CASE("config parsing reports the offending line") {
    try {
        parse_config_text("channel.shots = 100\n\nbogus.key = 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("line 3") != std::string::npos);
        CHECK(msg.find("bogus.key") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_config_text("channel.shots = 3.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("channel.eta_t = fast\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("channel.eta_t =\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("channel.analytic_rates = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("run.seed = -4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("run.threads = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("no equals sign here\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("sweep.mu_list = 1, 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("memory.tooth_fwhm_hz = 3e6\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("tomo.resamples = 2\n"), ConfigError);
}

TEST_CASE("load_config rejects a missing file") {
    CHECK_THROWS_AS(load_config("/nonexistent/qmem.conf"), ConfigError);
}

TEST_CASE("the shipped default config matches the built-in defaults") {
    std::string path = std::string(QMEMSIM_SOURCE_DIR) + "/configs/default.conf";
    RunConfig from_file = load_config(path);
    RunConfig def;
    CHECK(from_file.memory.comb_spacing_hz == def.memory.comb_spacing_hz);
    CHECK(from_file.channel.shots == def.channel.shots);
    CHECK(from_file.sweep.mu_list == def.sweep.mu_list);
    CHECK(from_file.benchmark.mu_points == def.benchmark.mu_points);
    CHECK(from_file.tomo.resamples == def.tomo.resamples);
}

TEST_CASE("format_double round-trips through 12 significant digits") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2e6) == "2000000");
    Rng rng(901);
    for (int i = 0; i < 200; ++i) {
        double v = (rng.uniform() - 0.5) * std::pow(10.0, std::floor(20.0 * rng.uniform()) - 8.0);
        double back = std::stod(format_double(v));
        CHECK(back == doctest::Approx(v).epsilon(1e-11));
    }
}

TEST_CASE("csv reader rejects malformed tables") {
    TempDir dir;
    CHECK_THROWS_AS(read_csv(dir.file("absent.csv")), InvalidInput);

    spit(dir.file("ragged.csv"), "a,b\n1,2\n3\n");
    try {
        read_csv(dir.file("ragged.csv"));
        FAIL("expected InvalidInput");
    } catch (const InvalidInput& e) {
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }

    spit(dir.file("empty.csv"), "");
    CHECK_THROWS_AS(read_csv(dir.file("empty.csv")), InvalidInput);

    spit(dir.file("wrong.csv"), "x,y\n1,2\n");
    CHECK_THROWS_AS(read_benchmark_csv(dir.file("wrong.csv")), InvalidInput);
}

TEST_CASE("typed csv round trips") {
    TempDir dir;

    std::vector<BenchmarkPoint> points = {f_class(0.4, 0.1), f_class(3.0, 0.5),
                                          f_class(1e-3, 1.0)};
    write_benchmark_csv(dir.file("bench.csv"), points);
    auto back = read_benchmark_csv(dir.file("bench.csv"));
    REQUIRE(back.size() == points.size());
    for (size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].mu == doctest::Approx(points[i].mu).epsilon(1e-11));
        CHECK(back[i].eta == doctest::Approx(points[i].eta).epsilon(1e-11));
        CHECK(back[i].n_min == points[i].n_min);
        CHECK(back[i].gamma == doctest::Approx(points[i].gamma).epsilon(1e-11));
        CHECK(back[i].f_class == doctest::Approx(points[i].f_class).epsilon(1e-11));
    }

    MemoryParams mem;
    ChannelParams ch;
    ch.shots = 5000;
    std::vector<MeasurementSetting> settings;
    for (StateLabel s : kAllStates) settings.push_back(canonical_setting(s));
    MeasurementSetting hwp_only;
    hwp_only.plates = {WaveplateSetting(WaveplateKind::half_wave, 15.0 * M_PI / 180.0)};
    settings.push_back(hwp_only);
    auto recs = run_counts(kAllStates, settings, 0.4, mem, ch, 31);
    write_count_records_csv(dir.file("counts.csv"), recs);
    auto rback = read_count_records_csv(dir.file("counts.csv"));
    REQUIRE(rback.size() == recs.size());
    for (size_t i = 0; i < recs.size(); ++i) {
        CHECK(rback[i].input == recs[i].input);
        CHECK(rback[i].shots == recs[i].shots);
        CHECK(rback[i].clicks == recs[i].clicks);
        CHECK(rback[i].dark_reference_clicks == recs[i].dark_reference_clicks);
        REQUIRE(rback[i].setting.plates.size() == recs[i].setting.plates.size());
        for (size_t p = 0; p < recs[i].setting.plates.size(); ++p) {
            CHECK(rback[i].setting.plates[p].kind == recs[i].setting.plates[p].kind);
            CHECK(rback[i].setting.plates[p].angle_rad ==
                  doctest::Approx(recs[i].setting.plates[p].angle_rad).epsilon(1e-11));
        }
        CHECK(rback[i].setting.port == recs[i].setting.port);
    }

    TimeHistogram ha, hb;
    ha.bin_s = hb.bin_s = 1e-8;
    ha.t0_s = hb.t0_s = 0.0;
    ha.counts = {0, 5, 17, 3, 0, 1};
    hb.counts = {2, 800, 40, 0, 0, 0};
    write_dual_histogram_csv(dir.file("dual.csv"), ha, hb);
    auto [ba, bb] = read_dual_histogram_csv(dir.file("dual.csv"));
    CHECK(ba.counts == ha.counts);
    CHECK(bb.counts == hb.counts);
    CHECK(ba.bin_s == doctest::Approx(ha.bin_s).epsilon(1e-9));
    CHECK(ba.t0_s == doctest::Approx(ha.t0_s).epsilon(1e-9));

    std::vector<double> angles_deg, rates;
    for (int i = 0; i < 12; ++i) {
        angles_deg.push_back(i * 15.0);
        rates.push_back(0.004 * (1.0 + 0.8 * std::cos(4.0 * i * 15.0 * M_PI / 180.0)));
    }
    std::vector<double> angles_rad;
    for (double d : angles_deg) angles_rad.push_back(d * M_PI / 180.0);
    FringeFit fit = fit_fringe(angles_rad, rates, 0, 0, 1);
    write_fringe_csv(dir.file("fringe.csv"), angles_deg, rates, fit);
    FringeCsv fc = read_fringe_csv(dir.file("fringe.csv"));
    REQUIRE(fc.angle_deg.size() == angles_deg.size());
    for (size_t i = 0; i < angles_deg.size(); ++i) {
        CHECK(fc.angle_deg[i] == doctest::Approx(angles_deg[i]).epsilon(1e-11));
        CHECK(fc.p_det[i] == doctest::Approx(rates[i]).epsilon(1e-11));
        CHECK(fc.fit_p[i] == doctest::Approx(fit.value_at(angles_rad[i])).epsilon(1e-9));
    }
}

TEST_CASE("density matrix json round trip") {
    TempDir dir;
    DensityMatrix2 rho = DensityMatrix2::from_bloch(0.3, -0.52, 0.41);
    nlohmann::json extra;
    extra["note"] = "check";
    write_density_matrix_json(dir.file("rho.json"), rho, extra);
    DensityMatrix2 back = read_density_matrix_json(dir.file("rho.json"));
    CHECK(trace_distance(rho, back) < 1e-12);

    auto j = nlohmann::json::parse(slurp(dir.file("rho.json")));
    CHECK(j["note"] == "check");
    CHECK(j.contains("rho"));

    spit(dir.file("bad.json"), "{\"rho\": {\"real\": [[1, 0]]}}");
    CHECK_THROWS_AS(read_density_matrix_json(dir.file("bad.json")), InvalidInput);
}

TEST_CASE("seed derivation separates pipeline activities") {
    CHECK(derive_seed(1, 5) == derive_seed(1, 5));
    CHECK(derive_seed(1, 5) != derive_seed(1, 6));
    CHECK(derive_seed(1, 5) != derive_seed(2, 5));
}

TEST_CASE("run_benchmark writes curves that match the direct evaluation") {
    TempDir dir;
    RunConfig cfg = quick_config(dir);
    BenchmarkRun run = run_benchmark(cfg, false);
    REQUIRE(run.curves.size() == 2);
    REQUIRE(run.mu_grid.size() == 7);
    CHECK(run.svg_path.empty());
    CHECK(run.mu_grid.front() == doctest::Approx(cfg.benchmark.mu_min).epsilon(1e-12));
    CHECK(run.mu_grid.back() == doctest::Approx(cfg.benchmark.mu_max).epsilon(1e-12));

    auto back = read_benchmark_csv(run.csv_path);
    REQUIRE(back.size() == 14);
    for (size_t c = 0; c < 2; ++c)
        for (size_t i = 0; i < 7; ++i) {
            BenchmarkPoint direct = f_class(run.mu_grid[i], cfg.benchmark.eta_lines[c]);
            const BenchmarkPoint& row = back[c * 7 + i];
            CHECK(row.f_class == doctest::Approx(direct.f_class).epsilon(1e-11));
            CHECK(row.n_min == direct.n_min);
        }

    BenchmarkRun with_plot = run_benchmark(cfg, true);
    CHECK_FALSE(with_plot.svg_path.empty());
    CHECK(std::filesystem::exists(with_plot.svg_path));
    std::string svg = slurp(with_plot.svg_path);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("eta = 0.1") != std::string::npos);
}

TEST_CASE("run_echo reports the storage-time delay and consistent files") {
    TempDir dir;
    RunConfig cfg = quick_config(dir);
    cfg.channel.analytic_rates = true;
    EchoRun run = run_echo(cfg, false);

    CHECK(std::abs(run.with_afc.echo_delay_s - 500e-9) <= cfg.pulse.dt_s + 1e-15);
    CHECK(run.with_afc.echo_efficiency >= 0.05);
    CHECK(run.with_afc.echo_efficiency <= 0.30);
    CHECK(run.reference.echo_efficiency < 1e-8);

    // The histogram count ratio tracks the intensity-level efficiency.
    CHECK(run.count_ratio > 0.8 * run.with_afc.echo_efficiency);
    CHECK(run.count_ratio < 1.2 * run.with_afc.echo_efficiency);

    auto [ha, hb] = read_dual_histogram_csv(run.histogram_csv_path);
    CHECK(ha.counts == run.hist_with_afc.counts);
    CHECK(hb.counts == run.hist_reference.counts);

    auto j = nlohmann::json::parse(slurp(run.report_json_path));
    CHECK(j["echo_delay_ns"].get<double>() ==
          doctest::Approx(run.with_afc.echo_delay_s * 1e9).epsilon(1e-9));
    CHECK(j["echo_efficiency"].get<double>() ==
          doctest::Approx(run.with_afc.echo_efficiency).epsilon(1e-9));
    CHECK(j["count_ratio"].get<double>() == doctest::Approx(run.count_ratio).epsilon(1e-9));

    auto intensity = read_csv(run.intensity_csv_path);
    REQUIRE(intensity.header.size() == 3);
    CHECK(intensity.header[1] == "intensity_with_afc");
    CHECK(intensity.rows.size() > 500);
}

TEST_CASE("run_tomo in the noiseless analytic configuration is exact") {
    TempDir dir;
    RunConfig cfg = quick_config(dir);
    cfg.channel.analytic_rates = true;
    cfg.channel.dark_prob_per_window = 0.0;
    cfg.channel.shots = 100000;
    cfg.memory.phase_noise_sigma_rad = 0.0;
    cfg.tomo.sigma_tech = 0.0;
    TomoRun run = run_tomo(cfg, false);

    REQUIRE(run.records.size() == 36);
    REQUIRE(run.states.size() == 6);
    for (const auto& s : run.states) {
        CHECK(s.fidelity_raw >= 0.9999);
        CHECK(s.fidelity_dark_subtracted >= 0.9999);
        CHECK(s.fidelity_raw_err < 2e-3);
        DensityMatrix2 rho = read_density_matrix_json(
            dir.file("out/tomo_rho_" + to_string(s.input) + ".json"));
        CHECK(rho.is_physical(1e-9));
        CHECK(fidelity(canonical_state(s.input), rho) >= 0.999);
    }

    REQUIRE(run.fringes.size() == 4);
    CHECK(run.fringes[0].input == StateLabel::V);
    CHECK(run.fringes[0].fit.visibility >= 0.97);
    CHECK(run.fringes[1].input == StateLabel::D);
    CHECK(run.fringes[1].fit.visibility >= 0.97);  // no dephasing configured
    CHECK(run.fringes[2].with_qwp);
    CHECK(run.fringes[2].fit.visibility >= 0.97);
    CHECK_FALSE(run.fringes[3].with_qwp);
    CHECK(run.fringes[3].fit.visibility <= 0.05);

    for (const auto& f : run.fringes) CHECK(std::filesystem::exists(f.csv_path));
    auto counts_back = read_count_records_csv(run.counts_csv_path);
    CHECK(counts_back.size() == 36);
    auto results = read_csv(run.results_csv_path);
    CHECK(results.rows.size() == 6);
    auto j = nlohmann::json::parse(slurp(run.report_json_path));
    CHECK(j["states"].size() == 6);
    CHECK(j["fringes"].size() == 4);
}

TEST_CASE("run_tomo is reproducible per seed") {
    TempDir dir_a, dir_b, dir_c;
    RunConfig a = quick_config(dir_a);
    TomoRun ra = run_tomo(a, false);
    RunConfig b = quick_config(dir_b);
    TomoRun rb = run_tomo(b, false);
    CHECK(slurp(ra.counts_csv_path) == slurp(rb.counts_csv_path));
    CHECK(slurp(ra.results_csv_path) == slurp(rb.results_csv_path));

    RunConfig c = quick_config(dir_c);
    c.seed = 2;
    TomoRun rc = run_tomo(c, false);
    CHECK(slurp(ra.counts_csv_path) != slurp(rc.counts_csv_path));
}

TEST_CASE("run_sweep rows carry matching bound columns and sane verdicts") {
    TempDir dir;
    RunConfig cfg = quick_config(dir);
    SweepRun run = run_sweep(cfg, false);
    REQUIRE(run.rows.size() == 3);
    REQUIRE(run.per_state.size() == 6);

    for (size_t i = 0; i < run.rows.size(); ++i) {
        const SweepRow& row = run.rows[i];
        CHECK(row.mu == cfg.sweep.mu_list[i]);
        REQUIRE(row.f_class_lines.size() == 2);
        for (size_t e = 0; e < 2; ++e)
            CHECK(row.f_class_lines[e] ==
                  doctest::Approx(f_class(row.mu, cfg.sweep.eta_lines[e]).f_class)
                      .epsilon(1e-12));
        CHECK(row.f_raw > 0.0);
        CHECK(row.f_raw < 1.0);
        CHECK(row.f_raw_err > 0.0);
    }
    // Around the calibration point the stored state clearly beats the bound.
    CHECK(run.rows[0].verdict == Verdict::quantum);
    CHECK(run.rows[1].verdict == Verdict::quantum);

    auto table = read_csv(run.csv_path);
    REQUIRE(table.header.size() == 8);
    CHECK(table.header[0] == "mu");
    CHECK(table.header[5] == "fclass_0p02");
    CHECK(table.header[6] == "fclass_0p1");
    CHECK(table.header[7] == "verdict");
    CHECK(table.rows.size() == 3);
    CHECK(table.rows[1][7] == "quantum");

    auto states = read_csv(run.states_csv_path);
    CHECK(states.rows.size() == 6);
}

TEST_CASE("cli: subcommands succeed and bad inputs exit with code 2") {
    TempDir dir;
    spit(dir.file("ok.conf"),
         "benchmark.mu_points = 5\nbenchmark.eta_lines = 0.1\nrun.output_dir = " +
             dir.file("cli_out") + "\n");
    CHECK(run_cli("benchmark --config " + dir.file("ok.conf") + " --no-plot") == 0);
    CHECK(std::filesystem::exists(dir.file("cli_out/benchmark.csv")));

    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("benchmark --config " + dir.file("missing.conf")) == 2);
    CHECK(run_cli("benchmark --definitely-not-a-flag") == 2);
    CHECK(run_cli("") == 2);  // a subcommand is required

    spit(dir.file("bad.conf"), "memory.peak_od = -3\n");
    CHECK(run_cli("benchmark --config " + dir.file("bad.conf")) == 2);

    // Seed and output overrides reach the pipeline.
    CHECK(run_cli("benchmark --config " + dir.file("ok.conf") + " --out " +
                  dir.file("cli_out2") + " --seed 7 --no-plot") == 0);
    CHECK(std::filesystem::exists(dir.file("cli_out2/benchmark.csv")));
}

TEST_SUITE_END();
