#include <doctest.h>

#include <cmath>
#include <vector>

#include "qmem/detection.hpp"
#include "qmem/errors.hpp"

using namespace qmem;

namespace {

ChannelParams default_channel() { return ChannelParams{}; }

MeasurementSetting analyzer(StateLabel s) { return canonical_setting(s); }

/// Midpoint-rule phase average with a dense grid; independent of the
/// Gauss-Hermite route used by the library.
double riemann_mean_prob(const PureQubit& input, double mu, const MemoryParams& mem,
                         const ChannelParams& ch, const MeasurementSetting& ms) {
    double sigma = mem.phase_noise_sigma_rad;
    const int n = 200001;
    double lo = -10.0 * sigma, hi = 10.0 * sigma;
    double h = (hi - lo) / n;
    double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double phi = lo + (i + 0.5) * h;
        double w = norm * std::exp(-0.5 * phi * phi / (sigma * sigma));
        acc += w * click_probability(input, mu, mem, ch, ms, phi);
    }
    return acc * h;
}

} // namespace

TEST_SUITE_BEGIN("detection");

TEST_CASE("channel and record validation") {
    ChannelParams ch = default_channel();
    CHECK_NOTHROW(ch.validate());

    ChannelParams bad = ch;
    bad.dark_prob_per_window = 0.2;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);

    bad = ch;
    bad.window_s = 3e-5;  // 30 us window at 50 kHz exceeds the period
    CHECK_THROWS_AS(bad.validate(), InvalidInput);

    bad = ch;
    bad.shots = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);

    bad = ch;
    bad.extra_attenuation = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);

    CountRecord rec{StateLabel::H, analyzer(StateLabel::H), 100, 101, 0};
    CHECK_THROWS_AS(rec.validate(), InvalidInput);
    rec.clicks = 50;
    CHECK_NOTHROW(rec.validate());
}

TEST_CASE("source calibration inverts the bare-channel click probability") {
    ChannelParams ch = default_channel();
    CHECK(mu_from_detection_probability(0.0, ch) == 0.0);
    // 7.69% detection probability through eta_t eta_d = 0.2 is mu = 0.4.
    CHECK(mu_from_detection_probability(0.076883653613364217089, ch) ==
          doctest::Approx(0.4).epsilon(1e-12));
    double p36 = 1.0 - std::exp(-36.0 * ch.eta_t * ch.eta_d);
    CHECK(mu_from_detection_probability(p36, ch) == doctest::Approx(36.0).epsilon(1e-9));
    CHECK_THROWS_AS(mu_from_detection_probability(1.0, ch), InvalidInput);
    CHECK_THROWS_AS(mu_from_detection_probability(-0.1, ch), InvalidInput);
}

TEST_CASE("click probability: frozen values on the calibrated chain") {
    MemoryParams mem;
    ChannelParams ch = default_channel();

    // V in, V analyzer: survives one 10% rail, then eta_t eta_d = 0.2.
    ChannelParams no_dark = ch;
    no_dark.dark_prob_per_window = 0.0;
    double p = click_probability(canonical_state(StateLabel::V), 0.4, mem, no_dark,
                                 analyzer(StateLabel::V), 0.0);
    CHECK(p == doctest::Approx(0.0079680851629393696601).epsilon(1e-13));
    double p_dark = click_probability(canonical_state(StateLabel::V), 0.4, mem, ch,
                                      analyzer(StateLabel::V), 0.0);
    CHECK(p_dark == doctest::Approx(0.0080672883544230757232).epsilon(1e-13));

    // Orthogonal analyzer: only darks remain.
    double p_blocked = click_probability(canonical_state(StateLabel::V), 0.4, mem, ch,
                                         analyzer(StateLabel::H), 0.0);
    CHECK(p_blocked == doctest::Approx(1e-4).epsilon(1e-12));

    // No light, no darks: nothing clicks.
    CHECK(click_probability(canonical_state(StateLabel::D), 0.0, mem, no_dark,
                            analyzer(StateLabel::D), 0.3) == 0.0);

    // The differential phase moves the D/D rate between its extremes.
    double p0 = click_probability(canonical_state(StateLabel::D), 0.4, mem, ch,
                                  analyzer(StateLabel::D), 0.0);
    double ppi = click_probability(canonical_state(StateLabel::D), 0.4, mem, ch,
                                   analyzer(StateLabel::D), M_PI);
    double pa = click_probability(canonical_state(StateLabel::D), 0.4, mem, ch,
                                  analyzer(StateLabel::A), 0.0);
    CHECK(p0 > ppi);
    CHECK(ppi == doctest::Approx(pa).epsilon(1e-12));
}

TEST_CASE("click probability stays in [0, 1] across random parameters") {
    Rng rng(501);
    MemoryParams mem;
    for (int i = 0; i < 200; ++i) {
        ChannelParams ch = default_channel();
        ch.dark_prob_per_window = 0.1 * rng.uniform();
        double mu = 40.0 * rng.uniform();
        double theta = M_PI * rng.uniform();
        PureQubit q(complexd(std::cos(theta), 0.0),
                    complexd(std::sin(theta) * std::cos(1.7 * theta),
                             std::sin(theta) * std::sin(1.7 * theta)));
        double p = click_probability(q, mu, mem, ch, analyzer(StateLabel::D),
                                     2.0 * M_PI * rng.uniform());
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("phase-averaged probability: frozen values and quadrature accuracy") {
    MemoryParams mem;
    ChannelParams ch = default_channel();
    PureQubit d_state = canonical_state(StateLabel::D);

    double pd = mean_click_probability(d_state, 0.4, mem, ch, analyzer(StateLabel::D));
    double pa = mean_click_probability(d_state, 0.4, mem, ch, analyzer(StateLabel::A));
    CHECK(pd == doctest::Approx(0.0073921602084912368612).epsilon(1e-11));
    CHECK(pa == doctest::Approx(0.00077931428994353989041).epsilon(1e-11));
    CHECK((pd - pa) / (pd + pa) == doctest::Approx(0.809259812266974).epsilon(1e-9));

    // Independent dense-grid integration agrees with the Gauss-Hermite rule.
    double pd_ref = riemann_mean_prob(d_state, 0.4, mem, ch, analyzer(StateLabel::D));
    CHECK(pd == doctest::Approx(pd_ref).epsilon(1e-10));

    // Phase-free cells reduce to the fixed-phase probability.
    double pv = mean_click_probability(canonical_state(StateLabel::V), 0.4, mem, ch,
                                       analyzer(StateLabel::V));
    CHECK(pv == click_probability(canonical_state(StateLabel::V), 0.4, mem, ch,
                                  analyzer(StateLabel::V), 0.0));

    MemoryParams quiet = mem;
    quiet.phase_noise_sigma_rad = 0.0;
    double pq = mean_click_probability(d_state, 0.4, quiet, ch, analyzer(StateLabel::D));
    CHECK(pq == click_probability(d_state, 0.4, quiet, ch, analyzer(StateLabel::D), 0.0));
}

TEST_CASE("linear regime: averaged rates reproduce the dephasing visibility") {
    MemoryParams mem;
    ChannelParams ch = default_channel();
    ch.dark_prob_per_window = 0.0;
    PureQubit d_state = canonical_state(StateLabel::D);
    double pd = mean_click_probability(d_state, 1e-6, mem, ch, analyzer(StateLabel::D));
    double pa = mean_click_probability(d_state, 1e-6, mem, ch, analyzer(StateLabel::A));
    CHECK((pd - pa) / (pd + pa) == doctest::Approx(0.83).epsilon(1e-5));
}

TEST_CASE("run_counts: layout, determinism and rate accuracy") {
    MemoryParams mem;
    ChannelParams ch = default_channel();
    std::vector<MeasurementSetting> settings;
    for (StateLabel s : kAllStates) settings.push_back(analyzer(s));

    auto recs = run_counts(kAllStates, settings, 0.4, mem, ch, 77);
    REQUIRE(recs.size() == 36);
    CHECK(recs[0].input == StateLabel::H);
    CHECK(recs[6].input == StateLabel::V);
    for (const auto& r : recs) {
        CHECK(r.shots == ch.shots);
        CHECK_NOTHROW(r.validate());
    }

    auto recs2 = run_counts(kAllStates, settings, 0.4, mem, ch, 77);
    bool identical = true;
    for (size_t i = 0; i < recs.size(); ++i)
        identical = identical && recs[i].clicks == recs2[i].clicks &&
                    recs[i].dark_reference_clicks == recs2[i].dark_reference_clicks;
    CHECK(identical);

    auto recs3 = run_counts(kAllStates, settings, 0.4, mem, ch, 78);
    bool any_diff = false;
    for (size_t i = 0; i < recs.size(); ++i)
        any_diff = any_diff || recs[i].clicks != recs3[i].clicks;
    CHECK(any_diff);

    // Rates sit inside 5-sigma binomial bands around the averaged probability.
    for (const auto& r : recs) {
        PureQubit q = canonical_state(r.input);
        double p = mean_click_probability(q, 0.4, mem, ch, r.setting);
        double sd = std::sqrt(p * (1.0 - p) / static_cast<double>(r.shots));
        double rate = static_cast<double>(r.clicks) / static_cast<double>(r.shots);
        CHECK(std::abs(rate - p) < 5.0 * sd + 1e-12);
        double dark_rate = static_cast<double>(r.dark_reference_clicks) /
                           static_cast<double>(r.shots);
        double sd_dark = std::sqrt(1e-4 * (1.0 - 1e-4) / static_cast<double>(r.shots));
        CHECK(std::abs(dark_rate - 1e-4) < 5.0 * sd_dark + 1e-12);
    }
}

TEST_CASE("run_counts: sampled clicks follow the predicted distribution") {
    MemoryParams mem;
    ChannelParams ch = default_channel();
    std::vector<StateLabel> inputs{StateLabel::D};
    std::vector<MeasurementSetting> settings{analyzer(StateLabel::D)};
    double p = mean_click_probability(canonical_state(StateLabel::D), 0.4, mem, ch,
                                      settings[0]);
    double var = p * (1.0 - p) * static_cast<double>(ch.shots);

    // Across seeds each tally is (marginally) binomial in the averaged
    // probability, so standardized deviations should sum to a chi-square.
    double chi2 = 0.0;
    const int runs = 100;
    for (int i = 0; i < runs; ++i) {
        auto recs = run_counts(inputs, settings, 0.4, mem, ch, 9000 + i);
        double z = (static_cast<double>(recs[0].clicks) -
                    p * static_cast<double>(ch.shots)) /
                   std::sqrt(var);
        chi2 += z * z;
    }
    // Central 99% band of chi-square with 100 degrees of freedom.
    CHECK(chi2 > 67.327);
    CHECK(chi2 < 140.170);
}

TEST_CASE("run_counts: blocked and dark-only cells") {
    MemoryParams mem;
    ChannelParams ch = default_channel();
    std::vector<StateLabel> inputs{StateLabel::V};
    std::vector<MeasurementSetting> settings{analyzer(StateLabel::H)};
    auto recs = run_counts(inputs, settings, 0.4, mem, ch, 13);
    // Expected 10 dark clicks; 40 is far outside any plausible fluctuation.
    CHECK(recs[0].clicks < 40);

    auto recs_nolight = run_counts(inputs, std::vector<MeasurementSetting>{analyzer(StateLabel::V)},
                                   0.0, mem, ch, 14);
    CHECK(recs_nolight[0].clicks < 40);
}

TEST_CASE("run_counts: analytic mode is the exact rounded expectation") {
    MemoryParams mem;
    ChannelParams ch = default_channel();
    ch.analytic_rates = true;
    std::vector<MeasurementSetting> settings;
    for (StateLabel s : kAllStates) settings.push_back(analyzer(s));
    auto recs = run_counts(kAllStates, settings, 0.4, mem, ch, 1);
    for (const auto& r : recs) {
        double p = mean_click_probability(canonical_state(r.input), 0.4, mem, ch, r.setting);
        CHECK(r.clicks == std::llround(p * static_cast<double>(ch.shots)));
        CHECK(r.dark_reference_clicks ==
              std::llround(ch.dark_prob_per_window * static_cast<double>(ch.shots)));
    }
    // Analytic results ignore the seed entirely.
    auto recs2 = run_counts(kAllStates, settings, 0.4, mem, ch, 999);
    for (size_t i = 0; i < recs.size(); ++i) CHECK(recs[i].clicks == recs2[i].clicks);
}

TEST_CASE("run_counts rejects invalid requests") {
    MemoryParams mem;
    ChannelParams ch = default_channel();
    std::vector<MeasurementSetting> settings{analyzer(StateLabel::H)};
    CHECK_THROWS_AS(run_counts(std::vector<StateLabel>{}, settings, 0.4, mem, ch, 1),
                    InvalidInput);
    CHECK_THROWS_AS(run_counts(std::vector<StateLabel>{StateLabel::H},
                               std::vector<MeasurementSetting>{}, 0.4, mem, ch, 1),
                    InvalidInput);
    CHECK_THROWS_AS(run_counts(std::vector<StateLabel>{StateLabel::H}, settings, -0.1,
                               mem, ch, 1),
                    InvalidInput);
}

TEST_CASE("histogram: dark floor, pulse counts and analytic totals") {
    ChannelParams ch = default_channel();
    PulseShape pulse = gaussian_pulse(140e-9, 700e-9, 2e-9, 700);
    double e_in = pulse.energy();

    // Zero light: a flat dark floor of 0.25 counts per 10 ns bin.
    auto dark_hist = build_histogram(pulse, e_in, 0.0, ch, 21, 200, 0.0, 2e-6);
    REQUIRE(dark_hist.counts.size() == 200);
    CHECK(dark_hist.bin_s == doctest::Approx(1e-8).epsilon(1e-12));
    long long total = 0;
    for (long long c : dark_hist.counts) total += c;
    CHECK(total > 10);
    CHECK(total < 100);

    // Analytic, no darks: every count comes from the pulse and the total is
    // the expected detection yield mu eta_t eta_d per shot.
    ChannelParams an = ch;
    an.analytic_rates = true;
    an.dark_prob_per_window = 0.0;
    auto h = build_histogram(pulse, e_in, 0.4, an, 5, 140, 0.0, 1.4e-6);
    long long pulse_total = 0;
    for (size_t b = 0; b < h.counts.size(); ++b) {
        if (h.time_at(b) < 400e-9 || h.time_at(b) > 1000e-9) CHECK(h.counts[b] == 0);
        pulse_total += h.counts[b];
    }
    // Per-bin rounding bounds the total's deviation by half a count per bin.
    double expect = 0.4 * an.eta_t * an.eta_d * static_cast<double>(an.shots);
    CHECK(std::abs(static_cast<double>(pulse_total) - expect) <= 71.0);

    // Sampled histograms are reproducible per seed.
    auto h1 = build_histogram(pulse, e_in, 0.4, ch, 22, 100, 0.0, 2e-6);
    auto h2 = build_histogram(pulse, e_in, 0.4, ch, 22, 100, 0.0, 2e-6);
    CHECK(h1.counts == h2.counts);

    CHECK_THROWS_AS(build_histogram(pulse, 0.0, 0.4, ch, 1, 10, 0.0, 1e-6), InvalidInput);
    CHECK_THROWS_AS(build_histogram(pulse, e_in, 0.4, ch, 1, 0, 0.0, 1e-6), InvalidInput);
    CHECK_THROWS_AS(build_histogram(pulse, e_in, 0.4, ch, 1, 10, 1e-6, 1e-6), InvalidInput);
}

TEST_SUITE_END();
