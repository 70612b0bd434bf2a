#include "qmem/detection.hpp"

#include <algorithm>
#include <cmath>

#include "qmem/errors.hpp"

namespace qmem {

namespace {

// 20-point Gauss-Hermite rule (weight e^{-x^2}); exact enough that
// E[cos phi] reproduces exp(-sigma^2/2) to machine precision for the
// sigma range of interest.
constexpr int kGhN = 20;
constexpr double kGhX[kGhN] = {
    -5.38748089001123276e+00, -4.60368244955074424e+00, -3.94476404011562520e+00,
    -3.34785456738321630e+00, -2.78880605842813045e+00, -2.25497400208927568e+00,
    -1.73853771211658614e+00, -1.23407621539532308e+00, -7.37473728545394391e-01,
    -2.45340708300901239e-01, 2.45340708300901239e-01,  7.37473728545394391e-01,
    1.23407621539532308e+00,  1.73853771211658614e+00,  2.25497400208927568e+00,
    2.78880605842813045e+00,  3.34785456738321630e+00,  3.94476404011562520e+00,
    4.60368244955074424e+00,  5.38748089001123276e+00};
constexpr double kGhW[kGhN] = {
    2.22939364553414471e-13, 4.39934099227317473e-10, 1.08606937076927821e-07,
    7.80255647853205987e-06, 2.28338636016353646e-04, 3.24377334223785669e-03,
    2.48105208874636433e-02, 1.09017206020023294e-01, 2.86675505362834149e-01,
    4.62243669600610085e-01, 4.62243669600610085e-01, 2.86675505362834149e-01,
    1.09017206020023294e-01, 2.48105208874636433e-02, 3.24377334223785669e-03,
    2.28338636016353646e-04, 7.80255647853205987e-06, 1.08606937076927821e-07,
    4.39934099227317473e-10, 2.22939364553414471e-13};
const double kGhNorm = 1.7724538509055160273;  // sqrt(pi)

/// Precomputed per-cell interference terms: the click exponent for phase phi
/// is scale * (a + b cos(phi + delta)).
struct CellRates {
    double scale;  // mu * eta_t * eta_d * attenuation
    double a;      // |c1|^2 + |c2|^2
    double b;      // 2 |c1 c2|
    double delta;
    double dark;

    double click_prob(double phi) const {
        double ex = scale * (a + b * std::cos(phi + delta));
        return 1.0 - (1.0 - dark) * std::exp(-ex);
    }

    double max_prob() const {
        return 1.0 - (1.0 - dark) * std::exp(-scale * (a + b));
    }
};

CellRates make_cell(const PureQubit& input, double mu, const MemoryParams& mem,
                    const ChannelParams& ch, const MeasurementSetting& setting) {
    Eigen::RowVector2cd row = port_row(setting);
    complexd c1 = row(0) * input.a_h * std::sqrt(mem.eta_mem_h);
    complexd c2 = row(1) * input.a_v * std::sqrt(mem.eta_mem_v);
    CellRates cr;
    cr.scale = mu * ch.eta_t * ch.eta_d * ch.extra_attenuation;
    cr.a = std::norm(c1) + std::norm(c2);
    cr.b = 2.0 * std::abs(c1) * std::abs(c2);
    complexd cross = std::conj(c1) * c2;
    cr.delta = cr.b > 0.0 ? std::arg(cross) : 0.0;
    cr.dark = ch.dark_prob_per_window;
    return cr;
}

double averaged_prob(const CellRates& cr, double sigma) {
    if (sigma == 0.0 || cr.b == 0.0 || cr.scale == 0.0) return cr.click_prob(0.0);
    double s = 0.0;
    for (int i = 0; i < kGhN; ++i)
        s += kGhW[i] * cr.click_prob(std::sqrt(2.0) * sigma * kGhX[i]);
    return s / kGhNorm;
}

long long sample_cell_clicks(const CellRates& cr, double sigma, long long shots, Rng& rng) {
    if (sigma == 0.0 || cr.b == 0.0 || cr.scale == 0.0) {
        // Phase plays no role: shots are iid Bernoulli with a fixed p.
        return static_cast<long long>(rng.binomial(static_cast<uint64_t>(shots), cr.click_prob(0.0)));
    }
    double p_max = cr.max_prob();
    long long clicks = 0;
    for (long long s = 0; s < shots; ++s) {
        double u = rng.uniform();
        if (u >= p_max) continue;  // cannot click for any phase; skip the draw
        double phi = rng.normal(0.0, sigma);
        if (u < cr.click_prob(phi)) ++clicks;
    }
    return clicks;
}

} // namespace

void ChannelParams::validate() const {
    if (eta_t <= 0.0 || eta_t > 1.0 || eta_d <= 0.0 || eta_d > 1.0)
        throw InvalidInput("ChannelParams: efficiencies must lie in (0, 1]");
    if (dark_prob_per_window < 0.0 || dark_prob_per_window > 0.1)
        throw InvalidInput("ChannelParams: dark_prob_per_window must lie in [0, 0.1]");
    if (!(window_s > 0.0) || !(rep_rate_hz > 0.0))
        throw InvalidInput("ChannelParams: window and repetition rate must be > 0");
    if (window_s * rep_rate_hz > 1.0)
        throw InvalidInput("ChannelParams: counting window exceeds the repetition period");
    if (shots < 1)
        throw InvalidInput("ChannelParams: shots must be >= 1");
    if (extra_attenuation <= 0.0 || extra_attenuation > 1.0)
        throw InvalidInput("ChannelParams: extra_attenuation must lie in (0, 1]");
}

void CountRecord::validate() const {
    if (shots < 1) throw InvalidInput("CountRecord: shots must be >= 1");
    if (clicks < 0 || clicks > shots)
        throw InvalidInput("CountRecord: clicks outside [0, shots]");
    if (dark_reference_clicks < 0 || dark_reference_clicks > shots)
        throw InvalidInput("CountRecord: dark reference clicks outside [0, shots]");
}

double mu_from_detection_probability(double p_det, const ChannelParams& ch) {
    ch.validate();
    if (p_det < 0.0 || p_det >= 1.0)
        throw InvalidInput("mu_from_detection_probability: p_det must lie in [0, 1)");
    return -std::log1p(-p_det) / (ch.eta_t * ch.eta_d);
}

double click_probability(const PureQubit& input, double mu, const MemoryParams& mem,
                         const ChannelParams& ch, const MeasurementSetting& setting,
                         double differential_phase_rad) {
    if (mu < 0.0) throw InvalidInput("click_probability: mu must be >= 0");
    mem.validate();
    ch.validate();
    return make_cell(input, mu, mem, ch, setting).click_prob(differential_phase_rad);
}

double mean_click_probability(const PureQubit& input, double mu, const MemoryParams& mem,
                              const ChannelParams& ch, const MeasurementSetting& setting) {
    if (mu < 0.0) throw InvalidInput("mean_click_probability: mu must be >= 0");
    mem.validate();
    ch.validate();
    return averaged_prob(make_cell(input, mu, mem, ch, setting), mem.phase_noise_sigma_rad);
}

std::vector<CountRecord> run_counts(std::span<const StateLabel> inputs,
                                    std::span<const MeasurementSetting> settings,
                                    double mu, const MemoryParams& mem,
                                    const ChannelParams& ch, uint64_t seed) {
    if (inputs.empty() || settings.empty())
        throw InvalidInput("run_counts: need at least one input and one setting");
    if (mu < 0.0) throw InvalidInput("run_counts: mu must be >= 0");
    mem.validate();
    ch.validate();

    std::vector<CountRecord> records;
    records.reserve(inputs.size() * settings.size());
    uint64_t cell = 0;
    for (StateLabel in : inputs) {
        PureQubit q = canonical_state(in);
        for (const MeasurementSetting& ms : settings) {
            CellRates cr = make_cell(q, mu, mem, ch, ms);
            CountRecord rec;
            rec.input = in;
            rec.setting = ms;
            rec.shots = ch.shots;
            if (ch.analytic_rates) {
                rec.clicks = std::llround(static_cast<double>(ch.shots) *
                                          averaged_prob(cr, mem.phase_noise_sigma_rad));
                rec.dark_reference_clicks =
                    std::llround(static_cast<double>(ch.shots) * ch.dark_prob_per_window);
            } else {
                Rng signal = Rng::substream(seed, 2 * cell);
                Rng dark = Rng::substream(seed, 2 * cell + 1);
                rec.clicks = sample_cell_clicks(cr, mem.phase_noise_sigma_rad, ch.shots, signal);
                rec.dark_reference_clicks = static_cast<long long>(
                    dark.binomial(static_cast<uint64_t>(ch.shots), ch.dark_prob_per_window));
            }
            rec.validate();
            records.push_back(rec);
            ++cell;
        }
    }
    return records;
}

TimeHistogram build_histogram(const PulseShape& pulse, double input_energy, double mu,
                              const ChannelParams& ch, uint64_t seed, size_t n_bins,
                              double t_start_s, double t_stop_s) {
    ch.validate();
    if (mu < 0.0) throw InvalidInput("build_histogram: mu must be >= 0");
    if (!(input_energy > 0.0)) throw InvalidInput("build_histogram: input_energy must be > 0");
    if (n_bins < 1 || !(t_stop_s > t_start_s))
        throw InvalidInput("build_histogram: need n_bins >= 1 and t_stop > t_start");
    if (pulse.samples.empty() || !(pulse.dt_s > 0.0))
        throw InvalidInput("build_histogram: empty pulse");

    TimeHistogram h;
    h.bin_s = (t_stop_s - t_start_s) / static_cast<double>(n_bins);
    h.t0_s = t_start_s;
    h.counts.assign(n_bins, 0);

    // Integrate |E|^2 dt into bins.
    std::vector<double> window_energy(n_bins, 0.0);
    for (size_t i = 0; i < pulse.samples.size(); ++i) {
        double t = pulse.time_at(i);
        if (t < t_start_s || t >= t_stop_s) continue;
        auto b = static_cast<size_t>((t - t_start_s) / h.bin_s);
        if (b >= n_bins) b = n_bins - 1;
        window_energy[b] += std::norm(pulse.samples[i]) * pulse.dt_s;
    }

    double scale = mu * ch.eta_t * ch.eta_d * ch.extra_attenuation / input_energy;
    double dark_per_bin = ch.dark_prob_per_window * (h.bin_s / ch.window_s);
    Rng rng = Rng::substream(seed, 0);
    for (size_t b = 0; b < n_bins; ++b) {
        double lam = static_cast<double>(ch.shots) * (scale * window_energy[b] + dark_per_bin);
        h.counts[b] = ch.analytic_rates ? std::llround(lam)
                                        : static_cast<long long>(rng.poisson(lam));
    }
    return h;
}

} // namespace qmem
