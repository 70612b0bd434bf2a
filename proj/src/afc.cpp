#include "qmem/afc.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qmem/errors.hpp"

namespace qmem {

namespace {
double gauss_sigma_from_fwhm(double fwhm) {
    // FWHM of exp(-x^2 / (2 sigma^2)) is 2 sqrt(2 ln 2) sigma.
    return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}
} // namespace

void MemoryParams::validate() const {
    if (!(comb_spacing_hz > 0.0))
        throw InvalidInput("MemoryParams: comb_spacing_hz must be > 0");
    if (std::abs(storage_time_s * comb_spacing_hz - 1.0) > 1e-9)
        throw InvalidInput("MemoryParams: storage_time_s must equal 1/comb_spacing_hz");
    if (eta_mem_h < 0.0 || eta_mem_h > 1.0 || eta_mem_v < 0.0 || eta_mem_v > 1.0)
        throw InvalidInput("MemoryParams: rail efficiencies must lie in [0, 1]");
    if (phase_noise_sigma_rad < 0.0)
        throw InvalidInput("MemoryParams: phase_noise_sigma_rad must be >= 0");
    if (n_teeth < 2)
        throw InvalidInput("MemoryParams: need at least two comb teeth");
    if (!(tooth_fwhm_hz > 0.0) || tooth_fwhm_hz >= comb_spacing_hz)
        throw InvalidInput("MemoryParams: tooth_fwhm_hz must lie in (0, comb_spacing_hz)");
    if (peak_od < 0.0)
        throw InvalidInput("MemoryParams: peak_od must be >= 0");
}

void MemoryParams::set_comb_spacing(double hz) {
    if (!(hz > 0.0)) throw InvalidInput("set_comb_spacing: spacing must be > 0");
    comb_spacing_hz = hz;
    storage_time_s = 1.0 / hz;
}

RetrievedAmplitudes store_and_retrieve(const PureQubit& q, const MemoryParams& p,
                                       double differential_phase_rad) {
    p.validate();
    complexd rot = std::exp(complexd(0.0, differential_phase_rad));
    RetrievedAmplitudes r;
    r.out_h = q.a_h * std::sqrt(p.eta_mem_h);
    r.out_v = q.a_v * std::sqrt(p.eta_mem_v) * rot;
    r.survival = std::norm(r.out_h) + std::norm(r.out_v);
    return r;
}

double sample_differential_phase(const MemoryParams& p, Rng& rng) {
    return p.phase_noise_sigma_rad > 0.0 ? rng.normal(0.0, p.phase_noise_sigma_rad) : 0.0;
}

double comb_od_profile(const MemoryParams& p, double detuning_hz) {
    double sigma = gauss_sigma_from_fwhm(p.tooth_fwhm_hz);
    double first = -0.5 * (p.n_teeth - 1) * p.comb_spacing_hz;
    double d = 0.0;
    for (int j = 0; j < p.n_teeth; ++j) {
        double x = detuning_hz - (first + j * p.comb_spacing_hz);
        double z = x / sigma;
        if (std::abs(z) < 40.0) d += p.peak_od * std::exp(-0.5 * z * z);
    }
    return d;
}

std::vector<complexd> comb_transfer_function(const MemoryParams& p,
                                             std::span<const double> detuning_hz) {
    p.validate();
    if (detuning_hz.size() < 2)
        throw InvalidInput("comb_transfer_function: need at least two grid points");
    double max_step = 0.0;
    for (size_t i = 1; i < detuning_hz.size(); ++i)
        max_step = std::max(max_step, std::abs(detuning_hz[i] - detuning_hz[i - 1]));
    if (max_step > p.tooth_fwhm_hz / 10.0 + 1e-12) {
        std::ostringstream os;
        os << "comb_transfer_function: grid step " << max_step
           << " Hz too coarse to resolve tooth fwhm " << p.tooth_fwhm_hz
           << " Hz (need <= fwhm/10)";
        throw InvalidInput(os.str());
    }
    if (std::abs(detuning_hz.front() + detuning_hz.back()) > max_step + 1e-9)
        throw InvalidInput("comb_transfer_function: grid must be symmetric about zero detuning");
    std::vector<complexd> t;
    t.reserve(detuning_hz.size());
    for (double f : detuning_hz)
        t.emplace_back(std::exp(-0.5 * comb_od_profile(p, f)), 0.0);
    return t;
}

double PulseShape::energy() const {
    double e = 0.0;
    for (const auto& s : samples) e += std::norm(s);
    return e * dt_s;
}

PulseShape gaussian_pulse(double fwhm_s, double center_s, double dt_s, size_t n_samples) {
    if (!(fwhm_s > 0.0) || !(dt_s > 0.0) || n_samples < 8)
        throw InvalidInput("gaussian_pulse: need positive fwhm, dt and >= 8 samples");
    PulseShape p;
    p.dt_s = dt_s;
    p.t0_s = 0.0;
    p.fwhm_s = fwhm_s;
    p.samples.resize(n_samples);
    // Field sigma: intensity |E|^2 has the requested FWHM.
    double sigma_e = fwhm_s / (2.0 * std::sqrt(std::log(2.0)));
    for (size_t i = 0; i < n_samples; ++i) {
        double x = (p.time_at(i) - center_s) / sigma_e;
        p.samples[i] = std::exp(-0.5 * x * x);
    }
    double peak2 = 1.0;
    if (std::norm(p.samples.front()) > 1e-6 * peak2 ||
        std::norm(p.samples.back()) > 1e-6 * peak2)
        throw InvalidInput("gaussian_pulse: grid clips the pulse (boundary sample above 1e-6 of peak)");
    return p;
}

PropagationResult propagate_pulse(const PulseShape& input, const MemoryParams& p) {
    p.validate();
    if (input.samples.empty() || !(input.dt_s > 0.0))
        throw InvalidInput("propagate_pulse: empty input pulse");
    if (!(input.fwhm_s > 0.0))
        throw InvalidInput("propagate_pulse: input pulse needs a positive fwhm");
    double bandwidth = 0.44 / input.fwhm_s;
    double comb_span = p.n_teeth * p.comb_spacing_hz;
    if (bandwidth >= comb_span) {
        std::ostringstream os;
        os << "propagate_pulse: pulse bandwidth " << bandwidth
           << " Hz exceeds comb span " << comb_span << " Hz";
        throw InvalidInput(os.str());
    }

    // Locate the input centre (intensity-weighted peak of the given envelope).
    size_t peak_idx = 0;
    double peak_val = 0.0;
    for (size_t i = 0; i < input.samples.size(); ++i) {
        double v = std::norm(input.samples[i]);
        if (v > peak_val) { peak_val = v; peak_idx = i; }
    }
    double center = input.time_at(peak_idx);

    // Grid: long enough for the echo plus tails, fine enough in frequency to
    // resolve one tooth (df <= tooth_fwhm / 10).
    double span_needed = center - input.t0_s + p.storage_time_s + 6.0 * input.fwhm_s;
    size_t n_span = static_cast<size_t>(std::ceil(span_needed / input.dt_s));
    size_t n_res = static_cast<size_t>(std::ceil(10.0 / (p.tooth_fwhm_hz * input.dt_s)));
    size_t n = next_pow2(std::max({input.samples.size(), n_span, n_res}));

    std::vector<complexd> time(n, complexd(0.0, 0.0));
    std::copy(input.samples.begin(), input.samples.end(), time.begin());

    Eigen::FFT<double> fft;
    std::vector<complexd> freq;
    fft.fwd(freq, time);
    double df = 1.0 / (static_cast<double>(n) * input.dt_s);
    for (size_t k = 0; k < n; ++k) {
        double f = (k <= n / 2 ? static_cast<double>(k)
                               : static_cast<double>(k) - static_cast<double>(n)) * df;
        freq[k] *= std::exp(-0.5 * comb_od_profile(p, f));
    }
    std::vector<complexd> out_time;
    fft.inv(out_time, freq);

    PropagationResult res;
    res.output.dt_s = input.dt_s;
    res.output.t0_s = input.t0_s;
    res.output.fwhm_s = input.fwhm_s;
    res.output.samples = std::move(out_time);
    res.input_energy = input.energy();

    // Echo peak: search beyond the transmitted pulse.
    double search_from = center + 2.0 * input.fwhm_s;
    size_t best = 0;
    double best_val = -1.0;
    bool any = false;
    for (size_t i = 0; i < n; ++i) {
        double t = res.output.time_at(i);
        if (t <= search_from) continue;
        double v = std::norm(res.output.samples[i]);
        if (v > best_val) { best_val = v; best = i; any = true; }
    }
    if (!any)
        throw NumericalError("propagate_pulse: grid has no samples beyond the echo search window");
    res.echo_delay_s = res.output.time_at(best) - center;

    double t_echo = center + p.storage_time_s;
    double w = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double t = res.output.time_at(i);
        if (std::abs(t - t_echo) <= input.fwhm_s) w += std::norm(res.output.samples[i]);
    }
    res.echo_efficiency = w * input.dt_s / res.input_energy;
    return res;
}

} // namespace qmem
