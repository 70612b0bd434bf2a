#include "qmem/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qmem/errors.hpp"
#include "qmem/io.hpp"

namespace qmem {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

struct Parser {
    RunConfig cfg;
    bool storage_time_explicit = false;
    int lineno = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << "config line " << lineno << ": " << msg;
        throw ConfigError(os.str());
    }

    double num(const std::string& v) const {
        try {
            size_t used = 0;
            double d = std::stod(v, &used);
            if (used != v.size()) fail("trailing characters in number '" + v + "'");
            return d;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            fail("cannot parse number '" + v + "'");
        }
    }

    long long integer(const std::string& v) const {
        double d = num(v);
        if (d != std::floor(d)) fail("expected an integer, got '" + v + "'");
        return static_cast<long long>(d);
    }

    bool boolean(const std::string& v) const {
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        fail("expected true/false, got '" + v + "'");
    }

    std::vector<double> num_list(const std::string& v) const {
        std::vector<double> out;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) fail("empty element in list '" + v + "'");
            out.push_back(num(item));
        }
        if (out.empty()) fail("empty list");
        return out;
    }

    std::vector<StateLabel> state_list(const std::string& v) const {
        std::vector<StateLabel> out;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            try {
                out.push_back(parse_state_label(item));
            } catch (const InvalidInput& e) {
                fail(e.what());
            }
        }
        if (out.empty()) fail("empty state list");
        return out;
    }

    void apply(const std::string& key, const std::string& value) {
        auto& m = cfg.memory;
        auto& ch = cfg.channel;
        if (key == "memory.comb_spacing_hz") {
            m.comb_spacing_hz = num(value);
            if (!storage_time_explicit && m.comb_spacing_hz > 0.0)
                m.storage_time_s = 1.0 / m.comb_spacing_hz;
        } else if (key == "memory.storage_time_ns") {
            m.storage_time_s = num(value) * 1e-9;
            storage_time_explicit = true;
        } else if (key == "memory.eta_mem_h") m.eta_mem_h = num(value);
        else if (key == "memory.eta_mem_v") m.eta_mem_v = num(value);
        else if (key == "memory.phase_noise_sigma_rad") m.phase_noise_sigma_rad = num(value);
        else if (key == "memory.n_teeth") m.n_teeth = static_cast<int>(integer(value));
        else if (key == "memory.tooth_fwhm_hz") m.tooth_fwhm_hz = num(value);
        else if (key == "memory.peak_od") m.peak_od = num(value);
        else if (key == "channel.eta_t") ch.eta_t = num(value);
        else if (key == "channel.eta_d") ch.eta_d = num(value);
        else if (key == "channel.dark_prob_per_window") ch.dark_prob_per_window = num(value);
        else if (key == "channel.window_ns") ch.window_s = num(value) * 1e-9;
        else if (key == "channel.rep_rate_hz") ch.rep_rate_hz = num(value);
        else if (key == "channel.shots") ch.shots = integer(value);
        else if (key == "channel.analytic_rates") ch.analytic_rates = boolean(value);
        else if (key == "channel.extra_attenuation") ch.extra_attenuation = num(value);
        else if (key == "pulse.fwhm_ns") cfg.pulse.fwhm_s = num(value) * 1e-9;
        else if (key == "pulse.center_ns") cfg.pulse.center_s = num(value) * 1e-9;
        else if (key == "pulse.dt_ns") cfg.pulse.dt_s = num(value) * 1e-9;
        else if (key == "pulse.mu") cfg.pulse.mu = num(value);
        else if (key == "tomo.mu") cfg.tomo.mu = num(value);
        else if (key == "tomo.resamples") cfg.tomo.resamples = static_cast<int>(integer(value));
        else if (key == "tomo.sigma_tech") cfg.tomo.sigma_tech = num(value);
        else if (key == "tomo.fringe_angles_deg") cfg.tomo.fringe_angles_deg = num_list(value);
        else if (key == "sweep.mu_list") cfg.sweep.mu_list = num_list(value);
        else if (key == "sweep.inputs") cfg.sweep.inputs = state_list(value);
        else if (key == "sweep.eta_lines") cfg.sweep.eta_lines = num_list(value);
        else if (key == "sweep.verdict_eta") cfg.sweep.verdict_eta = num(value);
        else if (key == "sweep.nd_threshold_mu") cfg.sweep.nd_threshold_mu = num(value);
        else if (key == "sweep.nd_factor") cfg.sweep.nd_factor = num(value);
        else if (key == "benchmark.eta_lines") cfg.benchmark.eta_lines = num_list(value);
        else if (key == "benchmark.mu_min") cfg.benchmark.mu_min = num(value);
        else if (key == "benchmark.mu_max") cfg.benchmark.mu_max = num(value);
        else if (key == "benchmark.mu_points") cfg.benchmark.mu_points = static_cast<int>(integer(value));
        else if (key == "run.seed") {
            long long s = integer(value);
            if (s < 0) fail("run.seed must be >= 0");
            cfg.seed = static_cast<uint64_t>(s);
        } else if (key == "run.output_dir") cfg.output_dir = value;
        else if (key == "run.threads") {
            cfg.threads = static_cast<int>(integer(value));
            if (cfg.threads < 1) fail("run.threads must be >= 1");
        } else fail("unknown key '" + key + "'");
    }
};

} // namespace

void RunConfig::validate() const {
    memory.validate();
    channel.validate();
    if (!(pulse.fwhm_s > 0.0) || !(pulse.dt_s > 0.0) || !(pulse.center_s > 0.0))
        throw ConfigError("pulse parameters must be positive");
    if (pulse.mu < 0.0) throw ConfigError("pulse.mu must be >= 0");
    if (tomo.mu < 0.0) throw ConfigError("tomo.mu must be >= 0");
    if (tomo.resamples < 10) throw ConfigError("tomo.resamples must be >= 10");
    if (tomo.sigma_tech < 0.0) throw ConfigError("tomo.sigma_tech must be >= 0");
    if (tomo.fringe_angles_deg.size() < 8)
        throw ConfigError("tomo.fringe_angles_deg needs at least 8 angles");
    if (sweep.mu_list.empty()) throw ConfigError("sweep.mu_list must not be empty");
    for (size_t i = 1; i < sweep.mu_list.size(); ++i)
        if (!(sweep.mu_list[i] > sweep.mu_list[i - 1]))
            throw ConfigError("sweep.mu_list must be strictly increasing");
    if (sweep.inputs.empty()) throw ConfigError("sweep.inputs must not be empty");
    for (double e : sweep.eta_lines)
        if (!(e > 0.0) || e > 1.0) throw ConfigError("sweep.eta_lines must lie in (0, 1]");
    if (!(sweep.verdict_eta > 0.0) || sweep.verdict_eta > 1.0)
        throw ConfigError("sweep.verdict_eta must lie in (0, 1]");
    if (!(sweep.nd_factor > 0.0) || sweep.nd_factor > 1.0)
        throw ConfigError("sweep.nd_factor must lie in (0, 1]");
    for (double e : benchmark.eta_lines)
        if (!(e > 0.0) || e > 1.0) throw ConfigError("benchmark.eta_lines must lie in (0, 1]");
    if (!(benchmark.mu_min > 0.0) || !(benchmark.mu_max > benchmark.mu_min))
        throw ConfigError("benchmark mu range must satisfy 0 < mu_min < mu_max");
    if (benchmark.mu_points < 2) throw ConfigError("benchmark.mu_points must be >= 2");
}

RunConfig parse_config_text(const std::string& text) {
    Parser p;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        ++p.lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) p.fail("expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) p.fail("empty key");
        if (value.empty()) p.fail("empty value for key '" + key + "'");
        p.apply(key, value);
    }
    try {
        p.cfg.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
    return p.cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

std::string default_config_text() {
    RunConfig d;
    std::ostringstream os;
    auto fd = [](double v) { return format_double(v); };
    os << "# Simulator configuration. All keys optional; values below are the defaults.\n";
    os << "\n# Atomic frequency comb memory\n";
    os << "memory.comb_spacing_hz = " << fd(d.memory.comb_spacing_hz)
       << "        # echo at 1/spacing\n";
    os << "memory.eta_mem_h = " << fd(d.memory.eta_mem_h) << "\n";
    os << "memory.eta_mem_v = " << fd(d.memory.eta_mem_v) << "\n";
    os << "memory.phase_noise_sigma_rad = " << fd(d.memory.phase_noise_sigma_rad)
       << "  # exp(-sigma^2/2) = 0.83 fringe visibility\n";
    os << "memory.n_teeth = " << d.memory.n_teeth << "\n";
    os << "memory.tooth_fwhm_hz = " << fd(d.memory.tooth_fwhm_hz) << "\n";
    os << "memory.peak_od = " << fd(d.memory.peak_od) << "\n";
    os << "\n# Channel, detector and acquisition\n";
    os << "channel.eta_t = " << fd(d.channel.eta_t) << "\n";
    os << "channel.eta_d = " << fd(d.channel.eta_d) << "\n";
    os << "channel.dark_prob_per_window = " << fd(d.channel.dark_prob_per_window) << "\n";
    os << "channel.window_ns = " << fd(d.channel.window_s * 1e9) << "\n";
    os << "channel.rep_rate_hz = " << fd(d.channel.rep_rate_hz) << "\n";
    os << "channel.shots = " << d.channel.shots << "\n";
    os << "channel.analytic_rates = " << (d.channel.analytic_rates ? "true" : "false")
       << "   # deterministic expected counts instead of sampling\n";
    os << "channel.extra_attenuation = " << fd(d.channel.extra_attenuation) << "\n";
    os << "\n# Input pulse (echo command)\n";
    os << "pulse.fwhm_ns = " << fd(d.pulse.fwhm_s * 1e9) << "\n";
    os << "pulse.center_ns = " << fd(d.pulse.center_s * 1e9) << "\n";
    os << "pulse.dt_ns = " << fd(d.pulse.dt_s * 1e9) << "\n";
    os << "pulse.mu = " << fd(d.pulse.mu) << "\n";
    os << "\n# Tomography command\n";
    os << "tomo.mu = " << fd(d.tomo.mu) << "\n";
    os << "tomo.resamples = " << d.tomo.resamples << "\n";
    os << "tomo.sigma_tech = " << fd(d.tomo.sigma_tech) << "\n";
    os << "tomo.fringe_angles_deg =";
    for (size_t i = 0; i < d.tomo.fringe_angles_deg.size(); ++i)
        os << (i ? "," : " ") << fd(d.tomo.fringe_angles_deg[i]);
    os << "\n";
    os << "\n# Fidelity-versus-mu sweep\n";
    os << "sweep.mu_list =";
    for (size_t i = 0; i < d.sweep.mu_list.size(); ++i)
        os << (i ? "," : " ") << fd(d.sweep.mu_list[i]);
    os << "\n";
    os << "sweep.inputs =";
    for (size_t i = 0; i < d.sweep.inputs.size(); ++i)
        os << (i ? "," : " ") << to_string(d.sweep.inputs[i]);
    os << "\n";
    os << "sweep.eta_lines =";
    for (size_t i = 0; i < d.sweep.eta_lines.size(); ++i)
        os << (i ? "," : " ") << fd(d.sweep.eta_lines[i]);
    os << "\n";
    os << "sweep.verdict_eta = " << fd(d.sweep.verdict_eta) << "\n";
    os << "sweep.nd_threshold_mu = " << fd(d.sweep.nd_threshold_mu) << "\n";
    os << "sweep.nd_factor = " << fd(d.sweep.nd_factor) << "\n";
    os << "\n# Classical benchmark curves\n";
    os << "benchmark.eta_lines =";
    for (size_t i = 0; i < d.benchmark.eta_lines.size(); ++i)
        os << (i ? "," : " ") << fd(d.benchmark.eta_lines[i]);
    os << "\n";
    os << "benchmark.mu_min = " << fd(d.benchmark.mu_min) << "\n";
    os << "benchmark.mu_max = " << fd(d.benchmark.mu_max) << "\n";
    os << "benchmark.mu_points = " << d.benchmark.mu_points << "\n";
    os << "\n# Run control\n";
    os << "run.seed = " << d.seed << "\n";
    os << "run.output_dir = " << d.output_dir << "\n";
    os << "run.threads = " << d.threads << "\n";
    return os.str();
}

} // namespace qmem
