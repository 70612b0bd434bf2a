#include "qmem/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qmem/errors.hpp"

namespace qmem {

namespace {
constexpr double kPi = 3.14159265358979323846;

double parse_double(const std::string& cell, const std::string& where) {
    try {
        size_t used = 0;
        double v = std::stod(cell, &used);
        if (used != cell.size())
            throw InvalidInput(where + ": trailing characters in number '" + cell + "'");
        return v;
    } catch (const std::exception&) {
        throw InvalidInput(where + ": cannot parse number '" + cell + "'");
    }
}

long long parse_ll(const std::string& cell, const std::string& where) {
    try {
        size_t used = 0;
        long long v = std::stoll(cell, &used);
        if (used != cell.size())
            throw InvalidInput(where + ": trailing characters in integer '" + cell + "'");
        return v;
    } catch (const std::exception&) {
        throw InvalidInput(where + ": cannot parse integer '" + cell + "'");
    }
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}
} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void ensure_parent_dir(const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

void write_csv(const std::string& path, const CsvTable& table) {
    ensure_parent_dir(path);
    std::ofstream os(path);
    if (!os) throw InvalidInput("write_csv: cannot open '" + path + "' for writing");
    for (size_t i = 0; i < table.header.size(); ++i)
        os << (i ? "," : "") << table.header[i];
    os << "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw InvalidInput("write_csv: ragged row in '" + path + "'");
        for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
    if (!os) throw InvalidInput("write_csv: write failed for '" + path + "'");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidInput("read_csv: cannot open '" + path + "'");
    CsvTable t;
    std::string line;
    size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_commas(line);
        if (lineno == 1) {
            t.header = cells;
        } else {
            if (cells.size() != t.header.size()) {
                std::ostringstream os;
                os << "read_csv: " << path << ":" << lineno << ": expected "
                   << t.header.size() << " fields, got " << cells.size();
                throw InvalidInput(os.str());
            }
            t.rows.push_back(cells);
        }
    }
    if (t.header.empty()) throw InvalidInput("read_csv: '" + path + "' is empty");
    return t;
}

namespace {
void expect_header(const CsvTable& t, const std::vector<std::string>& want,
                   const std::string& path) {
    if (t.header != want) {
        std::ostringstream os;
        os << "'" << path << "': unexpected header;";
        os << " expected";
        for (const auto& h : want) os << " " << h;
        throw InvalidInput(os.str());
    }
}
} // namespace

void write_benchmark_csv(const std::string& path, std::span<const BenchmarkPoint> points) {
    CsvTable t;
    t.header = {"mu", "eta", "n_min", "gamma", "f_class"};
    for (const auto& p : points)
        t.rows.push_back({format_double(p.mu), format_double(p.eta), std::to_string(p.n_min),
                          format_double(p.gamma), format_double(p.f_class)});
    write_csv(path, t);
}

std::vector<BenchmarkPoint> read_benchmark_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    expect_header(t, {"mu", "eta", "n_min", "gamma", "f_class"}, path);
    std::vector<BenchmarkPoint> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        BenchmarkPoint p;
        p.mu = parse_double(row[0], path);
        p.eta = parse_double(row[1], path);
        p.n_min = static_cast<int>(parse_ll(row[2], path));
        p.gamma = parse_double(row[3], path);
        p.f_class = parse_double(row[4], path);
        out.push_back(p);
    }
    return out;
}

namespace {
struct PlateAngles {
    bool has_qwp = false;
    bool has_hwp = false;
    double qwp_rad = 0.0;
    double hwp_rad = 0.0;
};

PlateAngles decompose_setting(const MeasurementSetting& s) {
    PlateAngles pa;
    for (const auto& plate : s.plates) {
        if (plate.kind == WaveplateKind::quarter_wave) {
            if (pa.has_qwp)
                throw InvalidInput("count CSV schema supports at most one quarter-wave plate");
            if (pa.has_hwp)
                throw InvalidInput("count CSV schema assumes the quarter-wave plate comes first");
            pa.has_qwp = true;
            pa.qwp_rad = plate.angle_rad;
        } else {
            if (pa.has_hwp)
                throw InvalidInput("count CSV schema supports at most one half-wave plate");
            pa.has_hwp = true;
            pa.hwp_rad = plate.angle_rad;
        }
    }
    return pa;
}
} // namespace

void write_count_records_csv(const std::string& path, std::span<const CountRecord> records) {
    CsvTable t;
    t.header = {"input", "setting_qwp_deg", "setting_hwp_deg", "port", "shots", "clicks",
                "dark_clicks"};
    for (const auto& rec : records) {
        rec.validate();
        PlateAngles pa = decompose_setting(rec.setting);
        t.rows.push_back({to_string(rec.input),
                          pa.has_qwp ? format_double(pa.qwp_rad * 180.0 / kPi) : "",
                          pa.has_hwp ? format_double(pa.hwp_rad * 180.0 / kPi) : "",
                          rec.setting.port == Port::transmitted ? "transmitted" : "reflected",
                          std::to_string(rec.shots), std::to_string(rec.clicks),
                          std::to_string(rec.dark_reference_clicks)});
    }
    write_csv(path, t);
}

std::vector<CountRecord> read_count_records_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    expect_header(t, {"input", "setting_qwp_deg", "setting_hwp_deg", "port", "shots", "clicks",
                      "dark_clicks"}, path);
    std::vector<CountRecord> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        CountRecord rec;
        rec.input = parse_state_label(row[0]);
        std::vector<WaveplateSetting> plates;
        if (!row[1].empty())
            plates.emplace_back(WaveplateKind::quarter_wave,
                                parse_double(row[1], path) * kPi / 180.0);
        if (!row[2].empty())
            plates.emplace_back(WaveplateKind::half_wave,
                                parse_double(row[2], path) * kPi / 180.0);
        Port port;
        if (row[3] == "transmitted") port = Port::transmitted;
        else if (row[3] == "reflected") port = Port::reflected;
        else throw InvalidInput("'" + path + "': unknown port '" + row[3] + "'");
        rec.setting = MeasurementSetting(std::move(plates), port);
        rec.shots = parse_ll(row[4], path);
        rec.clicks = parse_ll(row[5], path);
        rec.dark_reference_clicks = parse_ll(row[6], path);
        rec.validate();
        out.push_back(rec);
    }
    return out;
}

void write_histogram_csv(const std::string& path, const TimeHistogram& h) {
    CsvTable t;
    t.header = {"t_ns", "counts"};
    for (size_t i = 0; i < h.counts.size(); ++i)
        t.rows.push_back({format_double(h.time_at(i) * 1e9), std::to_string(h.counts[i])});
    write_csv(path, t);
}

TimeHistogram read_histogram_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    expect_header(t, {"t_ns", "counts"}, path);
    if (t.rows.size() < 2) throw InvalidInput("'" + path + "': need at least two bins");
    TimeHistogram h;
    std::vector<double> centers;
    for (const auto& row : t.rows) {
        centers.push_back(parse_double(row[0], path) * 1e-9);
        h.counts.push_back(parse_ll(row[1], path));
    }
    h.bin_s = centers[1] - centers[0];
    h.t0_s = centers[0] - 0.5 * h.bin_s;
    return h;
}

void write_dual_histogram_csv(const std::string& path, const TimeHistogram& with_afc,
                              const TimeHistogram& reference) {
    if (with_afc.counts.size() != reference.counts.size() ||
        std::abs(with_afc.bin_s - reference.bin_s) > 1e-15 ||
        std::abs(with_afc.t0_s - reference.t0_s) > 1e-15)
        throw InvalidInput("write_dual_histogram_csv: histograms use different binnings");
    CsvTable t;
    t.header = {"t_ns", "counts_with_afc", "counts_reference"};
    for (size_t i = 0; i < with_afc.counts.size(); ++i)
        t.rows.push_back({format_double(with_afc.time_at(i) * 1e9),
                          std::to_string(with_afc.counts[i]),
                          std::to_string(reference.counts[i])});
    write_csv(path, t);
}

std::pair<TimeHistogram, TimeHistogram> read_dual_histogram_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    expect_header(t, {"t_ns", "counts_with_afc", "counts_reference"}, path);
    if (t.rows.size() < 2) throw InvalidInput("'" + path + "': need at least two bins");
    TimeHistogram a, b;
    std::vector<double> centers;
    for (const auto& row : t.rows) {
        centers.push_back(parse_double(row[0], path) * 1e-9);
        a.counts.push_back(parse_ll(row[1], path));
        b.counts.push_back(parse_ll(row[2], path));
    }
    a.bin_s = b.bin_s = centers[1] - centers[0];
    a.t0_s = b.t0_s = centers[0] - 0.5 * a.bin_s;
    return {a, b};
}

void write_fringe_csv(const std::string& path, std::span<const double> angles_deg,
                      std::span<const double> rates, const FringeFit& fit) {
    if (angles_deg.size() != rates.size())
        throw InvalidInput("write_fringe_csv: angle and rate arrays differ in length");
    CsvTable t;
    t.header = {"angle_deg", "p_det", "fit_p"};
    for (size_t i = 0; i < angles_deg.size(); ++i)
        t.rows.push_back({format_double(angles_deg[i]), format_double(rates[i]),
                          format_double(fit.value_at(angles_deg[i] * kPi / 180.0))});
    write_csv(path, t);
}

FringeCsv read_fringe_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    expect_header(t, {"angle_deg", "p_det", "fit_p"}, path);
    FringeCsv f;
    for (const auto& row : t.rows) {
        f.angle_deg.push_back(parse_double(row[0], path));
        f.p_det.push_back(parse_double(row[1], path));
        f.fit_p.push_back(parse_double(row[2], path));
    }
    return f;
}

nlohmann::json density_matrix_to_json(const DensityMatrix2& rho) {
    nlohmann::json j;
    j["real"] = {{rho.m(0, 0).real(), rho.m(0, 1).real()},
                 {rho.m(1, 0).real(), rho.m(1, 1).real()}};
    j["imag"] = {{rho.m(0, 0).imag(), rho.m(0, 1).imag()},
                 {rho.m(1, 0).imag(), rho.m(1, 1).imag()}};
    return j;
}

DensityMatrix2 density_matrix_from_json(const nlohmann::json& j) {
    if (!j.contains("real") || !j.contains("imag"))
        throw InvalidInput("density matrix JSON needs 'real' and 'imag' arrays");
    auto get = [&](const char* key, int r, int c) -> double {
        const auto& a = j.at(key);
        if (!a.is_array() || a.size() != 2 || !a[r].is_array() || a[r].size() != 2)
            throw InvalidInput("density matrix JSON arrays must be 2x2");
        return a[r][c].get<double>();
    };
    DensityMatrix2 rho;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            rho.m(r, c) = complexd(get("real", r, c), get("imag", r, c));
    return rho;
}

void write_density_matrix_json(const std::string& path, const DensityMatrix2& rho,
                               const nlohmann::json& extra) {
    ensure_parent_dir(path);
    nlohmann::json j = extra;
    j["rho"] = density_matrix_to_json(rho);
    std::ofstream os(path);
    if (!os) throw InvalidInput("write_density_matrix_json: cannot open '" + path + "'");
    os << j.dump(2) << "\n";
}

DensityMatrix2 read_density_matrix_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidInput("read_density_matrix_json: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("'" + path + "': " + e.what());
    }
    if (j.contains("rho")) return density_matrix_from_json(j["rho"]);
    return density_matrix_from_json(j);
}

std::string to_string(TomographyMethod m) {
    return m == TomographyMethod::linear_inversion ? "linear_inversion" : "max_likelihood";
}

std::string to_string(Verdict v) {
    return v == Verdict::quantum ? "quantum" : "classical";
}

} // namespace qmem
