#pragma once

#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "qmem/benchmark.hpp"
#include "qmem/detection.hpp"
#include "qmem/polarization.hpp"
#include "qmem/tomography.hpp"

namespace qmem {

/// Shortest round-trippable decimal with 12 significant digits (%.12g).
std::string format_double(double v);

void ensure_parent_dir(const std::string& path);

/// Generic comma-separated table: header row plus string cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);
/// Parses and checks rectangularity; throws InvalidInput with file/line info.
CsvTable read_csv(const std::string& path);

// ---- typed writers/readers -------------------------------------------------

/// Schema: mu,eta,n_min,gamma,f_class
void write_benchmark_csv(const std::string& path, std::span<const BenchmarkPoint> points);
std::vector<BenchmarkPoint> read_benchmark_csv(const std::string& path);

/// Schema: input,setting_qwp_deg,setting_hwp_deg,port,shots,clicks,dark_clicks.
/// Waveplate fields are empty when the analyzer omits that plate; only
/// QWP-before-HWP analyzers are representable.
void write_count_records_csv(const std::string& path, std::span<const CountRecord> records);
std::vector<CountRecord> read_count_records_csv(const std::string& path);

/// Schema: t_ns,counts
void write_histogram_csv(const std::string& path, const TimeHistogram& h);
TimeHistogram read_histogram_csv(const std::string& path);

/// Schema: t_ns,counts_with_afc,counts_reference (bins must match).
void write_dual_histogram_csv(const std::string& path, const TimeHistogram& with_afc,
                              const TimeHistogram& reference);
std::pair<TimeHistogram, TimeHistogram> read_dual_histogram_csv(const std::string& path);

/// Schema: angle_deg,p_det,fit_p
void write_fringe_csv(const std::string& path, std::span<const double> angles_deg,
                      std::span<const double> rates, const FringeFit& fit);
struct FringeCsv {
    std::vector<double> angle_deg;
    std::vector<double> p_det;
    std::vector<double> fit_p;
};
FringeCsv read_fringe_csv(const std::string& path);

// ---- JSON ------------------------------------------------------------------

/// {"real": 2x2 row-major, "imag": 2x2 row-major}
nlohmann::json density_matrix_to_json(const DensityMatrix2& rho);
DensityMatrix2 density_matrix_from_json(const nlohmann::json& j);

void write_density_matrix_json(const std::string& path, const DensityMatrix2& rho,
                               const nlohmann::json& extra = nlohmann::json::object());
DensityMatrix2 read_density_matrix_json(const std::string& path);

std::string to_string(TomographyMethod m);
std::string to_string(Verdict v);

} // namespace qmem
