#include "qmem/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

#include "qmem/errors.hpp"
#include "qmem/io.hpp"

namespace qmem {

namespace {
constexpr double kW = 760.0, kH = 520.0;
constexpr double kML = 70.0, kMR = 160.0, kMT = 46.0, kMB = 56.0;

std::string fmt_tick(double v) {
    std::ostringstream os;
    double av = std::abs(v);
    if (v != 0.0 && (av >= 1e4 || av < 1e-3)) {
        os.setf(std::ios::scientific);
        os.precision(1);
    } else {
        os.precision(6);
    }
    os << v;
    return os.str();
}

/// Round step to 1/2/5 x 10^k covering roughly n intervals.
double nice_step(double span, int n) {
    double raw = span / n;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double r = raw / mag;
    double s = r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0;
    return s * mag;
}
} // namespace

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel)
    : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

void SvgPlot::set_y_range(double lo, double hi) {
    if (!(hi > lo)) throw InvalidInput("SvgPlot: empty y range");
    fixed_y_ = true;
    y_lo_ = lo;
    y_hi_ = hi;
}

void SvgPlot::add_series(std::vector<double> x, std::vector<double> y, std::string color,
                         std::string label, bool dashed) {
    if (x.size() != y.size() || x.empty())
        throw InvalidInput("SvgPlot: series needs matching non-empty x/y");
    series_.push_back({std::move(x), std::move(y), std::move(color), std::move(label), dashed});
}

void SvgPlot::add_hline(double y, std::string color, std::string label) {
    hlines_.emplace_back(y, std::move(color), std::move(label));
}

void SvgPlot::write(const std::string& path) const {
    if (series_.empty()) throw InvalidInput("SvgPlot: nothing to plot");
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    for (const auto& s : series_) {
        for (double v : s.x) {
            if (log_x_ && !(v > 0.0))
                throw InvalidInput("SvgPlot: log x axis requires positive x values");
            double t = log_x_ ? std::log10(v) : v;
            x_lo = std::min(x_lo, t);
            x_hi = std::max(x_hi, t);
        }
        for (double v : s.y) {
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
    }
    for (const auto& [y, c, l] : hlines_) {
        y_lo = std::min(y_lo, y);
        y_hi = std::max(y_hi, y);
    }
    if (fixed_y_) {
        y_lo = y_lo_;
        y_hi = y_hi_;
    } else {
        double pad = 0.06 * (y_hi - y_lo + 1e-300);
        y_lo -= pad;
        y_hi += pad;
    }
    if (!(x_hi > x_lo)) x_hi = x_lo + 1.0;
    if (!(y_hi > y_lo)) y_hi = y_lo + 1.0;

    double pw = kW - kML - kMR, ph = kH - kMT - kMB;
    auto px = [&](double v) {
        double t = log_x_ ? std::log10(v) : v;
        return kML + (t - x_lo) / (x_hi - x_lo) * pw;
    };
    auto py = [&](double v) { return kMT + (y_hi - v) / (y_hi - y_lo) * ph; };

    ensure_parent_dir(path);
    std::ofstream os(path);
    if (!os) throw InvalidInput("SvgPlot: cannot open '" + path + "'");
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
       << "' viewBox='0 0 " << kW << " " << kH << "'>\n";
    os << "<rect width='" << kW << "' height='" << kH << "' fill='white'/>\n";
    os << "<text x='" << kW / 2 << "' y='24' text-anchor='middle' font-size='16' "
          "font-family='sans-serif'>" << title_ << "</text>\n";

    // Axes box.
    os << "<rect x='" << kML << "' y='" << kMT << "' width='" << pw << "' height='" << ph
       << "' fill='none' stroke='black'/>\n";

    // X ticks.
    if (log_x_) {
        for (int e = static_cast<int>(std::floor(x_lo)); e <= static_cast<int>(std::ceil(x_hi)); ++e) {
            if (e < x_lo - 1e-9 || e > x_hi + 1e-9) continue;
            double sx = kML + (e - x_lo) / (x_hi - x_lo) * pw;
            os << "<line x1='" << sx << "' y1='" << kMT + ph << "' x2='" << sx << "' y2='"
               << kMT + ph + 5 << "' stroke='black'/>\n";
            os << "<text x='" << sx << "' y='" << kMT + ph + 20
               << "' text-anchor='middle' font-size='11' font-family='sans-serif'>1e" << e
               << "</text>\n";
        }
    } else {
        double step = nice_step(x_hi - x_lo, 6);
        for (double v = std::ceil(x_lo / step) * step; v <= x_hi + 1e-9 * step; v += step) {
            double sx = kML + (v - x_lo) / (x_hi - x_lo) * pw;
            os << "<line x1='" << sx << "' y1='" << kMT + ph << "' x2='" << sx << "' y2='"
               << kMT + ph + 5 << "' stroke='black'/>\n";
            os << "<text x='" << sx << "' y='" << kMT + ph + 20
               << "' text-anchor='middle' font-size='11' font-family='sans-serif'>"
               << fmt_tick(std::abs(v) < 1e-12 * step ? 0.0 : v) << "</text>\n";
        }
    }
    // Y ticks.
    {
        double step = nice_step(y_hi - y_lo, 6);
        for (double v = std::ceil(y_lo / step) * step; v <= y_hi + 1e-9 * step; v += step) {
            double sy = py(v);
            os << "<line x1='" << kML - 5 << "' y1='" << sy << "' x2='" << kML << "' y2='" << sy
               << "' stroke='black'/>\n";
            os << "<text x='" << kML - 8 << "' y='" << sy + 4
               << "' text-anchor='end' font-size='11' font-family='sans-serif'>"
               << fmt_tick(std::abs(v) < 1e-12 * step ? 0.0 : v) << "</text>\n";
        }
    }
    os << "<text x='" << kML + pw / 2 << "' y='" << kH - 14
       << "' text-anchor='middle' font-size='13' font-family='sans-serif'>" << xlabel_
       << "</text>\n";
    os << "<text x='18' y='" << kMT + ph / 2
       << "' text-anchor='middle' font-size='13' font-family='sans-serif' transform='rotate(-90 18 "
       << kMT + ph / 2 << ")'>" << ylabel_ << "</text>\n";

    for (const auto& [y, color, label] : hlines_) {
        if (y < y_lo || y > y_hi) continue;
        os << "<line x1='" << kML << "' y1='" << py(y) << "' x2='" << kML + pw << "' y2='"
           << py(y) << "' stroke='" << color << "' stroke-dasharray='2,4'/>\n";
    }

    for (const auto& s : series_) {
        os << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.6'";
        if (s.dashed) os << " stroke-dasharray='6,4'";
        os << " points='";
        for (size_t i = 0; i < s.x.size(); ++i) {
            double vy = std::min(std::max(s.y[i], y_lo), y_hi);
            os << px(s.x[i]) << "," << py(vy) << " ";
        }
        os << "'/>\n";
    }

    // Legend.
    double ly = kMT + 8;
    auto legend_entry = [&](const std::string& color, const std::string& label, bool dashed) {
        if (label.empty()) return;
        os << "<line x1='" << kW - kMR + 12 << "' y1='" << ly + 4 << "' x2='" << kW - kMR + 40
           << "' y2='" << ly + 4 << "' stroke='" << color << "' stroke-width='1.6'";
        if (dashed) os << " stroke-dasharray='6,4'";
        os << "/>\n";
        os << "<text x='" << kW - kMR + 46 << "' y='" << ly + 8
           << "' font-size='11' font-family='sans-serif'>" << label << "</text>\n";
        ly += 18;
    };
    for (const auto& s : series_) legend_entry(s.color, s.label, s.dashed);
    for (const auto& [y, color, label] : hlines_) legend_entry(color, label, true);

    os << "</svg>\n";
    if (!os) throw InvalidInput("SvgPlot: write failed for '" + path + "'");
}

} // namespace qmem
