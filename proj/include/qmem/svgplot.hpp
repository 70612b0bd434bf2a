#pragma once

#include <string>
#include <vector>

namespace qmem {

/// Minimal SVG line-plot writer: multiple series, linear or log-10 x axis,
/// automatic ranges and ticks, simple legend. Enough for the pipeline's
/// diagnostic plots; not a general charting library.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel);

    void set_log_x(bool on) { log_x_ = on; }
    void set_y_range(double lo, double hi);

    void add_series(std::vector<double> x, std::vector<double> y, std::string color,
                    std::string label, bool dashed = false);
    /// Horizontal guide line across the full x range.
    void add_hline(double y, std::string color, std::string label);

    void write(const std::string& path) const;

private:
    struct Series {
        std::vector<double> x, y;
        std::string color;
        std::string label;
        bool dashed;
    };
    std::string title_, xlabel_, ylabel_;
    bool log_x_ = false;
    bool fixed_y_ = false;
    double y_lo_ = 0.0, y_hi_ = 1.0;
    std::vector<Series> series_;
    std::vector<std::tuple<double, std::string, std::string>> hlines_;
};

} // namespace qmem
