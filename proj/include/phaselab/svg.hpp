#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace phaselab {

struct Series {
    std::string name;
    std::vector<double> x, y;
    bool dashed = false;
};

struct ChartSpec {
    std::string title, x_label, y_label;
    bool log_x = false;
};

// Static line chart; non-finite points and non-positive x on a log axis are skipped.
void write_line_chart(const std::filesystem::path& path, const ChartSpec& spec, const std::vector<Series>& series);

// Row-major values over [x0, x1] x [y0, y1], row 0 at y0; NaN cells are left blank.
void write_heatmap(const std::filesystem::path& path, const std::string& title, int cols, int rows,
                   const std::vector<double>& values, double x0, double x1, double y0, double y1);

}  // namespace phaselab
