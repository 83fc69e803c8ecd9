#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace qrc {

// Minimal deterministic SVG plots. The CSVs carry the data; these are quick
// visual checks of the same tables.

struct SvgSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f6fb4";
    std::string label;
    bool points_only = false;  // scatter instead of polyline
    double point_radius = 1.2;
};

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series, bool log_y = false);

// Heatmap of a layers x reps (or similar) matrix; NaN cells are hatched grey.
void write_svg_heatmap(const std::string& path, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const Eigen::MatrixXd& values,
                       const std::vector<std::string>& row_labels,
                       const std::vector<std::string>& col_labels);

}  // namespace qrc
