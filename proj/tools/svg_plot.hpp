// svg_plot.hpp - minimal line/scatter charts for the figure recipes

#pragma once

#include <string>
#include <utility>
#include <vector>

namespace qmon::cli {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
    bool line{true};  // false: scatter markers
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    bool equal_aspect{false};  // complex-plane portraits
};

// Returns the SVG document. Non-finite points are skipped.
std::string render_svg(const PlotSpec& spec);

} // namespace qmon::cli
