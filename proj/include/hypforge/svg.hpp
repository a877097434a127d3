#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hypforge {

// Minimal standalone SVG line plots for study output. Log-log when requested;
// one polyline per series.
struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::vector<PlotSeries>& series, bool loglog);

} // namespace hypforge
