#include "hypforge/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hypforge/io.hpp"

namespace hypforge {

void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::vector<PlotSeries>& series, bool loglog) {
    const int W = 640, H = 440, ML = 70, MR = 20, MT = 40, MB = 50;
    auto tr = [&](double v) { return loglog ? std::log10(v) : v; };
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (loglog && (!(s.x[i] > 0) || !(s.y[i] > 0))) continue;
            xmin = std::min(xmin, tr(s.x[i])); xmax = std::max(xmax, tr(s.x[i]));
            ymin = std::min(ymin, tr(s.y[i])); ymax = std::max(ymax, tr(s.y[i]));
        }
    if (!(xmax > xmin)) { xmax = xmin + 1; }
    if (!(ymax > ymin)) { ymax = ymin + 1; }
    const double padx = 0.05 * (xmax - xmin), pady = 0.08 * (ymax - ymin);
    xmin -= padx; xmax += padx; ymin -= pady; ymax += pady;
    auto X = [&](double v) { return ML + (tr(v) - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto Y = [&](double v) { return H - MB - (tr(v) - ymin) / (ymax - ymin) * (H - MT - MB); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
       << (loglog ? " (log-log)" : "") << "</text>\n";
    os << "<line x1='" << ML << "' y1='" << H - MB << "' x2='" << W - MR << "' y2='" << H - MB
       << "' stroke='black'/>\n";
    os << "<line x1='" << ML << "' y1='" << MT << "' x2='" << ML << "' y2='" << H - MB
       << "' stroke='black'/>\n";
    // a few axis labels
    for (int k = 0; k <= 4; ++k) {
        const double fx = xmin + (xmax - xmin) * k / 4.0;
        const double fy = ymin + (ymax - ymin) * k / 4.0;
        os << "<text x='" << ML + (W - ML - MR) * k / 4.0 << "' y='" << H - MB + 18
           << "' text-anchor='middle' font-size='11'>" << (loglog ? "1e" : "")
           << (loglog ? std::to_string(fx).substr(0, 6) : format_double(fx).substr(0, 8))
           << "</text>\n";
        os << "<text x='" << ML - 8 << "' y='" << H - MB - (H - MT - MB) * k / 4.0 + 4
           << "' text-anchor='end' font-size='11'>" << (loglog ? "1e" : "")
           << (loglog ? std::to_string(fy).substr(0, 6) : format_double(fy).substr(0, 8))
           << "</text>\n";
    }
    int ci = 0;
    for (const auto& s : series) {
        const char* col = colors[ci % 5];
        os << "<polyline fill='none' stroke='" << col << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (loglog && (!(s.x[i] > 0) || !(s.y[i] > 0))) continue;
            os << X(s.x[i]) << ',' << Y(s.y[i]) << ' ';
        }
        os << "'/>\n";
        os << "<text x='" << W - MR - 8 << "' y='" << MT + 16 * (ci + 1)
           << "' text-anchor='end' font-size='12' fill='" << col << "'>" << s.label
           << "</text>\n";
        ++ci;
    }
    os << "</svg>\n";
    atomic_write(path, os.str());
}

} // namespace hypforge
