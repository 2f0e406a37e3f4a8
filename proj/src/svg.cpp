#include "rscs/svg.hpp"

#include "rscs/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rscs::svg {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf"};

std::string num(double v) { return rscs::io::format_double(v); }

} // namespace

void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series) {
    const double width = 760, height = 480;
    const double ml = 70, mr = 160, mt = 40, mb = 55;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& s : series) {
        for (double v : s.x) {
            x_min = std::min(x_min, v);
            x_max = std::max(x_max, v);
        }
        for (double v : s.y) {
            y_min = std::min(y_min, v);
            y_max = std::max(y_max, v);
        }
    }
    if (!std::isfinite(x_min)) {
        x_min = 0.0;
        x_max = 1.0;
    }
    if (!std::isfinite(y_min)) {
        y_min = 0.0;
        y_max = 1.0;
    }
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + 1.0;
    const double y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
    auto py = [&](double y) { return mt + ph - (y - y_min) / (y_max - y_min) * ph; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
           "\" height=\"" + num(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(ml + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
           title + "</text>\n";

    // Axes and ticks.
    out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt + ph) + "\" x2=\"" + num(ml + pw) +
           "\" y2=\"" + num(mt + ph) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) + "\" y2=\"" +
           num(mt + ph) + "\" stroke=\"black\"/>\n";
    const int n_ticks = 5;
    for (int i = 0; i <= n_ticks; ++i) {
        const double fx = x_min + (x_max - x_min) * i / n_ticks;
        const double fy = y_min + (y_max - y_min) * i / n_ticks;
        out += "<line x1=\"" + num(px(fx)) + "\" y1=\"" + num(mt + ph) + "\" x2=\"" +
               num(px(fx)) + "\" y2=\"" + num(mt + ph + 5) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(px(fx)) + "\" y=\"" + num(mt + ph + 18) +
               "\" text-anchor=\"middle\">" + num(fx) + "</text>\n";
        out += "<line x1=\"" + num(ml - 5) + "\" y1=\"" + num(py(fy)) + "\" x2=\"" + num(ml) +
               "\" y2=\"" + num(py(fy)) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(ml - 8) + "\" y=\"" + num(py(fy) + 4) +
               "\" text-anchor=\"end\">" + num(fy) + "</text>\n";
    }
    out += "<text x=\"" + num(ml + pw / 2) + "\" y=\"" + num(height - 12) +
           "\" text-anchor=\"middle\">" + x_label + "</text>\n";
    out += "<text x=\"18\" y=\"" + num(mt + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           num(mt + ph / 2) + ")\">" + y_label + "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        std::string points;
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (!std::isfinite(series[s].y[i])) continue;
            points += num(px(series[s].x[i])) + "," + num(py(series[s].y[i])) + " ";
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        const double ly = mt + 16.0 * (static_cast<double>(s) + 1);
        out += "<line x1=\"" + num(ml + pw + 10) + "\" y1=\"" + num(ly) + "\" x2=\"" +
               num(ml + pw + 34) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + num(ml + pw + 40) + "\" y=\"" + num(ly + 4) + "\">" +
               series[s].label + "</text>\n";
    }
    out += "</svg>\n";
    rscs::io::write_text_atomic(path, out);
}

} // namespace rscs::svg
