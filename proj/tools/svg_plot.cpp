#include "svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace qmon::cli {

namespace {

constexpr double kWidth = 640, kHeight = 480;
constexpr double kLeft = 80, kRight = 20, kTop = 40, kBottom = 60;
constexpr std::array<const char*, 6> kColors{"#1f77b4", "#d62728", "#2ca02c",
                                             "#9467bd", "#ff7f0e", "#17becf"};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string render_svg(const PlotSpec& spec) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : spec.series) {
        for (auto [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            x0 = std::min(x0, x); x1 = std::max(x1, x);
            y0 = std::min(y0, y); y1 = std::max(y1, y);
        }
    }
    if (!std::isfinite(x0)) { x0 = 0; x1 = 1; y0 = 0; y1 = 1; }
    if (x1 - x0 <= 0) { x0 -= 0.5; x1 += 0.5; }
    if (y1 - y0 <= 0) { y0 -= 0.5; y1 += 0.5; }

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    if (spec.equal_aspect) {
        const double scale = std::max((x1 - x0) / pw, (y1 - y0) / ph);
        const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
        x0 = cx - 0.5 * scale * pw; x1 = cx + 0.5 * scale * pw;
        y0 = cy - 0.5 * scale * ph; y1 = cy + 0.5 * scale * ph;
    }
    auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(spec.title) << "</text>\n";
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double tx = x0 + (x1 - x0) * i / 4.0, ty = y0 + (y1 - y0) * i / 4.0;
        os << "<text x=\"" << num(px(tx)) << "\" y=\"" << num(kTop + ph + 18)
           << "\" text-anchor=\"middle\">" << tick(tx) << "</text>\n";
        os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(ty) + 4)
           << "\" text-anchor=\"end\">" << tick(ty) << "</text>\n";
    }
    os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 16)
       << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << num(kTop + ph / 2) << ")\">" << escape(spec.y_label) << "</text>\n";

    for (std::size_t s = 0; s < spec.series.size(); ++s) {
        const auto& series = spec.series[s];
        const char* color = kColors[s % kColors.size()];
        if (series.line) {
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
            for (auto [x, y] : series.points) {
                if (std::isfinite(x) && std::isfinite(y)) os << num(px(x)) << ',' << num(py(y)) << ' ';
            }
            os << "\"/>\n";
        } else {
            for (auto [x, y] : series.points) {
                if (!std::isfinite(x) || !std::isfinite(y)) continue;
                os << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y))
                   << "\" r=\"2\" fill=\"" << color << "\"/>\n";
            }
        }
        os << "<text x=\"" << num(kLeft + pw - 8) << "\" y=\"" << num(kTop + 16 + 14 * static_cast<double>(s))
           << "\" text-anchor=\"end\" fill=\"" << color << "\">" << escape(series.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace qmon::cli
