#include "phaselab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace phaselab {

namespace {

constexpr double width = 720, height = 480, left = 70, right = 160, top = 40, bottom = 60;
const char* palette[] = {"#6a3d9a", "#d95f02", "#1b9e77", "#1f78b4", "#e7298a", "#66a61e", "#a6761d", "#666666"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

std::ofstream open(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("svg: cannot write " + path.string());
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return os;
}

}  // namespace

void write_line_chart(const std::filesystem::path& path, const ChartSpec& spec, const std::vector<Series>& series) {
    auto tx = [&](double x) { return spec.log_x ? std::log10(x) : x; };
    auto usable = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0); };
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (usable(s.x[i], s.y[i])) {
                xmin = std::min(xmin, tx(s.x[i]));
                xmax = std::max(xmax, tx(s.x[i]));
                ymin = std::min(ymin, s.y[i]);
                ymax = std::max(ymax, s.y[i]);
            }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double pw = width - left - right, ph = height - top - bottom;
    auto px = [&](double x) { return left + (tx(x) - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

    auto os = open(path);
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(spec.title)
       << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0, fy = ymin + (ymax - ymin) * i / 4.0;
        const double lx = left + pw * i / 4.0, ly = top + ph * (1.0 - i / 4.0);
        os << "<text x=\"" << lx << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
           << (spec.log_x ? "1e" + num(fx) : num(fx)) << "</text>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << ly + 4 << "\" text-anchor=\"end\">" << num(fy) << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 16 << "\" text-anchor=\"middle\">"
       << escape(spec.x_label) << "</text>\n";
    os << "<text transform=\"translate(18," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(spec.y_label) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = palette[k % std::size(palette)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\""
           << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (usable(s.x[i], s.y[i])) os << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
        os << "\"/>\n";
        const double ly = top + 14 + 18.0 * static_cast<double>(k);
        os << "<line x1=\"" << width - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << width - right + 34 << "\" y2=\""
           << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
           << "/>\n<text x=\"" << width - right + 40 << "\" y=\"" << ly + 4 << "\">" << escape(s.name) << "</text>\n";
    }
    os << "</svg>\n";
}

void write_heatmap(const std::filesystem::path& path, const std::string& title, int cols, int rows,
                   const std::vector<double>& values, double x0, double x1, double y0, double y1) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : values)
        if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (hi == lo) hi = lo + 1;
    const double side = std::min(width - left - right, height - top - bottom);
    const double cw = side / cols, ch = side / rows;
    auto os = open(path);
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
       << "</text>\n";
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const double v = values[static_cast<std::size_t>(r) * cols + c];
            if (!std::isfinite(v)) continue;
            const double t = (v - lo) / (hi - lo);
            const int red = static_cast<int>(std::lround(255 * t)), blue = static_cast<int>(std::lround(255 * (1 - t)));
            os << "<rect x=\"" << num(left + c * cw) << "\" y=\"" << num(top + (rows - 1 - r) * ch) << "\" width=\""
               << num(cw + 0.5) << "\" height=\"" << num(ch + 0.5) << "\" fill=\"rgb(" << red << ",64," << blue
               << ")\"/>\n";
        }
    os << "<text x=\"" << left << "\" y=\"" << top + side + 18 << "\">" << num(x0) << "</text>\n"
       << "<text x=\"" << left + side << "\" y=\"" << top + side + 18 << "\" text-anchor=\"end\">" << num(x1)
       << "</text>\n<text x=\"" << left - 6 << "\" y=\"" << top + side << "\" text-anchor=\"end\">" << num(y0)
       << "</text>\n<text x=\"" << left - 6 << "\" y=\"" << top + 10 << "\" text-anchor=\"end\">" << num(y1)
       << "</text>\n";
    os << "<text x=\"" << left + side + 20 << "\" y=\"" << top + 14 << "\">max " << num(hi) << "</text>\n"
       << "<text x=\"" << left + side + 20 << "\" y=\"" << top + 32 << "\">min " << num(lo) << "</text>\n</svg>\n";
}

}  // namespace phaselab
