#include "aqr/plots.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace aqr {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 60;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 50;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Maps data coordinates on [x0,x1] x [y0,y1] into the plot area.
struct Frame {
    double x0, x1, y0, y1;
    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void open_svg(std::ostringstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
        << "</text>\n";
}

void axes(std::ostringstream& out, const Frame& f, const std::string& xlabel, const std::string& ylabel, int xticks,
          int yticks) {
    out << "<g stroke=\"black\" fill=\"none\">\n";
    out << "<line x1=\"" << num(f.px(f.x0)) << "\" y1=\"" << num(f.py(f.y0)) << "\" x2=\"" << num(f.px(f.x1))
        << "\" y2=\"" << num(f.py(f.y0)) << "\"/>\n";
    out << "<line x1=\"" << num(f.px(f.x0)) << "\" y1=\"" << num(f.py(f.y0)) << "\" x2=\"" << num(f.px(f.x0))
        << "\" y2=\"" << num(f.py(f.y1)) << "\"/>\n";
    out << "</g>\n";
    for (int i = 0; i <= xticks; ++i) {
        const double x = f.x0 + (f.x1 - f.x0) * i / xticks;
        out << "<text x=\"" << num(f.px(x)) << "\" y=\"" << num(f.py(f.y0) + 16) << "\" text-anchor=\"middle\">"
            << num(x) << "</text>\n";
    }
    for (int i = 0; i <= yticks; ++i) {
        const double y = f.y0 + (f.y1 - f.y0) * i / yticks;
        out << "<text x=\"" << num(f.px(f.x0) - 6) << "\" y=\"" << num(f.py(y) + 4) << "\" text-anchor=\"end\">"
            << num(y) << "</text>\n";
    }
    out << "<text x=\"" << num((f.px(f.x0) + f.px(f.x1)) / 2) << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
    out << "<text transform=\"translate(16," << num((f.py(f.y0) + f.py(f.y1)) / 2)
        << ") rotate(-90)\" text-anchor=\"middle\">" << escape(ylabel) << "</text>\n";
}

void legend(std::ostringstream& out, const std::vector<Curve>& curves) {
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const double y = kTop + 8 + 16.0 * static_cast<double>(i);
        out << "<rect x=\"" << kLeft + 10 << "\" y=\"" << num(y - 9) << "\" width=\"10\" height=\"10\" fill=\""
            << kPalette[i % std::size(kPalette)] << "\"/>\n";
        out << "<text x=\"" << kLeft + 26 << "\" y=\"" << num(y) << "\">" << escape(curves[i].label) << "</text>\n";
    }
}

std::string polyline(const Frame& f, const std::vector<double>& x, const std::vector<double>& y) {
    std::string pts;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) pts += ' ';
        pts += num(f.px(x[i])) + "," + num(f.py(y[i]));
    }
    return pts;
}

}  // namespace

std::string reliability_svg(const std::vector<Curve>& curves, const std::string& title) {
    std::ostringstream out;
    open_svg(out, title);
    const Frame f{0, 1, 0, 1};
    axes(out, f, "nominal level", "empirical coverage", 10, 10);
    out << "<line class=\"diagonal\" x1=\"" << num(f.px(0)) << "\" y1=\"" << num(f.py(0)) << "\" x2=\"" << num(f.px(1)) << "\" y2=\""
        << num(f.py(1)) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto* color = kPalette[i % std::size(kPalette)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
            << polyline(f, curves[i].x, curves[i].y) << "\"/>\n";
        for (std::size_t j = 0; j < curves[i].x.size(); ++j) {
            out << "<circle cx=\"" << num(f.px(curves[i].x[j])) << "\" cy=\"" << num(f.py(curves[i].y[j]))
                << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        }
    }
    legend(out, curves);
    out << "</svg>\n";
    return out.str();
}

std::string sharpness_svg(const std::vector<Curve>& curves, const std::string& title) {
    std::ostringstream out;
    open_svg(out, title);
    double ymax = 0.0;
    for (const auto& c : curves)
        for (double v : c.y) ymax = std::max(ymax, v);
    ymax = ymax > 0.0 ? ymax * 1.1 : 1.0;
    const Frame f{0, 1, 0, ymax};
    axes(out, f, "central interval coverage", "mean interval width", 10, 5);
    const double slot = (kWidth - kLeft - kRight) / 10.0;
    const double bar = 0.8 * slot / static_cast<double>(std::max<std::size_t>(curves.size(), 1));
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto* color = kPalette[i % std::size(kPalette)];
        for (std::size_t j = 0; j < curves[i].x.size(); ++j) {
            const double x = f.px(curves[i].x[j]) - 0.4 * slot + bar * static_cast<double>(i);
            const double top = f.py(curves[i].y[j]);
            out << "<rect class=\"bar\" x=\"" << num(x) << "\" y=\"" << num(top) << "\" width=\"" << num(bar) << "\" height=\""
                << num(f.py(0) - top) << "\" fill=\"" << color << "\"/>\n";
        }
    }
    legend(out, curves);
    out << "</svg>\n";
    return out.str();
}

std::string fan_chart_svg(const FanChartData& data, const std::string& title) {
    const auto n = data.observed.size();
    if (n == 0 || data.lower.size() != n || data.upper.size() != n || data.median.size() != n)
        throw std::invalid_argument("fan chart: series lengths differ or are empty");
    std::ostringstream out;
    open_svg(out, title);
    const Frame f{0, static_cast<double>(std::max<std::size_t>(n - 1, 1)), 0, 1};
    axes(out, f, "step", "normalized power", 6, 5);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);

    std::string band;
    for (std::size_t i = 0; i < n; ++i) band += num(f.px(x[i])) + "," + num(f.py(data.upper[i])) + " ";
    for (std::size_t i = n; i-- > 0;) band += num(f.px(x[i])) + "," + num(f.py(data.lower[i])) + (i ? " " : "");
    out << "<polygon class=\"band\" fill=\"#1f77b4\" fill-opacity=\"0.3\" stroke=\"none\" points=\"" << band << "\"/>\n";
    out << "<polyline class=\"median\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" points=\""
        << polyline(f, x, data.median) << "\"/>\n";
    out << "<polyline class=\"observed\" fill=\"none\" stroke=\"black\" stroke-width=\"1.2\" points=\""
        << polyline(f, x, data.observed) << "\"/>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace aqr
