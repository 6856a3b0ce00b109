#include "aol/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "aol/csv.hpp"
#include "aol/errors.hpp"

namespace aol::svg {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kMarginL = 70.0;
constexpr double kMarginR = 150.0;
constexpr double kMarginT = 40.0;
constexpr double kMarginB = 55.0;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) { return csv::format(v); }

struct Frame {
    double x_min, x_max, y_min, y_max;
    double px(double x) const {
        return kMarginL + (x - x_min) / (x_max - x_min) *
                              (kWidth - kMarginL - kMarginR);
    }
    double py(double y) const {
        return kHeight - kMarginB -
               (y - y_min) / (y_max - y_min) * (kHeight - kMarginT - kMarginB);
    }
};

void open_doc(std::ofstream& out, const std::string& title,
              const std::string& x_label, const std::string& y_label) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
        << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">"
        << title << "</text>\n";
    out << "<text x=\"" << (kMarginL + (kWidth - kMarginR)) / 2 << "\" y=\""
        << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">"
        << x_label << "</text>\n";
    out << "<text x=\"18\" y=\"" << (kMarginT + kHeight - kMarginB) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\" transform=\"rotate(-90 18 "
        << (kMarginT + kHeight - kMarginB) / 2 << ")\">" << y_label
        << "</text>\n";
}

void axes(std::ofstream& out, const Frame& f) {
    out << "<g stroke=\"#333\" stroke-width=\"1\">\n";
    out << "<line x1=\"" << kMarginL << "\" y1=\"" << kHeight - kMarginB
        << "\" x2=\"" << kWidth - kMarginR << "\" y2=\"" << kHeight - kMarginB
        << "\"/>\n";
    out << "<line x1=\"" << kMarginL << "\" y1=\"" << kMarginT << "\" x2=\""
        << kMarginL << "\" y2=\"" << kHeight - kMarginB << "\"/>\n";
    out << "</g>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"10\" fill=\"#333\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = f.x_min + (f.x_max - f.x_min) * i / 5.0;
        const double yv = f.y_min + (f.y_max - f.y_min) * i / 5.0;
        out << "<text x=\"" << f.px(xv) << "\" y=\"" << kHeight - kMarginB + 14
            << "\" text-anchor=\"middle\">" << num(xv) << "</text>\n";
        out << "<text x=\"" << kMarginL - 6 << "\" y=\"" << f.py(yv) + 3
            << "\" text-anchor=\"end\">" << num(yv) << "</text>\n";
    }
    out << "</g>\n";
}

void legend(std::ofstream& out, const std::vector<std::string>& names) {
    out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
        const double y = kMarginT + 16.0 * static_cast<double>(i);
        out << "<rect x=\"" << kWidth - kMarginR + 12 << "\" y=\"" << y
            << "\" width=\"11\" height=\"11\" fill=\""
            << kPalette[i % std::size(kPalette)] << "\"/>\n";
        out << "<text x=\"" << kWidth - kMarginR + 28 << "\" y=\"" << y + 9.5
            << "\">" << names[i] << "</text>\n";
    }
    out << "</g>\n";
}

}  // namespace

void line_chart(const std::string& path, const std::string& title,
                const std::string& x_label, const std::string& y_label,
                const std::vector<Series>& series) {
    std::ofstream out(path);
    if (!out) throw IoError("svg: cannot open for writing: " + path);

    Frame f{std::numeric_limits<double>::max(),
            std::numeric_limits<double>::lowest(),
            std::numeric_limits<double>::max(),
            std::numeric_limits<double>::lowest()};
    for (const Series& s : series) {
        for (double v : s.x) { f.x_min = std::min(f.x_min, v); f.x_max = std::max(f.x_max, v); }
        for (double v : s.y) { f.y_min = std::min(f.y_min, v); f.y_max = std::max(f.y_max, v); }
    }
    if (f.x_min >= f.x_max) { f.x_min -= 1.0; f.x_max += 1.0; }
    if (f.y_min >= f.y_max) { f.y_min -= 1.0; f.y_max += 1.0; }

    open_doc(out, title, x_label, y_label);
    axes(out, f);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < series.size(); ++i) {
        names.push_back(series[i].name);
        out << "<polyline fill=\"none\" stroke=\""
            << kPalette[i % std::size(kPalette)]
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < series[i].x.size(); ++k)
            out << num(f.px(series[i].x[k])) << ","
                << num(f.py(series[i].y[k])) << " ";
        out << "\"/>\n";
    }
    legend(out, names);
    out << "</svg>\n";
    if (!out) throw IoError("svg: write failed: " + path);
}

void bar_chart(const std::string& path, const std::string& title,
               const std::string& x_label, const std::string& y_label,
               const std::vector<std::string>& group_labels,
               const std::vector<std::string>& method_labels,
               const std::vector<std::vector<double>>& values,
               const std::vector<std::vector<double>>& errors) {
    std::ofstream out(path);
    if (!out) throw IoError("svg: cannot open for writing: " + path);

    double y_max = 0.0;
    for (std::size_t g = 0; g < values.size(); ++g)
        for (std::size_t m = 0; m < values[g].size(); ++m) {
            double v = values[g][m];
            if (!errors.empty()) v += errors[g][m];
            y_max = std::max(y_max, v);
        }
    if (y_max <= 0.0) y_max = 1.0;
    Frame f{0.0, 1.0, 0.0, y_max * 1.05};

    open_doc(out, title, x_label, y_label);
    axes(out, f);

    const std::size_t n_groups = group_labels.size();
    const std::size_t n_methods = method_labels.size();
    const double plot_w = kWidth - kMarginL - kMarginR;
    const double group_w = plot_w / static_cast<double>(n_groups);
    const double bar_w = group_w * 0.8 / static_cast<double>(n_methods);

    out << "<g font-family=\"sans-serif\" font-size=\"10\" fill=\"#333\">\n";
    for (std::size_t g = 0; g < n_groups; ++g) {
        const double gx = kMarginL + group_w * (static_cast<double>(g) + 0.5);
        out << "<text x=\"" << gx << "\" y=\"" << kHeight - kMarginB + 14
            << "\" text-anchor=\"middle\">" << group_labels[g] << "</text>\n";
    }
    out << "</g>\n";

    for (std::size_t g = 0; g < n_groups; ++g) {
        const double gx0 = kMarginL + group_w * static_cast<double>(g) +
                           group_w * 0.1;
        for (std::size_t m = 0; m < n_methods; ++m) {
            const double v = values[g][m];
            const double x0 = gx0 + bar_w * static_cast<double>(m);
            const double y0 = f.py(v);
            out << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0)
                << "\" width=\"" << num(bar_w * 0.92) << "\" height=\""
                << num(kHeight - kMarginB - y0) << "\" fill=\""
                << kPalette[m % std::size(kPalette)] << "\"/>\n";
            if (!errors.empty() && errors[g][m] > 0.0) {
                const double cx = x0 + bar_w * 0.46;
                out << "<line x1=\"" << num(cx) << "\" y1=\""
                    << num(f.py(v - errors[g][m])) << "\" x2=\"" << num(cx)
                    << "\" y2=\"" << num(f.py(v + errors[g][m]))
                    << "\" stroke=\"#111\" stroke-width=\"1\"/>\n";
            }
        }
    }
    legend(out, method_labels);
    out << "</svg>\n";
    if (!out) throw IoError("svg: write failed: " + path);
}

}  // namespace aol::svg
