#pragma once

#include <string>
#include <vector>

namespace aol::svg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

// Static line chart; a pure function of the data handed in.
void line_chart(const std::string& path, const std::string& title,
                const std::string& x_label, const std::string& y_label,
                const std::vector<Series>& series);

// Grouped bar chart with optional symmetric error bars
// (values[group][method], same shape for errors; empty errors = none).
void bar_chart(const std::string& path, const std::string& title,
               const std::string& x_label, const std::string& y_label,
               const std::vector<std::string>& group_labels,
               const std::vector<std::string>& method_labels,
               const std::vector<std::vector<double>>& values,
               const std::vector<std::vector<double>>& errors = {});

}  // namespace aol::svg
