// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scadoe/analysis/result.hpp"
#include "scadoe/doe/pareto.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace scadoe::report {

struct Bar {
    std::string label;
    double value = 0.0;
};

struct ThresholdLine {
    double value = 0.0;
    std::string label;
    bool right_axis = false; // measured on the 0..100 % axis
};

/// Everything a chart needs. Bars and the line share the x positions when
/// both are present (one point per bar); otherwise the line spans the plot.
struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::string y2_label;             // right axis, 0..100 %
    std::vector<Bar> bars;
    std::vector<double> line;
    bool line_on_right_axis = false;
    std::vector<ThresholdLine> thresholds;
};

/// Deterministic SVG 1.1 document (fixed size and fonts).
std::string render_svg(const ChartSpec &spec);

ChartSpec pareto_chart(const doe::ParetoReport &report);
std::string pareto_svg(const doe::ParetoReport &report);
void render_pareto(const doe::ParetoReport &report, const std::filesystem::path &path);

/// Terminal rendering: one row per term with a bar scaled to its percentage.
std::string pareto_ascii(const doe::ParetoReport &report, int width = 40);

/// Line plot of result.curve with horizontal thresholds. Throws CurveAbsent
/// for scalar-only results.
std::string curve_svg(const AnalysisResult &result, const std::vector<ThresholdLine> &thresholds);
void render_curve(const AnalysisResult &result, const std::vector<ThresholdLine> &thresholds,
                  const std::filesystem::path &path);

/// Writes text to a file, mapping failures to Io errors.
void write_text(const std::filesystem::path &path, const std::string &text);

/// Fixed-point formatting with `decimals` digits, "-0.0000" normalized to "0.0000".
std::string fixed(double value, int decimals);

} // namespace scadoe::report
