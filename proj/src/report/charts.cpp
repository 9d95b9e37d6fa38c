// SPDX-License-Identifier: Apache-2.0

#include "scadoe/report/charts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace scadoe::report {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 72, kRight = 72, kTop = 40, kBottom = 64;
constexpr double kPlotW = kWidth - kLeft - kRight, kPlotH = kHeight - kTop - kBottom;

std::string escape(const std::string &s) {
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

struct Axis {
    double lo = 0.0, hi = 1.0;
    double y(double v) const { return kTop + kPlotH * (hi - v) / (hi - lo); }
};

Axis left_axis(const ChartSpec &spec) {
    double lo = 0.0, hi = 0.0;
    auto take = [&](double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    };
    for (const auto &b : spec.bars)
        take(b.value);
    if (!spec.line_on_right_axis)
        for (double v : spec.line)
            take(v);
    for (const auto &t : spec.thresholds)
        if (!t.right_axis)
            take(t.value);
    if (hi - lo <= 0.0)
        hi = lo + 1.0;
    const double pad = 0.05 * (hi - lo);
    return {lo < 0.0 ? lo - pad : lo, hi + pad};
}

int tick_decimals(double span) {
    return std::clamp(2 - static_cast<int>(std::floor(std::log10(span))), 0, 6);
}

std::string num(double v) { return fixed(v, 2); }

} // namespace

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    std::string s(buf);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos)
        s.erase(0, 1);
    return s;
}

std::string render_svg(const ChartSpec &spec) {
    const Axis left = left_axis(spec);
    const Axis right{0.0, 105.0};
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\" font-family=\"DejaVu Sans, sans-serif\" font-size=\"12\">\n";
    o << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
    o << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(spec.title) << "</text>\n";

    // axes and ticks
    const double x0 = kLeft, x1 = kLeft + kPlotW, yb = kTop + kPlotH;
    o << "<g stroke=\"black\" stroke-width=\"1\">\n";
    o << "<line x1=\"" << num(x0) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x0) << "\" y2=\""
      << num(yb) << "\"/>\n";
    o << "<line x1=\"" << num(x0) << "\" y1=\"" << num(left.y(std::max(left.lo, 0.0))) << "\" x2=\""
      << num(x1) << "\" y2=\"" << num(left.y(std::max(left.lo, 0.0))) << "\"/>\n";
    const bool has_right = spec.line_on_right_axis ||
                           std::any_of(spec.thresholds.begin(), spec.thresholds.end(),
                                       [](const ThresholdLine &t) { return t.right_axis; });
    if (has_right)
        o << "<line x1=\"" << num(x1) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x1)
          << "\" y2=\"" << num(yb) << "\"/>\n";
    o << "</g>\n";

    const int decimals = tick_decimals(left.hi - left.lo);
    o << "<g font-size=\"10\">\n";
    for (int k = 0; k <= 5; ++k) {
        const double v = left.lo + (left.hi - left.lo) * k / 5.0;
        o << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(left.y(v) + 3)
          << "\" text-anchor=\"end\">" << fixed(v, decimals) << "</text>\n";
    }
    if (has_right)
        for (int k = 0; k <= 5; ++k) {
            const double v = 20.0 * k;
            o << "<text x=\"" << num(x1 + 6) << "\" y=\"" << num(right.y(v) + 3) << "\">"
              << fixed(v, 0) << "%</text>\n";
        }
    o << "</g>\n";

    o << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 12)
      << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
    o << "<text transform=\"translate(16," << num(kTop + kPlotH / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.y_label) << "</text>\n";
    if (has_right && !spec.y2_label.empty())
        o << "<text transform=\"translate(" << num(kWidth - 12) << ',' << num(kTop + kPlotH / 2)
          << ") rotate(90)\" text-anchor=\"middle\">" << escape(spec.y2_label) << "</text>\n";

    // bars
    const auto nbars = spec.bars.size();
    const double band = nbars ? kPlotW / static_cast<double>(nbars) : 0.0;
    auto bar_center = [&](std::size_t i) { return x0 + (static_cast<double>(i) + 0.5) * band; };
    if (nbars) {
        o << "<g fill=\"steelblue\">\n";
        const double base = left.y(std::max(left.lo, 0.0));
        for (std::size_t i = 0; i < nbars; ++i) {
            const double top = left.y(spec.bars[i].value);
            o << "<rect x=\"" << num(bar_center(i) - 0.3 * band) << "\" y=\""
              << num(std::min(top, base)) << "\" width=\"" << num(0.6 * band) << "\" height=\""
              << num(std::abs(base - top)) << "\"/>\n";
        }
        o << "</g>\n<g font-size=\"11\" text-anchor=\"middle\">\n";
        for (std::size_t i = 0; i < nbars; ++i)
            o << "<text x=\"" << num(bar_center(i)) << "\" y=\"" << num(yb + 16) << "\">"
              << escape(spec.bars[i].label) << "</text>\n";
        o << "</g>\n";
    }

    // line
    if (!spec.line.empty()) {
        const Axis &axis = spec.line_on_right_axis ? right : left;
        const auto n = spec.line.size();
        auto lx = [&](std::size_t i) {
            if (nbars == n)
                return bar_center(i);
            return n == 1 ? (x0 + x1) / 2 : x0 + kPlotW * static_cast<double>(i) / static_cast<double>(n - 1);
        };
        o << "<polyline fill=\"none\" stroke=\"darkorange\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < n; ++i) {
            const double v = std::isfinite(spec.line[i]) ? spec.line[i] : axis.hi;
            o << (i ? " " : "") << num(lx(i)) << ',' << num(axis.y(std::clamp(v, axis.lo, axis.hi)));
        }
        o << "\"/>\n";
        if (nbars == n) {
            o << "<g fill=\"darkorange\">\n";
            for (std::size_t i = 0; i < n; ++i)
                o << "<circle cx=\"" << num(lx(i)) << "\" cy=\"" << num(axis.y(spec.line[i]))
                  << "\" r=\"3\"/>\n";
            o << "</g>\n";
        }
    }

    // thresholds
    for (const auto &t : spec.thresholds) {
        const Axis &axis = t.right_axis ? right : left;
        const double y = axis.y(t.value);
        o << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x1) << "\" y2=\""
          << num(y) << "\" stroke=\"firebrick\" stroke-dasharray=\"6,4\"/>\n";
        o << "<text x=\"" << num(x1 - 4) << "\" y=\"" << num(y - 4)
          << "\" text-anchor=\"end\" font-size=\"10\" fill=\"firebrick\">" << escape(t.label)
          << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

ChartSpec pareto_chart(const doe::ParetoReport &report) {
    if (report.entries.empty())
        fail(ErrorKind::EmptyPareto, "pareto chart: no entries");
    ChartSpec spec;
    spec.title = "Pareto of effects";
    spec.x_label = "Term";
    spec.y_label = "|Coefficient|";
    spec.y2_label = "Cumulative %";
    spec.line_on_right_axis = true;
    for (const auto &e : report.entries) {
        spec.bars.push_back({std::string(doe::to_string(e.term)) + " (" + fixed(e.percent, 2) + "%)",
                             e.abs_coefficient});
        spec.line.push_back(e.cumulative);
    }
    spec.thresholds.push_back({report.threshold, fixed(report.threshold, 0) + "%", true});
    return spec;
}

std::string pareto_svg(const doe::ParetoReport &report) { return render_svg(pareto_chart(report)); }

void render_pareto(const doe::ParetoReport &report, const std::filesystem::path &path) {
    write_text(path, pareto_svg(report));
}

std::string pareto_ascii(const doe::ParetoReport &report, int width) {
    if (report.entries.empty())
        fail(ErrorKind::EmptyPareto, "pareto: no entries");
    std::ostringstream o;
    char line[160];
    std::snprintf(line, sizeof line, "%-4s %10s %8s %8s\n", "term", "|coeff|", "%", "cum%");
    o << line;
    for (const auto &e : report.entries) {
        const bool vital = std::find(report.vital_few.begin(), report.vital_few.end(), e.term) !=
                           report.vital_few.end();
        std::snprintf(line, sizeof line, "%-4s %10s %8s %8s %c ",
                      std::string(doe::to_string(e.term)).c_str(), fixed(e.abs_coefficient, 4).c_str(),
                      fixed(e.percent, 2).c_str(), fixed(e.cumulative, 2).c_str(), vital ? '*' : ' ');
        o << line << std::string(static_cast<std::size_t>(std::lround(e.percent / 100.0 * width)), '#')
          << '\n';
    }
    o << "vital few (*): cumulative crosses " << fixed(report.threshold, 0) << "% at "
      << doe::to_string(report.vital_few.back()) << '\n';
    return o.str();
}

std::string curve_svg(const AnalysisResult &result, const std::vector<ThresholdLine> &thresholds) {
    if (!result.curve)
        fail(ErrorKind::CurveAbsent,
             "result for " + std::string(to_string(result.metric)) + " has no curve");
    ChartSpec spec;
    spec.title = std::string(to_string(result.metric)) + " (peak " + fixed(result.summary, 4) +
                 (result.peak_index >= 0 ? " at " + std::to_string(result.peak_index) : "") + ")";
    spec.x_label = "Sample";
    spec.y_label = std::string(to_string(result.metric));
    spec.line.assign(result.curve->data(), result.curve->data() + result.curve->size());
    spec.thresholds = thresholds;
    return render_svg(spec);
}

void render_curve(const AnalysisResult &result, const std::vector<ThresholdLine> &thresholds,
                  const std::filesystem::path &path) {
    write_text(path, curve_svg(result, thresholds));
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(ErrorKind::Io, "cannot write " + path.string());
    out << text;
    if (!out.flush())
        fail(ErrorKind::Io, "write failed: " + path.string());
}

} // namespace scadoe::report
