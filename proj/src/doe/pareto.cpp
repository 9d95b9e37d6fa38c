// SPDX-License-Identifier: Apache-2.0

#include "scadoe/doe/pareto.hpp"

#include <algorithm>
#include <cmath>

namespace scadoe::doe {

ParetoReport pareto(const EffectsReport &report, const ParetoOptions &options) {
    ParetoReport out;
    out.threshold = options.threshold;
    double total = 0.0;
    for (auto t : kTerms) {
        if (t == Term::ABC && !options.include_abc)
            continue;
        const double c = std::abs(report.coefficient(t));
        out.entries.push_back({t, c, 0.0, 0.0});
        total += c;
    }
    if (!(total > 0.0))
        fail(ErrorKind::EmptyPareto, "pareto: all coefficients are zero");

    std::stable_sort(out.entries.begin(), out.entries.end(),
                     [](const ParetoEntry &x, const ParetoEntry &y) {
                         return x.abs_coefficient > y.abs_coefficient;
                     });
    double cumulative = 0.0;
    bool crossed = false;
    for (auto &e : out.entries) {
        e.percent = e.abs_coefficient / total * 100.0;
        cumulative += e.percent;
        e.cumulative = cumulative;
        if (!crossed) {
            out.vital_few.push_back(e.term);
            crossed = e.cumulative >= options.threshold - 1e-9;
        }
    }
    return out;
}

} // namespace scadoe::doe
