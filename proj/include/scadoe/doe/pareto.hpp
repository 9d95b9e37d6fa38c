// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scadoe/doe/effects.hpp"

#include <vector>

namespace scadoe::doe {

struct ParetoEntry {
    Term term = Term::A;
    double abs_coefficient = 0.0;
    double percent = 0.0;
    double cumulative = 0.0;
};

struct ParetoOptions {
    bool include_abc = false;
    double threshold = 80.0; // cumulative percent that delimits the vital few
};

struct ParetoReport {
    std::vector<ParetoEntry> entries; // descending |coefficient|
    std::vector<Term> vital_few;      // up to and including the first crossing of threshold
    double threshold = 80.0;
};

/// Throws EmptyPareto when every considered coefficient is zero.
ParetoReport pareto(const EffectsReport &report, const ParetoOptions &options = {});

} // namespace scadoe::doe
