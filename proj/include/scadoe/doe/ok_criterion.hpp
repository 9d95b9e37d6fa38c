// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scadoe/analysis/result.hpp"
#include "scadoe/doe/effects.hpp"

#include <array>

namespace scadoe::doe {

/// Quantified goal of an evaluation, checked against each run's average.
struct OkCriterion {
    enum class Comparator { GE, LE, Outside };

    MetricId metric = MetricId::CorrPeak;
    Comparator comparator = Comparator::GE;
    double threshold = 0.0; // GE / LE
    double lo = 0.0;        // Outside
    double hi = 0.0;

    static OkCriterion at_least(MetricId metric, double threshold);
    static OkCriterion at_most(MetricId metric, double threshold);
    static OkCriterion outside(MetricId metric, double lo, double hi);

    bool passes(double value) const;
};

std::string_view to_string(OkCriterion::Comparator c);
OkCriterion::Comparator parse_comparator(std::string_view text);

/// Closed comparisons for GE/LE, strict for Outside. Throws InvalidInput when
/// the criterion's metric differs from the responses' metric.
std::array<bool, kRuns> evaluate_ok(const OkCriterion &criterion, MetricId response_metric,
                                    const RunVector &averages);

} // namespace scadoe::doe
