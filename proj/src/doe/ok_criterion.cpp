// SPDX-License-Identifier: Apache-2.0

#include "scadoe/doe/ok_criterion.hpp"

#include <string>

namespace scadoe::doe {

OkCriterion OkCriterion::at_least(MetricId metric, double threshold) {
    return {metric, Comparator::GE, threshold, 0.0, 0.0};
}

OkCriterion OkCriterion::at_most(MetricId metric, double threshold) {
    return {metric, Comparator::LE, threshold, 0.0, 0.0};
}

OkCriterion OkCriterion::outside(MetricId metric, double lo, double hi) {
    if (!(lo < hi))
        fail(ErrorKind::InvalidInput, "OkCriterion: Outside requires lo < hi");
    return {metric, Comparator::Outside, 0.0, lo, hi};
}

bool OkCriterion::passes(double value) const {
    switch (comparator) {
    case Comparator::GE: return value >= threshold;
    case Comparator::LE: return value <= threshold;
    case Comparator::Outside: return value < lo || value > hi;
    }
    return false;
}

std::string_view to_string(OkCriterion::Comparator c) {
    switch (c) {
    case OkCriterion::Comparator::GE: return "ge";
    case OkCriterion::Comparator::LE: return "le";
    case OkCriterion::Comparator::Outside: return "outside";
    }
    return "ge";
}

OkCriterion::Comparator parse_comparator(std::string_view text) {
    if (text == "ge") return OkCriterion::Comparator::GE;
    if (text == "le") return OkCriterion::Comparator::LE;
    if (text == "outside") return OkCriterion::Comparator::Outside;
    fail(ErrorKind::InvalidInput, "comparator must be 'ge', 'le' or 'outside'");
}

std::array<bool, kRuns> evaluate_ok(const OkCriterion &criterion, MetricId response_metric,
                                    const RunVector &averages) {
    if (criterion.metric != response_metric)
        fail(ErrorKind::InvalidInput, "evaluate_ok: criterion metric " +
                                          std::string(to_string(criterion.metric)) +
                                          " does not match responses (" +
                                          std::string(to_string(response_metric)) + ")");
    if (criterion.comparator == OkCriterion::Comparator::Outside && !(criterion.lo < criterion.hi))
        fail(ErrorKind::InvalidInput, "evaluate_ok: Outside requires lo < hi");
    std::array<bool, kRuns> verdicts{};
    for (int r = 0; r < kRuns; ++r)
        verdicts[static_cast<std::size_t>(r)] = criterion.passes(averages(r));
    return verdicts;
}

} // namespace scadoe::doe
