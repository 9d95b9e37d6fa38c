// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scadoe/analysis/result.hpp"
#include "scadoe/trace/trace_set.hpp"

namespace scadoe {

/// Per-sample Welch t statistic (A - B); summary = max |t|. Samples where both
/// variances vanish get t = 0 and are flagged.
AnalysisResult welch_t(const TraceSet &a, const TraceSet &b);

/// Same test reported as -log10 p with Welch-Satterthwaite df per sample.
AnalysisResult welch_t_neglog10p(const TraceSet &a, const TraceSet &b);

inline constexpr int kDefaultChi2Bins = 8;

/// Per-sample Pearson chi-square test on a 2 x bins contingency table.
/// Bin edges are equiprobable quantiles of the pooled values; adjacent bins
/// with an expected count below 5 are merged. curve = -log10 p.
AnalysisResult chi2_test(const TraceSet &a, const TraceSet &b, int bins = kDefaultChi2Bins);

/// Statistic and df of one sample's test, exposed for inspection.
struct Chi2Cell {
    double statistic = 0.0;
    int df = 0;
};
Chi2Cell chi2_contingency(const Eigen::Ref<const Eigen::VectorXd> &a,
                          const Eigen::Ref<const Eigen::VectorXd> &b, int bins);

} // namespace scadoe
