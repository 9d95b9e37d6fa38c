// SPDX-License-Identifier: Apache-2.0

#include "scadoe/analysis/cpa.hpp"

#include "scadoe/analysis/stats.hpp"
#include "scadoe/error.hpp"
#include "scadoe/trace/aes.hpp"

namespace scadoe {

AnalysisResult cpa(const TraceSet &set, LeakModel model, std::size_t byte_index) {
    Eigen::VectorXd predictor = set.data_byte(byte_index);
    if (model == LeakModel::HammingWeight)
        predictor = predictor.unaryExpr(
            [](double v) { return static_cast<double>(hamming_weight(static_cast<std::uint8_t>(v))); });
    if ((predictor.array() == predictor(0)).all())
        fail(ErrorKind::DegenerateInput, "cpa: predictor has zero variance (all data equal)");

    AnalysisResult r;
    r.metric = MetricId::CorrPeak;
    r.curve = pearson_columns(set.samples(), predictor);
    for (Eigen::Index t = 0; t < set.sample_count(); ++t)
        if ((set.samples().col(t).array() == set.samples()(0, t)).all())
            r.flagged.push_back(t);
    const auto p = peak_abs(*r.curve);
    r.summary = p.value;
    r.peak_index = p.index;
    return r;
}

ConfidenceThreshold fisher_ci_threshold(std::int64_t n, double r_obs, double confidence) {
    if (n < 4)
        fail(ErrorKind::InvalidInput, "fisher_ci_threshold: n must be >= 4");
    if (!(std::abs(r_obs) < 1.0))
        fail(ErrorKind::InvalidInput, "fisher_ci_threshold: |r_obs| must be < 1");
    if (!(confidence >= 0.0 && confidence < 1.0))
        fail(ErrorKind::InvalidInput, "fisher_ci_threshold: confidence must be in [0, 1)");
    const double z = confidence > 0.0 ? stats::normal_quantile((1.0 + confidence) / 2.0) : 0.0;
    const double hi =
        std::tanh(std::atanh(std::abs(r_obs)) + z / std::sqrt(static_cast<double>(n) - 3.0));
    return {n, r_obs, confidence, -hi, hi};
}

} // namespace scadoe
