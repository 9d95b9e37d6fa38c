// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scadoe/analysis/result.hpp"
#include "scadoe/trace/trace_set.hpp"

#include <Eigen/Core>

#include <cmath>

namespace scadoe {

/// Pearson correlation of `predictor` with every column of `samples`.
/// Columns with zero variance give 0.
template <typename DerivedX, typename DerivedY>
Eigen::VectorXd pearson_columns(const Eigen::MatrixBase<DerivedX> &samples,
                                const Eigen::MatrixBase<DerivedY> &predictor) {
    using Scalar = typename DerivedX::Scalar;
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y =
        predictor.array() - predictor.mean();
    const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> mean = samples.colwise().mean();
    Eigen::VectorXd r(samples.cols());
    const Scalar ynorm = y.norm();
    for (Eigen::Index t = 0; t < samples.cols(); ++t) {
        const auto xc = samples.col(t).array() - mean(t);
        const Scalar xnorm = std::sqrt(xc.square().sum());
        r(t) = (xnorm > 0 && ynorm > 0) ? static_cast<double>((xc * y.array()).sum() / (xnorm * ynorm))
                                        : 0.0;
    }
    return r;
}

enum class LeakModel { HammingWeight, Identity };

/// Correlation power analysis against byte `byte_index` of the trace data.
/// Throws DegenerateInput when the predictor has zero variance.
AnalysisResult cpa(const TraceSet &set, LeakModel model = LeakModel::HammingWeight,
                   std::size_t byte_index = 0);

/// Symmetric two-sided acceptance band for a sample correlation.
struct ConfidenceThreshold {
    std::int64_t n = 0;
    double r_obs = 0.0;
    double confidence = 0.0;
    double lo = 0.0;
    double hi = 0.0;

    bool significant(double r) const { return r < lo || r > hi; }
};

/// Fisher z-transform bound: hi = tanh(atanh(r_obs) + z_{(1+c)/2} / sqrt(n-3)), lo = -hi.
ConfidenceThreshold fisher_ci_threshold(std::int64_t n, double r_obs, double confidence);

} // namespace scadoe
