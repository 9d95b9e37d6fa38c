// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scadoe/analysis/result.hpp"
#include "scadoe/trace/trace_set.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>

namespace scadoe {

/// Logistic-regression distinguisher used for classifier-based leakage
/// assessment. Stands in for a neural network; the surrounding binomial test
/// is the same.
struct ClassifierConfig {
    int epochs = 30;
    double learning_rate = 0.05;
    int batch_size = 64;
    double l2 = 0.0;
    bool standardize = false; // z-score inputs with training-set moments
    std::uint64_t seed = 0;
};

struct ClassifierModel {
    Eigen::VectorXd weights;
    double bias = 0.0;
    Eigen::RowVectorXd offset; // subtracted from inputs
    Eigen::RowVectorXd scale;  // inputs divided by this

    Eigen::VectorXd logits(const Eigen::MatrixXd &samples) const;
    std::vector<int> predict(const Eigen::MatrixXd &samples) const;
};

struct LossGradient {
    double loss = 0.0; // mean binary cross-entropy (+ l2/2 |w|^2)
    Eigen::VectorXd grad_weights;
    double grad_bias = 0.0;
};

LossGradient logistic_loss_gradient(const Eigen::VectorXd &weights, double bias,
                                    const Eigen::MatrixXd &x, const Eigen::VectorXd &y,
                                    double l2 = 0.0);

/// Mini-batch gradient descent; deterministic given config.seed.
/// Labels are 0/1; throws DegenerateInput if only one class is present.
ClassifierModel train_classifier(const TraceSet &train, std::span<const int> labels,
                                 const ClassifierConfig &config = {});

double accuracy(const ClassifierModel &model, const TraceSet &set, std::span<const int> labels);

/// One-sided exact binomial test of the validation accuracy against chance:
/// summary = -log10 P(Binomial(M, 1/2) >= k).
AnalysisResult binomial_la_test(const ClassifierModel &model, const TraceSet &validation,
                                std::span<const int> labels);

} // namespace scadoe
