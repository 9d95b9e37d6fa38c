// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scadoe/analysis/result.hpp"
#include "scadoe/trace/trace_set.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace scadoe {

enum class ClassMode { Value256, HW9 };

ClassMode parse_class_mode(std::string_view text);

/// Gaussian templates with one covariance pooled over all classes.
struct TemplateModel {
    ClassMode class_mode = ClassMode::Value256;
    int class_count = 256;
    std::vector<Eigen::Index> poi;
    Eigen::MatrixXd means;      // class_count x |poi|
    Eigen::MatrixXd pooled_cov; // |poi| x |poi|, regularized
    double epsilon = 0.0;
    Eigen::LLT<Eigen::MatrixXd> chol;

    int class_of(std::uint8_t value) const;
};

/// Regularization used when the caller passes no epsilon: 1e-6 of the mean
/// diagonal, floored at 1e-12 so zero-noise data stays invertible.
double default_template_epsilon(const Eigen::MatrixXd &cov);

/// Per-class means and pooled covariance at `poi`. `values` holds the
/// processed byte of each profiling trace. Throws MissingClass when a class
/// has fewer than two traces and NumericalError when the regularized
/// covariance is not positive definite.
TemplateModel build_templates(const TraceSet &profiling, std::span<const std::uint8_t> values,
                              std::vector<Eigen::Index> poi, ClassMode mode,
                              std::optional<double> epsilon = std::nullopt);

/// Summed Gaussian log-likelihood of the attack traces for each of the 256
/// candidate values (constant terms dropped).
Eigen::VectorXd template_scores(const TemplateModel &model, const TraceSet &attack);

/// Rank of `true_value` among the 256 candidates: 1 + number of candidates
/// with a strictly greater score.
AnalysisResult template_attack_rank(const TemplateModel &model, const TraceSet &attack,
                                    std::uint8_t true_value);

} // namespace scadoe
