// SPDX-License-Identifier: Apache-2.0

#include "scadoe/analysis/templates.hpp"

#include "scadoe/error.hpp"
#include "scadoe/trace/aes.hpp"

#include <algorithm>
#include <string>

namespace scadoe {

ClassMode parse_class_mode(std::string_view text) {
    if (text == "Value256" || text == "value256") return ClassMode::Value256;
    if (text == "HW9" || text == "hw9") return ClassMode::HW9;
    fail(ErrorKind::InvalidInput, "unknown class mode '" + std::string(text) + "'");
}

int TemplateModel::class_of(std::uint8_t value) const {
    return class_mode == ClassMode::Value256 ? value : hamming_weight(value);
}

double default_template_epsilon(const Eigen::MatrixXd &cov) {
    return std::max(1e-6 * cov.diagonal().mean(), 1e-12);
}

TemplateModel build_templates(const TraceSet &set, std::span<const std::uint8_t> values,
                              std::vector<Eigen::Index> poi, ClassMode mode,
                              std::optional<double> epsilon) {
    if (static_cast<Eigen::Index>(values.size()) != set.trace_count())
        fail(ErrorKind::LengthMismatch, "build_templates: one value per trace required");
    if (poi.empty())
        fail(ErrorKind::InvalidInput, "build_templates: empty POI set");
    std::sort(poi.begin(), poi.end());
    for (auto p : poi)
        if (p < 0 || p >= set.sample_count())
            fail(ErrorKind::InvalidInput, "build_templates: POI out of range");

    TemplateModel model;
    model.class_mode = mode;
    model.class_count = mode == ClassMode::Value256 ? 256 : 9;
    model.poi = std::move(poi);
    const auto d = static_cast<Eigen::Index>(model.poi.size());

    Eigen::MatrixXd x(set.trace_count(), d);
    for (Eigen::Index j = 0; j < d; ++j)
        x.col(j) = set.samples().col(model.poi[static_cast<std::size_t>(j)]);

    std::vector<int> cls(values.size());
    Eigen::VectorXd count = Eigen::VectorXd::Zero(model.class_count);
    model.means = Eigen::MatrixXd::Zero(model.class_count, d);
    for (std::size_t i = 0; i < values.size(); ++i) {
        cls[i] = model.class_of(values[i]);
        model.means.row(cls[i]) += x.row(static_cast<Eigen::Index>(i));
        count(cls[i]) += 1.0;
    }
    std::string missing;
    for (int c = 0; c < model.class_count; ++c)
        if (count(c) < 2.0)
            missing += (missing.empty() ? "" : ",") + std::to_string(c);
    if (!missing.empty())
        fail(ErrorKind::MissingClass,
             "build_templates: classes with fewer than two traces: " + missing);
    model.means.array().colwise() /= count.array();

    Eigen::MatrixXd centered = x;
    for (std::size_t i = 0; i < values.size(); ++i)
        centered.row(static_cast<Eigen::Index>(i)) -= model.means.row(cls[i]);
    model.pooled_cov = (centered.transpose() * centered) /
                       static_cast<double>(set.trace_count() - model.class_count);

    model.epsilon = epsilon.value_or(default_template_epsilon(model.pooled_cov));
    model.pooled_cov.diagonal().array() += model.epsilon;
    model.chol.compute(model.pooled_cov);
    if (model.chol.info() != Eigen::Success)
        fail(ErrorKind::NumericalError,
             "build_templates: pooled covariance is not positive definite (epsilon " +
                 std::to_string(model.epsilon) + ")");
    return model;
}

Eigen::VectorXd template_scores(const TemplateModel &model, const TraceSet &attack) {
    const auto d = static_cast<Eigen::Index>(model.poi.size());
    Eigen::MatrixXd x(attack.trace_count(), d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const auto p = model.poi[static_cast<std::size_t>(j)];
        if (p >= attack.sample_count())
            fail(ErrorKind::InvalidInput, "template attack: POI beyond attack trace length");
        x.col(j) = attack.samples().col(p);
    }
    // Whitened coordinates: sum_t |L^-1 (x_t - mu)|^2
    //   = sum_t |w_t|^2 - 2 m . sum_t w_t + n |m|^2
    const auto &lower = model.chol.matrixL();
    const Eigen::MatrixXd w = lower.solve(x.transpose());           // d x n
    const Eigen::MatrixXd wm = lower.solve(model.means.transpose()); // d x classes
    const double n = static_cast<double>(attack.trace_count());
    const double wsq = w.squaredNorm();
    const Eigen::VectorXd wsum = w.rowwise().sum();

    Eigen::VectorXd class_score(model.class_count);
    for (int c = 0; c < model.class_count; ++c)
        class_score(c) = -0.5 * (wsq - 2.0 * wm.col(c).dot(wsum) + n * wm.col(c).squaredNorm());

    Eigen::VectorXd scores(256);
    for (int v = 0; v < 256; ++v)
        scores(v) = class_score(model.class_of(static_cast<std::uint8_t>(v)));
    if (!scores.allFinite())
        fail(ErrorKind::NumericalError, "template attack: non-finite likelihood");
    return scores;
}

AnalysisResult template_attack_rank(const TemplateModel &model, const TraceSet &attack,
                                    std::uint8_t true_value) {
    const auto scores = template_scores(model, attack);
    const double truth = scores(true_value);
    const auto better = (scores.array() > truth).count();
    AnalysisResult r;
    r.metric = MetricId::TemplateRank;
    r.summary = static_cast<double>(1 + better);
    r.extras["true_value"] = true_value;
    Eigen::Index best = 0;
    scores.maxCoeff(&best);
    r.extras["best_candidate"] = static_cast<double>(best);
    return r;
}

} // namespace scadoe
