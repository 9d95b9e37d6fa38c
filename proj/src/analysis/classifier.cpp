// SPDX-License-Identifier: Apache-2.0

#include "scadoe/analysis/classifier.hpp"

#include "scadoe/analysis/stats.hpp"
#include "scadoe/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace scadoe {

namespace {

// log(1 + exp(z)) without overflow
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
    if (z >= 0.0)
        return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void check_labels(const TraceSet &set, std::span<const int> labels) {
    if (static_cast<Eigen::Index>(labels.size()) != set.trace_count())
        fail(ErrorKind::LengthMismatch, "classifier: one label per trace required");
    bool zero = false, one = false;
    for (int l : labels) {
        if (l != 0 && l != 1)
            fail(ErrorKind::InvalidInput, "classifier: labels must be 0 or 1");
        zero |= l == 0;
        one |= l == 1;
    }
    if (!zero || !one)
        fail(ErrorKind::DegenerateInput, "classifier: both classes must be present");
}

} // namespace

Eigen::VectorXd ClassifierModel::logits(const Eigen::MatrixXd &samples) const {
    if (samples.cols() != weights.size())
        fail(ErrorKind::LengthMismatch, "classifier: sample count differs from training");
    const Eigen::MatrixXd x =
        (samples.rowwise() - offset).array().rowwise() / scale.array();
    return (x * weights).array() + bias;
}

std::vector<int> ClassifierModel::predict(const Eigen::MatrixXd &samples) const {
    const auto z = logits(samples);
    std::vector<int> out(static_cast<std::size_t>(z.size()));
    for (Eigen::Index i = 0; i < z.size(); ++i)
        out[static_cast<std::size_t>(i)] = z(i) > 0.0 ? 1 : 0;
    return out;
}

LossGradient logistic_loss_gradient(const Eigen::VectorXd &w, double b, const Eigen::MatrixXd &x,
                                    const Eigen::VectorXd &y, double l2) {
    const double n = static_cast<double>(x.rows());
    const Eigen::VectorXd z = (x * w).array() + b;
    LossGradient g;
    Eigen::VectorXd residual(z.size());
    double loss = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        // -[y log s(z) + (1-y) log(1-s(z))] = softplus(z) - y z
        loss += softplus(z(i)) - y(i) * z(i);
        residual(i) = sigmoid(z(i)) - y(i);
    }
    g.loss = loss / n + 0.5 * l2 * w.squaredNorm();
    g.grad_weights = x.transpose() * residual / n + l2 * w;
    g.grad_bias = residual.sum() / n;
    return g;
}

ClassifierModel train_classifier(const TraceSet &train, std::span<const int> labels,
                                 const ClassifierConfig &config) {
    check_labels(train, labels);
    if (config.epochs < 1 || config.batch_size < 1 || !(config.learning_rate > 0.0))
        fail(ErrorKind::InvalidInput, "classifier: epochs, batch size and learning rate must be positive");

    const auto n = train.trace_count();
    const auto m = train.sample_count();
    ClassifierModel model;
    model.offset = Eigen::RowVectorXd::Zero(m);
    model.scale = Eigen::RowVectorXd::Ones(m);
    if (config.standardize) {
        model.offset = train.samples().colwise().mean();
        const Eigen::RowVectorXd sd =
            ((train.samples().rowwise() - model.offset).array().square().colwise().sum() /
             static_cast<double>(std::max<Eigen::Index>(n - 1, 1)))
                .sqrt();
        model.scale = (sd.array() > 0.0).select(sd, 1.0);
    }
    const Eigen::MatrixXd x =
        (train.samples().rowwise() - model.offset).array().rowwise() / model.scale.array();
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i)
        y(i) = labels[static_cast<std::size_t>(i)];

    model.weights = Eigen::VectorXd::Zero(m);
    model.bias = 0.0;
    std::mt19937_64 rng(config.seed);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    const Eigen::Index batch = std::min<Eigen::Index>(config.batch_size, n);
    Eigen::MatrixXd xb(batch, m);
    Eigen::VectorXd yb(batch);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (Eigen::Index start = 0; start < n; start += batch) {
            const Eigen::Index len = std::min(batch, n - start);
            for (Eigen::Index k = 0; k < len; ++k) {
                const auto i = order[static_cast<std::size_t>(start + k)];
                xb.row(k) = x.row(i);
                yb(k) = y(i);
            }
            const auto g = logistic_loss_gradient(model.weights, model.bias, xb.topRows(len),
                                                  yb.head(len), config.l2);
            model.weights -= config.learning_rate * g.grad_weights;
            model.bias -= config.learning_rate * g.grad_bias;
        }
    }
    return model;
}

double accuracy(const ClassifierModel &model, const TraceSet &set, std::span<const int> labels) {
    check_labels(set, labels);
    const auto pred = model.predict(set.samples());
    std::int64_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        correct += pred[i] == labels[i];
    return static_cast<double>(correct) / static_cast<double>(pred.size());
}

AnalysisResult binomial_la_test(const ClassifierModel &model, const TraceSet &validation,
                                std::span<const int> labels) {
    check_labels(validation, labels);
    const auto pred = model.predict(validation.samples());
    std::int64_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        correct += pred[i] == labels[i];
    const auto total = static_cast<std::int64_t>(pred.size());
    AnalysisResult r;
    r.metric = MetricId::ClassifierNegLogP;
    r.summary = stats::binomial_tail_neglog10p(correct, total);
    r.extras["correct"] = static_cast<double>(correct);
    r.extras["total"] = static_cast<double>(total);
    r.extras["accuracy"] = static_cast<double>(correct) / static_cast<double>(total);
    return r;
}

} // namespace scadoe
