// SPDX-License-Identifier: Apache-2.0

#include "scadoe/analysis/poi.hpp"

#include "scadoe/analysis/cpa.hpp"
#include "scadoe/error.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <string>

namespace scadoe {

PoiSelector::Kind parse_poi_kind(std::string_view text) {
    if (text == "SOST" || text == "sost") return PoiSelector::Kind::SOST;
    if (text == "SOSD" || text == "sosd") return PoiSelector::Kind::SOSD;
    if (text == "SNR" || text == "snr") return PoiSelector::Kind::SNR;
    if (text == "CORRELATION" || text == "correlation") return PoiSelector::Kind::Correlation;
    fail(ErrorKind::InvalidInput, "unknown POI selector '" + std::string(text) + "'");
}

std::string_view to_string(PoiSelector::Kind kind) {
    switch (kind) {
    case PoiSelector::Kind::SOST: return "SOST";
    case PoiSelector::Kind::SOSD: return "SOSD";
    case PoiSelector::Kind::SNR: return "SNR";
    case PoiSelector::Kind::Correlation: return "CORRELATION";
    }
    return "SNR";
}

namespace {

struct ClassMoments {
    Eigen::MatrixXd mean; // classes x samples
    Eigen::MatrixXd var;  // Bessel-corrected, 0 for singleton classes
    Eigen::VectorXd count;
};

ClassMoments class_moments(const TraceSet &set, std::span<const int> labels) {
    std::map<int, Eigen::Index> slot;
    for (int l : labels)
        slot.emplace(l, 0);
    Eigen::Index k = 0;
    for (auto &[label, s] : slot)
        s = k++;
    const auto m = set.sample_count();
    ClassMoments cm{Eigen::MatrixXd::Zero(k, m), Eigen::MatrixXd::Zero(k, m),
                    Eigen::VectorXd::Zero(k)};
    for (Eigen::Index i = 0; i < set.trace_count(); ++i) {
        const auto c = slot[labels[static_cast<std::size_t>(i)]];
        cm.mean.row(c) += set.trace(i);
        cm.count(c) += 1.0;
    }
    for (Eigen::Index c = 0; c < k; ++c)
        cm.mean.row(c) /= cm.count(c);
    for (Eigen::Index i = 0; i < set.trace_count(); ++i) {
        const auto c = slot[labels[static_cast<std::size_t>(i)]];
        cm.var.row(c) += (set.trace(i) - cm.mean.row(c)).array().square().matrix();
    }
    for (Eigen::Index c = 0; c < k; ++c)
        cm.var.row(c) = cm.count(c) > 1.0 ? Eigen::RowVectorXd(cm.var.row(c) / (cm.count(c) - 1.0))
                                          : Eigen::RowVectorXd::Zero(m);
    return cm;
}

double safe_ratio(double num, double den) {
    if (den > 0.0)
        return num / den;
    return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

} // namespace

Eigen::VectorXd poi_scores(const TraceSet &set, std::span<const int> labels,
                           PoiSelector::Kind kind) {
    if (static_cast<Eigen::Index>(labels.size()) != set.trace_count())
        fail(ErrorKind::LengthMismatch, "poi: one label per trace required");
    const auto cm = class_moments(set, labels);
    const auto k = cm.mean.rows();
    if (k < 2)
        fail(ErrorKind::DegenerateInput, "poi: at least two classes are required");
    const auto m = set.sample_count();
    Eigen::VectorXd score = Eigen::VectorXd::Zero(m);

    switch (kind) {
    case PoiSelector::Kind::SOSD:
    case PoiSelector::Kind::SOST:
        for (Eigen::Index t = 0; t < m; ++t) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < k; ++i)
                for (Eigen::Index j = i + 1; j < k; ++j) {
                    const double d = cm.mean(i, t) - cm.mean(j, t);
                    if (kind == PoiSelector::Kind::SOSD)
                        s += d * d;
                    else
                        s += safe_ratio(d * d, cm.var(i, t) / cm.count(i) +
                                                   cm.var(j, t) / cm.count(j));
                }
            score(t) = s;
        }
        break;
    case PoiSelector::Kind::SNR:
        for (Eigen::Index t = 0; t < m; ++t) {
            const auto means = cm.mean.col(t);
            const double mu = means.mean();
            const double signal = (means.array() - mu).square().mean();
            const double noise = cm.var.col(t).mean();
            score(t) = safe_ratio(signal, noise);
        }
        break;
    case PoiSelector::Kind::Correlation: {
        Eigen::VectorXd y(set.trace_count());
        for (Eigen::Index i = 0; i < y.size(); ++i)
            y(i) = labels[static_cast<std::size_t>(i)];
        score = pearson_columns(set.samples(), y).cwiseAbs();
        break;
    }
    }
    return score;
}

PoiSelection select_poi(const TraceSet &set, std::span<const int> labels,
                        const PoiSelector &selector) {
    if (selector.n_poi < 1 || selector.n_poi > set.sample_count())
        fail(ErrorKind::InvalidInput, "select_poi: n_poi must be in [1, sample_count]");
    PoiSelection out;
    out.scores = poi_scores(set, labels, selector.kind);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(set.sample_count()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        return out.scores(x) > out.scores(y);
    });
    out.indices.assign(order.begin(), order.begin() + selector.n_poi);
    std::sort(out.indices.begin(), out.indices.end());
    out.low_score = !(out.scores(order.front()) > 1e-12);
    return out;
}

} // namespace scadoe
