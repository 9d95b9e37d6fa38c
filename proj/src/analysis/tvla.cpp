// SPDX-License-Identifier: Apache-2.0

#include "scadoe/analysis/tvla.hpp"

#include "scadoe/analysis/stats.hpp"
#include "scadoe/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace scadoe {

namespace {

void check_pair(const TraceSet &a, const TraceSet &b) {
    if (a.sample_count() != b.sample_count())
        fail(ErrorKind::LengthMismatch, "leakage test: sets differ in sample_count (" +
                                            std::to_string(a.sample_count()) + " vs " +
                                            std::to_string(b.sample_count()) + ")");
    if (a.trace_count() < 2 || b.trace_count() < 2)
        fail(ErrorKind::InvalidInput, "leakage test: each set needs at least 2 traces");
}

struct Moments {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd var; // Bessel-corrected
    double n;
};

Moments moments(const TraceSet &s) {
    Moments m;
    m.n = static_cast<double>(s.trace_count());
    m.mean = s.samples().colwise().mean();
    m.var = (s.samples().rowwise() - m.mean).array().square().colwise().sum() / (m.n - 1.0);
    return m;
}

} // namespace

AnalysisResult welch_t(const TraceSet &a, const TraceSet &b) {
    check_pair(a, b);
    const auto ma = moments(a);
    const auto mb = moments(b);
    AnalysisResult r;
    r.metric = MetricId::TPeak;
    Eigen::VectorXd curve(a.sample_count());
    for (Eigen::Index t = 0; t < curve.size(); ++t) {
        const double se2 = ma.var(t) / ma.n + mb.var(t) / mb.n;
        if (se2 > 0.0) {
            curve(t) = (ma.mean(t) - mb.mean(t)) / std::sqrt(se2);
        } else {
            curve(t) = 0.0;
            r.flagged.push_back(t);
        }
    }
    const auto p = peak_abs(curve);
    r.summary = p.value;
    r.peak_index = p.index;
    r.curve = std::move(curve);
    return r;
}

AnalysisResult welch_t_neglog10p(const TraceSet &a, const TraceSet &b) {
    check_pair(a, b);
    const auto ma = moments(a);
    const auto mb = moments(b);
    AnalysisResult r;
    r.metric = MetricId::TNegLogP;
    Eigen::VectorXd curve(a.sample_count());
    for (Eigen::Index t = 0; t < curve.size(); ++t) {
        const double se2 = ma.var(t) / ma.n + mb.var(t) / mb.n;
        if (se2 > 0.0) {
            const double tv = (ma.mean(t) - mb.mean(t)) / std::sqrt(se2);
            const double df = stats::welch_df(ma.var(t), ma.n, mb.var(t), mb.n);
            curve(t) = stats::t_to_neglog10p(tv, df);
        } else {
            curve(t) = 0.0;
            r.flagged.push_back(t);
        }
    }
    const auto p = peak(curve);
    r.summary = p.value;
    r.peak_index = p.index;
    r.curve = std::move(curve);
    return r;
}

Chi2Cell chi2_contingency(const Eigen::Ref<const Eigen::VectorXd> &a,
                          const Eigen::Ref<const Eigen::VectorXd> &b, int bins) {
    const auto na = a.size();
    const auto nb = b.size();
    const auto total = na + nb;
    std::vector<double> pooled(static_cast<std::size_t>(total));
    std::copy(a.begin(), a.end(), pooled.begin());
    std::copy(b.begin(), b.end(), pooled.begin() + na);
    std::sort(pooled.begin(), pooled.end());

    // edge k (1..bins-1) at the k/bins pooled quantile; bin = #edges <= value
    std::vector<double> edges;
    for (int k = 1; k < bins; ++k)
        edges.push_back(pooled[static_cast<std::size_t>(k * total / bins)]);
    auto bin_of = [&](double v) {
        return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) -
                                        edges.begin());
    };
    std::vector<double> ca(static_cast<std::size_t>(bins), 0.0), cb(ca);
    for (auto v : a)
        ca[bin_of(v)] += 1.0;
    for (auto v : b)
        cb[bin_of(v)] += 1.0;

    // Merge adjacent columns left to right until every expected count >= 5;
    // a short tail joins the last closed column.
    const double fa = static_cast<double>(na) / static_cast<double>(total);
    const double fb = static_cast<double>(nb) / static_cast<double>(total);
    std::vector<std::pair<double, double>> cols;
    double acc_a = 0.0, acc_b = 0.0;
    for (std::size_t k = 0; k < ca.size(); ++k) {
        acc_a += ca[k];
        acc_b += cb[k];
        const double col = acc_a + acc_b;
        if (col * std::min(fa, fb) >= 5.0) {
            cols.emplace_back(acc_a, acc_b);
            acc_a = acc_b = 0.0;
        }
    }
    if (acc_a + acc_b > 0.0) {
        if (cols.empty())
            cols.emplace_back(acc_a, acc_b);
        else {
            cols.back().first += acc_a;
            cols.back().second += acc_b;
        }
    }
    if (cols.size() < 2)
        return {0.0, 0};

    double stat = 0.0;
    for (const auto &[oa, ob] : cols) {
        const double col = oa + ob;
        const double ea = col * fa;
        const double eb = col * fb;
        stat += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
    }
    return {stat, static_cast<int>(cols.size()) - 1};
}

AnalysisResult chi2_test(const TraceSet &a, const TraceSet &b, int bins) {
    check_pair(a, b);
    if (bins < 2)
        fail(ErrorKind::InvalidInput, "chi2_test: bins must be >= 2");
    AnalysisResult r;
    r.metric = MetricId::Chi2NegLogP;
    Eigen::VectorXd curve(a.sample_count());
    for (Eigen::Index t = 0; t < curve.size(); ++t) {
        const auto cell = chi2_contingency(a.samples().col(t), b.samples().col(t), bins);
        if (cell.df == 0) {
            curve(t) = 0.0;
            r.flagged.push_back(t);
        } else {
            curve(t) = stats::chi2_neglog10p(cell.statistic, cell.df);
        }
    }
    const auto p = peak(curve);
    r.summary = p.value;
    r.peak_index = p.index;
    r.curve = std::move(curve);
    return r;
}

} // namespace scadoe
