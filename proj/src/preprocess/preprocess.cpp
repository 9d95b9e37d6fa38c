// SPDX-License-Identifier: Apache-2.0

#include "scadoe/preprocess.hpp"

#include "scadoe/error.hpp"

#include <cmath>
#include <string>

namespace scadoe {

using Eigen::Index;

TraceSet standardize(const TraceSet &set, StandardizeMode mode) {
    const Eigen::RowVectorXd mean = set.samples().colwise().mean();
    Eigen::MatrixXd out = set.samples().rowwise() - mean;
    if (mode == StandardizeMode::ZScore && set.trace_count() > 1) {
        const Eigen::RowVectorXd sd =
            (out.array().square().colwise().sum() / static_cast<double>(set.trace_count() - 1))
                .sqrt();
        for (Index t = 0; t < out.cols(); ++t)
            if (sd(t) > 0.0)
                out.col(t) /= sd(t);
    }
    return set.derive(std::move(out), mode == StandardizeMode::ZScore ? "standardize(zscore)"
                                                                      : "standardize(mean)");
}

TraceSet lowpass_filter(const TraceSet &set, const FilterSpec &spec) {
    if (spec.strength < 1 || spec.strength > set.sample_count())
        fail(ErrorKind::InvalidInput,
             "lowpass_filter: strength must be in [1, sample_count], got " +
                 std::to_string(spec.strength));
    const Index n = set.sample_count();
    const Index w = spec.strength;
    const Index left = (w - 1) / 2;
    const Index right = w - 1 - left;

    if (w == 1)
        return set.derive(set.samples(), "lowpass(strength=1)");

    Eigen::MatrixXd out(set.trace_count(), n);
    for (Index t = 0; t < n; ++t) {
        const Index lo = std::max<Index>(0, t - left);
        const Index hi = std::min<Index>(n - 1, t + right);
        out.col(t) = set.samples().middleCols(lo, hi - lo + 1).rowwise().mean();
    }
    return set.derive(std::move(out), "lowpass(strength=" + std::to_string(w) + ")");
}

TraceSet windowed_resample(const TraceSet &set, int window) {
    if (window < 1 || window > set.sample_count())
        fail(ErrorKind::InvalidInput,
             "windowed_resample: window must be in [1, sample_count], got " +
                 std::to_string(window));
    const Index out_len = set.sample_count() / window;
    Eigen::MatrixXd out(set.trace_count(), out_len);
    for (Index k = 0; k < out_len; ++k)
        out.col(k) = set.samples().middleCols(k * window, window).rowwise().mean();
    return set.derive(std::move(out), "resample(window=" + std::to_string(window) + ")");
}

SampleWindow default_search_window(AlignRef::Anchor anchor, Index sample_count, int max_shift) {
    const Index quarter = std::max<Index>(1, sample_count / 4);
    if (anchor == AlignRef::Anchor::Start)
        return {max_shift, max_shift + quarter};
    return {sample_count - max_shift - quarter, sample_count - max_shift};
}

namespace {

// Pearson correlation of two equal-length segments; nullopt when either is constant.
template <typename A, typename B>
std::optional<double> segment_correlation(const Eigen::MatrixBase<A> &a,
                                          const Eigen::MatrixBase<B> &b) {
    const Eigen::RowVectorXd ac = a.array() - a.mean();
    const Eigen::RowVectorXd bc = b.array() - b.mean();
    const double na = ac.squaredNorm();
    const double nb = bc.squaredNorm();
    if (na <= 0.0 || nb <= 0.0)
        return std::nullopt;
    return ac.dot(bc) / std::sqrt(na * nb);
}

} // namespace

AlignResult align(const TraceSet &set, const AlignRef &ref, Index reference_trace_index,
                  int max_shift) {
    const Index n = set.sample_count();
    if (max_shift < 0)
        fail(ErrorKind::InvalidInput, "align: max_shift must be >= 0");
    if (reference_trace_index < 0 || reference_trace_index >= set.trace_count())
        fail(ErrorKind::InvalidInput, "align: reference trace index out of range");
    const SampleWindow win =
        ref.search_window.value_or(default_search_window(ref.anchor, n, max_shift));
    if (win.begin >= win.end || win.begin - max_shift < 0 || win.end + max_shift > n)
        fail(ErrorKind::InvalidInput, "align: search window +/- max_shift exceeds trace bounds");

    const Index len = win.end - win.begin;
    const auto reference = set.trace(reference_trace_index).segment(win.begin, len);

    Eigen::MatrixXd out(set.trace_count(), n);
    AlignReport report{std::vector<int>(static_cast<std::size_t>(set.trace_count()), 0),
                       std::vector<bool>(static_cast<std::size_t>(set.trace_count()), false)};

    for (Index i = 0; i < set.trace_count(); ++i) {
        const auto x = set.trace(i);
        int best_shift = 0;
        std::optional<double> best;
        bool any_defined = false;
        // candidate order 0, -1, +1, -2, +2, ... keeps the smallest shift on ties
        for (int k = 0; k <= 2 * max_shift; ++k) {
            const int s = (k % 2 == 0) ? k / 2 : -(k + 1) / 2;
            const auto r = segment_correlation(x.segment(win.begin + s, len), reference);
            if (!r)
                continue;
            any_defined = true;
            if (!best || *r > *best) {
                best = r;
                best_shift = s;
            }
        }
        if (!any_defined || !segment_correlation(reference, reference)) {
            best_shift = 0;
            report.degenerate[static_cast<std::size_t>(i)] = true;
        }
        report.shifts[static_cast<std::size_t>(i)] = best_shift;

        const double fill = x.mean();
        auto row = out.row(i);
        for (Index t = 0; t < n; ++t) {
            const Index src = t + best_shift;
            row(t) = (src >= 0 && src < n) ? x(src) : fill;
        }
    }

    const char *anchor = ref.anchor == AlignRef::Anchor::Start ? "start" : "end";
    auto aligned = set.derive(std::move(out), std::string("align(") + anchor + ",window=" +
                                                  std::to_string(win.begin) + ":" +
                                                  std::to_string(win.end) + ",max_shift=" +
                                                  std::to_string(max_shift) + ")");
    return {std::move(aligned), std::move(report)};
}

} // namespace scadoe
