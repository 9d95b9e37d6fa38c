// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scadoe/analysis/result.hpp"
#include "scadoe/doe/design.hpp"
#include "scadoe/error.hpp"

#include <array>
#include <optional>
#include <span>

namespace scadoe::doe {

using RunVector = Eigen::Matrix<double, kRuns, 1>;
using Responses = Eigen::Matrix<double, kRuns, Eigen::Dynamic>;

enum class Direction { Maximize, Minimize };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);

/// Responses of the 8 runs (rows, standard order) over R rounds (columns).
struct ResponseTable {
    Responses responses;
    Direction direction = Direction::Maximize;
    MetricId metric = MetricId::CorrPeak;
};

struct RoundStats {
    RunVector average;
    std::array<std::optional<double>, kRuns> std_dev; // absent with a single round
};

/// Mean and Bessel-corrected standard deviation of every run.
RoundStats aggregate_rounds(const Responses &responses);

inline RoundStats aggregate_rounds(const ResponseTable &table) {
    return aggregate_rounds(table.responses);
}

struct EffectsReport {
    double mean = 0.0;
    std::array<double, 7> effects{};      // indexed by Term
    std::array<double, 7> coefficients{}; // effect / 2
    std::optional<RoundStats> round_stats;

    double effect(Term t) const { return effects[static_cast<std::size_t>(index(t))]; }
    double coefficient(Term t) const { return coefficients[static_cast<std::size_t>(index(t))]; }
};

/// effect(K) = mean response where column K is + minus mean where it is -,
/// i.e. (sum+ - sum-) / 4; coefficient = effect / 2.
template <typename Derived>
EffectsReport compute_effects(const Eigen::MatrixBase<Derived> &averages) {
    if (averages.size() != kRuns)
        fail(ErrorKind::InvalidInput, "compute_effects: exactly 8 run averages required");
    const RunVector y = averages.template cast<double>();
    if (!y.allFinite())
        fail(ErrorKind::InvalidInput, "compute_effects: non-finite run average");
    const Eigen::Matrix<double, 7, 1> contrast = design_matrix().transpose() * y;
    EffectsReport r;
    r.mean = y.mean();
    for (int k = 0; k < 7; ++k) {
        r.effects[static_cast<std::size_t>(k)] = contrast(k) / 4.0;
        r.coefficients[static_cast<std::size_t>(k)] = contrast(k) / 8.0;
    }
    return r;
}

EffectsReport compute_effects(std::span<const double> averages);

/// Averages the rounds, then computes effects; keeps the round statistics.
EffectsReport compute_effects(const ResponseTable &table);

/// Response table from CSV text: eight rows in standard order, one column
/// per round. A first line whose leading field is not a number is a header;
/// a header starting with "exp" marks a leading experiment-number column.
Responses parse_responses_csv(std::string_view text);

/// mean + sum of coefficient * term sign over A..BC, plus ABC when requested.
/// With ABC the prediction interpolates the run averages exactly.
double predict(const EffectsReport &report, const Signs &signs, bool include_abc);

} // namespace scadoe::doe
