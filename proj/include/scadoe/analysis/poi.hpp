// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scadoe/trace/trace_set.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace scadoe {

struct PoiSelector {
    enum class Kind { SOST, SOSD, SNR, Correlation } kind = Kind::SNR;
    int n_poi = 1;
};

PoiSelector::Kind parse_poi_kind(std::string_view text);
std::string_view to_string(PoiSelector::Kind kind);

struct PoiSelection {
    std::vector<Eigen::Index> indices; // ascending
    Eigen::VectorXd scores;            // per-sample score
    bool low_score = false;            // best score is numerically zero
};

/// Class-discrimination score per sample.
Eigen::VectorXd poi_scores(const TraceSet &profiling, std::span<const int> labels,
                           PoiSelector::Kind kind);

/// The n_poi highest-scoring samples (ties to the lower index), returned sorted.
/// Throws DegenerateInput when fewer than two classes are present.
PoiSelection select_poi(const TraceSet &profiling, std::span<const int> labels,
                        const PoiSelector &selector);

} // namespace scadoe
