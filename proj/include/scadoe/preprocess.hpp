// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scadoe/trace/trace_set.hpp"

#include <optional>
#include <vector>

namespace scadoe {

enum class StandardizeMode { MeanOnly, ZScore };

/// Per sample index, remove the across-trace mean (and divide by the
/// across-trace deviation in ZScore mode; zero-deviation indices are only
/// centered).
TraceSet standardize(const TraceSet &set, StandardizeMode mode = StandardizeMode::MeanOnly);

struct FilterSpec {
    int strength = 1; // moving-average window in samples
};

/// Centered moving average; the window shrinks at the edges. strength 1 is
/// the identity. Throws InvalidInput if strength is < 1 or > sample_count.
TraceSet lowpass_filter(const TraceSet &set, const FilterSpec &spec);

/// Non-overlapping window means; the trailing remainder is dropped.
TraceSet windowed_resample(const TraceSet &set, int window);

struct SampleWindow {
    Eigen::Index begin = 0;
    Eigen::Index end = 0; // exclusive
};

/// Which part of the trace anchors the alignment search.
struct AlignRef {
    enum class Anchor { Start, End } anchor = Anchor::End;
    std::optional<SampleWindow> search_window; // default: first/last quartile
};

struct AlignReport {
    std::vector<int> shifts;      // applied offset per trace
    std::vector<bool> degenerate; // constant segment, fell back to shift 0
};

struct AlignResult {
    TraceSet set;
    AlignReport report;
};

/// Default window for an anchor: the first or last quarter of the trace,
/// inset by max_shift so every candidate shift stays in bounds.
SampleWindow default_search_window(AlignRef::Anchor anchor, Eigen::Index sample_count,
                                   int max_shift);

/// Integer-shift alignment: each trace is moved by the offset in
/// [-max_shift, max_shift] that maximizes the normalized cross-correlation
/// between its window segment and the reference trace's segment. Samples
/// shifted in from outside are filled with the trace's own mean.
AlignResult align(const TraceSet &set, const AlignRef &ref, Eigen::Index reference_trace_index,
                  int max_shift);

} // namespace scadoe
