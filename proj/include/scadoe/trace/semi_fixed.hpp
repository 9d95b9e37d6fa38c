// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scadoe/trace/aes.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace scadoe {

/// Inclusive bounds on the Hamming weight of the whole 128-bit state.
struct HwRange {
    int lo = 0;
    int hi = 128;

    bool operator==(const HwRange &) const = default;
};

/// Throws InvalidInput unless 0 <= lo <= hi <= 128.
void validate(const HwRange &range);

/// Plaintexts whose first-round `target` state has a Hamming weight inside
/// `range`. Each vector draws a weight uniformly in the range, scatters that
/// many one-bits over the state and inverts the round function, so every
/// output satisfies the range exactly.
std::vector<Block> gen_semi_fixed_plaintexts(const Block &key, IntermediateTarget target,
                                             const HwRange &range, std::size_t n,
                                             std::uint64_t rng_seed);

} // namespace scadoe
