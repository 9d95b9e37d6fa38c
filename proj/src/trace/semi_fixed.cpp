// SPDX-License-Identifier: Apache-2.0

#include "scadoe/trace/semi_fixed.hpp"

#include "scadoe/error.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

namespace scadoe {

void validate(const HwRange &range) {
    if (range.lo < 0 || range.hi > 128 || range.lo > range.hi)
        fail(ErrorKind::InvalidInput, "invalid Hamming-weight range [" + std::to_string(range.lo) +
                                          ", " + std::to_string(range.hi) + "]");
}

std::vector<Block> gen_semi_fixed_plaintexts(const Block &key, IntermediateTarget target,
                                             const HwRange &range, std::size_t n,
                                             std::uint64_t rng_seed) {
    validate(range);
    std::mt19937_64 rng(rng_seed);
    std::uniform_int_distribution<int> weight(range.lo, range.hi);
    std::array<int, 128> positions{};
    std::iota(positions.begin(), positions.end(), 0);

    std::vector<Block> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int h = weight(rng);
        std::shuffle(positions.begin(), positions.end(), rng);
        Block state{};
        for (int k = 0; k < h; ++k) {
            const int bit = positions[static_cast<std::size_t>(k)];
            state[static_cast<std::size_t>(bit / 8)] |= static_cast<std::uint8_t>(1u << (bit % 8));
        }
        Block plaintext{};
        for (std::size_t b = 0; b < 16; ++b) {
            const std::uint8_t pre =
                target == IntermediateTarget::SubBytes ? kInvSbox[state[b]] : state[b];
            plaintext[b] = static_cast<std::uint8_t>(pre ^ key[b]);
        }
        out.push_back(plaintext);
    }
    return out;
}

} // namespace scadoe
