// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace scadoe {

using Block = std::array<std::uint8_t, 16>;

/// Which first-round AES-128 state is the leakage target.
enum class IntermediateTarget { AddRoundKey, SubBytes };

extern const std::array<std::uint8_t, 256> kSbox;
extern const std::array<std::uint8_t, 256> kInvSbox;

/// Count of set bits across all bytes.
int hamming_weight(std::span<const std::uint8_t> bytes) noexcept;

inline int hamming_weight(std::uint8_t byte) noexcept {
    return hamming_weight(std::span<const std::uint8_t>(&byte, 1));
}

/// First-round state after AddRoundKey (p ^ k) or after SubBytes (S(p ^ k)).
/// Throws InvalidInput unless both inputs are 16 bytes long.
Block round1_intermediate(std::span<const std::uint8_t> plaintext,
                          std::span<const std::uint8_t> key,
                          IntermediateTarget target);

} // namespace scadoe
