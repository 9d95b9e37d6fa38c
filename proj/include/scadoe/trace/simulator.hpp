// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scadoe/trace/aes.hpp"
#include "scadoe/trace/semi_fixed.hpp"
#include "scadoe/trace/trace_set.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

namespace scadoe {

/// Synthetic device: one data-dependent impulse per trace on top of a DC
/// level, white Gaussian noise, a sinusoidal interferer and optional
/// data-independent activity.
struct SimConfig {
    int sample_count = 200;
    int leak_index = 100;
    double leak_gain = 1.0;
    double dc_offset = 0.0;
    double noise_sigma = 0.0;
    int jitter_max = 0;
    double hf_noise_amp = 0.0;
    double hf_noise_period = 16.0;
    // Data-independent program activity: a fixed pseudo-random waveform
    // (same for every trace and seed) that gives alignment a sharp feature.
    double activity_amp = 0.0;
    Block key{};
    IntermediateTarget target = IntermediateTarget::SubBytes;
    std::uint64_t rng_seed = 0;
    // Per-bit leakage weights (bit 0 = LSB). All ones is the Hamming-weight model.
    std::array<double, 8> bit_weights{1, 1, 1, 1, 1, 1, 1, 1};
    double sampling_rate = 1.0e6;
};

void validate(const SimConfig &config);

/// Uniformly random data of `data_len` bytes (1 = stored byte, 16 = plaintext).
struct RandomData {
    std::size_t data_len = 1;
};
/// The same data for every trace.
struct FixedData {
    std::vector<std::uint8_t> data;
};
/// 16-byte plaintexts from gen_semi_fixed_plaintexts.
struct SemiFixed {
    HwRange range;
};

using SimMode = std::variant<RandomData, FixedData, SemiFixed>;

/// Leakage value of one trace's data under the configured model: in 1-byte
/// mode the byte itself, in 16-byte mode the round-1 intermediate state.
double leakage_value(const SimConfig &config, std::span<const std::uint8_t> data);

TraceSet simulate_traces(const SimConfig &config, std::size_t n, const SimMode &mode);

} // namespace scadoe
