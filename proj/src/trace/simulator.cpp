// SPDX-License-Identifier: Apache-2.0

#include "scadoe/trace/simulator.hpp"

#include "scadoe/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace scadoe {

void validate(const SimConfig &c) {
    if (c.sample_count <= 0)
        fail(ErrorKind::InvalidInput, "sim: sample_count must be positive");
    if (c.jitter_max < 0 || c.leak_index < 0 || c.leak_index + c.jitter_max >= c.sample_count)
        fail(ErrorKind::InvalidInput, "sim: need 0 <= leak_index + jitter_max < sample_count");
    if (!(c.noise_sigma >= 0.0) || !(c.hf_noise_amp >= 0.0) || !(c.activity_amp >= 0.0))
        fail(ErrorKind::InvalidInput, "sim: noise amplitudes must be >= 0");
    if (!(c.hf_noise_period > 0.0))
        fail(ErrorKind::InvalidInput, "sim: hf_noise_period must be positive");
    if (!std::isfinite(c.leak_gain) || !std::isfinite(c.dc_offset))
        fail(ErrorKind::InvalidInput, "sim: gain and offset must be finite");
}

namespace {

double weighted_bits(const SimConfig &c, std::span<const std::uint8_t> bytes) {
    double v = 0.0;
    for (auto byte : bytes)
        for (int b = 0; b < 8; ++b)
            if ((byte >> b) & 1u)
                v += c.bit_weights[static_cast<std::size_t>(b)];
    return v;
}

std::vector<std::vector<std::uint8_t>> make_data(const SimConfig &c, std::size_t n,
                                                 const SimMode &mode, std::mt19937_64 &rng,
                                                 SetLabel &label) {
    std::vector<std::vector<std::uint8_t>> data(n);
    if (const auto *r = std::get_if<RandomData>(&mode)) {
        if (r->data_len != 1 && r->data_len != 16)
            fail(ErrorKind::InvalidInput, "sim: random data length must be 1 or 16");
        label = SetLabel::Random;
        std::uniform_int_distribution<int> byte(0, 255);
        for (auto &d : data) {
            d.resize(r->data_len);
            for (auto &b : d)
                b = static_cast<std::uint8_t>(byte(rng));
        }
    } else if (const auto *f = std::get_if<FixedData>(&mode)) {
        if (f->data.size() != 1 && f->data.size() != 16)
            fail(ErrorKind::InvalidInput, "sim: fixed data length must be 1 or 16");
        label = SetLabel::Fixed;
        for (auto &d : data)
            d = f->data;
    } else {
        const auto &s = std::get<SemiFixed>(mode);
        label = SetLabel::SemiFixed;
        const auto plaintexts =
            gen_semi_fixed_plaintexts(c.key, c.target, s.range, n, rng());
        for (std::size_t i = 0; i < n; ++i)
            data[i].assign(plaintexts[i].begin(), plaintexts[i].end());
    }
    return data;
}

} // namespace

double leakage_value(const SimConfig &c, std::span<const std::uint8_t> data) {
    if (data.size() == 1)
        return weighted_bits(c, data);
    const Block state = round1_intermediate(data, c.key, c.target);
    return weighted_bits(c, state);
}

TraceSet simulate_traces(const SimConfig &c, std::size_t n, const SimMode &mode) {
    validate(c);
    if (n == 0)
        fail(ErrorKind::InvalidInput, "sim: trace count must be positive");

    std::mt19937_64 rng(c.rng_seed);
    SetLabel label = SetLabel::Random;
    auto data = make_data(c, n, mode, rng, label);

    const int m = c.sample_count;
    Eigen::VectorXd clean(m);
    for (int t = 0; t < m; ++t)
        clean(t) = c.dc_offset +
                   c.hf_noise_amp * std::sin(2.0 * std::numbers::pi * t / c.hf_noise_period);
    if (c.activity_amp > 0.0) {
        std::mt19937_64 activity_rng(0x5cad0e5eedULL);
        std::normal_distribution<double> unit(0.0, 1.0);
        for (int t = 0; t < m; ++t)
            clean(t) += c.activity_amp * unit(activity_rng);
    }

    std::uniform_int_distribution<int> jitter(0, c.jitter_max);
    std::normal_distribution<double> noise(0.0, 1.0);

    Eigen::MatrixXd samples(static_cast<Eigen::Index>(n), m);
    std::vector<TraceMeta> meta(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double leak = c.leak_gain * leakage_value(c, data[i]);
        const int shift = c.jitter_max > 0 ? jitter(rng) : 0;
        auto row = samples.row(static_cast<Eigen::Index>(i));
        for (int t = 0; t < m; ++t) {
            double v = c.dc_offset;
            if (t >= shift) {
                v = clean(t - shift);
                if (t - shift == c.leak_index)
                    v += leak;
            }
            if (c.noise_sigma > 0.0)
                v += c.noise_sigma * noise(rng);
            // binary32 is the on-disk precision
            row(t) = static_cast<double>(static_cast<float>(v));
        }
        meta[i] = TraceMeta{std::move(data[i]), label, c.rng_seed};
    }
    return TraceSet(std::move(samples), std::move(meta), c.sampling_rate);
}

} // namespace scadoe
