// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace scadoe {

enum class SetLabel { Fixed, Random, SemiFixed };

std::string_view to_string(SetLabel label);
SetLabel parse_set_label(std::string_view text);

struct TraceMeta {
    std::vector<std::uint8_t> data; // 1 byte (stored value) or 16 bytes (plaintext)
    SetLabel set_label = SetLabel::Random;
    std::uint64_t seed = 0;

    bool operator==(const TraceMeta &) const = default;
};

/// Rectangular set of traces, one row per trace. Immutable once built;
/// transforms return new sets with an extra processing-history entry.
class TraceSet {
  public:
    using Index = Eigen::Index;

    TraceSet(Eigen::MatrixXd samples, std::vector<TraceMeta> meta,
             double sampling_rate = 0.0,
             std::vector<std::string> history = {});

    Index trace_count() const noexcept { return samples_.rows(); }
    Index sample_count() const noexcept { return samples_.cols(); }
    std::size_t data_len() const noexcept { return meta_.front().data.size(); }
    double sampling_rate() const noexcept { return sampling_rate_; }

    const Eigen::MatrixXd &samples() const noexcept { return samples_; }
    auto trace(Index i) const { return samples_.row(i); }

    const TraceMeta &meta(Index i) const { return meta_[static_cast<std::size_t>(i)]; }
    const std::vector<TraceMeta> &metadata() const noexcept { return meta_; }

    SetLabel set_label() const noexcept { return meta_.front().set_label; }
    std::uint64_t rng_seed() const noexcept { return meta_.front().seed; }

    const std::vector<std::string> &history() const noexcept { return history_; }

    /// Same metadata, new samples (trace count must match), one more history step.
    TraceSet derive(Eigen::MatrixXd samples, std::string step) const;

    /// Byte `byte_index` of every trace's data, as a column of doubles.
    Eigen::VectorXd data_byte(std::size_t byte_index) const;

    /// Leading `n` traces.
    TraceSet head(Index n) const;
    /// Traces [begin, begin + n).
    TraceSet slice(Index begin, Index n) const;

  private:
    Eigen::MatrixXd samples_;
    std::vector<TraceMeta> meta_;
    double sampling_rate_;
    std::vector<std::string> history_;
};

/// Stacks two sets with the same sample count (metadata kept per trace).
TraceSet concatenate(const TraceSet &first, const TraceSet &second);

} // namespace scadoe
