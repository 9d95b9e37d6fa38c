// SPDX-License-Identifier: Apache-2.0

#include "scadoe/trace/trace_set.hpp"

#include "scadoe/error.hpp"

#include <string>

namespace scadoe {

std::string_view to_string(SetLabel label) {
    switch (label) {
    case SetLabel::Fixed: return "Fixed";
    case SetLabel::Random: return "Random";
    case SetLabel::SemiFixed: return "SemiFixed";
    }
    return "Random";
}

SetLabel parse_set_label(std::string_view text) {
    if (text == "Fixed") return SetLabel::Fixed;
    if (text == "Random") return SetLabel::Random;
    if (text == "SemiFixed") return SetLabel::SemiFixed;
    fail(ErrorKind::InvalidInput, "unknown set label '" + std::string(text) + "'");
}

TraceSet::TraceSet(Eigen::MatrixXd samples, std::vector<TraceMeta> meta, double sampling_rate,
                   std::vector<std::string> history)
    : samples_(std::move(samples)), meta_(std::move(meta)), sampling_rate_(sampling_rate),
      history_(std::move(history)) {
    if (samples_.rows() == 0 || samples_.cols() == 0)
        fail(ErrorKind::InvalidInput, "TraceSet: empty set");
    if (static_cast<Index>(meta_.size()) != samples_.rows())
        fail(ErrorKind::LengthMismatch, "TraceSet: metadata count differs from trace count");
    const auto len = meta_.front().data.size();
    if (len != 1 && len != 16)
        fail(ErrorKind::InvalidInput, "TraceSet: data length must be 1 or 16");
    for (const auto &m : meta_)
        if (m.data.size() != len)
            fail(ErrorKind::LengthMismatch, "TraceSet: data length differs between traces");
    if (!samples_.allFinite())
        fail(ErrorKind::InvalidInput, "TraceSet: non-finite sample");
}

TraceSet TraceSet::derive(Eigen::MatrixXd samples, std::string step) const {
    if (samples.rows() != trace_count())
        fail(ErrorKind::LengthMismatch, "TraceSet::derive: trace count changed");
    auto history = history_;
    history.push_back(std::move(step));
    return TraceSet(std::move(samples), meta_, sampling_rate_, std::move(history));
}

Eigen::VectorXd TraceSet::data_byte(std::size_t byte_index) const {
    if (byte_index >= data_len())
        fail(ErrorKind::InvalidInput, "data_byte: byte index out of range");
    Eigen::VectorXd out(trace_count());
    for (Index i = 0; i < trace_count(); ++i)
        out(i) = meta_[static_cast<std::size_t>(i)].data[byte_index];
    return out;
}

TraceSet TraceSet::head(Index n) const { return slice(0, n); }

TraceSet TraceSet::slice(Index begin, Index n) const {
    if (begin < 0 || n <= 0 || begin + n > trace_count())
        fail(ErrorKind::InvalidInput, "TraceSet: trace range out of bounds");
    return TraceSet(samples_.middleRows(begin, n),
                    std::vector<TraceMeta>(meta_.begin() + begin, meta_.begin() + begin + n),
                    sampling_rate_, history_);
}

TraceSet concatenate(const TraceSet &first, const TraceSet &second) {
    if (first.sample_count() != second.sample_count())
        fail(ErrorKind::LengthMismatch, "concatenate: sample counts differ");
    Eigen::MatrixXd samples(first.trace_count() + second.trace_count(), first.sample_count());
    samples << first.samples(), second.samples();
    auto meta = first.metadata();
    meta.insert(meta.end(), second.metadata().begin(), second.metadata().end());
    return TraceSet(std::move(samples), std::move(meta), first.sampling_rate(), first.history());
}

} // namespace scadoe
