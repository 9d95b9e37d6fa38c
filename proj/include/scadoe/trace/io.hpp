// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scadoe/trace/trace_set.hpp"

#include <filesystem>

namespace scadoe {

/// `<base>.manifest.json` next to `<base>.traces.bin`.
struct TraceFiles {
    std::filesystem::path manifest;
    std::filesystem::path payload;
};

TraceFiles trace_files(const std::filesystem::path &base);

inline constexpr int kTraceFormatVersion = 1;

/// Writes both files. Samples are narrowed to binary32.
void store_traceset(const TraceSet &set, const std::filesystem::path &base);

/// Throws Io, MalformedFile or LengthMismatch.
TraceSet load_traceset(const std::filesystem::path &base);

/// One trace per row: label, seed, data bytes, then samples.
void export_csv(const TraceSet &set, const std::filesystem::path &path);

} // namespace scadoe
