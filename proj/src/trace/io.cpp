// SPDX-License-Identifier: Apache-2.0

#include "scadoe/trace/io.hpp"

#include "scadoe/error.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace scadoe {

namespace fs = std::filesystem;
using nlohmann::json;

TraceFiles trace_files(const fs::path &base) {
    return {fs::path(base.string() + ".manifest.json"), fs::path(base.string() + ".traces.bin")};
}

namespace {

void put_f32_le(std::ostream &out, float v) {
    auto bits = std::bit_cast<std::uint32_t>(v);
    char bytes[4];
    for (int i = 0; i < 4; ++i)
        bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
    out.write(bytes, 4);
}

float get_f32_le(const unsigned char *p) {
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i)
        bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return std::bit_cast<float>(bits);
}

} // namespace

void store_traceset(const TraceSet &set, const fs::path &base) {
    const auto files = trace_files(base);
    if (files.manifest.has_parent_path())
        fs::create_directories(files.manifest.parent_path());

    json manifest = {
        {"format_version", kTraceFormatVersion},
        {"sample_count", set.sample_count()},
        {"trace_count", set.trace_count()},
        {"data_len", set.data_len()},
        {"sampling_rate", set.sampling_rate()},
        {"set_label", std::string(to_string(set.set_label()))},
        {"rng_seed", set.rng_seed()},
        {"history", set.history()},
    };
    std::ofstream mout(files.manifest, std::ios::binary | std::ios::trunc);
    if (!mout)
        fail(ErrorKind::Io, "cannot write " + files.manifest.string());
    mout << manifest.dump(2) << '\n';

    std::ofstream bout(files.payload, std::ios::binary | std::ios::trunc);
    if (!bout)
        fail(ErrorKind::Io, "cannot write " + files.payload.string());
    for (Eigen::Index i = 0; i < set.trace_count(); ++i) {
        const auto &data = set.meta(i).data;
        bout.write(reinterpret_cast<const char *>(data.data()),
                   static_cast<std::streamsize>(data.size()));
        for (Eigen::Index t = 0; t < set.sample_count(); ++t)
            put_f32_le(bout, static_cast<float>(set.samples()(i, t)));
    }
    if (!bout.flush())
        fail(ErrorKind::Io, "write failed: " + files.payload.string());
}

TraceSet load_traceset(const fs::path &base) {
    const auto files = trace_files(base);
    std::ifstream min(files.manifest, std::ios::binary);
    if (!min)
        fail(ErrorKind::Io, "cannot open " + files.manifest.string());

    json manifest;
    std::int64_t sample_count = 0, trace_count = 0, data_len = 0;
    double sampling_rate = 0.0;
    SetLabel label = SetLabel::Random;
    std::uint64_t seed = 0;
    std::vector<std::string> history;
    try {
        manifest = json::parse(min);
        if (manifest.at("format_version").get<int>() != kTraceFormatVersion)
            fail(ErrorKind::MalformedFile, "unsupported format_version in " + files.manifest.string());
        sample_count = manifest.at("sample_count").get<std::int64_t>();
        trace_count = manifest.at("trace_count").get<std::int64_t>();
        data_len = manifest.at("data_len").get<std::int64_t>();
        sampling_rate = manifest.at("sampling_rate").get<double>();
        label = parse_set_label(manifest.at("set_label").get<std::string>());
        seed = manifest.at("rng_seed").get<std::uint64_t>();
        if (manifest.contains("history"))
            history = manifest.at("history").get<std::vector<std::string>>();
    } catch (const json::exception &e) {
        fail(ErrorKind::MalformedFile, files.manifest.string() + ": " + e.what());
    } catch (const Error &e) {
        if (e.kind() == ErrorKind::MalformedFile)
            throw;
        fail(ErrorKind::MalformedFile, files.manifest.string() + ": " + e.what());
    }
    if (sample_count <= 0 || trace_count <= 0 || (data_len != 1 && data_len != 16))
        fail(ErrorKind::MalformedFile, files.manifest.string() + ": invalid geometry");

    std::ifstream bin(files.payload, std::ios::binary);
    if (!bin)
        fail(ErrorKind::Io, "cannot open " + files.payload.string());
    std::vector<unsigned char> payload((std::istreambuf_iterator<char>(bin)),
                                       std::istreambuf_iterator<char>());

    const auto record = static_cast<std::size_t>(data_len + 4 * sample_count);
    const auto expected = record * static_cast<std::size_t>(trace_count);
    if (payload.size() != expected) {
        // Equal-sized records that disagree with the manifest are a geometry
        // mismatch; anything ragged is a damaged file.
        if (payload.size() % static_cast<std::size_t>(trace_count) == 0)
            fail(ErrorKind::LengthMismatch,
                 files.payload.string() + ": payload size " + std::to_string(payload.size()) +
                     " disagrees with manifest (" + std::to_string(expected) + " bytes)");
        fail(ErrorKind::MalformedFile, files.payload.string() + ": truncated payload");
    }

    Eigen::MatrixXd samples(trace_count, sample_count);
    std::vector<TraceMeta> meta(static_cast<std::size_t>(trace_count));
    const unsigned char *p = payload.data();
    for (std::int64_t i = 0; i < trace_count; ++i) {
        meta[static_cast<std::size_t>(i)] =
            TraceMeta{std::vector<std::uint8_t>(p, p + data_len), label, seed};
        p += data_len;
        for (std::int64_t t = 0; t < sample_count; ++t, p += 4)
            samples(i, t) = get_f32_le(p);
    }
    return TraceSet(std::move(samples), std::move(meta), sampling_rate, std::move(history));
}

void export_csv(const TraceSet &set, const fs::path &path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        fail(ErrorKind::Io, "cannot write " + path.string());
    out << "set_label,seed";
    for (std::size_t b = 0; b < set.data_len(); ++b)
        out << ",d" << b;
    for (Eigen::Index t = 0; t < set.sample_count(); ++t)
        out << ",s" << t;
    out << '\n';
    out << std::setprecision(9);
    for (Eigen::Index i = 0; i < set.trace_count(); ++i) {
        const auto &m = set.meta(i);
        out << to_string(m.set_label) << ',' << m.seed;
        for (auto b : m.data)
            out << ',' << static_cast<int>(b);
        for (Eigen::Index t = 0; t < set.sample_count(); ++t)
            out << ',' << set.samples()(i, t);
        out << '\n';
    }
    if (!out.flush())
        fail(ErrorKind::Io, "write failed: " + path.string());
}

} // namespace scadoe
