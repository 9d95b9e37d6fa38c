// SPDX-License-Identifier: Apache-2.0

#include "scadoe/doe/effects.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace scadoe::doe {

std::string_view to_string(Direction d) {
    return d == Direction::Maximize ? "maximize" : "minimize";
}

Direction parse_direction(std::string_view text) {
    if (text == "maximize") return Direction::Maximize;
    if (text == "minimize") return Direction::Minimize;
    fail(ErrorKind::InvalidInput, "direction must be 'maximize' or 'minimize'");
}

RoundStats aggregate_rounds(const Responses &responses) {
    const auto rounds = responses.cols();
    if (rounds < 1)
        fail(ErrorKind::InvalidInput, "aggregate_rounds: at least one round required");
    if (!responses.allFinite())
        fail(ErrorKind::InvalidInput, "aggregate_rounds: non-finite response");
    RoundStats s;
    s.average = responses.rowwise().mean();
    for (int r = 0; r < kRuns; ++r) {
        if (rounds < 2)
            continue;
        const double ss = (responses.row(r).array() - s.average(r)).square().sum();
        s.std_dev[static_cast<std::size_t>(r)] = std::sqrt(ss / static_cast<double>(rounds - 1));
    }
    return s;
}

EffectsReport compute_effects(std::span<const double> averages) {
    if (averages.size() != static_cast<std::size_t>(kRuns))
        fail(ErrorKind::InvalidInput, "compute_effects: exactly 8 run averages required, got " +
                                          std::to_string(averages.size()));
    return compute_effects(Eigen::Map<const RunVector>(averages.data()));
}

EffectsReport compute_effects(const ResponseTable &table) {
    auto stats = aggregate_rounds(table);
    auto report = compute_effects(stats.average);
    report.round_stats = std::move(stats);
    return report;
}

Responses parse_responses_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<std::vector<double>> rows;
    bool first = true, skip_first_column = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        for (std::string f; std::getline(ls, f, ',');)
            fields.push_back(f);
        std::vector<double> values;
        bool numeric = true;
        for (const auto &f : fields) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(f, &used));
                if (f.find_first_not_of(" \t", used) != std::string::npos)
                    numeric = false;
            } catch (const std::exception &) {
                numeric = false;
            }
        }
        if (first && !numeric) {
            const auto head = fields.empty() ? std::string() : fields.front();
            skip_first_column = head.find("exp") != std::string::npos;
            first = false;
            continue;
        }
        first = false;
        if (!numeric)
            fail(ErrorKind::MalformedFile, "responses csv line " + std::to_string(line_no) +
                                               ": not a list of numbers");
        if (skip_first_column)
            values.erase(values.begin());
        rows.push_back(std::move(values));
    }
    if (rows.size() != static_cast<std::size_t>(kRuns))
        fail(ErrorKind::MalformedFile, "responses csv: expected 8 rows, got " +
                                           std::to_string(rows.size()));
    const auto rounds = rows.front().size();
    if (rounds == 0)
        fail(ErrorKind::MalformedFile, "responses csv: no rounds");
    Responses m(kRuns, static_cast<Eigen::Index>(rounds));
    for (int r = 0; r < kRuns; ++r) {
        const auto &row = rows[static_cast<std::size_t>(r)];
        if (row.size() != rounds)
            fail(ErrorKind::MalformedFile, "responses csv: rows have different round counts");
        for (std::size_t k = 0; k < rounds; ++k) {
            if (!std::isfinite(row[k]))
                fail(ErrorKind::MalformedFile, "responses csv: non-finite response");
            m(r, static_cast<Eigen::Index>(k)) = row[k];
        }
    }
    return m;
}

double predict(const EffectsReport &report, const Signs &signs, bool include_abc) {
    for (int v : {signs.a, signs.b, signs.c})
        if (v != -1 && v != 1)
            fail(ErrorKind::InvalidInput, "predict: signs must be -1 or +1");
    double y = report.mean;
    for (auto t : kTerms) {
        if (t == Term::ABC && !include_abc)
            continue;
        y += report.coefficient(t) * term_sign(t, signs);
    }
    return y;
}

} // namespace scadoe::doe
