// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scadoe/doe/pareto.hpp"
#include "scadoe/doe/plan.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace scadoe::doe {

/// One executed (or replayed) 2^3 experiment set.
struct Iteration {
    int number = 0;
    Plan plan;
    bool aborted = false;
    std::string error;
    // responses[run][round]; empty optionals mark runs that never completed
    std::array<std::vector<std::optional<double>>, kRuns> responses;
    std::array<std::vector<std::string>, kRuns> pipeline_history; // round 1 of each run
    std::optional<EffectsReport> effects;
    std::optional<ParetoReport> pareto;
    std::optional<std::array<bool, kRuns>> verdicts;
    std::string note;

    /// Complete 8 x R table; throws InvalidInput for aborted iterations.
    Responses response_matrix() const;
};

/// Append-only record of a campaign.
class Ledger {
  public:
    static constexpr int kSchemaVersion = 1;

    const std::vector<Iteration> &iterations() const noexcept { return iterations_; }
    bool empty() const noexcept { return iterations_.empty(); }

    /// Numbers the iteration (1-based) and appends it.
    const Iteration &append(Iteration iteration);

    nlohmann::json to_json() const;
    static Ledger from_json(const nlohmann::json &j);

    void save(const std::filesystem::path &path) const;
    /// Missing file gives an empty ledger.
    static Ledger load(const std::filesystem::path &path);

  private:
    std::vector<Iteration> iterations_;
};

nlohmann::json to_json(const Iteration &it);
Iteration iteration_from_json(const nlohmann::json &j);

struct RunRequest {
    int experiment = 1; // 1..8, standard order
    int round = 1;      // 1..R
    Signs signs;
    ParamMap params;
    std::uint64_t seed = 0;
};

struct RunOutcome {
    double response = 0.0;
    std::vector<std::string> history; // processing steps actually applied
};

using Executor = std::function<RunOutcome(const RunRequest &)>;

/// Seed of one executor call. With common random numbers every run of a
/// round shares the seed.
std::uint64_t run_seed(const Plan &plan, int experiment, int round);

struct RunOptions {
    int jobs = 1;
};

/// Computes statistics, effects, Pareto and verdicts for a complete response
/// table and builds the iteration record (not yet appended).
Iteration make_iteration(const Plan &plan, const Responses &responses);

/// Executes all 8 x R runs (standard order preserved in the record), analyzes
/// them and appends the iteration. An executor exception aborts the iteration
/// but its completed responses are kept.
const Iteration &run_plan(const Plan &plan, const Executor &executor, Ledger &ledger,
                          const RunOptions &options = {});

enum class Level { Low, High };

struct Decisions {
    std::map<Term, Level> fix;                                    // absorb into the fixed table
    std::map<Term, std::pair<SettingValue, SettingValue>> adjust; // new low/high
    std::vector<Factor> new_factors;                              // fill the freed slots
    std::string rationale;
};

/// Plan for the next iteration, derived from the last one in the ledger.
Plan next_iteration(const Ledger &ledger, const Decisions &decisions);

} // namespace scadoe::doe
