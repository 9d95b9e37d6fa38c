// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scadoe/analysis/result.hpp"
#include "scadoe/doe/ledger.hpp"
#include "scadoe/preprocess.hpp"
#include "scadoe/trace/simulator.hpp"

#include <optional>
#include <string>

// Binds plan parameters to trace acquisition, preprocessing and analysis.
//
// Parameter vocabulary (all optional unless the analysis needs it):
//   sim.sample_count sim.leak_index sim.leak_gain sim.dc_offset sim.noise_sigma
//   sim.jitter_max sim.hf_noise_amp sim.hf_noise_period sim.key (32 hex digits)
//   sim.activity_amp sim.target (addroundkey|subbytes) sim.bit_weights ("w0,...,w7")
//   traces                         trace count (per set for two-set analyses)
//   align (none|start|end) align.max_shift align.reference
//   lowpass (strength, <= 1 or false disables)
//   resample (window, <= 1 or false disables)
//   standardize (false|true|mean|zscore)
//   cpa.model (hw|identity) cpa.byte
//   tvla.set (fixed|semifixed) tvla.hw_range ("lo-hi") tvla.test (t|chi2) chi2.bins
//   profiling_traces attack_traces attack.value poi.count poi.selector
//   template.class_mode (value256|hw9) template.byte
//   train_traces validation_traces clf.epochs clf.learning_rate clf.batch_size
//   clf.l2 clf.standardize
namespace scadoe::doe {

/// Typed reads from a parameter map with defaults.
struct Params {
    const ParamMap &map;

    bool has(const std::string &key) const { return map.contains(key); }
    std::int64_t integer(const std::string &key, std::int64_t fallback) const;
    double real(const std::string &key, double fallback) const;
    std::string text(const std::string &key, const std::string &fallback) const;
    bool flag(const std::string &key, bool fallback) const;
};

SimConfig sim_config(const Params &p, std::uint64_t seed);

/// Applies the plan's preprocessing steps, in order, as configured by `p`.
/// Unknown step names throw InvalidInput.
TraceSet apply_steps(const TraceSet &set, const std::vector<std::string> &steps, const Params &p);

/// Preprocesses several sets jointly (shared alignment reference and
/// standardization moments), then splits them back apart.
std::vector<TraceSet> apply_steps_joint(const std::vector<TraceSet> &sets,
                                        const std::vector<std::string> &steps, const Params &p);

/// Outcome of one pipeline run before it is reduced to a response.
struct PipelineRun {
    AnalysisResult result;
    std::vector<std::string> history;
};

/// Trace sets an analysis takes, by role: "" for cpa, fixed/random for the
/// leakage tests, profiling/attack for templates, and train_fixed,
/// train_random, validation_fixed, validation_random for the classifier.
std::vector<std::string> set_roles(const std::string &analysis);

/// Preprocesses `sets` (ordered as set_roles) jointly and runs `analysis`,
/// reducing to `metric`. `seed` drives stochastic analyses.
PipelineRun analyze_sets(const std::string &analysis, MetricId metric,
                         const std::vector<std::string> &steps, const ParamMap &params,
                         const std::vector<TraceSet> &sets, std::uint64_t seed);

/// Acquires traces from the simulator seeded with `seed`, then processes and analyzes them.
PipelineRun run_simulated(const Plan &plan, const ParamMap &params, std::uint64_t seed);

/// Loads traces from files named by the plan's source pattern. `{exp}`,
/// `{round}` and `{set}` are substituted; `{set}` is the role of the set
/// for multi-set analyses (see set_roles).
PipelineRun run_files(const Plan &plan, const ParamMap &params, int experiment, int round);

/// Executor for run_plan matching the plan's source.
Executor make_executor(const Plan &plan);

} // namespace scadoe::doe
