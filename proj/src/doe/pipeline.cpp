// SPDX-License-Identifier: Apache-2.0

#include "scadoe/doe/pipeline.hpp"

#include "scadoe/analysis/classifier.hpp"
#include "scadoe/analysis/cpa.hpp"
#include "scadoe/analysis/poi.hpp"
#include "scadoe/analysis/templates.hpp"
#include "scadoe/analysis/tvla.hpp"
#include "scadoe/trace/io.hpp"

#include <charconv>
#include <sstream>

namespace scadoe::doe {

namespace {

[[noreturn]] void bad_param(const std::string &key, const std::string &why) {
    fail(ErrorKind::InvalidInput, "parameter '" + key + "': " + why);
}

std::vector<std::uint8_t> parse_hex(const std::string &key, const std::string &text) {
    if (text.size() % 2 != 0)
        bad_param(key, "hex string of odd length");
    std::vector<std::uint8_t> out(text.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        unsigned v = 0;
        const char *first = text.data() + 2 * i;
        auto [ptr, ec] = std::from_chars(first, first + 2, v, 16);
        if (ec != std::errc{} || ptr != first + 2)
            bad_param(key, "not a hex string");
        out[i] = static_cast<std::uint8_t>(v);
    }
    return out;
}

Block parse_block(const std::string &key, const std::string &text) {
    const auto bytes = parse_hex(key, text);
    if (bytes.size() != 16)
        bad_param(key, "expected 32 hex digits");
    Block b{};
    std::copy(bytes.begin(), bytes.end(), b.begin());
    return b;
}

HwRange parse_hw_range(const std::string &key, const std::string &text) {
    HwRange r;
    const auto dash = text.find('-');
    if (dash == std::string::npos)
        bad_param(key, "expected lo-hi");
    try {
        r.lo = std::stoi(text.substr(0, dash));
        r.hi = std::stoi(text.substr(dash + 1));
    } catch (const std::exception &) {
        bad_param(key, "expected lo-hi");
    }
    validate(r);
    return r;
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Label 1 for the positive (fixed or semi-fixed) set, 0 for the random one.
std::vector<int> binary_labels(const TraceSet &positive, const TraceSet &negative) {
    std::vector<int> labels(static_cast<std::size_t>(positive.trace_count()), 1);
    labels.resize(labels.size() + static_cast<std::size_t>(negative.trace_count()), 0);
    return labels;
}

TraceSet stack(const std::vector<TraceSet> &sets) {
    TraceSet out = sets.front();
    for (std::size_t i = 1; i < sets.size(); ++i)
        out = concatenate(out, sets[i]);
    return out;
}

Eigen::Index count_param(const Params &p, const std::string &key, std::int64_t fallback) {
    const auto n = p.integer(key, fallback);
    if (n <= 0)
        bad_param(key, "must be positive");
    return static_cast<Eigen::Index>(n);
}

} // namespace

std::int64_t Params::integer(const std::string &key, std::int64_t fallback) const {
    auto it = map.find(key);
    if (it == map.end())
        return fallback;
    if (const auto *i = std::get_if<std::int64_t>(&it->second))
        return *i;
    if (const auto *d = std::get_if<double>(&it->second); d && *d == std::floor(*d))
        return static_cast<std::int64_t>(*d);
    bad_param(key, "expected an integer, got " + describe(it->second));
}

double Params::real(const std::string &key, double fallback) const {
    auto it = map.find(key);
    if (it == map.end())
        return fallback;
    if (const auto *d = std::get_if<double>(&it->second))
        return *d;
    if (const auto *i = std::get_if<std::int64_t>(&it->second))
        return static_cast<double>(*i);
    bad_param(key, "expected a number, got " + describe(it->second));
}

std::string Params::text(const std::string &key, const std::string &fallback) const {
    auto it = map.find(key);
    if (it == map.end())
        return fallback;
    if (const auto *s = std::get_if<std::string>(&it->second))
        return *s;
    bad_param(key, "expected a string, got " + describe(it->second));
}

bool Params::flag(const std::string &key, bool fallback) const {
    auto it = map.find(key);
    if (it == map.end())
        return fallback;
    if (const auto *b = std::get_if<bool>(&it->second))
        return *b;
    bad_param(key, "expected a boolean, got " + describe(it->second));
}

SimConfig sim_config(const Params &p, std::uint64_t seed) {
    SimConfig c;
    c.sample_count = static_cast<int>(p.integer("sim.sample_count", c.sample_count));
    c.leak_index = static_cast<int>(p.integer("sim.leak_index", c.leak_index));
    c.leak_gain = p.real("sim.leak_gain", c.leak_gain);
    c.dc_offset = p.real("sim.dc_offset", c.dc_offset);
    c.noise_sigma = p.real("sim.noise_sigma", c.noise_sigma);
    c.jitter_max = static_cast<int>(p.integer("sim.jitter_max", c.jitter_max));
    c.hf_noise_amp = p.real("sim.hf_noise_amp", c.hf_noise_amp);
    c.hf_noise_period = p.real("sim.hf_noise_period", c.hf_noise_period);
    c.activity_amp = p.real("sim.activity_amp", c.activity_amp);
    if (p.has("sim.key"))
        c.key = parse_block("sim.key", p.text("sim.key", ""));
    if (p.has("sim.target")) {
        const auto t = p.text("sim.target", "");
        if (t == "subbytes")
            c.target = IntermediateTarget::SubBytes;
        else if (t == "addroundkey")
            c.target = IntermediateTarget::AddRoundKey;
        else
            bad_param("sim.target", "expected subbytes or addroundkey");
    }
    if (p.has("sim.bit_weights")) {
        std::istringstream in(p.text("sim.bit_weights", ""));
        std::string item;
        std::size_t k = 0;
        while (std::getline(in, item, ',')) {
            if (k == 8)
                bad_param("sim.bit_weights", "expected 8 weights");
            try {
                c.bit_weights[k++] = std::stod(item);
            } catch (const std::exception &) {
                bad_param("sim.bit_weights", "not a number: " + item);
            }
        }
        if (k != 8)
            bad_param("sim.bit_weights", "expected 8 weights");
    }
    c.rng_seed = seed;
    validate(c);
    return c;
}

TraceSet apply_steps(const TraceSet &set, const std::vector<std::string> &steps, const Params &p) {
    TraceSet out = set;
    for (const auto &step : steps) {
        if (step == "align") {
            const auto where = p.text("align", "none");
            if (where == "none")
                continue;
            AlignRef ref;
            if (where == "start")
                ref.anchor = AlignRef::Anchor::Start;
            else if (where == "end")
                ref.anchor = AlignRef::Anchor::End;
            else
                bad_param("align", "expected none, start or end");
            const auto max_shift = static_cast<int>(p.integer("align.max_shift", 20));
            out = align(out, ref, p.integer("align.reference", 0), max_shift).set;
        } else if (step == "lowpass") {
            if (!p.has("lowpass") || std::holds_alternative<bool>(p.map.at("lowpass"))) {
                if (p.flag("lowpass", false))
                    bad_param("lowpass", "give the filter strength as an integer");
                continue;
            }
            const auto strength = p.integer("lowpass", 1);
            if (strength > 1)
                out = lowpass_filter(out, FilterSpec{static_cast<int>(strength)});
        } else if (step == "resample") {
            std::int64_t window = 1;
            if (p.has("resample") && std::holds_alternative<bool>(p.map.at("resample")))
                window = p.flag("resample", false) ? p.integer("resample.window", 4) : 1;
            else
                window = p.integer("resample", 1);
            if (window > 1)
                out = windowed_resample(out, static_cast<int>(window));
        } else if (step == "standardize") {
            std::string mode = "none";
            if (p.has("standardize") && std::holds_alternative<bool>(p.map.at("standardize")))
                mode = p.flag("standardize", false) ? "mean" : "none";
            else
                mode = p.text("standardize", "none");
            if (mode == "mean")
                out = standardize(out, StandardizeMode::MeanOnly);
            else if (mode == "zscore")
                out = standardize(out, StandardizeMode::ZScore);
            else if (mode != "none")
                bad_param("standardize", "expected none, mean or zscore");
        } else {
            fail(ErrorKind::InvalidInput, "unknown pipeline step '" + step + "'");
        }
    }
    return out;
}

std::vector<TraceSet> apply_steps_joint(const std::vector<TraceSet> &sets,
                                        const std::vector<std::string> &steps, const Params &p) {
    if (sets.empty())
        fail(ErrorKind::InvalidInput, "apply_steps_joint: no sets");
    const TraceSet joint = apply_steps(stack(sets), steps, p);
    std::vector<TraceSet> out;
    Eigen::Index begin = 0;
    for (const auto &s : sets) {
        out.push_back(joint.slice(begin, s.trace_count()));
        begin += s.trace_count();
    }
    return out;
}

namespace {

LeakModel parse_leak_model(const std::string &text) {
    if (text == "hw")
        return LeakModel::HammingWeight;
    if (text == "identity")
        return LeakModel::Identity;
    bad_param("cpa.model", "expected hw or identity");
}

// Two-population leakage test selected by the plan metric.
AnalysisResult leakage_test(const std::string &analysis, MetricId m, const Params &p,
                            const TraceSet &a, const TraceSet &b) {
    if (m == MetricId::LeakageNegLogP) {
        const auto test = p.text("tvla.test", analysis == "chi2" ? "chi2" : "t");
        AnalysisResult r;
        if (test == "t")
            r = welch_t_neglog10p(a, b);
        else if (test == "chi2")
            r = chi2_test(a, b, static_cast<int>(p.integer("chi2.bins", kDefaultChi2Bins)));
        else
            bad_param("tvla.test", "expected t or chi2");
        r.metric = MetricId::LeakageNegLogP;
        return r;
    }
    switch (m) {
    case MetricId::TPeak:
        return welch_t(a, b);
    case MetricId::TNegLogP:
        return welch_t_neglog10p(a, b);
    case MetricId::Chi2NegLogP:
        return chi2_test(a, b, static_cast<int>(p.integer("chi2.bins", kDefaultChi2Bins)));
    default:
        fail(ErrorKind::InvalidInput,
             "metric " + std::string(to_string(m)) + " does not fit a two-population test");
    }
}

AnalysisResult template_attack(const Params &p, const TraceSet &profiling, const TraceSet &attack,
                               std::uint8_t true_value) {
    const auto byte = static_cast<std::size_t>(p.integer("template.byte", 0));
    const auto mode_text = p.text("template.class_mode", "value256");
    const ClassMode mode = parse_class_mode(mode_text);
    const Eigen::VectorXd column = profiling.data_byte(byte);
    std::vector<std::uint8_t> values(static_cast<std::size_t>(column.size()));
    for (Eigen::Index i = 0; i < column.size(); ++i)
        values[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(column(i));

    TemplateModel probe;
    probe.class_mode = mode;
    std::vector<int> labels(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        labels[i] = probe.class_of(values[i]);
    PoiSelector selector;
    selector.kind = parse_poi_kind(p.text("poi.selector", "snr"));
    selector.n_poi = static_cast<int>(p.integer("poi.count", 3));
    const auto poi = select_poi(profiling, labels, selector);
    const auto model = build_templates(profiling, values, poi.indices, mode);
    return template_attack_rank(model, attack, true_value);
}

ClassifierConfig classifier_config(const Params &p, std::uint64_t seed) {
    ClassifierConfig c;
    c.epochs = static_cast<int>(p.integer("clf.epochs", c.epochs));
    c.learning_rate = p.real("clf.learning_rate", c.learning_rate);
    c.batch_size = static_cast<int>(p.integer("clf.batch_size", c.batch_size));
    c.l2 = p.real("clf.l2", c.l2);
    c.standardize = p.flag("clf.standardize", c.standardize);
    c.seed = seed;
    return c;
}

AnalysisResult classify(const Params &p, const std::vector<TraceSet> &sets, std::uint64_t seed) {
    // sets: train positives, train negatives, validation positives, validation negatives
    const auto model = train_classifier(stack({sets[0], sets[1]}), binary_labels(sets[0], sets[1]),
                                        classifier_config(p, seed));
    return binomial_la_test(model, stack({sets[2], sets[3]}), binary_labels(sets[2], sets[3]));
}

SimMode tvla_population(const Params &p) {
    const auto kind = p.text("tvla.set", "fixed");
    if (kind == "fixed") {
        const auto data = p.text("tvla.fixed_data", "da39a3ee5e6b4b0d3255bfef95601890");
        const auto block = parse_block("tvla.fixed_data", data);
        return FixedData{{block.begin(), block.end()}};
    }
    if (kind == "semifixed")
        return SemiFixed{parse_hw_range("tvla.hw_range", p.text("tvla.hw_range", "0-128"))};
    bad_param("tvla.set", "expected fixed or semifixed");
}

} // namespace

PipelineRun analyze_sets(const std::string &analysis, MetricId metric,
                         const std::vector<std::string> &steps, const ParamMap &params,
                         const std::vector<TraceSet> &sets, std::uint64_t seed) {
    const Params p{params};
    const std::size_t expected = set_roles(analysis).size();
    if (sets.size() != expected)
        fail(ErrorKind::InvalidInput, analysis + " takes " + std::to_string(expected) +
                                          " trace set(s), got " + std::to_string(sets.size()));
    const auto processed = apply_steps_joint(sets, steps, p);
    const auto &history = processed[0].history();

    if (analysis == "cpa") {
        if (metric != MetricId::CorrPeak)
            fail(ErrorKind::InvalidInput, "cpa responds with CorrPeak only");
        auto r = cpa(processed[0], parse_leak_model(p.text("cpa.model", "hw")),
                     static_cast<std::size_t>(p.integer("cpa.byte", 0)));
        return {std::move(r), history};
    }
    if (analysis == "template") {
        if (metric != MetricId::TemplateRank)
            fail(ErrorKind::InvalidInput, "template responds with TemplateRank only");
        const auto byte = static_cast<std::size_t>(p.integer("template.byte", 0));
        const auto value =
            p.integer("attack.value", static_cast<std::int64_t>(processed[1].data_byte(byte)(0)));
        if (value < 0 || value > 255)
            bad_param("attack.value", "must be a byte");
        return {template_attack(p, processed[0], processed[1], static_cast<std::uint8_t>(value)),
                history};
    }
    if (analysis == "classifier") {
        if (metric != MetricId::ClassifierNegLogP)
            fail(ErrorKind::InvalidInput, "classifier responds with ClassifierNegLogP only");
        return {classify(p, processed, seed), history};
    }
    return {leakage_test(analysis, metric, p, processed[0], processed[1]), history};
}

PipelineRun run_simulated(const Plan &plan, const ParamMap &params, std::uint64_t seed) {
    const Params p{params};
    const auto &analysis = plan.pipeline.analysis;
    std::vector<TraceSet> sets;
    if (analysis == "cpa") {
        const auto n = static_cast<std::size_t>(count_param(p, "traces", 1000));
        sets.push_back(simulate_traces(sim_config(p, seed), n, RandomData{1}));
    } else if (analysis == "ttest" || analysis == "chi2" || analysis == "tvla") {
        const auto n = static_cast<std::size_t>(count_param(p, "traces", 1000));
        sets.push_back(simulate_traces(sim_config(p, mix(seed, 0)), n, tvla_population(p)));
        sets.push_back(simulate_traces(sim_config(p, mix(seed, 1)), n, RandomData{16}));
    } else if (analysis == "template") {
        const auto np = static_cast<std::size_t>(count_param(p, "profiling_traces", 5000));
        const auto na = static_cast<std::size_t>(count_param(p, "attack_traces", 50));
        const auto value = p.integer("attack.value", 0x3c);
        if (value < 0 || value > 255)
            bad_param("attack.value", "must be a byte");
        sets.push_back(simulate_traces(sim_config(p, mix(seed, 0)), np, RandomData{1}));
        sets.push_back(simulate_traces(sim_config(p, mix(seed, 1)), na,
                                       FixedData{{static_cast<std::uint8_t>(value)}}));
    } else if (analysis == "classifier") {
        const auto nt = static_cast<std::size_t>(count_param(p, "train_traces", 2000));
        const auto nv = static_cast<std::size_t>(count_param(p, "validation_traces", 1000));
        if (nt < 2 || nv < 2)
            fail(ErrorKind::InvalidInput, "classifier needs at least two traces per set");
        const SimMode positive = tvla_population(p);
        sets.push_back(simulate_traces(sim_config(p, mix(seed, 0)), nt / 2, positive));
        sets.push_back(simulate_traces(sim_config(p, mix(seed, 1)), nt - nt / 2, RandomData{16}));
        sets.push_back(simulate_traces(sim_config(p, mix(seed, 2)), nv / 2, positive));
        sets.push_back(simulate_traces(sim_config(p, mix(seed, 3)), nv - nv / 2, RandomData{16}));
    } else {
        fail(ErrorKind::InvalidInput, "unknown analysis '" + analysis + "'");
    }
    return analyze_sets(analysis, plan.metric, plan.pipeline.steps, params, sets, mix(seed, 4));
}

namespace {

std::string substitute(std::string pattern, int experiment, int round, const std::string &set) {
    auto replace = [&](const std::string &key, const std::string &value) {
        for (auto pos = pattern.find(key); pos != std::string::npos; pos = pattern.find(key))
            pattern.replace(pos, key.size(), value);
    };
    replace("{exp}", std::to_string(experiment));
    replace("{round}", std::to_string(round));
    replace("{set}", set);
    return pattern;
}

} // namespace

std::vector<std::string> set_roles(const std::string &analysis) {
    if (analysis == "cpa")
        return {""};
    if (analysis == "template")
        return {"profiling", "attack"};
    if (analysis == "classifier")
        return {"train_fixed", "train_random", "validation_fixed", "validation_random"};
    if (analysis == "ttest" || analysis == "chi2" || analysis == "tvla")
        return {"fixed", "random"};
    fail(ErrorKind::InvalidInput, "unknown analysis '" + analysis + "'");
}

PipelineRun run_files(const Plan &plan, const ParamMap &params, int experiment, int round) {
    const Params p{params};
    const auto &analysis = plan.pipeline.analysis;
    const auto roles = set_roles(analysis);
    const std::map<std::string, std::string> count_keys{
        {"", "traces"},           {"fixed", "traces"},  {"random", "traces"},
        {"profiling", "profiling_traces"}, {"attack", "attack_traces"},
        {"train_fixed", "train_traces"}, {"train_random", "train_traces"},
        {"validation_fixed", "validation_traces"}, {"validation_random", "validation_traces"}};
    std::vector<TraceSet> sets;
    for (const auto &role : roles) {
        TraceSet set = load_traceset(substitute(plan.source.pattern, experiment, round, role));
        const auto &key = count_keys.at(role);
        if (p.has(key)) {
            const auto n = count_param(p, key, 1);
            if (n < set.trace_count())
                set = set.head(n);
        }
        sets.push_back(std::move(set));
    }
    const auto seed = run_seed(plan, experiment, round);
    return analyze_sets(analysis, plan.metric, plan.pipeline.steps, params, sets, seed);
}

Executor make_executor(const Plan &plan) {
    auto check = [metric = plan.metric](const AnalysisResult &r) {
        if (r.metric != metric)
            fail(ErrorKind::InvalidInput, "analysis produced " + std::string(to_string(r.metric)) +
                                              " but the plan responds to " +
                                              std::string(to_string(metric)));
        return r.summary;
    };
    if (plan.source.kind == "simulator")
        return [plan, check](const RunRequest &req) {
            auto run = run_simulated(plan, req.params, req.seed);
            return RunOutcome{check(run.result), std::move(run.history)};
        };
    if (plan.source.kind == "files")
        return [plan, check](const RunRequest &req) {
            auto run = run_files(plan, req.params, req.experiment, req.round);
            return RunOutcome{check(run.result), std::move(run.history)};
        };
    fail(ErrorKind::InvalidInput, "unknown source kind '" + plan.source.kind + "'");
}

} // namespace scadoe::doe
