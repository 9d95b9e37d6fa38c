// SPDX-License-Identifier: Apache-2.0
//
// scadoe: simulate, preprocess, analyze, run DoE campaigns and report.
// Exit codes: 0 ok, 2 usage or invalid input, 3 I/O or malformed file,
// 4 data mismatch (shapes, degenerate data, missing classes).

#include "scadoe/analysis/cpa.hpp"
#include "scadoe/doe/ledger.hpp"
#include "scadoe/doe/pipeline.hpp"
#include "scadoe/report/campaign.hpp"
#include "scadoe/report/charts.hpp"
#include "scadoe/trace/io.hpp"
#include "scadoe/trace/simulator.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace scadoe;

namespace {

constexpr int kExitUsage = 2, kExitIo = 3, kExitData = 4;

fs::path output_dir() {
    if (const char *env = std::getenv("SCADOE_OUTPUT_DIR"); env && *env)
        return env;
    return ".";
}

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidInput: return kExitUsage;
    case ErrorKind::Io:
    case ErrorKind::MalformedFile: return kExitIo;
    default: return kExitData;
    }
}

// Pipeline flags shared by preprocess and analyze; unset flags stay out of the map.
struct StepFlags {
    std::string steps;
    std::string align;
    int max_shift = 20;
    int reference = 0;
    int lowpass = 0;
    int resample = 0;
    std::string standardize;

    void add(CLI::App *cmd) {
        cmd->add_option("--steps", steps, "Comma-separated step order (align,lowpass,resample,standardize)");
        cmd->add_option("--align", align, "none | start | end")->check(CLI::IsMember({"none", "start", "end"}));
        cmd->add_option("--max-shift", max_shift, "Alignment search radius")->check(CLI::NonNegativeNumber);
        cmd->add_option("--reference", reference, "Alignment reference trace")->check(CLI::NonNegativeNumber);
        cmd->add_option("--lowpass", lowpass, "Moving-average strength")->check(CLI::PositiveNumber);
        cmd->add_option("--resample", resample, "Windowed-resample window")->check(CLI::PositiveNumber);
        cmd->add_option("--standardize", standardize, "none | mean | zscore")
            ->check(CLI::IsMember({"none", "mean", "zscore"}));
    }

    std::vector<std::string> order() const {
        std::vector<std::string> out;
        if (!steps.empty()) {
            std::istringstream in(steps);
            for (std::string s; std::getline(in, s, ',');)
                if (!s.empty())
                    out.push_back(s);
            return out;
        }
        if (!align.empty()) out.push_back("align");
        if (lowpass) out.push_back("lowpass");
        if (resample) out.push_back("resample");
        if (!standardize.empty()) out.push_back("standardize");
        return out;
    }

    void fill(doe::ParamMap &p) const {
        if (!align.empty()) {
            p["align"] = align;
            p["align.max_shift"] = std::int64_t{max_shift};
            p["align.reference"] = std::int64_t{reference};
        }
        if (lowpass) p["lowpass"] = std::int64_t{lowpass};
        if (resample) p["resample"] = std::int64_t{resample};
        if (!standardize.empty()) p["standardize"] = standardize;
    }
};

Block parse_key(const std::string &hex) {
    if (hex.size() != 32)
        fail(ErrorKind::InvalidInput, "key must be 32 hex digits");
    Block b{};
    for (std::size_t i = 0; i < 16; ++i) {
        const auto byte = hex.substr(2 * i, 2);
        if (byte.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos)
            fail(ErrorKind::InvalidInput, "key must be 32 hex digits");
        b[i] = static_cast<std::uint8_t>(std::stoul(byte, nullptr, 16));
    }
    return b;
}

std::vector<std::uint8_t> parse_hex_bytes(const std::string &hex) {
    if (hex.size() != 2 && hex.size() != 32)
        fail(ErrorKind::InvalidInput, "fixed data must be 1 or 16 bytes of hex");
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        const auto byte = hex.substr(i, 2);
        if (byte.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos)
            fail(ErrorKind::InvalidInput, "fixed data is not hex: " + hex);
        out.push_back(static_cast<std::uint8_t>(std::stoul(byte, nullptr, 16)));
    }
    return out;
}

std::string read_file(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void print_iteration(const doe::Iteration &it) {
    std::cout << "iteration " << it.number << (it.plan.name.empty() ? "" : " (" + it.plan.name + ")")
              << '\n';
    if (it.aborted) {
        std::cout << "aborted: " << it.error << '\n';
        return;
    }
    const auto &stats = *it.effects->round_stats;
    std::cout << "exp  A  B  C   average    std_dev" << (it.verdicts ? "  ok" : "") << '\n';
    for (int r = 0; r < doe::kRuns; ++r) {
        const auto s = doe::run_signs(r);
        const auto &sd = stats.std_dev[static_cast<std::size_t>(r)];
        std::cout << "  " << r + 1 << "  " << (s.a > 0 ? '+' : '-') << "  " << (s.b > 0 ? '+' : '-')
                  << "  " << (s.c > 0 ? '+' : '-') << "  " << report::fixed(stats.average(r), 4)
                  << "  " << (sd ? report::fixed(*sd, 4) : std::string("n/a"));
        if (it.verdicts)
            std::cout << "  " << ((*it.verdicts)[static_cast<std::size_t>(r)] ? "pass" : "fail");
        std::cout << '\n';
    }
    std::cout << '\n' << report::effects_table(*it.effects) << '\n';
    if (it.pareto) {
        std::cout << report::pareto_ascii(*it.pareto);
        std::cout << "vital_few:";
        for (auto t : it.pareto->vital_few)
            std::cout << ' ' << doe::to_string(t);
        std::cout << '\n';
    } else {
        std::cout << "vital_few: (all coefficients zero)\n";
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Side-channel evaluation tuning with two-level factorial experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "scadoe 1.0.0");

    // simulate
    auto *sim = app.add_subcommand("simulate", "Generate synthetic traces");
    std::string mode = "random", fixed_data, key_hex, target = "subbytes", bit_weights, sim_out, csv_out;
    std::size_t n = 1000, data_len = 1;
    std::uint64_t sim_seed = 0;
    int hw_lo = 0, hw_hi = 128;
    SimConfig cfg;
    sim->add_option("--mode", mode, "random | fixed | semifixed")
        ->check(CLI::IsMember({"random", "fixed", "semifixed"}));
    sim->add_option("--n", n, "Trace count")->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_seed, "RNG seed")->required();
    sim->add_option("--data-len", data_len, "Random data bytes (1 or 16)")->check(CLI::IsMember({1, 16}));
    sim->add_option("--fixed-data", fixed_data, "Fixed data as hex (1 or 16 bytes)");
    sim->add_option("--hw-lo", hw_lo, "Semi-fixed state Hamming weight, lower bound");
    sim->add_option("--hw-hi", hw_hi, "Semi-fixed state Hamming weight, upper bound");
    sim->add_option("--samples", cfg.sample_count, "Samples per trace");
    sim->add_option("--leak-index", cfg.leak_index, "Sample of the data-dependent leak");
    sim->add_option("--leak-gain", cfg.leak_gain, "Leak amplitude per weighted bit");
    sim->add_option("--dc", cfg.dc_offset, "DC level");
    sim->add_option("--noise", cfg.noise_sigma, "Gaussian noise sigma");
    sim->add_option("--jitter", cfg.jitter_max, "Maximum trace delay in samples");
    sim->add_option("--hf-amp", cfg.hf_noise_amp, "Sinusoidal interferer amplitude");
    sim->add_option("--hf-period", cfg.hf_noise_period, "Sinusoidal interferer period");
    sim->add_option("--activity", cfg.activity_amp, "Data-independent activity amplitude");
    sim->add_option("--key", key_hex, "AES key, 32 hex digits");
    sim->add_option("--target", target, "subbytes | addroundkey")
        ->check(CLI::IsMember({"subbytes", "addroundkey"}));
    sim->add_option("--bit-weights", bit_weights, "Eight comma-separated per-bit weights");
    sim->add_option("--out", sim_out, "Output base path (default $SCADOE_OUTPUT_DIR/traces)");
    sim->add_option("--csv", csv_out, "Also export the traces as CSV");

    // preprocess
    auto *pre = app.add_subcommand("preprocess", "Apply preprocessing steps to a trace set");
    std::string pre_in, pre_out;
    StepFlags pre_steps;
    pre->add_option("--in", pre_in, "Input base path")->required();
    pre->add_option("--out", pre_out, "Output base path")->required();
    pre_steps.add(pre);

    // analyze
    auto *ana = app.add_subcommand("analyze", "Run one analysis on stored traces");
    std::string metric_name, ana_out, ana_svg, ana_csv, cpa_model = "hw", selector = "snr",
                                                       class_mode = "value256";
    std::vector<std::string> inputs;
    int cpa_byte = 0, bins = 8, poi_count = 3, attack_value = -1, epochs = 30;
    double confidence = 0.9999;
    std::uint64_t ana_seed = 0;
    StepFlags ana_steps;
    ana->add_option("--metric", metric_name,
                    "cpa | ttest | ttest-p | chi2 | template | classifier")
        ->required()
        ->check(CLI::IsMember({"cpa", "ttest", "ttest-p", "chi2", "template", "classifier"}));
    ana->add_option("--in", inputs, "Input base path(s), one per role: cpa 1; ttest/chi2 fixed, random; template profiling, attack; classifier train_fixed, train_random, validation_fixed, validation_random")->required();
    ana->add_option("--out", ana_out, "Result JSON (default $SCADOE_OUTPUT_DIR/result.json)");
    ana->add_option("--svg", ana_svg, "Also render the curve as SVG");
    ana->add_option("--csv", ana_csv, "Also write the curve as CSV");
    ana->add_option("--model", cpa_model, "CPA model: hw | identity")->check(CLI::IsMember({"hw", "identity"}));
    ana->add_option("--byte", cpa_byte, "Data byte analyzed")->check(CLI::Range(0, 15));
    ana->add_option("--bins", bins, "Chi-square bins")->check(CLI::PositiveNumber);
    ana->add_option("--poi", poi_count, "Template points of interest")->check(CLI::PositiveNumber);
    ana->add_option("--selector", selector, "POI selector: sost | sosd | snr | correlation");
    ana->add_option("--class-mode", class_mode, "Template classes: value256 | hw9");
    ana->add_option("--value", attack_value, "True value of the attack traces (default: from metadata)")
        ->check(CLI::Range(0, 255));
    ana->add_option("--epochs", epochs, "Classifier epochs")->check(CLI::PositiveNumber);
    ana->add_option("--confidence", confidence, "CPA confidence band for the SVG");
    ana->add_option("--seed", ana_seed, "Seed for stochastic analyses");
    ana_steps.add(ana);

    // doe
    auto *doe_cmd = app.add_subcommand("doe", "Run (or replay) one 2^3 iteration of a campaign");
    std::string plan_path, replay_path, ledger_path, report_path, effects_csv_path, pareto_svg_path,
        replay_metric = "CorrPeak", replay_direction = "maximize";
    int rounds = 0;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::uint64_t doe_seed = 0;
    doe_cmd->add_option("--plan", plan_path, "Plan document (JSON)");
    doe_cmd->add_option("--replay", replay_path, "Responses CSV: 8 rows in standard order, one column per round");
    doe_cmd->add_option("--metric", replay_metric, "Replay metric id (without --plan)");
    doe_cmd->add_option("--direction", replay_direction, "Replay direction (without --plan)")
        ->check(CLI::IsMember({"maximize", "minimize"}));
    auto *rounds_opt = doe_cmd->add_option("--rounds", rounds, "Override the plan's rounds")
                           ->check(CLI::PositiveNumber);
    auto *seed_opt = doe_cmd->add_option("--seed", doe_seed, "Override the plan's seed");
    doe_cmd->add_option("--ledger", ledger_path, "Ledger file (default $SCADOE_OUTPUT_DIR/ledger.json)");
    doe_cmd->add_option("--report", report_path, "Campaign report (default $SCADOE_OUTPUT_DIR/report.md)");
    doe_cmd->add_option("--effects-csv", effects_csv_path, "Write this iteration's effects as CSV");
    doe_cmd->add_option("--pareto-svg", pareto_svg_path, "Write this iteration's Pareto chart");
    doe_cmd->add_option("--jobs", jobs, "Parallel executor calls")->check(CLI::PositiveNumber);

    // report
    auto *rep = app.add_subcommand("report", "Render the campaign report of a ledger");
    std::string rep_ledger, rep_out, rep_pareto;
    int rep_iteration = 0;
    bool rep_ascii = false;
    rep->add_option("--ledger", rep_ledger, "Ledger file")->required();
    rep->add_option("--out", rep_out, "Report path (default $SCADOE_OUTPUT_DIR/report.md)");
    rep->add_option("--pareto-svg", rep_pareto, "Also write one iteration's Pareto chart");
    rep->add_option("--iteration", rep_iteration, "Iteration for --pareto-svg/--ascii (default: last)");
    rep->add_flag("--ascii", rep_ascii, "Print the Pareto chart to the terminal");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*sim) {
            if (!key_hex.empty())
                cfg.key = parse_key(key_hex);
            cfg.target = target == "subbytes" ? IntermediateTarget::SubBytes
                                              : IntermediateTarget::AddRoundKey;
            if (!bit_weights.empty()) {
                doe::ParamMap p{{"sim.bit_weights", bit_weights}};
                cfg.bit_weights = doe::sim_config(doe::Params{p}, 0).bit_weights;
            }
            cfg.rng_seed = sim_seed;
            SimMode sim_mode = RandomData{data_len};
            if (mode == "fixed") {
                sim_mode = FixedData{parse_hex_bytes(
                    fixed_data.empty() ? "da39a3ee5e6b4b0d3255bfef95601890" : fixed_data)};
            } else if (mode == "semifixed") {
                HwRange range{hw_lo, hw_hi};
                validate(range);
                sim_mode = SemiFixed{range};
            }
            const TraceSet set = simulate_traces(cfg, n, sim_mode);
            const fs::path base = sim_out.empty() ? output_dir() / "traces" : fs::path(sim_out);
            store_traceset(set, base);
            if (!csv_out.empty())
                export_csv(set, csv_out);
            std::cout << "wrote " << trace_files(base).payload.string() << ": n=" << set.trace_count()
                      << " sample_count=" << set.sample_count() << " seed=" << sim_seed
                      << " set_label=" << to_string(set.set_label()) << '\n';
            return 0;
        }

        if (*pre) {
            doe::ParamMap params;
            pre_steps.fill(params);
            const TraceSet set = doe::apply_steps(load_traceset(pre_in), pre_steps.order(),
                                                  doe::Params{params});
            store_traceset(set, pre_out);
            std::cout << "wrote " << trace_files(pre_out).payload.string() << ':';
            for (const auto &h : set.history())
                std::cout << ' ' << h;
            std::cout << '\n';
            return 0;
        }

        if (*ana) {
            std::string analysis = metric_name;
            MetricId metric = MetricId::CorrPeak;
            if (metric_name == "ttest") {
                analysis = "ttest";
                metric = MetricId::TPeak;
            } else if (metric_name == "ttest-p") {
                analysis = "ttest";
                metric = MetricId::TNegLogP;
            } else {
                metric = doe::default_metric(analysis);
            }
            doe::ParamMap params;
            ana_steps.fill(params);
            params["cpa.model"] = cpa_model;
            params["cpa.byte"] = std::int64_t{cpa_byte};
            params["template.byte"] = std::int64_t{cpa_byte};
            params["chi2.bins"] = std::int64_t{bins};
            params["poi.count"] = std::int64_t{poi_count};
            params["poi.selector"] = selector;
            params["template.class_mode"] = class_mode;
            params["clf.epochs"] = std::int64_t{epochs};
            if (attack_value >= 0)
                params["attack.value"] = std::int64_t{attack_value};
            const auto roles = doe::set_roles(analysis);
            if (inputs.size() != roles.size())
                fail(ErrorKind::InvalidInput, "--metric " + metric_name + " takes " +
                                                  std::to_string(roles.size()) + " --in path(s)");
            std::vector<TraceSet> sets;
            for (const auto &in : inputs)
                sets.push_back(load_traceset(in));
            const auto run =
                doe::analyze_sets(analysis, metric, ana_steps.order(), params, sets, ana_seed);
            const auto &r = run.result;
            const fs::path out = ana_out.empty() ? output_dir() / "result.json" : fs::path(ana_out);
            write_json(r, out);
            if (!ana_csv.empty())
                write_csv(r, ana_csv);
            if (!ana_svg.empty()) {
                std::vector<report::ThresholdLine> lines;
                if (metric == MetricId::CorrPeak) {
                    const auto ci = fisher_ci_threshold(sets[0].trace_count(), 0.0, confidence);
                    lines = {{ci.hi, "+CI", false}, {ci.lo, "-CI", false}};
                } else if (metric == MetricId::TPeak) {
                    lines = {{4.5, "4.5", false}, {-4.5, "-4.5", false}};
                } else if (metric != MetricId::TemplateRank) {
                    lines = {{5.0, "-log10(1e-5)", false}};
                }
                report::render_curve(r, lines, ana_svg);
            }
            std::cout << to_string(r.metric) << " summary=" << report::fixed(r.summary, 6);
            if (r.peak_index >= 0)
                std::cout << " peak_index=" << r.peak_index;
            if (!r.flagged.empty())
                std::cout << " flagged=" << r.flagged.size();
            std::cout << '\n';
            return 0;
        }

        if (*doe_cmd) {
            const fs::path ledger_file =
                ledger_path.empty() ? output_dir() / "ledger.json" : fs::path(ledger_path);
            const fs::path report_file =
                report_path.empty() ? output_dir() / "report.md" : fs::path(report_path);
            if (plan_path.empty() && replay_path.empty())
                fail(ErrorKind::InvalidInput, "doe needs --plan, --replay or both");
            if (fs::absolute(ledger_file) == fs::absolute(report_file))
                fail(ErrorKind::InvalidInput, "--ledger and --report must be different paths");

            auto ledger = doe::Ledger::load(ledger_file);
            const doe::Iteration *it = nullptr;
            if (!replay_path.empty()) {
                const auto responses = doe::parse_responses_csv(read_file(replay_path));
                doe::Plan plan = plan_path.empty()
                                     ? doe::replay_plan(parse_metric_id(replay_metric),
                                                        doe::parse_direction(replay_direction),
                                                        static_cast<int>(responses.cols()))
                                     : doe::load_plan(plan_path);
                plan.rounds = static_cast<int>(responses.cols());
                if (*seed_opt)
                    plan.seed = doe_seed;
                it = &ledger.append(doe::make_iteration(plan, responses));
            } else {
                doe::Plan plan = doe::load_plan(plan_path);
                if (*rounds_opt)
                    plan.rounds = rounds;
                if (*seed_opt)
                    plan.seed = doe_seed;
                doe::validate(plan);
                it = &doe::run_plan(plan, doe::make_executor(plan), ledger, {jobs});
            }
            ledger.save(ledger_file);
            report::render_campaign_report(ledger, report_file);
            if (!effects_csv_path.empty() && it->effects)
                report::write_text(effects_csv_path, report::effects_csv(*it->effects));
            if (!pareto_svg_path.empty() && it->pareto)
                report::render_pareto(*it->pareto, pareto_svg_path);
            print_iteration(*it);
            std::cout << "ledger: " << ledger_file.string() << "\nreport: " << report_file.string()
                      << '\n';
            return it->aborted ? kExitData : 0;
        }

        if (*rep) {
            const auto ledger = doe::Ledger::load(rep_ledger);
            if (ledger.empty())
                fail(ErrorKind::InvalidInput, "ledger " + rep_ledger + " has no iterations");
            const fs::path out = rep_out.empty() ? output_dir() / "report.md" : fs::path(rep_out);
            report::render_campaign_report(ledger, out);
            const int count = static_cast<int>(ledger.iterations().size());
            const int which = rep_iteration == 0 ? count : rep_iteration;
            if (which < 1 || which > count)
                fail(ErrorKind::InvalidInput, "--iteration out of range 1.." + std::to_string(count));
            const auto &it = ledger.iterations()[static_cast<std::size_t>(which - 1)];
            if ((!rep_pareto.empty() || rep_ascii) && !it.pareto)
                fail(ErrorKind::EmptyPareto, "iteration " + std::to_string(which) + " has no Pareto report");
            if (!rep_pareto.empty())
                report::render_pareto(*it.pareto, rep_pareto);
            if (rep_ascii)
                std::cout << report::pareto_ascii(*it.pareto);
            std::cout << "report: " << out.string() << '\n';
            return 0;
        }
    } catch (const doe::PlanError &e) {
        std::cerr << "error: plan " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error &e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "error (io): " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
