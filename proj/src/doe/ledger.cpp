// SPDX-License-Identifier: Apache-2.0

#include "scadoe/doe/ledger.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

namespace scadoe::doe {

using nlohmann::json;

Responses Iteration::response_matrix() const {
    if (aborted)
        fail(ErrorKind::InvalidInput, "iteration " + std::to_string(number) + " was aborted");
    const auto rounds = static_cast<Eigen::Index>(responses[0].size());
    Responses m(kRuns, rounds);
    for (int r = 0; r < kRuns; ++r) {
        if (static_cast<Eigen::Index>(responses[static_cast<std::size_t>(r)].size()) != rounds)
            fail(ErrorKind::InvalidInput, "ragged response table");
        for (Eigen::Index k = 0; k < rounds; ++k) {
            const auto &v = responses[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
            if (!v)
                fail(ErrorKind::InvalidInput, "missing response");
            m(r, k) = *v;
        }
    }
    return m;
}

namespace {

json effects_json(const EffectsReport &e) {
    json effects = json::object(), coeffs = json::object();
    for (auto t : kTerms) {
        effects[std::string(to_string(t))] = e.effect(t);
        coeffs[std::string(to_string(t))] = e.coefficient(t);
    }
    json j = {{"mean", e.mean}, {"effects", effects}, {"coefficients", coeffs}};
    if (e.round_stats) {
        json avg = json::array(), sd = json::array();
        for (int r = 0; r < kRuns; ++r) {
            avg.push_back(e.round_stats->average(r));
            const auto &s = e.round_stats->std_dev[static_cast<std::size_t>(r)];
            sd.push_back(s ? json(*s) : json(nullptr));
        }
        j["round_stats"] = {{"average", avg}, {"std_dev", sd}};
    }
    return j;
}

EffectsReport effects_from_json(const json &j) {
    EffectsReport e;
    e.mean = j.at("mean").get<double>();
    for (auto t : kTerms) {
        e.effects[static_cast<std::size_t>(index(t))] = j.at("effects").at(std::string(to_string(t))).get<double>();
        e.coefficients[static_cast<std::size_t>(index(t))] =
            j.at("coefficients").at(std::string(to_string(t))).get<double>();
    }
    if (j.contains("round_stats")) {
        RoundStats s;
        const auto &rs = j.at("round_stats");
        for (int r = 0; r < kRuns; ++r) {
            s.average(r) = rs.at("average").at(static_cast<std::size_t>(r)).get<double>();
            const auto &sd = rs.at("std_dev").at(static_cast<std::size_t>(r));
            if (!sd.is_null())
                s.std_dev[static_cast<std::size_t>(r)] = sd.get<double>();
        }
        e.round_stats = s;
    }
    return e;
}

json pareto_json(const ParetoReport &p) {
    json entries = json::array();
    for (const auto &e : p.entries)
        entries.push_back({{"term", std::string(to_string(e.term))},
                           {"abs_coefficient", e.abs_coefficient},
                           {"percent", e.percent},
                           {"cumulative", e.cumulative}});
    json vital = json::array();
    for (auto t : p.vital_few)
        vital.push_back(std::string(to_string(t)));
    return {{"threshold", p.threshold}, {"entries", entries}, {"vital_few", vital}};
}

ParetoReport pareto_from_json(const json &j) {
    ParetoReport p;
    p.threshold = j.at("threshold").get<double>();
    for (const auto &e : j.at("entries"))
        p.entries.push_back({parse_term(e.at("term").get<std::string>()),
                             e.at("abs_coefficient").get<double>(), e.at("percent").get<double>(),
                             e.at("cumulative").get<double>()});
    for (const auto &t : j.at("vital_few"))
        p.vital_few.push_back(parse_term(t.get<std::string>()));
    return p;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace

json to_json(const Iteration &it) {
    json responses = json::array(), history = json::array();
    for (int r = 0; r < kRuns; ++r) {
        json row = json::array();
        for (const auto &v : it.responses[static_cast<std::size_t>(r)])
            row.push_back(v ? json(*v) : json(nullptr));
        responses.push_back(row);
        history.push_back(it.pipeline_history[static_cast<std::size_t>(r)]);
    }
    json j = {{"number", it.number},
              {"status", it.aborted ? "aborted" : "complete"},
              {"error", it.error},
              {"plan", to_json(it.plan)},
              {"responses", responses},
              {"pipeline_history", history},
              {"note", it.note}};
    j["effects"] = it.effects ? effects_json(*it.effects) : json(nullptr);
    j["pareto"] = it.pareto ? pareto_json(*it.pareto) : json(nullptr);
    if (it.verdicts)
        j["verdicts"] = std::vector<bool>(it.verdicts->begin(), it.verdicts->end());
    else
        j["verdicts"] = nullptr;
    return j;
}

Iteration iteration_from_json(const json &j) {
    Iteration it;
    it.number = j.at("number").get<int>();
    it.aborted = j.at("status").get<std::string>() == "aborted";
    it.error = j.value("error", "");
    it.plan = plan_from_json(j.at("plan"));
    for (int r = 0; r < kRuns; ++r) {
        for (const auto &v : j.at("responses").at(static_cast<std::size_t>(r)))
            it.responses[static_cast<std::size_t>(r)].push_back(
                v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
        if (j.contains("pipeline_history"))
            it.pipeline_history[static_cast<std::size_t>(r)] =
                j.at("pipeline_history").at(static_cast<std::size_t>(r)).get<std::vector<std::string>>();
    }
    if (!j.at("effects").is_null())
        it.effects = effects_from_json(j.at("effects"));
    if (!j.at("pareto").is_null())
        it.pareto = pareto_from_json(j.at("pareto"));
    if (!j.at("verdicts").is_null()) {
        std::array<bool, kRuns> v{};
        for (int r = 0; r < kRuns; ++r)
            v[static_cast<std::size_t>(r)] = j.at("verdicts").at(static_cast<std::size_t>(r)).get<bool>();
        it.verdicts = v;
    }
    it.note = j.value("note", "");
    return it;
}

const Iteration &Ledger::append(Iteration iteration) {
    iteration.number = static_cast<int>(iterations_.size()) + 1;
    iterations_.push_back(std::move(iteration));
    return iterations_.back();
}

json Ledger::to_json() const {
    json its = json::array();
    for (const auto &it : iterations_)
        its.push_back(doe::to_json(it));
    return {{"schema", "scadoe-ledger"}, {"schema_version", kSchemaVersion}, {"iterations", its}};
}

Ledger Ledger::from_json(const json &j) {
    try {
        if (j.at("schema").get<std::string>() != "scadoe-ledger" ||
            j.at("schema_version").get<int>() != kSchemaVersion)
            fail(ErrorKind::MalformedFile, "ledger: unsupported schema");
        Ledger l;
        for (const auto &it : j.at("iterations"))
            l.iterations_.push_back(iteration_from_json(it));
        for (std::size_t i = 0; i < l.iterations_.size(); ++i)
            if (l.iterations_[i].number != static_cast<int>(i) + 1)
                fail(ErrorKind::MalformedFile, "ledger: iterations out of sequence");
        return l;
    } catch (const json::exception &e) {
        fail(ErrorKind::MalformedFile, std::string("ledger: ") + e.what());
    }
}

void Ledger::save(const std::filesystem::path &path) const {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        fail(ErrorKind::Io, "cannot write ledger " + path.string());
    out << to_json().dump(2) << '\n';
    if (!out.flush())
        fail(ErrorKind::Io, "write failed: " + path.string());
}

Ledger Ledger::load(const std::filesystem::path &path) {
    if (!std::filesystem::exists(path))
        return {};
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Io, "cannot open ledger " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception &e) {
        fail(ErrorKind::MalformedFile, std::string("ledger: ") + e.what());
    }
    return from_json(j);
}

std::uint64_t run_seed(const Plan &plan, int experiment, int round) {
    std::uint64_t s = splitmix64(plan.seed ^ splitmix64(static_cast<std::uint64_t>(round)));
    if (!plan.common_random_numbers)
        s = splitmix64(s ^ (static_cast<std::uint64_t>(experiment) << 32));
    return s;
}

Iteration make_iteration(const Plan &plan, const Responses &responses) {
    if (responses.cols() < 1)
        fail(ErrorKind::InvalidInput, "make_iteration: at least one round required");
    Iteration it;
    it.plan = plan;
    it.note = plan.rationale;
    for (int r = 0; r < kRuns; ++r)
        for (Eigen::Index k = 0; k < responses.cols(); ++k)
            it.responses[static_cast<std::size_t>(r)].push_back(responses(r, k));
    ResponseTable table{responses, plan.direction, plan.metric};
    it.effects = compute_effects(table);
    try {
        it.pareto = pareto(*it.effects);
    } catch (const Error &e) {
        if (e.kind() != ErrorKind::EmptyPareto)
            throw;
    }
    if (plan.ok)
        it.verdicts = evaluate_ok(*plan.ok, plan.metric, it.effects->round_stats->average);
    return it;
}

const Iteration &run_plan(const Plan &plan, const Executor &executor, Ledger &ledger,
                          const RunOptions &options) {
    validate(plan);
    const int rounds = plan.rounds;
    const int tasks = kRuns * rounds;

    struct Slot {
        std::optional<double> response;
        std::vector<std::string> history;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(tasks));
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    int error_task = tasks;
    std::string error;

    // Task order: round-major, runs in standard order within a round.
    auto worker = [&] {
        for (;;) {
            const int task = next.fetch_add(1);
            if (task >= tasks || failed.load())
                return;
            const int round = task / kRuns + 1;
            const int run = task % kRuns;
            RunRequest req;
            req.experiment = run + 1;
            req.round = round;
            req.signs = run_signs(run);
            req.params = resolve_params(plan, req.signs);
            req.seed = run_seed(plan, req.experiment, round);
            try {
                auto out = executor(req);
                slots[static_cast<std::size_t>(task)] = {out.response, std::move(out.history)};
            } catch (const std::exception &e) {
                std::lock_guard lock(error_mutex);
                failed = true;
                if (task < error_task) {
                    error_task = task;
                    error = "experiment " + std::to_string(req.experiment) + ", round " +
                            std::to_string(round) + ": " + e.what();
                }
            }
        }
    };

    const int jobs = std::max(1, std::min(options.jobs, tasks));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < jobs; ++i)
            pool.emplace_back(worker);
    }

    Iteration it;
    if (!failed) {
        Responses m(kRuns, rounds);
        for (int t = 0; t < tasks; ++t)
            m(t % kRuns, t / kRuns) = *slots[static_cast<std::size_t>(t)].response;
        it = make_iteration(plan, m);
    } else {
        it.plan = plan;
        it.note = plan.rationale;
        it.aborted = true;
        it.error = error;
        for (int r = 0; r < kRuns; ++r)
            for (int k = 0; k < rounds; ++k)
                it.responses[static_cast<std::size_t>(r)].push_back(
                    slots[static_cast<std::size_t>(k * kRuns + r)].response);
    }
    for (int r = 0; r < kRuns; ++r)
        it.pipeline_history[static_cast<std::size_t>(r)] = slots[static_cast<std::size_t>(r)].history;
    return ledger.append(std::move(it));
}

Plan next_iteration(const Ledger &ledger, const Decisions &decisions) {
    if (ledger.empty())
        fail(ErrorKind::InvalidInput, "next_iteration: ledger has no iterations");
    const Plan &prev = ledger.iterations().back().plan;
    Plan next = prev;
    next.factors.clear();
    next.rationale = decisions.rationale;

    for (const auto &[id, level] : decisions.fix) {
        const auto &f = factor(prev, id); // throws for absent factors
        next.fixed[f.param] = level == Level::Low ? f.low : f.high;
    }
    for (const auto &[id, levels] : decisions.adjust) {
        (void)levels;
        factor(prev, id);
        if (decisions.fix.contains(id))
            fail(ErrorKind::InvalidInput, "next_iteration: factor " + std::string(to_string(id)) +
                                              " is both fixed and adjusted");
    }
    for (const auto &f : prev.factors) {
        if (decisions.fix.contains(f.id))
            continue;
        Factor kept = f;
        if (auto it = decisions.adjust.find(f.id); it != decisions.adjust.end()) {
            kept.low = it->second.first;
            kept.high = it->second.second;
        }
        next.factors.push_back(std::move(kept));
    }
    if (next.factors.empty() && decisions.new_factors.empty())
        fail(ErrorKind::InvalidInput, "next_iteration: every factor is fixed, no factors left to design over");
    for (const auto &f : decisions.new_factors) {
        next.fixed.erase(f.param);
        next.factors.push_back(f);
    }
    std::stable_sort(next.factors.begin(), next.factors.end(),
                     [](const Factor &a, const Factor &b) { return index(a.id) < index(b.id); });
    try {
        validate(next);
    } catch (const PlanError &e) {
        fail(ErrorKind::InvalidInput, std::string("next_iteration: ") + e.what());
    }
    return next;
}

} // namespace scadoe::doe
