// SPDX-License-Identifier: Apache-2.0

#include "scadoe/doe/plan.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace scadoe::doe {

using nlohmann::json;

std::string describe(const SettingValue &v) {
    return std::visit(
        [](const auto &x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, bool>)
                return x ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::string>)
                return x;
            else if constexpr (std::is_same_v<T, double>) {
                std::ostringstream os;
                os << x;
                return os.str();
            } else
                return std::to_string(x);
        },
        v);
}

json to_json(const SettingValue &v) {
    return std::visit([](const auto &x) { return json(x); }, v);
}

SettingValue setting_from_json(const json &j) {
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number_float()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    fail(ErrorKind::InvalidInput, "setting value must be a boolean, number or string");
}

MetricId default_metric(std::string_view analysis) {
    if (analysis == "cpa") return MetricId::CorrPeak;
    if (analysis == "ttest") return MetricId::TNegLogP;
    if (analysis == "chi2") return MetricId::Chi2NegLogP;
    if (analysis == "tvla") return MetricId::LeakageNegLogP;
    if (analysis == "template") return MetricId::TemplateRank;
    if (analysis == "classifier") return MetricId::ClassifierNegLogP;
    fail(ErrorKind::InvalidInput, "unknown analysis '" + std::string(analysis) + "'");
}

namespace {

const std::set<std::string> kSteps = {"align", "lowpass", "resample", "standardize"};
const std::set<std::string> kAnalyses = {"cpa", "ttest", "chi2", "tvla", "template", "classifier"};

const json &need(const json &j, const char *key, const std::string &ptr) {
    if (!j.is_object() || !j.contains(key))
        throw PlanError(ptr + "/" + key, "required field missing");
    return j.at(key);
}

template <typename T> T get_as(const json &j, const std::string &ptr, const char *what) {
    try {
        return j.get<T>();
    } catch (const json::exception &) {
        throw PlanError(ptr, std::string("expected ") + what);
    }
}

// Wraps library exceptions so callers always see the offending field.
template <typename F> auto at_pointer(const std::string &ptr, F &&f) {
    try {
        return f();
    } catch (const PlanError &) {
        throw;
    } catch (const Error &e) {
        throw PlanError(ptr, e.what());
    }
}

bool same_type(const SettingValue &a, const SettingValue &b) {
    if (a.index() == b.index())
        return true;
    // integer and real levels mix freely
    auto numeric = [](const SettingValue &v) { return v.index() == 1 || v.index() == 2; };
    return numeric(a) && numeric(b);
}

} // namespace

void validate(const Plan &plan) {
    if (plan.schema_version != 1)
        throw PlanError("/schema_version", "unsupported schema version");
    if (plan.factors.size() != 3)
        throw PlanError("/factors", "exactly three factors are required");
    std::set<Term> ids;
    std::set<std::string> params;
    for (std::size_t i = 0; i < plan.factors.size(); ++i) {
        const auto &f = plan.factors[i];
        const auto ptr = "/factors/" + std::to_string(i);
        if (f.id != Term::A && f.id != Term::B && f.id != Term::C)
            throw PlanError(ptr + "/id", "factor id must be A, B or C");
        if (!ids.insert(f.id).second)
            throw PlanError(ptr + "/id", "duplicate factor id " + std::string(to_string(f.id)));
        if (f.param.empty())
            throw PlanError(ptr + "/param", "factor must bind a pipeline parameter");
        if (!params.insert(f.param).second)
            throw PlanError(ptr + "/param", "parameter '" + f.param + "' bound by two factors");
        if (plan.fixed.contains(f.param))
            throw PlanError(ptr + "/param", "parameter '" + f.param + "' is also fixed");
        if (!same_type(f.low, f.high))
            throw PlanError(ptr + "/high", "low and high levels have different types");
        if (f.low == f.high)
            throw PlanError(ptr + "/high", "low and high levels must differ");
    }
    for (std::size_t i = 0; i < plan.pipeline.steps.size(); ++i)
        if (!kSteps.contains(plan.pipeline.steps[i]))
            throw PlanError("/pipeline/steps/" + std::to_string(i),
                            "unknown step '" + plan.pipeline.steps[i] + "'");
    if (!kAnalyses.contains(plan.pipeline.analysis))
        throw PlanError("/pipeline/analysis", "unknown analysis '" + plan.pipeline.analysis + "'");
    if (plan.rounds < 1)
        throw PlanError("/rounds", "at least one round is required");
    if (plan.source.kind != "simulator" && plan.source.kind != "files")
        throw PlanError("/source/kind", "source must be 'simulator' or 'files'");
    if (plan.source.kind == "files" && plan.source.pattern.empty())
        throw PlanError("/source/pattern", "file source needs a path pattern");
    if (plan.ok && plan.ok->metric != plan.metric)
        throw PlanError("/ok_criterion", "criterion metric differs from the plan metric");
    if (plan.ok && plan.ok->comparator == OkCriterion::Comparator::Outside &&
        !(plan.ok->lo < plan.ok->hi))
        throw PlanError("/ok_criterion/hi", "Outside requires lo < hi");
}

Plan plan_from_json(const json &j) {
    if (!j.is_object())
        throw PlanError("", "plan must be a JSON object");
    Plan p;
    p.schema_version = get_as<int>(need(j, "schema_version", ""), "/schema_version", "an integer");
    p.name = j.contains("name") ? get_as<std::string>(j.at("name"), "/name", "a string") : "";
    p.description =
        j.contains("description") ? get_as<std::string>(j.at("description"), "/description", "a string") : "";
    p.rationale =
        j.contains("rationale") ? get_as<std::string>(j.at("rationale"), "/rationale", "a string") : "";

    const auto &factors = need(j, "factors", "");
    if (!factors.is_array())
        throw PlanError("/factors", "expected an array");
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const auto ptr = "/factors/" + std::to_string(i);
        const auto &fj = factors.at(i);
        Factor f;
        const auto id = get_as<std::string>(need(fj, "id", ptr), ptr + "/id", "a string");
        f.id = at_pointer(ptr + "/id", [&] { return parse_term(id); });
        f.name = fj.contains("name") ? get_as<std::string>(fj.at("name"), ptr + "/name", "a string") : id;
        f.param = get_as<std::string>(need(fj, "param", ptr), ptr + "/param", "a string");
        f.low = at_pointer(ptr + "/low", [&] { return setting_from_json(need(fj, "low", ptr)); });
        f.high = at_pointer(ptr + "/high", [&] { return setting_from_json(need(fj, "high", ptr)); });
        p.factors.push_back(std::move(f));
    }

    if (j.contains("fixed")) {
        const auto &fixed = j.at("fixed");
        if (!fixed.is_object())
            throw PlanError("/fixed", "expected an object");
        for (const auto &[k, v] : fixed.items())
            p.fixed[k] = at_pointer("/fixed/" + k, [&] { return setting_from_json(v); });
    }

    const auto &pipe = need(j, "pipeline", "");
    if (pipe.contains("steps"))
        p.pipeline.steps =
            get_as<std::vector<std::string>>(pipe.at("steps"), "/pipeline/steps", "an array of strings");
    p.pipeline.analysis =
        get_as<std::string>(need(pipe, "analysis", "/pipeline"), "/pipeline/analysis", "a string");
    if (!kAnalyses.contains(p.pipeline.analysis))
        throw PlanError("/pipeline/analysis", "unknown analysis '" + p.pipeline.analysis + "'");

    if (j.contains("source")) {
        const auto &s = j.at("source");
        p.source.kind = get_as<std::string>(need(s, "kind", "/source"), "/source/kind", "a string");
        if (s.contains("pattern"))
            p.source.pattern = get_as<std::string>(s.at("pattern"), "/source/pattern", "a string");
    }

    p.metric = j.contains("metric")
                   ? at_pointer("/metric", [&] {
                         return parse_metric_id(get_as<std::string>(j.at("metric"), "/metric", "a string"));
                     })
                   : default_metric(p.pipeline.analysis);
    p.direction = j.contains("direction")
                      ? at_pointer("/direction", [&] {
                            return parse_direction(
                                get_as<std::string>(j.at("direction"), "/direction", "a string"));
                        })
                      : (p.metric == MetricId::TemplateRank ? Direction::Minimize : Direction::Maximize);
    p.rounds = j.contains("rounds") ? get_as<int>(j.at("rounds"), "/rounds", "an integer") : 3;
    p.seed = j.contains("seed") ? get_as<std::uint64_t>(j.at("seed"), "/seed", "an unsigned integer") : 0;
    p.common_random_numbers =
        j.contains("common_random_numbers")
            ? get_as<bool>(j.at("common_random_numbers"), "/common_random_numbers", "a boolean")
            : true;

    if (j.contains("ok_criterion")) {
        const auto &oj = j.at("ok_criterion");
        const std::string ptr = "/ok_criterion";
        OkCriterion ok;
        ok.metric = p.metric;
        if (oj.contains("metric"))
            ok.metric = at_pointer(ptr + "/metric", [&] {
                return parse_metric_id(get_as<std::string>(oj.at("metric"), ptr + "/metric", "a string"));
            });
        ok.comparator = at_pointer(ptr + "/comparator", [&] {
            return parse_comparator(
                get_as<std::string>(need(oj, "comparator", ptr), ptr + "/comparator", "a string"));
        });
        if (ok.comparator == OkCriterion::Comparator::Outside) {
            ok.lo = get_as<double>(need(oj, "lo", ptr), ptr + "/lo", "a number");
            ok.hi = get_as<double>(need(oj, "hi", ptr), ptr + "/hi", "a number");
        } else {
            ok.threshold = get_as<double>(need(oj, "threshold", ptr), ptr + "/threshold", "a number");
        }
        p.ok = ok;
    }
    validate(p);
    return p;
}

json to_json(const Plan &p) {
    json factors = json::array();
    for (const auto &f : p.factors)
        factors.push_back({{"id", std::string(to_string(f.id))},
                           {"name", f.name},
                           {"param", f.param},
                           {"low", to_json(f.low)},
                           {"high", to_json(f.high)}});
    json fixed = json::object();
    for (const auto &[k, v] : p.fixed)
        fixed[k] = to_json(v);
    json j = {
        {"schema_version", p.schema_version},
        {"name", p.name},
        {"description", p.description},
        {"factors", factors},
        {"fixed", fixed},
        {"pipeline", {{"steps", p.pipeline.steps}, {"analysis", p.pipeline.analysis}}},
        {"source", {{"kind", p.source.kind}, {"pattern", p.source.pattern}}},
        {"metric", std::string(to_string(p.metric))},
        {"direction", std::string(to_string(p.direction))},
        {"rounds", p.rounds},
        {"seed", p.seed},
        {"common_random_numbers", p.common_random_numbers},
        {"rationale", p.rationale},
    };
    if (p.ok) {
        json ok = {{"comparator", std::string(to_string(p.ok->comparator))}};
        if (p.ok->comparator == OkCriterion::Comparator::Outside) {
            ok["lo"] = p.ok->lo;
            ok["hi"] = p.ok->hi;
        } else {
            ok["threshold"] = p.ok->threshold;
        }
        j["ok_criterion"] = ok;
    }
    return j;
}

Plan load_plan(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Io, "cannot open plan " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception &e) {
        throw PlanError("", std::string("invalid JSON: ") + e.what());
    }
    return plan_from_json(j);
}

const Factor &factor(const Plan &plan, Term id) {
    for (const auto &f : plan.factors)
        if (f.id == id)
            return f;
    fail(ErrorKind::InvalidInput, "plan has no factor " + std::string(to_string(id)));
}

ParamMap resolve_params(const Plan &plan, const Signs &signs) {
    ParamMap params = plan.fixed;
    params[factor(plan, Term::A).param] = factor(plan, Term::A).level(signs.a);
    params[factor(plan, Term::B).param] = factor(plan, Term::B).level(signs.b);
    params[factor(plan, Term::C).param] = factor(plan, Term::C).level(signs.c);
    return params;
}

Plan replay_plan(MetricId metric, Direction direction, int rounds) {
    Plan p;
    p.name = "replay";
    p.metric = metric;
    p.direction = direction;
    p.rounds = rounds;
    p.pipeline.analysis = "cpa";
    for (auto t : {Term::A, Term::B, Term::C}) {
        const std::string id(to_string(t));
        p.factors.push_back({t, id, "factor." + id, std::int64_t{-1}, std::int64_t{1}});
    }
    return p;
}

} // namespace scadoe::doe
