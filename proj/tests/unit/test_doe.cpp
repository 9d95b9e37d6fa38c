// SPDX-License-Identifier: Apache-2.0

#include "scadoe/doe/design.hpp"
#include "scadoe/doe/effects.hpp"
#include "scadoe/doe/ledger.hpp"
#include "scadoe/doe/ok_criterion.hpp"
#include "scadoe/doe/pareto.hpp"
#include "scadoe/doe/pipeline.hpp"
#include "scadoe/doe/plan.hpp"

#include "test_util.hpp"

#include <Eigen/QR>
#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace scadoe;
using namespace scadoe::doe;

namespace {

const double kRounds[8][3] = {
    {0.0724, 0.0808, 0.0685}, {0.0726, 0.0811, 0.0612}, {0.0570, 0.0748, 0.0631},
    {0.0597, 0.0645, 0.0664}, {0.1424, 0.2098, 0.1703}, {0.1428, 0.2112, 0.1707},
    {0.1292, 0.1634, 0.1353}, {0.1294, 0.1645, 0.1351},
};
const std::array<double, 8> kRankAverages = {33.75, 2.5, 36.25, 1.75, 12.5, 1.5, 13, 1.5};

Responses correlation_rounds() {
    Responses m(kRuns, 3);
    for (int r = 0; r < kRuns; ++r)
        for (int k = 0; k < 3; ++k)
            m(r, k) = kRounds[r][k];
    return m;
}

RunVector rank_averages() { return Eigen::Map<const RunVector>(kRankAverages.data()); }

nlohmann::json base_plan_json() {
    return nlohmann::json::parse(R"({
      "schema_version": 1,
      "name": "unit",
      "factors": [
        {"id": "A", "name": "Alignment", "param": "align", "low": "none", "high": "end"},
        {"id": "B", "name": "Lowpass", "param": "lowpass", "low": 1, "high": 4},
        {"id": "C", "name": "Standardize", "param": "standardize", "low": false, "high": true}
      ],
      "fixed": {"traces": 200},
      "pipeline": {"steps": ["align", "lowpass", "standardize"], "analysis": "cpa"},
      "source": {"kind": "simulator"},
      "metric": "CorrPeak",
      "direction": "maximize",
      "rounds": 2,
      "seed": 9
    })");
}

std::string plan_error_pointer(const nlohmann::json &j) {
    try {
        (void)plan_from_json(j);
    } catch (const PlanError &e) {
        return e.pointer();
    }
    return "<accepted>";
}

// Deterministic surrogate pipeline: response depends on the levels and the seed only.
RunOutcome surrogate(const RunRequest &req) {
    std::mt19937_64 rng(req.seed);
    std::uniform_real_distribution<double> u(-0.01, 0.01);
    const double y = 0.5 + 0.3 * req.signs.a - 0.05 * req.signs.b + 0.01 * req.signs.a * req.signs.c + u(rng);
    return {y, {"align", "cpa"}};
}

} // namespace

TEST(Design, StandardOrderWithASlowest) {
    EXPECT_EQ(run_signs(0), (Signs{-1, -1, -1}));
    EXPECT_EQ(run_signs(1), (Signs{-1, -1, +1}));
    EXPECT_EQ(run_signs(4), (Signs{+1, -1, -1}));
    EXPECT_EQ(run_signs(7), (Signs{+1, +1, +1}));
    const auto &x = design_matrix();
    // row 5: A+ B- C-
    const double row5[7] = {1, -1, -1, -1, -1, 1, 1};
    for (int k = 0; k < 7; ++k)
        EXPECT_EQ(x(4, k), row5[k]);
    EXPECT_ERROR_KIND(run_signs(8), ErrorKind::InvalidInput);
}

TEST(Design, ColumnsAreOrthogonalAndBalanced) {
    const auto &x = design_matrix();
    const Eigen::Matrix<double, 7, 7> gram = x.transpose() * x;
    EXPECT_TRUE(gram.isApprox(8.0 * Eigen::Matrix<double, 7, 7>::Identity()));
    EXPECT_TRUE(x.colwise().sum().isZero());
    for (auto t : kTerms)
        EXPECT_EQ(parse_term(to_string(t)), t);
    EXPECT_ERROR_KIND(parse_term("D"), ErrorKind::InvalidInput);
}

TEST(Effects, CorrelationCampaignAverages) {
    const auto e = compute_effects(ResponseTable{correlation_rounds(), Direction::Maximize, MetricId::CorrPeak});
    ASSERT_TRUE(e.round_stats.has_value());
    // contrast of the rounded averages, worked by hand
    EXPECT_NEAR(e.effect(Term::A), 0.090125, 2e-4);
    EXPECT_NEAR(e.coefficient(Term::A), e.effect(Term::A) / 2, 1e-15);
    EXPECT_NEAR(e.round_stats->average(0), 0.0739, 5e-5);
    EXPECT_NEAR(*e.round_stats->std_dev[0], 0.0063, 5e-5);
}

TEST(Effects, AgreeWithLeastSquaresFit) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        RunVector y;
        for (int r = 0; r < kRuns; ++r)
            y(r) = g(rng);
        Eigen::Matrix<double, 8, 8> x;
        x.col(0).setOnes();
        x.rightCols<7>() = design_matrix();
        const Eigen::Matrix<double, 8, 1> beta = x.householderQr().solve(y);
        const auto e = compute_effects(y);
        EXPECT_NEAR(e.mean, beta(0), 1e-12);
        for (int k = 0; k < 7; ++k)
            EXPECT_NEAR(e.coefficients[static_cast<std::size_t>(k)], beta(k + 1), 1e-12);
        // the saturated model reproduces every run
        for (int r = 0; r < kRuns; ++r)
            EXPECT_NEAR(predict(e, run_signs(r), true), y(r), 1e-12);
    }
}

TEST(Effects, AffineEquivariance) {
    const RunVector y = rank_averages();
    const auto e = compute_effects(y);
    const RunVector y2 = (3.0 * y.array() + 10.0).matrix();
    const auto e2 = compute_effects(y2);
    EXPECT_NEAR(e2.mean, 3.0 * e.mean + 10.0, 1e-12);
    for (int k = 0; k < 7; ++k)
        EXPECT_NEAR(e2.effects[static_cast<std::size_t>(k)], 3.0 * e.effects[static_cast<std::size_t>(k)], 1e-12);
}

TEST(Effects, RoundOrderDoesNotMatter) {
    Responses m = correlation_rounds();
    const auto a = compute_effects(ResponseTable{m, Direction::Maximize, MetricId::CorrPeak});
    Responses p(kRuns, 3);
    p << m.col(2), m.col(0), m.col(1);
    const auto b = compute_effects(ResponseTable{p, Direction::Maximize, MetricId::CorrPeak});
    for (int k = 0; k < 7; ++k)
        EXPECT_NEAR(a.effects[static_cast<std::size_t>(k)], b.effects[static_cast<std::size_t>(k)], 1e-15);
    for (int r = 0; r < kRuns; ++r)
        EXPECT_NEAR(*a.round_stats->std_dev[static_cast<std::size_t>(r)],
                    *b.round_stats->std_dev[static_cast<std::size_t>(r)], 1e-15);
}

TEST(Effects, SingleRoundHasNoDeviationAndBadInputIsRejected) {
    const auto s = aggregate_rounds(Responses(correlation_rounds().col(0)));
    EXPECT_FALSE(s.std_dev[0].has_value());
    RunVector y = rank_averages();
    y(3) = std::nan("");
    EXPECT_ERROR_KIND(compute_effects(y), ErrorKind::InvalidInput);
    const std::vector<double> seven(7, 1.0);
    EXPECT_ERROR_KIND(compute_effects(std::span<const double>(seven)), ErrorKind::InvalidInput);
    EXPECT_ERROR_KIND(aggregate_rounds(Responses(kRuns, 0)), ErrorKind::InvalidInput);
}

TEST(Pareto, RankCampaignContributions) {
    const auto p = pareto(compute_effects(rank_averages()));
    ASSERT_EQ(p.entries.size(), 6u);
    // |effects| worked by hand: C 22.0625, A 11.4375, AC 10.8125, BC 0.9375, B 0.5625, AB 0.3125
    const double total = 46.125;
    EXPECT_EQ(p.entries[0].term, Term::C);
    EXPECT_NEAR(p.entries[0].percent, 100 * 22.0625 / total, 1e-9);
    EXPECT_EQ(p.entries[1].term, Term::A);
    EXPECT_NEAR(p.entries[1].percent, 100 * 11.4375 / total, 1e-9);
    EXPECT_EQ(p.entries[2].term, Term::AC);
    EXPECT_NEAR(p.entries.back().cumulative, 100.0, 1e-9);
    EXPECT_EQ(p.vital_few, (std::vector<Term>{Term::C, Term::A, Term::AC}));
}

TEST(Pareto, IncludeAbcAndThreshold) {
    const auto e = compute_effects(rank_averages());
    EXPECT_EQ(pareto(e, {true, 80.0}).entries.size(), 7u);
    EXPECT_EQ(pareto(e, {false, 40.0}).vital_few, std::vector<Term>{Term::C});
    RunVector flat = RunVector::Constant(2.0);
    EXPECT_ERROR_KIND(pareto(compute_effects(flat)), ErrorKind::EmptyPareto);
}

TEST(Pareto, SingleNonzeroTerm) {
    RunVector y;
    for (int r = 0; r < kRuns; ++r)
        y(r) = run_signs(r).b;
    const auto p = pareto(compute_effects(y));
    EXPECT_EQ(p.entries[0].term, Term::B);
    EXPECT_DOUBLE_EQ(p.entries[0].percent, 100.0);
    EXPECT_EQ(p.vital_few, std::vector<Term>{Term::B});
}

TEST(OkCriterion, ComparatorsAndBoundaries) {
    EXPECT_TRUE(OkCriterion::at_least(MetricId::CorrPeak, 0.5).passes(0.5));
    EXPECT_TRUE(OkCriterion::at_most(MetricId::TemplateRank, 5).passes(5));
    const auto out = OkCriterion::outside(MetricId::CorrPeak, -0.1705, 0.1705);
    EXPECT_FALSE(out.passes(0.1705));
    EXPECT_TRUE(out.passes(0.1706));
    EXPECT_TRUE(out.passes(-0.2));
    EXPECT_ERROR_KIND(OkCriterion::outside(MetricId::CorrPeak, 1, 0), ErrorKind::InvalidInput);
    EXPECT_ERROR_KIND(evaluate_ok(out, MetricId::TemplateRank, rank_averages()), ErrorKind::InvalidInput);
    const auto v = evaluate_ok(OkCriterion::at_most(MetricId::TemplateRank, 5), MetricId::TemplateRank,
                               rank_averages());
    EXPECT_EQ(v, (std::array<bool, 8>{false, true, false, true, false, true, false, true}));
}

TEST(Plan, RoundTripAndResolution) {
    const auto plan = plan_from_json(base_plan_json());
    EXPECT_EQ(plan_from_json(to_json(plan)).factors.size(), 3u);
    EXPECT_EQ(to_json(plan_from_json(to_json(plan))), to_json(plan));
    const auto params = resolve_params(plan, run_signs(5)); // A+ B- C+
    EXPECT_EQ(std::get<std::string>(params.at("align")), "end");
    EXPECT_EQ(std::get<std::int64_t>(params.at("lowpass")), 1);
    EXPECT_EQ(std::get<bool>(params.at("standardize")), true);
    EXPECT_EQ(std::get<std::int64_t>(params.at("traces")), 200);
}

TEST(Plan, ErrorsCarryJsonPointers) {
    auto j = base_plan_json();
    j["factors"][2]["id"] = "A";
    EXPECT_EQ(plan_error_pointer(j), "/factors/2/id");

    j = base_plan_json();
    j["factors"].erase(1);
    EXPECT_EQ(plan_error_pointer(j), "/factors");

    j = base_plan_json();
    j["factors"][1]["high"] = "four";
    EXPECT_EQ(plan_error_pointer(j), "/factors/1/high");

    j = base_plan_json();
    j["factors"][0]["high"] = "none";
    EXPECT_EQ(plan_error_pointer(j), "/factors/0/high");

    j = base_plan_json();
    j["pipeline"]["steps"][1] = "wavelet";
    EXPECT_EQ(plan_error_pointer(j), "/pipeline/steps/1");

    j = base_plan_json();
    j["metric"] = "Accuracy";
    EXPECT_EQ(plan_error_pointer(j), "/metric");

    j = base_plan_json();
    j["rounds"] = 0;
    EXPECT_EQ(plan_error_pointer(j), "/rounds");

    j = base_plan_json();
    j["fixed"]["lowpass"] = 3;
    EXPECT_EQ(plan_error_pointer(j), "/factors/1/param");

    j = base_plan_json();
    j["ok_criterion"] = {{"metric", "TemplateRank"}, {"comparator", "le"}, {"threshold", 5}};
    EXPECT_EQ(plan_error_pointer(j), "/ok_criterion");

    j = base_plan_json();
    j.erase("pipeline");
    EXPECT_EQ(plan_error_pointer(j), "/pipeline");
}

TEST(Ledger, SeedsFollowCommonRandomNumbers) {
    auto plan = plan_from_json(base_plan_json());
    EXPECT_EQ(run_seed(plan, 1, 1), run_seed(plan, 8, 1));
    EXPECT_NE(run_seed(plan, 1, 1), run_seed(plan, 1, 2));
    plan.common_random_numbers = false;
    EXPECT_NE(run_seed(plan, 1, 1), run_seed(plan, 8, 1));
}

TEST(Ledger, RunPlanIsDeterministicAcrossJobCounts) {
    const auto plan = plan_from_json(base_plan_json());
    Ledger serial, parallel;
    run_plan(plan, surrogate, serial, {1});
    run_plan(plan, surrogate, parallel, {4});
    EXPECT_EQ(serial.to_json().dump(), parallel.to_json().dump());
    const auto &it = serial.iterations().front();
    EXPECT_EQ(it.number, 1);
    ASSERT_TRUE(it.pareto.has_value());
    EXPECT_EQ(it.pareto->vital_few, std::vector<Term>{Term::A});
    EXPECT_EQ(it.pipeline_history[3], (std::vector<std::string>{"align", "cpa"}));
}

TEST(Ledger, SaveLoadAndAppendOnly) {
    test::TempDir dir;
    const auto path = dir / "ledger.json";
    EXPECT_TRUE(Ledger::load(path).empty());
    const auto plan = plan_from_json(base_plan_json());
    Ledger ledger;
    run_plan(plan, surrogate, ledger);
    ledger.save(path);
    const auto first = test::read_text(path);

    auto reloaded = Ledger::load(path);
    EXPECT_EQ(reloaded.to_json(), ledger.to_json());
    reloaded.append(make_iteration(plan, reloaded.iterations()[0].response_matrix()));
    EXPECT_EQ(reloaded.iterations()[1].number, 2);
    // the first iteration serializes identically after an append
    EXPECT_EQ(reloaded.to_json()["iterations"][0].dump(), ledger.to_json()["iterations"][0].dump());
    EXPECT_EQ(Ledger::load(path).to_json().dump(), nlohmann::json::parse(first).dump());
}

TEST(Ledger, RejectsBrokenFiles) {
    test::TempDir dir;
    test::write_text(dir / "bad.json", "{ not json");
    EXPECT_ERROR_KIND(Ledger::load(dir / "bad.json"), ErrorKind::MalformedFile);
    auto j = nlohmann::json{{"schema", "scadoe-ledger"}, {"schema_version", 99}, {"iterations", nlohmann::json::array()}};
    test::write_text(dir / "v.json", j.dump());
    EXPECT_ERROR_KIND(Ledger::load(dir / "v.json"), ErrorKind::MalformedFile);
}

TEST(Ledger, DeterministicExecutorGivesZeroDeviation) {
    auto plan = plan_from_json(base_plan_json());
    plan.rounds = 3;
    Ledger ledger;
    const auto &it = run_plan(plan, [](const RunRequest &r) {
        return RunOutcome{static_cast<double>(r.experiment), {}};
    }, ledger);
    ASSERT_TRUE(it.effects.has_value());
    for (const auto &sd : it.effects->round_stats->std_dev)
        EXPECT_EQ(*sd, 0.0);
    EXPECT_DOUBLE_EQ(it.effects->effect(Term::A), 4.0);
    EXPECT_DOUBLE_EQ(it.effects->effect(Term::C), 1.0);
}

TEST(Ledger, ExecutorFailureAbortsButKeepsPartialResults) {
    const auto plan = plan_from_json(base_plan_json());
    Ledger ledger;
    const auto &it = run_plan(plan, [](const RunRequest &r) -> RunOutcome {
        if (r.experiment == 5 && r.round == 2)
            throw Error(ErrorKind::DegenerateInput, "boom");
        return {1.0, {}};
    }, ledger);
    EXPECT_TRUE(it.aborted);
    EXPECT_NE(it.error.find("experiment 5, round 2"), std::string::npos);
    EXPECT_TRUE(it.responses[0][0].has_value());
    EXPECT_FALSE(it.responses[4][1].has_value());
    EXPECT_FALSE(it.effects.has_value());
    EXPECT_ERROR_KIND(it.response_matrix(), ErrorKind::InvalidInput);
    const auto back = Ledger::from_json(ledger.to_json());
    EXPECT_TRUE(back.iterations()[0].aborted);
}

TEST(NextIteration, FixesAndReplacesFactors) {
    const auto plan = plan_from_json(base_plan_json());
    Ledger ledger;
    run_plan(plan, surrogate, ledger);

    Decisions d;
    d.fix[Term::A] = Level::High;
    d.fix[Term::C] = Level::Low;
    d.adjust[Term::B] = {std::int64_t{2}, std::int64_t{8}};
    d.new_factors.push_back({Term::A, "Resample", "resample", std::int64_t{1}, std::int64_t{4}});
    d.new_factors.push_back({Term::C, "Traces", "traces", std::int64_t{100}, std::int64_t{400}});
    d.rationale = "alignment wins";
    const auto next = next_iteration(ledger, d);
    EXPECT_EQ(next.factors[0].param, "resample");
    EXPECT_EQ(next.factors[1].param, "lowpass");
    EXPECT_EQ(std::get<std::int64_t>(next.factors[1].high), 8);
    EXPECT_EQ(next.factors[2].param, "traces");
    EXPECT_EQ(std::get<std::string>(next.fixed.at("align")), "end");
    EXPECT_EQ(std::get<bool>(next.fixed.at("standardize")), false);
    EXPECT_FALSE(next.fixed.contains("traces"));
    EXPECT_EQ(next.rationale, "alignment wins");
}

TEST(NextIteration, EdgeCases) {
    Ledger empty;
    EXPECT_ERROR_KIND(next_iteration(empty, {}), ErrorKind::InvalidInput);

    const auto plan = plan_from_json(base_plan_json());
    Ledger ledger;
    run_plan(plan, surrogate, ledger);
    // no decisions repeats the design
    EXPECT_EQ(to_json(next_iteration(ledger, {})), to_json(plan));

    Decisions all;
    all.fix = {{Term::A, Level::Low}, {Term::B, Level::Low}, {Term::C, Level::Low}};
    EXPECT_ERROR_KIND(next_iteration(ledger, all), ErrorKind::InvalidInput);

    Decisions two;
    two.fix = {{Term::A, Level::Low}};
    EXPECT_ERROR_KIND(next_iteration(ledger, two), ErrorKind::InvalidInput); // two factors left
}

TEST(ResponsesCsv, HeaderAndExperimentColumn) {
    std::string text = "exp,r1,r2\n";
    for (int r = 0; r < kRuns; ++r)
        text += std::to_string(r + 1) + "," + std::to_string(r) + "," + std::to_string(2 * r) + "\n";
    const auto m = parse_responses_csv(text);
    ASSERT_EQ(m.cols(), 2);
    EXPECT_EQ(m(7, 1), 14.0);
    EXPECT_ERROR_KIND(parse_responses_csv("1,2\n3,4\n"), ErrorKind::MalformedFile);
}
