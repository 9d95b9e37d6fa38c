// SPDX-License-Identifier: Apache-2.0

#include "scadoe/doe/ledger.hpp"
#include "scadoe/report/campaign.hpp"
#include "scadoe/report/charts.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <regex>
#include <sstream>

using namespace scadoe;
using namespace scadoe::doe;

namespace {

const std::array<double, 8> kRankAverages = {33.75, 2.5, 36.25, 1.75, 12.5, 1.5, 13, 1.5};

EffectsReport rank_effects() {
    return compute_effects(std::span<const double>(kRankAverages.data(), kRankAverages.size()));
}

Plan small_plan(const std::string &name) {
    Plan p;
    p.name = name;
    p.factors = {{Term::A, "Alignment", "align", std::string("none"), std::string("end")},
                 {Term::B, "Lowpass", "lowpass", std::int64_t{1}, std::int64_t{2}},
                 {Term::C, "Standardize", "standardize", false, true}};
    p.fixed["traces"] = std::int64_t{500};
    p.pipeline.steps = {"align", "lowpass", "standardize"};
    p.rounds = 2;
    return p;
}

Responses two_rounds() {
    Responses m(kRuns, 2);
    for (int r = 0; r < kRuns; ++r) {
        m(r, 0) = 0.1 * r;
        m(r, 1) = 0.1 * r + 0.01;
    }
    return m;
}

int count(const std::string &text, const std::string &needle) {
    int n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1))
        ++n;
    return n;
}

} // namespace

TEST(ParetoChart, SvgIsDeterministicAndLabelled) {
    const auto p = pareto(rank_effects());
    const auto a = report::pareto_svg(p);
    EXPECT_EQ(a, report::pareto_svg(pareto(rank_effects())));
    EXPECT_EQ(a.rfind("<svg", 0), 0u);
    EXPECT_NE(a.find("C (47.83%)"), std::string::npos);
    EXPECT_NE(a.find("80%"), std::string::npos);
    EXPECT_EQ(count(a, "<rect "), 7); // background plus six bars
    EXPECT_EQ(a.find("nan"), std::string::npos);
}

TEST(ParetoChart, SpecFollowsTheReport) {
    const auto p = pareto(rank_effects());
    const auto spec = report::pareto_chart(p);
    ASSERT_EQ(spec.bars.size(), p.entries.size());
    EXPECT_TRUE(spec.line_on_right_axis);
    ASSERT_EQ(spec.line.size(), p.entries.size());
    EXPECT_DOUBLE_EQ(spec.line.back(), p.entries.back().cumulative);
    ASSERT_EQ(spec.thresholds.size(), 1u);
    EXPECT_EQ(spec.thresholds[0].value, 80.0);
    EXPECT_TRUE(spec.thresholds[0].right_axis);
}

TEST(ParetoChart, SingleEntryStillRenders) {
    RunVector y;
    for (int r = 0; r < kRuns; ++r)
        y(r) = run_signs(r).a;
    const auto p = pareto(compute_effects(y));
    const auto svg = report::pareto_svg(p);
    EXPECT_NE(svg.find("A (100.00%)"), std::string::npos);
    const auto ascii = report::pareto_ascii(p);
    EXPECT_NE(ascii.find("A"), std::string::npos);
    EXPECT_NE(ascii.find("100.00"), std::string::npos);
}

TEST(CurveChart, NeedsACurve) {
    AnalysisResult r;
    r.metric = MetricId::TNegLogP;
    EXPECT_ERROR_KIND(report::curve_svg(r, {}), ErrorKind::CurveAbsent);
    r.curve = Eigen::VectorXd::LinSpaced(50, -3.0, 9.0);
    const auto svg = report::curve_svg(r, {{4.5, "4.5", false}});
    EXPECT_EQ(svg, report::curve_svg(r, {{4.5, "4.5", false}}));
    EXPECT_NE(svg.find("<polyline"), std::string::npos);
    test::TempDir dir;
    test::write_text(dir / "file", "x");
    EXPECT_ERROR_KIND(report::render_curve(r, {}, dir / "file" / "x.svg"), ErrorKind::Io);
}

TEST(EffectsTable, FourDecimalsRoundTrip) {
    const auto e = compute_effects(ResponseTable{two_rounds(), Direction::Maximize, MetricId::CorrPeak});
    const auto table = report::effects_table(e);
    std::istringstream in(table);
    std::string header, rule, effect_row;
    std::getline(in, header);
    std::getline(in, rule);
    std::getline(in, effect_row);
    const std::regex cell(R"(\|\s*(-?[0-9]+\.[0-9]{4})\s*)");
    std::vector<double> parsed;
    for (std::sregex_iterator i(effect_row.begin(), effect_row.end(), cell), end; i != end; ++i)
        parsed.push_back(std::stod((*i)[1]));
    ASSERT_EQ(parsed.size(), 7u);
    for (int k = 0; k < 7; ++k)
        EXPECT_NEAR(parsed[static_cast<std::size_t>(k)], e.effects[static_cast<std::size_t>(k)], 5e-5 + 1e-12);
    EXPECT_NE(header.find("| A |"), std::string::npos);
    EXPECT_EQ(report::fixed(-0.00001, 4), "0.0000");
}

TEST(EffectsTable, CsvListsEveryTerm) {
    const auto csv = report::effects_csv(rank_effects());
    EXPECT_EQ(csv.rfind("term,effect,coefficient\n", 0), 0u);
    EXPECT_EQ(count(csv, "\n"), 9);
    const auto pcsv = report::pareto_csv(pareto(rank_effects()));
    EXPECT_NE(pcsv.find("\nC,"), std::string::npos);
    EXPECT_EQ(count(pcsv, ",1\n"), 3);
}

TEST(CampaignReport, SingleIterationWithoutDecision) {
    Ledger ledger;
    ledger.append(make_iteration(small_plan("first"), two_rounds()));
    const auto md = report::campaign_report(ledger);
    EXPECT_NE(md.find("<a id=\"iteration-1\"></a>"), std::string::npos);
    EXPECT_NE(md.find("_No decision recorded._"), std::string::npos);
    EXPECT_EQ(md.find("Previous:"), std::string::npos);
    EXPECT_NE(md.find("Std. Dev."), std::string::npos);
    EXPECT_NE(md.find("<svg"), std::string::npos);
    EXPECT_NE(md.find("| `traces` | 500 |"), std::string::npos) << md;
}

TEST(CampaignReport, IterationsCrossLink) {
    Ledger ledger;
    ledger.append(make_iteration(small_plan("first"), two_rounds()));
    auto second = small_plan("second");
    second.rationale = "Alignment dominates; fix it high and study the filter.";
    ledger.append(make_iteration(second, two_rounds()));
    const auto md = report::campaign_report(ledger);
    EXPECT_NE(md.find("Next: [Iteration 2](#iteration-2)"), std::string::npos);
    EXPECT_NE(md.find("Previous: [Iteration 1](#iteration-1)"), std::string::npos);
    EXPECT_NE(md.find("Alignment dominates"), std::string::npos);
    EXPECT_EQ(count(md, "_No decision recorded._"), 1);
    EXPECT_EQ(md, report::campaign_report(Ledger::from_json(ledger.to_json())));
}

TEST(CampaignReport, EmptyLedgerAndAbortedIteration) {
    EXPECT_ERROR_KIND(report::campaign_report(Ledger{}), ErrorKind::InvalidInput);
    Ledger ledger;
    run_plan(small_plan("x"), [](const RunRequest &) -> RunOutcome {
        throw Error(ErrorKind::DegenerateInput, "no variance");
    }, ledger);
    const auto md = report::campaign_report(ledger);
    EXPECT_NE(md.find("(aborted)"), std::string::npos);
    EXPECT_NE(md.find("no variance"), std::string::npos);
}
