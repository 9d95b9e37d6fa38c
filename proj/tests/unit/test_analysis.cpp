// SPDX-License-Identifier: Apache-2.0

#include "scadoe/analysis/classifier.hpp"
#include "scadoe/analysis/cpa.hpp"
#include "scadoe/analysis/poi.hpp"
#include "scadoe/analysis/result.hpp"
#include "scadoe/analysis/templates.hpp"
#include "scadoe/analysis/tvla.hpp"
#include "scadoe/trace/simulator.hpp"

#include "test_util.hpp"

#include <Eigen/LU>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace scadoe;

namespace {

TraceSet from_matrix(const Eigen::MatrixXd &s, std::vector<std::uint8_t> bytes = {}) {
    std::vector<TraceMeta> meta;
    for (Eigen::Index i = 0; i < s.rows(); ++i)
        meta.push_back({{bytes.empty() ? std::uint8_t{0} : bytes[static_cast<std::size_t>(i)]},
                        SetLabel::Random, 0});
    return TraceSet(s, meta);
}

Eigen::MatrixXd gaussian(int n, int m, std::uint64_t seed, double mean = 0.0, double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(mean, sd);
    Eigen::MatrixXd s(n, m);
    for (Eigen::Index i = 0; i < s.size(); ++i)
        s.data()[i] = g(rng);
    return s;
}

double naive_pearson(const Eigen::VectorXd &x, const Eigen::VectorXd &y) {
    const double n = static_cast<double>(x.size());
    const double mx = x.sum() / n, my = y.sum() / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        sxy += (x(i) - mx) * (y(i) - my);
        sxx += (x(i) - mx) * (x(i) - mx);
        syy += (y(i) - my) * (y(i) - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

} // namespace

TEST(Pearson, MatchesTextbookFormulaAndZeroesConstantColumns) {
    Eigen::MatrixXd x = gaussian(60, 5, 1);
    x.col(3).setConstant(2.0);
    const Eigen::VectorXd y = gaussian(60, 1, 2);
    const auto r = pearson_columns(x, y);
    for (Eigen::Index t = 0; t < 5; ++t)
        EXPECT_NEAR(r(t), t == 3 ? 0.0 : naive_pearson(x.col(t), y), 1e-12);
}

TEST(Pearson, InvariantUnderAffineMaps) {
    const Eigen::MatrixXd x = gaussian(40, 3, 3);
    const Eigen::VectorXd y = gaussian(40, 1, 4);
    const auto r = pearson_columns(x, y);
    const Eigen::MatrixXd x2 = (3.0 * x.array() + 7.0).matrix();
    EXPECT_TRUE(pearson_columns(x2, y).isApprox(r, 1e-12));
    const Eigen::VectorXd y2 = (-2.0 * y.array() + 1.0).matrix();
    EXPECT_TRUE(pearson_columns(x, y2).isApprox(-r, 1e-12));
}

TEST(Cpa, NoiselessSimulationPeaksAtLeak) {
    SimConfig c;
    c.rng_seed = 5;
    const auto r = cpa(simulate_traces(c, 500, RandomData{1}));
    EXPECT_EQ(r.metric, MetricId::CorrPeak);
    EXPECT_NEAR(r.summary, 1.0, 1e-9);
    EXPECT_EQ(r.peak_index, c.leak_index);
    // every other sample is constant, hence flagged
    EXPECT_EQ(r.flagged.size(), static_cast<std::size_t>(c.sample_count - 1));
}

TEST(Cpa, IdentityModelAndByteIndex) {
    SimConfig c;
    c.bit_weights = {1, 2, 4, 8, 16, 32, 64, 128};
    c.rng_seed = 6;
    const auto set = simulate_traces(c, 300, RandomData{1});
    EXPECT_NEAR(cpa(set, LeakModel::Identity).summary, 1.0, 1e-9);
    EXPECT_LT(cpa(set, LeakModel::HammingWeight).summary, 0.9);
    EXPECT_ERROR_KIND(cpa(set, LeakModel::HammingWeight, 3), ErrorKind::InvalidInput);
}

TEST(Cpa, ConstantPredictorIsDegenerate) {
    SimConfig c;
    const auto set = simulate_traces(c, 20, FixedData{{0x11}});
    EXPECT_ERROR_KIND(cpa(set), ErrorKind::DegenerateInput);
}

TEST(Fisher, BoundsBracketTheConfidenceBand) {
    const auto ci = fisher_ci_threshold(1000, 0.05, 0.9999);
    EXPECT_NEAR(ci.hi, 0.171545, 1e-6);
    EXPECT_DOUBLE_EQ(ci.lo, -ci.hi);
    EXPECT_TRUE(ci.significant(0.18));
    EXPECT_FALSE(ci.significant(0.17));
    EXPECT_NEAR(fisher_ci_threshold(1000, 0.0, 0.9999).hi, 0.122596, 1e-6);
    // symmetric in the sign of r_obs
    EXPECT_DOUBLE_EQ(fisher_ci_threshold(500, -0.1, 0.99).hi, fisher_ci_threshold(500, 0.1, 0.99).hi);
    EXPECT_ERROR_KIND(fisher_ci_threshold(3, 0.0, 0.9), ErrorKind::InvalidInput);
    EXPECT_ERROR_KIND(fisher_ci_threshold(100, 1.0, 0.9), ErrorKind::InvalidInput);
}

TEST(Fisher, ShrinksWithSampleSize) {
    double prev = 1.0;
    for (std::int64_t n : {10, 100, 1000, 100000}) {
        const double hi = fisher_ci_threshold(n, 0.0, 0.95).hi;
        EXPECT_LT(hi, prev);
        prev = hi;
    }
}

TEST(WelchT, MatchesDirectComputation) {
    const auto a = from_matrix(gaussian(30, 4, 7, 0.5, 1.0));
    const auto b = from_matrix(gaussian(45, 4, 8, 0.0, 2.0));
    const auto r = welch_t(a, b);
    for (Eigen::Index t = 0; t < 4; ++t) {
        const Eigen::VectorXd x = a.samples().col(t), y = b.samples().col(t);
        const double mx = x.mean(), my = y.mean();
        const double vx = (x.array() - mx).square().sum() / 29.0;
        const double vy = (y.array() - my).square().sum() / 44.0;
        EXPECT_NEAR((*r.curve)(t), (mx - my) / std::sqrt(vx / 30 + vy / 45), 1e-12);
    }
    EXPECT_EQ(r.summary, r.curve->cwiseAbs().maxCoeff());
}

TEST(WelchT, AntisymmetricAndFlagsZeroVariance) {
    Eigen::MatrixXd sa = gaussian(10, 3, 9), sb = gaussian(12, 3, 10);
    sa.col(1).setConstant(1.0);
    sb.col(1).setConstant(1.0);
    const auto ab = welch_t(from_matrix(sa), from_matrix(sb));
    const auto ba = welch_t(from_matrix(sb), from_matrix(sa));
    EXPECT_TRUE(ab.curve->isApprox(-*ba.curve));
    EXPECT_EQ(ab.flagged, std::vector<Eigen::Index>{1});
    EXPECT_EQ((*ab.curve)(1), 0.0);
}

TEST(WelchT, MismatchedSampleCounts) {
    EXPECT_ERROR_KIND(welch_t(from_matrix(gaussian(5, 3, 1)), from_matrix(gaussian(5, 4, 2))),
                      ErrorKind::LengthMismatch);
    EXPECT_ERROR_KIND(chi2_test(from_matrix(gaussian(5, 3, 1)), from_matrix(gaussian(5, 4, 2))),
                      ErrorKind::LengthMismatch);
}

TEST(WelchT, NegLogPIsMonotoneInAbsT) {
    const auto a = from_matrix(gaussian(200, 6, 11));
    Eigen::MatrixXd sb = gaussian(200, 6, 12);
    for (int t = 0; t < 6; ++t)
        sb.col(t).array() += 0.1 * t;
    const auto b = from_matrix(sb);
    const auto t = welch_t(a, b);
    const auto p = welch_t_neglog10p(a, b);
    EXPECT_EQ(p.metric, MetricId::TNegLogP);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            if (std::abs((*t.curve)(i)) > std::abs((*t.curve)(j)) + 1e-9)
                EXPECT_GT((*p.curve)(i), (*p.curve)(j));
}

TEST(Chi2, DisjointPopulations) {
    Eigen::VectorXd a(100), b(100);
    for (int i = 0; i < 100; ++i) {
        a(i) = i + 1;
        b(i) = i + 101;
    }
    const auto eight = chi2_contingency(a, b, 8);
    EXPECT_NEAR(eight.statistic, 200.0, 1e-9);
    EXPECT_EQ(eight.df, 7);
    const auto two = chi2_contingency(a, b, 2);
    EXPECT_NEAR(two.statistic, 200.0, 1e-9);
    EXPECT_EQ(two.df, 1);
}

TEST(Chi2, SmallExpectedCountsMergeBins) {
    Eigen::VectorXd a(10), b(10);
    for (int i = 0; i < 10; ++i) {
        a(i) = i;
        b(i) = i + 0.5;
    }
    const auto cell = chi2_contingency(a, b, 8);
    EXPECT_EQ(cell.df, 1); // 20 values support two columns of expected count 5
}

TEST(Chi2, IdenticalSetsGiveZero) {
    const auto a = from_matrix(gaussian(100, 5, 13));
    const auto r = chi2_test(a, a);
    EXPECT_EQ(r.metric, MetricId::Chi2NegLogP);
    EXPECT_NEAR(r.summary, 0.0, 1e-12);
}

TEST(Chi2, ConstantColumnIsFlagged) {
    Eigen::MatrixXd s = gaussian(50, 2, 14);
    s.col(0).setConstant(3.0);
    const auto r = chi2_test(from_matrix(s), from_matrix(s));
    EXPECT_EQ(r.flagged, std::vector<Eigen::Index>{0});
    EXPECT_ERROR_KIND(chi2_test(from_matrix(s), from_matrix(s), 1), ErrorKind::InvalidInput);
}

TEST(Poi, SelectsTheLeakingSamples) {
    SimConfig c;
    c.noise_sigma = 0.5;
    c.sample_count = 30;
    c.leak_index = 12;
    c.rng_seed = 15;
    const auto set = simulate_traces(c, 800, RandomData{1});
    std::vector<int> labels;
    for (const auto &m : set.metadata())
        labels.push_back(hamming_weight(m.data[0]));
    for (auto kind : {PoiSelector::Kind::SOST, PoiSelector::Kind::SOSD, PoiSelector::Kind::SNR,
                      PoiSelector::Kind::Correlation}) {
        const auto sel = select_poi(set, labels, {kind, 1});
        EXPECT_EQ(sel.indices, std::vector<Eigen::Index>{12}) << to_string(kind);
        EXPECT_FALSE(sel.low_score);
    }
}

TEST(Poi, TiesGoToLowerIndicesAndOutputIsSorted) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(6, 5);
    const std::vector<int> labels{0, 0, 0, 1, 1, 1};
    for (int i = 3; i < 6; ++i) {
        s(i, 4) = 1.0;
        s(i, 1) = 1.0;
    }
    const auto sel = select_poi(from_matrix(s), labels, {PoiSelector::Kind::SOSD, 3});
    EXPECT_EQ(sel.indices, (std::vector<Eigen::Index>{0, 1, 4}));
}

TEST(Poi, ZeroScoresAndSingleClass) {
    const auto set = from_matrix(Eigen::MatrixXd::Ones(4, 3));
    const std::vector<int> two{0, 0, 1, 1}, one{0, 0, 0, 0};
    EXPECT_TRUE(select_poi(set, two, {PoiSelector::Kind::SNR, 1}).low_score);
    EXPECT_ERROR_KIND(select_poi(set, one, {PoiSelector::Kind::SNR, 1}), ErrorKind::DegenerateInput);
    EXPECT_EQ(parse_poi_kind("sost"), PoiSelector::Kind::SOST);
    EXPECT_ERROR_KIND(parse_poi_kind("best"), ErrorKind::InvalidInput);
}

TEST(Templates, ScoresMatchExplicitGaussianLikelihood) {
    // 9 HW classes, 3 correlated points of interest
    std::mt19937_64 rng(16);
    std::normal_distribution<double> g;
    std::uniform_int_distribution<int> byte(0, 255);
    const int n = 600;
    Eigen::MatrixXd s(n, 4);
    std::vector<std::uint8_t> values(n);
    for (int i = 0; i < n; ++i) {
        values[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(byte(rng));
        const double hw = hamming_weight(values[static_cast<std::size_t>(i)]);
        const double shared = g(rng);
        s(i, 0) = hw + shared + 0.5 * g(rng);
        s(i, 1) = g(rng);
        s(i, 2) = -0.5 * hw + shared + g(rng);
        s(i, 3) = 0.3 * hw + 0.2 * g(rng);
    }
    const auto profiling = from_matrix(s, values);
    const auto model = build_templates(profiling, values, {0, 2, 3}, ClassMode::HW9);
    ASSERT_EQ(model.class_count, 9);

    const auto attack = from_matrix(gaussian(5, 4, 17, 2.0));
    const auto scores = template_scores(model, attack);
    const Eigen::MatrixXd inv = model.pooled_cov.fullPivLu().inverse();
    for (int v : {0, 1, 3, 7, 255}) {
        const auto c = model.class_of(static_cast<std::uint8_t>(v));
        double want = 0.0;
        for (Eigen::Index i = 0; i < attack.trace_count(); ++i) {
            Eigen::Vector3d d(attack.samples()(i, 0), attack.samples()(i, 2), attack.samples()(i, 3));
            d -= model.means.row(c).transpose();
            want += -0.5 * d.dot(inv * d);
        }
        EXPECT_NEAR(scores(v), want, 1e-8 * (1 + std::abs(want))) << "value " << v;
    }
}

TEST(Templates, MissingClassesAreListed) {
    std::vector<std::uint8_t> values{0, 0, 1};
    const auto set = from_matrix(gaussian(3, 2, 18), values);
    try {
        build_templates(set, values, {0}, ClassMode::HW9);
        FAIL() << "expected MissingClass";
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingClass);
        EXPECT_NE(std::string(e.what()).find("1,2,3"), std::string::npos) << e.what();
    }
}

TEST(Templates, NoiselessRankOneAcrossValues) {
    SimConfig c;
    c.bit_weights = {1, 2, 4, 8, 16, 32, 64, 128};
    c.sample_count = 20;
    c.leak_index = 7;
    c.rng_seed = 19;
    const auto profiling = simulate_traces(c, 6000, RandomData{1});
    std::vector<std::uint8_t> values;
    for (const auto &m : profiling.metadata())
        values.push_back(m.data[0]);
    const auto model = build_templates(profiling, values, {7}, ClassMode::Value256);
    EXPECT_GT(model.epsilon, 0.0);
    for (int v : {0, 1, 77, 128, 255}) {
        const auto attack = simulate_traces(c, 2, FixedData{{static_cast<std::uint8_t>(v)}});
        const auto r = template_attack_rank(model, attack, static_cast<std::uint8_t>(v));
        EXPECT_EQ(r.summary, 1.0);
        EXPECT_EQ(r.extras.at("best_candidate"), v);
    }
}

TEST(Templates, RankCountsOnlyStrictlyBetterCandidates) {
    // HW9 classes tie every value of equal weight: the true value keeps rank 1
    SimConfig c;
    c.sample_count = 10;
    c.leak_index = 4;
    c.rng_seed = 20;
    const auto profiling = simulate_traces(c, 3000, RandomData{1});
    std::vector<std::uint8_t> values;
    for (const auto &m : profiling.metadata())
        values.push_back(m.data[0]);
    const auto model = build_templates(profiling, values, {4}, ClassMode::HW9);
    const auto attack = simulate_traces(c, 3, FixedData{{0x0f}});
    EXPECT_EQ(template_attack_rank(model, attack, 0x0f).summary, 1.0);
    EXPECT_ERROR_KIND(parse_class_mode("bytes"), ErrorKind::InvalidInput);
}

TEST(Classifier, GradientMatchesFiniteDifferences) {
    const Eigen::MatrixXd x = gaussian(40, 3, 21);
    Eigen::VectorXd y(40);
    for (int i = 0; i < 40; ++i)
        y(i) = i % 3 == 0 ? 1.0 : 0.0;
    Eigen::VectorXd w(3);
    w << 0.3, -0.2, 0.5;
    const double b = 0.1, l2 = 0.01, h = 1e-6;
    const auto lg = logistic_loss_gradient(w, b, x, y, l2);
    for (int k = 0; k < 3; ++k) {
        Eigen::VectorXd wp = w, wm = w;
        wp(k) += h;
        wm(k) -= h;
        const double fd = (logistic_loss_gradient(wp, b, x, y, l2).loss -
                           logistic_loss_gradient(wm, b, x, y, l2).loss) / (2 * h);
        EXPECT_NEAR(lg.grad_weights(k), fd, 1e-7);
    }
    const double fdb = (logistic_loss_gradient(w, b + h, x, y, l2).loss -
                        logistic_loss_gradient(w, b - h, x, y, l2).loss) / (2 * h);
    EXPECT_NEAR(lg.grad_bias, fdb, 1e-7);
}

TEST(Classifier, LearnsSeparablePopulationsDeterministically) {
    Eigen::MatrixXd s = gaussian(400, 5, 22);
    std::vector<int> labels(400);
    for (int i = 0; i < 400; ++i) {
        labels[static_cast<std::size_t>(i)] = i % 2;
        s(i, 2) += i % 2 ? 2.0 : -2.0;
    }
    const auto set = from_matrix(s);
    ClassifierConfig cfg;
    cfg.seed = 3;
    const auto m1 = train_classifier(set, labels, cfg);
    const auto m2 = train_classifier(set, labels, cfg);
    EXPECT_EQ(m1.weights, m2.weights);
    EXPECT_GT(accuracy(m1, set, labels), 0.95);
    const auto r = binomial_la_test(m1, set, labels);
    EXPECT_EQ(r.metric, MetricId::ClassifierNegLogP);
    EXPECT_FALSE(r.curve.has_value());
    EXPECT_EQ(r.extras.at("total"), 400.0);
    EXPECT_GT(r.summary, 50.0);
}

TEST(Classifier, SingleClassIsDegenerate) {
    const auto set = from_matrix(gaussian(10, 2, 23));
    const std::vector<int> labels(10, 1);
    EXPECT_ERROR_KIND(train_classifier(set, labels), ErrorKind::DegenerateInput);
}

TEST(Result, JsonRoundTripAndCsv) {
    AnalysisResult r;
    r.metric = MetricId::TNegLogP;
    r.curve = Eigen::VectorXd::LinSpaced(4, 0.0, 3.0);
    r.summary = 3.0;
    r.peak_index = 3;
    r.flagged = {1};
    r.extras["k"] = 2.0;
    const auto back = analysis_result_from_json(to_json(r));
    EXPECT_EQ(back.metric, r.metric);
    EXPECT_EQ(*back.curve, *r.curve);
    EXPECT_EQ(back.flagged, r.flagged);
    EXPECT_EQ(back.extras, r.extras);

    test::TempDir dir;
    write_csv(r, dir / "c.csv");
    EXPECT_EQ(test::read_text(dir / "c.csv").substr(0, 11), "index,value");
    r.curve.reset();
    EXPECT_ERROR_KIND(write_csv(r, dir / "d.csv"), ErrorKind::CurveAbsent);
    EXPECT_ERROR_KIND(parse_metric_id("Nope"), ErrorKind::InvalidInput);
}
