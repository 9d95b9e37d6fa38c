// SPDX-License-Identifier: Apache-2.0

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <sys/wait.h>

using namespace scadoe;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run cli(const std::string &args, const std::filesystem::path &cwd) {
    const std::string cmd = "cd '" + cwd.string() + "' && '" SCADOE_CLI "' " + args + " 2>&1";
    Run r;
    FILE *pipe = ::popen(cmd.c_str(), "r");
    if (!pipe)
        return r;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe))
        r.out += buf.data();
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

const char *kRankCsv = "exp,r1\n1,33.75\n2,2.5\n3,36.25\n4,1.75\n5,12.5\n6,1.5\n7,13\n8,1.5\n";

} // namespace

TEST(Cli, SimulateIsDeterministic) {
    test::TempDir dir;
    ASSERT_EQ(cli("simulate --seed 4 --n 30 --out a", dir.path()).code, 0);
    ASSERT_EQ(cli("simulate --seed 4 --n 30 --out b", dir.path()).code, 0);
    EXPECT_EQ(test::read_text(dir / "a.traces.bin"), test::read_text(dir / "b.traces.bin"));
    ASSERT_EQ(cli("simulate --seed 5 --n 30 --out c", dir.path()).code, 0);
    EXPECT_NE(test::read_text(dir / "a.traces.bin"), test::read_text(dir / "c.traces.bin"));
}

TEST(Cli, SemiFixedLabelAndBadRange) {
    test::TempDir dir;
    const auto ok = cli("simulate --seed 1 --mode semifixed --hw-lo 60 --hw-hi 68 --n 10 --out s", dir.path());
    EXPECT_EQ(ok.code, 0) << ok.out;
    EXPECT_NE(test::read_text(dir / "s.manifest.json").find("SemiFixed"), std::string::npos);
    EXPECT_EQ(cli("simulate --seed 1 --mode semifixed --hw-lo 90 --hw-hi 10 --out t", dir.path()).code, 2);
    EXPECT_EQ(cli("simulate --n 10", dir.path()).code, 2); // seed is required
}

TEST(Cli, AnalyzeCpaOnNoiselessTraces) {
    test::TempDir dir;
    ASSERT_EQ(cli("simulate --seed 1 --n 300 --out a", dir.path()).code, 0);
    const auto r = cli("analyze --metric cpa --in a --csv curve.csv", dir.path());
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("summary=1.000000"), std::string::npos) << r.out;
    EXPECT_TRUE(std::filesystem::exists(dir / "curve.csv"));
}

TEST(Cli, AnalyzeExitCodes) {
    test::TempDir dir;
    ASSERT_EQ(cli("simulate --seed 1 --n 100 --out a", dir.path()).code, 0);
    ASSERT_EQ(cli("simulate --seed 2 --n 100 --samples 50 --leak-index 10 --out b", dir.path()).code, 0);
    EXPECT_EQ(cli("analyze --metric ttest --in a --in b", dir.path()).code, 4); // length mismatch
    const auto same = cli("analyze --metric chi2 --in a --in a", dir.path());
    EXPECT_EQ(same.code, 0);
    EXPECT_NE(same.out.find("summary=0.000000"), std::string::npos) << same.out;
    EXPECT_EQ(cli("analyze --metric cpa --in missing", dir.path()).code, 3);
    EXPECT_EQ(cli("analyze --metric bogus --in a", dir.path()).code, 2);
}

TEST(Cli, DoeReplayWritesLedgerAndReport) {
    test::TempDir dir;
    test::write_text(dir / "ranks.csv", kRankCsv);
    const auto r = cli("doe --replay ranks.csv --metric TemplateRank --direction minimize "
                       "--ledger l.json --report r.md --pareto-svg p.svg",
                       dir.path());
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("vital_few: C A AC"), std::string::npos) << r.out;
    EXPECT_NE(test::read_text(dir / "r.md").find("C (47.83%)"), std::string::npos);
    EXPECT_TRUE(std::filesystem::exists(dir / "p.svg"));
    // a second replay appends
    ASSERT_EQ(cli("doe --replay ranks.csv --metric TemplateRank --ledger l.json --report r.md", dir.path()).code, 0);
    EXPECT_NE(test::read_text(dir / "r.md").find("iteration-2"), std::string::npos);
    const auto again = cli("report --ledger l.json --out again.md", dir.path());
    EXPECT_EQ(again.code, 0) << again.out;
    EXPECT_EQ(test::read_text(dir / "again.md"), test::read_text(dir / "r.md"));
}

TEST(Cli, DoeRejectsBadPlans) {
    test::TempDir dir;
    test::write_text(dir / "dup.json", R"({
      "schema_version": 1,
      "factors": [
        {"id": "A", "param": "align", "low": "none", "high": "end"},
        {"id": "A", "param": "lowpass", "low": 1, "high": 2},
        {"id": "C", "param": "standardize", "low": false, "high": true}
      ],
      "pipeline": {"steps": ["align", "lowpass", "standardize"], "analysis": "cpa"}
    })");
    const auto r = cli("doe --plan dup.json --ledger l.json --report r.md", dir.path());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("/factors/1/id"), std::string::npos) << r.out;
    EXPECT_FALSE(std::filesystem::exists(dir / "l.json"));
    test::write_text(dir / "short.csv", "1\n2\n3\n");
    EXPECT_EQ(cli("doe --replay short.csv --ledger l.json --report r.md", dir.path()).code, 3);
}

TEST(Cli, ExamplePlansRun) {
    for (const char *name : {"acquisition_iteration1", "acquisition_iteration2", "template_attack", "tvla_semifixed", "classifier_leakage"}) {
        test::TempDir dir;
        const std::string plan = std::string(SCADOE_PLANS_DIR) + "/" + name + ".json";
        const auto r = cli("doe --plan '" + plan + "' --rounds 1 --ledger l.json --report r.md", dir.path());
        EXPECT_EQ(r.code, 0) << name << "\n" << r.out;
        EXPECT_NE(r.out.find("vital_few:"), std::string::npos) << name;
    }
    test::TempDir dir;
    const auto r = cli(std::string("doe --replay '") + SCADOE_PLANS_DIR + "/correlation_rounds.csv' --ledger l.json --report r.md",
                       dir.path());
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("vital_few: A B"), std::string::npos) << r.out;
}
