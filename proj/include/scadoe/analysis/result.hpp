// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scadoe {

enum class MetricId {
    CorrPeak,          // max |Pearson r|
    TPeak,             // max |Welch t|
    TNegLogP,          // max -log10 p of the Welch t-test
    Chi2NegLogP,       // max -log10 p of the chi-square test
    LeakageNegLogP,    // -log10 p of whichever leakage test a plan selects
    TemplateRank,      // rank of the true value, 1 = best
    ClassifierNegLogP, // -log10 p of the binomial test on a trained distinguisher
};

std::string_view to_string(MetricId id);
MetricId parse_metric_id(std::string_view text);

struct AnalysisResult {
    MetricId metric = MetricId::CorrPeak;
    std::optional<Eigen::VectorXd> curve; // absent for scalar-only metrics
    double summary = 0.0;
    Eigen::Index peak_index = -1;
    std::vector<Eigen::Index> flagged;    // samples where the statistic was degenerate
    std::map<std::string, double> extras; // metric-specific side values (k, M, rank ...)
};

/// Peak of |curve| or of curve, with its index.
struct Peak {
    double value = 0.0;
    Eigen::Index index = -1;
};
Peak peak_abs(const Eigen::VectorXd &curve);
Peak peak(const Eigen::VectorXd &curve);

std::string to_json(const AnalysisResult &result);
AnalysisResult analysis_result_from_json(std::string_view text);
void write_json(const AnalysisResult &result, const std::filesystem::path &path);
/// index,value rows; throws CurveAbsent for scalar-only results.
void write_csv(const AnalysisResult &result, const std::filesystem::path &path);

} // namespace scadoe
