// SPDX-License-Identifier: Apache-2.0

#include "scadoe/analysis/result.hpp"

#include "scadoe/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>

namespace scadoe {

using nlohmann::json;

namespace {

constexpr std::pair<MetricId, std::string_view> kMetricNames[] = {
    {MetricId::CorrPeak, "CorrPeak"},
    {MetricId::TPeak, "TPeak"},
    {MetricId::TNegLogP, "TNegLogP"},
    {MetricId::Chi2NegLogP, "Chi2NegLogP"},
    {MetricId::LeakageNegLogP, "LeakageNegLogP"},
    {MetricId::TemplateRank, "TemplateRank"},
    {MetricId::ClassifierNegLogP, "ClassifierNegLogP"},
};

} // namespace

std::string_view to_string(MetricId id) {
    for (const auto &[k, v] : kMetricNames)
        if (k == id)
            return v;
    return "CorrPeak";
}

MetricId parse_metric_id(std::string_view text) {
    for (const auto &[k, v] : kMetricNames)
        if (v == text)
            return k;
    fail(ErrorKind::InvalidInput, "unknown metric id '" + std::string(text) + "'");
}

Peak peak_abs(const Eigen::VectorXd &curve) {
    Peak p;
    for (Eigen::Index i = 0; i < curve.size(); ++i)
        if (p.index < 0 || std::abs(curve(i)) > p.value) {
            p.value = std::abs(curve(i));
            p.index = i;
        }
    return p;
}

Peak peak(const Eigen::VectorXd &curve) {
    Peak p;
    for (Eigen::Index i = 0; i < curve.size(); ++i)
        if (p.index < 0 || curve(i) > p.value) {
            p.value = curve(i);
            p.index = i;
        }
    return p;
}

std::string to_json(const AnalysisResult &r) {
    json j = {{"metric_id", std::string(to_string(r.metric))},
              {"summary", r.summary},
              {"peak_index", r.peak_index}};
    if (r.curve)
        j["curve"] = std::vector<double>(r.curve->data(), r.curve->data() + r.curve->size());
    else
        j["curve"] = nullptr;
    j["flagged"] = r.flagged;
    j["extras"] = r.extras;
    return j.dump(2);
}

AnalysisResult analysis_result_from_json(std::string_view text) {
    try {
        const auto j = json::parse(text);
        AnalysisResult r;
        r.metric = parse_metric_id(j.at("metric_id").get<std::string>());
        r.summary = j.at("summary").get<double>();
        r.peak_index = j.value("peak_index", Eigen::Index{-1});
        if (!j.at("curve").is_null()) {
            const auto v = j.at("curve").get<std::vector<double>>();
            r.curve = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
        }
        if (j.contains("flagged"))
            r.flagged = j.at("flagged").get<std::vector<Eigen::Index>>();
        if (j.contains("extras"))
            r.extras = j.at("extras").get<std::map<std::string, double>>();
        return r;
    } catch (const json::exception &e) {
        fail(ErrorKind::MalformedFile, std::string("analysis result: ") + e.what());
    }
}

void write_json(const AnalysisResult &result, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        fail(ErrorKind::Io, "cannot write " + path.string());
    out << to_json(result) << '\n';
    if (!out.flush())
        fail(ErrorKind::Io, "write failed: " + path.string());
}

void write_csv(const AnalysisResult &result, const std::filesystem::path &path) {
    if (!result.curve)
        fail(ErrorKind::CurveAbsent, "write_csv: result has no curve");
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        fail(ErrorKind::Io, "cannot write " + path.string());
    out << "index,value\n" << std::setprecision(17);
    for (Eigen::Index i = 0; i < result.curve->size(); ++i)
        out << i << ',' << (*result.curve)(i) << '\n';
    if (!out.flush())
        fail(ErrorKind::Io, "write failed: " + path.string());
}

} // namespace scadoe
