// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scadoe/analysis/result.hpp"
#include "scadoe/doe/effects.hpp"
#include "scadoe/doe/ok_criterion.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace scadoe::doe {

/// A value that can be assigned to one pipeline parameter.
using SettingValue = std::variant<bool, std::int64_t, double, std::string>;
using ParamMap = std::map<std::string, SettingValue>;

std::string describe(const SettingValue &v);
nlohmann::json to_json(const SettingValue &v);
SettingValue setting_from_json(const nlohmann::json &j);

/// One of the three factors of an iteration, bound to pipeline parameter `param`.
struct Factor {
    Term id = Term::A; // A, B or C
    std::string name;
    std::string param;
    SettingValue low;  // "-" level
    SettingValue high; // "+" level

    const SettingValue &level(int sign) const { return sign < 0 ? low : high; }
};

struct Pipeline {
    std::vector<std::string> steps; // preprocessing order, e.g. align, lowpass, standardize
    std::string analysis = "cpa";   // cpa | ttest | chi2 | tvla | template | classifier
};

struct Source {
    std::string kind = "simulator"; // simulator | files
    std::string pattern;            // files: path with {exp} and {round}
};

struct Plan {
    int schema_version = 1;
    std::string name;
    std::string description;
    std::vector<Factor> factors; // exactly three, ids A, B, C
    ParamMap fixed;              // variables held constant in this iteration
    Pipeline pipeline;
    Source source;
    MetricId metric = MetricId::CorrPeak;
    Direction direction = Direction::Maximize;
    int rounds = 3;
    std::uint64_t seed = 0;
    bool common_random_numbers = true;
    std::optional<OkCriterion> ok;
    std::string rationale; // why this iteration was set up this way
};

/// Schema violation with the JSON pointer of the offending field.
class PlanError : public Error {
  public:
    PlanError(std::string pointer, const std::string &message)
        : Error(ErrorKind::InvalidInput, pointer + ": " + message), pointer_(std::move(pointer)) {}
    const std::string &pointer() const noexcept { return pointer_; }

  private:
    std::string pointer_;
};

MetricId default_metric(std::string_view analysis);

Plan plan_from_json(const nlohmann::json &j);
nlohmann::json to_json(const Plan &plan);
Plan load_plan(const std::filesystem::path &path);

/// Structural checks shared by the parser and by programmatic construction.
void validate(const Plan &plan);

/// Factor sorted by id; throws if any of A, B, C is missing.
const Factor &factor(const Plan &plan, Term id);

/// Fixed table overlaid with each factor's level for the run's signs.
ParamMap resolve_params(const Plan &plan, const Signs &signs);

/// Three generic factors (A, B, C) for replaying recorded responses.
Plan replay_plan(MetricId metric, Direction direction, int rounds);

} // namespace scadoe::doe
