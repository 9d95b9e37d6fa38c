// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scadoe/doe/ledger.hpp"

#include <filesystem>
#include <string>

namespace scadoe::report {

/// Effect and coefficient rows over A..ABC plus the grand mean, four decimals.
std::string effects_table(const doe::EffectsReport &effects);

/// term,effect,coefficient rows (full precision) followed by a mean row.
std::string effects_csv(const doe::EffectsReport &effects);
/// term,abs_coefficient,percent,cumulative,vital rows.
std::string pareto_csv(const doe::ParetoReport &pareto);

/// Self-contained Markdown document with inline SVG: one section per
/// iteration with factors, fixed values, responses, effects, Pareto chart,
/// verdicts and the decision note. Throws InvalidInput for an empty ledger.
std::string campaign_report(const doe::Ledger &ledger);
void render_campaign_report(const doe::Ledger &ledger, const std::filesystem::path &path);

} // namespace scadoe::report
