// SPDX-License-Identifier: Apache-2.0

#include "scadoe/report/campaign.hpp"

#include "scadoe/report/charts.hpp"

#include <algorithm>
#include <sstream>

namespace scadoe::report {

namespace {

using doe::Iteration;
using doe::kRuns;
using doe::kTerms;

std::string sign(int s) { return s > 0 ? "+" : "-"; }

std::string criterion_text(const doe::OkCriterion &c) {
    const std::string metric(to_string(c.metric));
    switch (c.comparator) {
    case doe::OkCriterion::Comparator::GE: return metric + " >= " + fixed(c.threshold, 4);
    case doe::OkCriterion::Comparator::LE: return metric + " <= " + fixed(c.threshold, 4);
    case doe::OkCriterion::Comparator::Outside:
        return metric + " outside [" + fixed(c.lo, 4) + ", " + fixed(c.hi, 4) + "]";
    }
    return metric;
}

void factors_section(std::ostringstream &o, const doe::Plan &plan) {
    o << "### Factors\n\n| Factor | Name | Parameter | - | + |\n|---|---|---|---|---|\n";
    for (const auto &f : plan.factors)
        o << "| " << doe::to_string(f.id) << " | " << f.name << " | `" << f.param << "` | "
          << doe::describe(f.low) << " | " << doe::describe(f.high) << " |\n";
    o << "\n### Fixed variables\n\n";
    if (plan.fixed.empty()) {
        o << "_None._\n\n";
    } else {
        o << "| Variable | Fixed value |\n|---|---|\n";
        for (const auto &[k, v] : plan.fixed)
            o << "| `" << k << "` | " << doe::describe(v) << " |\n";
        o << '\n';
    }
    o << "Pipeline: ";
    for (const auto &s : plan.pipeline.steps)
        o << s << " -> ";
    o << plan.pipeline.analysis << ". Response: " << to_string(plan.metric) << " ("
      << doe::to_string(plan.direction) << "), " << plan.rounds << " round(s), seed " << plan.seed
      << (plan.common_random_numbers ? ", common random numbers" : "") << ".\n\n";
}

void responses_section(std::ostringstream &o, const Iteration &it) {
    const std::size_t rounds = it.responses[0].size();
    o << "### Responses\n\n| Exp | A | B | C |";
    for (std::size_t k = 0; k < rounds; ++k)
        o << " Round " << k + 1 << " |";
    o << " Std. Dev. | Average |" << (it.verdicts ? " OK |" : "") << "\n|---|---|---|---|";
    for (std::size_t k = 0; k < rounds + 2 + (it.verdicts ? 1 : 0); ++k)
        o << "---|";
    o << '\n';
    for (int r = 0; r < kRuns; ++r) {
        const auto s = doe::run_signs(r);
        const auto ur = static_cast<std::size_t>(r);
        o << "| " << r + 1 << " | " << sign(s.a) << " | " << sign(s.b) << " | " << sign(s.c) << " |";
        for (const auto &v : it.responses[ur])
            o << ' ' << (v ? fixed(*v, 4) : std::string("n/a")) << " |";
        if (it.effects && it.effects->round_stats) {
            const auto &rs = *it.effects->round_stats;
            o << ' ' << (rs.std_dev[ur] ? fixed(*rs.std_dev[ur], 4) : std::string("n/a")) << " | "
              << fixed(rs.average(r), 4) << " |";
        } else {
            o << " n/a | n/a |";
        }
        if (it.verdicts)
            o << ' ' << ((*it.verdicts)[ur] ? "pass" : "fail") << " |";
        o << '\n';
    }
    o << '\n';
}

} // namespace

std::string effects_table(const doe::EffectsReport &effects) {
    std::ostringstream o;
    o << "|             |";
    for (auto t : kTerms)
        o << ' ' << doe::to_string(t) << " |";
    o << "\n|---|---|---|---|---|---|---|---|\n| Effect      |";
    for (auto t : kTerms)
        o << ' ' << fixed(effects.effect(t), 4) << " |";
    o << "\n| Coefficient |";
    for (auto t : kTerms)
        o << ' ' << fixed(effects.coefficient(t), 4) << " |";
    o << "\n\nMean: " << fixed(effects.mean, 4) << '\n';
    return o.str();
}

std::string effects_csv(const doe::EffectsReport &effects) {
    std::ostringstream o;
    o.precision(17);
    o << "term,effect,coefficient\n";
    for (auto t : kTerms)
        o << doe::to_string(t) << ',' << effects.effect(t) << ',' << effects.coefficient(t) << '\n';
    o << "mean," << effects.mean << ",\n";
    return o.str();
}

std::string pareto_csv(const doe::ParetoReport &pareto) {
    std::ostringstream o;
    o.precision(17);
    o << "term,abs_coefficient,percent,cumulative,vital\n";
    for (const auto &e : pareto.entries) {
        const bool vital = std::find(pareto.vital_few.begin(), pareto.vital_few.end(), e.term) !=
                           pareto.vital_few.end();
        o << doe::to_string(e.term) << ',' << e.abs_coefficient << ',' << e.percent << ','
          << e.cumulative << ',' << (vital ? 1 : 0) << '\n';
    }
    return o.str();
}

std::string campaign_report(const doe::Ledger &ledger) {
    if (ledger.empty())
        fail(ErrorKind::InvalidInput, "campaign report: ledger has no iterations");
    const auto &its = ledger.iterations();
    std::ostringstream o;
    o << "# Campaign report\n\n";
    if (!its.front().plan.name.empty())
        o << "Campaign: " << its.front().plan.name << "\n\n";
    for (const auto &it : its)
        o << "- [Iteration " << it.number << "](#iteration-" << it.number << ")"
          << (it.aborted ? " (aborted)" : "") << '\n';
    o << '\n';

    for (const auto &it : its) {
        o << "<a id=\"iteration-" << it.number << "\"></a>\n\n## Iteration " << it.number;
        if (!it.plan.name.empty())
            o << ": " << it.plan.name;
        o << "\n\n";
        if (it.number > 1)
            o << "Previous: [Iteration " << it.number - 1 << "](#iteration-" << it.number - 1 << ")";
        if (it.number < static_cast<int>(its.size()))
            o << (it.number > 1 ? ". " : "") << "Next: [Iteration " << it.number + 1
              << "](#iteration-" << it.number + 1 << ")";
        if (its.size() > 1)
            o << ".\n\n";
        if (!it.plan.description.empty())
            o << it.plan.description << "\n\n";
        if (it.aborted)
            o << "**Aborted:** " << it.error << "\n\n";

        factors_section(o, it.plan);
        responses_section(o, it);

        if (it.effects) {
            o << "### Effects\n\n" << effects_table(*it.effects) << '\n';
        }
        if (it.pareto) {
            o << "### Pareto\n\n| Term | abs(Coefficient) | Contribution % | Cumulative % |\n"
                 "|---|---|---|---|\n";
            for (const auto &e : it.pareto->entries)
                o << "| " << doe::to_string(e.term) << " | " << fixed(e.abs_coefficient, 4) << " | "
                  << fixed(e.percent, 2) << " | " << fixed(e.cumulative, 2) << " |\n";
            o << "\nVital few: ";
            for (std::size_t i = 0; i < it.pareto->vital_few.size(); ++i)
                o << (i ? ", " : "") << doe::to_string(it.pareto->vital_few[i]);
            o << "\n\n" << pareto_svg(*it.pareto) << '\n';
        } else if (it.effects) {
            o << "### Pareto\n\n_All coefficients are zero; no Pareto chart._\n\n";
        }

        o << "### OK criterion\n\n";
        if (it.plan.ok && it.verdicts) {
            o << criterion_text(*it.plan.ok) << ". Passing experiments:";
            int passed = 0;
            for (int r = 0; r < kRuns; ++r)
                if ((*it.verdicts)[static_cast<std::size_t>(r)]) {
                    o << ' ' << r + 1;
                    ++passed;
                }
            o << (passed ? "" : " none") << " (" << passed << " of 8).\n\n";
        } else if (it.plan.ok) {
            o << criterion_text(*it.plan.ok) << ". Not evaluated.\n\n";
        } else {
            o << "_No criterion set._\n\n";
        }

        o << "### Decision\n\n" << (it.note.empty() ? "_No decision recorded._" : it.note) << "\n\n";
    }
    return o.str();
}

void render_campaign_report(const doe::Ledger &ledger, const std::filesystem::path &path) {
    write_text(path, campaign_report(ledger));
}

} // namespace scadoe::report
