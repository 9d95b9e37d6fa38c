// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <array>
#include <string_view>

namespace scadoe::doe {

/// Main effects and interactions of a 2^3 design, in column order.
enum class Term { A, B, C, AB, AC, BC, ABC };

inline constexpr std::array<Term, 7> kTerms = {Term::A,  Term::B,  Term::C,  Term::AB,
                                               Term::AC, Term::BC, Term::ABC};
inline constexpr int kRuns = 8;

std::string_view to_string(Term term);
Term parse_term(std::string_view text);
inline int index(Term term) { return static_cast<int>(term); }

/// Coded levels of one run, each -1 or +1.
struct Signs {
    int a = -1;
    int b = -1;
    int c = -1;

    bool operator==(const Signs &) const = default;
};

/// Sign of `term` for a run: the product of its constituent factor signs.
int term_sign(Term term, const Signs &signs);

/// Signs of run `row` (0-based) in standard order: A varies slowest, C fastest.
Signs run_signs(int row);

/// Rows = runs in standard order, columns = kTerms.
using DesignMatrix = Eigen::Matrix<double, kRuns, 7>;

const DesignMatrix &design_matrix();

} // namespace scadoe::doe
