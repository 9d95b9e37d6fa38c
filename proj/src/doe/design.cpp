// SPDX-License-Identifier: Apache-2.0

#include "scadoe/doe/design.hpp"

#include "scadoe/error.hpp"

#include <string>

namespace scadoe::doe {

std::string_view to_string(Term term) {
    switch (term) {
    case Term::A: return "A";
    case Term::B: return "B";
    case Term::C: return "C";
    case Term::AB: return "AB";
    case Term::AC: return "AC";
    case Term::BC: return "BC";
    case Term::ABC: return "ABC";
    }
    return "A";
}

Term parse_term(std::string_view text) {
    for (auto t : kTerms)
        if (to_string(t) == text)
            return t;
    fail(ErrorKind::InvalidInput, "unknown term '" + std::string(text) + "'");
}

int term_sign(Term term, const Signs &s) {
    switch (term) {
    case Term::A: return s.a;
    case Term::B: return s.b;
    case Term::C: return s.c;
    case Term::AB: return s.a * s.b;
    case Term::AC: return s.a * s.c;
    case Term::BC: return s.b * s.c;
    case Term::ABC: return s.a * s.b * s.c;
    }
    return 0;
}

Signs run_signs(int row) {
    if (row < 0 || row >= kRuns)
        fail(ErrorKind::InvalidInput, "run_signs: row must be in [0, 8)");
    return {(row & 4) ? 1 : -1, (row & 2) ? 1 : -1, (row & 1) ? 1 : -1};
}

const DesignMatrix &design_matrix() {
    static const DesignMatrix matrix = [] {
        DesignMatrix m;
        for (int r = 0; r < kRuns; ++r)
            for (auto t : kTerms)
                m(r, index(t)) = term_sign(t, run_signs(r));
        return m;
    }();
    return matrix;
}

} // namespace scadoe::doe
