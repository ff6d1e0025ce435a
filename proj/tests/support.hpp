#pragma once

#include <random>
#include <string>

#include "doctest.h"

#include "phasespace/ratfn.hpp"
#include "phasespace/text.hpp"

namespace testing {

using namespace phasespace;

inline TablePtr table_with(std::initializer_list<const char*> states, std::initializer_list<const char*> params) {
    auto t = SymbolTable::create();
    for (auto s : states) t->intern(s, SymbolKind::state);
    for (auto p : params) t->intern(p, SymbolKind::parameter);
    return t;
}

inline RationalFn R(const TablePtr& t, const std::string& text) { return parse_expression(text, t); }
inline MultiPoly P(const TablePtr& t, const std::string& text) { return parse_expression(text, t).as_polynomial(); }

/// Random polynomial with small Gaussian-integer coefficients.
inline MultiPoly random_poly(std::mt19937& rng, const TablePtr& t, const std::vector<Symbol>& vars, unsigned max_deg,
                             unsigned terms) {
    std::uniform_int_distribution<int> coef(-3, 3), deg(0, static_cast<int>(max_deg));
    std::vector<Term> ts;
    for (unsigned k = 0; k < terms; ++k) {
        Monomial m;
        unsigned budget = max_deg;
        for (const auto& v : vars) {
            unsigned e = std::min<unsigned>(budget, static_cast<unsigned>(deg(rng)) / 2);
            budget -= e;
            if (e) m = m * Monomial::var(v.id, e);
        }
        GaussianRational c(mpq_class(coef(rng)), mpq_class(coef(rng) / 2));
        if (!c.is_zero()) ts.push_back({m, c});
    }
    return MultiPoly(t, std::move(ts));
}

}  // namespace testing

namespace doctest {
template <>
struct StringMaker<phasespace::RationalFn> {
    static String convert(const phasespace::RationalFn& r) { return r.str().c_str(); }
};
template <>
struct StringMaker<phasespace::MultiPoly> {
    static String convert(const phasespace::MultiPoly& p) { return p.str().c_str(); }
};
template <>
struct StringMaker<phasespace::GaussianRational> {
    static String convert(const phasespace::GaussianRational& g) { return g.str().c_str(); }
};
}  // namespace doctest
