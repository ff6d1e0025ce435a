#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "phasespace/models.hpp"
#include "phasespace/uniqueness.hpp"
#include "support.hpp"

using namespace phasespace;

namespace {

struct Fixture {
    ModelSpace m;
    ModifiedParams alpha = symbolic_modified(m);
    QuadraticAnsatz ansatz = quadratic_ansatz(m.affine(0));

    ConstraintSystem constraints(const ModifiedParams& a) const { return build_constraints(atlas_modified(m, a), ansatz); }
    ModifiedParams numeric(std::mt19937& rng) const {
        std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
        ModifiedParams a;
        for (auto& v : a) v = RationalFn(GaussianRational(mpq_class(num(rng), den(rng))));
        return a;
    }
};

/// Rank over Q(i) by plain Gaussian elimination.
std::size_t numeric_rank(std::vector<std::vector<GaussianRational>> a) {
    std::size_t rank = 0, cols = a.empty() ? 0 : a[0].size();
    for (std::size_t c = 0; c < cols && rank < a.size(); ++c) {
        std::size_t p = rank;
        while (p < a.size() && a[p][c].is_zero()) ++p;
        if (p == a.size()) continue;
        std::swap(a[p], a[rank]);
        for (std::size_t r = 0; r < a.size(); ++r) {
            if (r == rank || a[r][c].is_zero()) continue;
            GaussianRational f = a[r][c] / a[rank][c];
            for (std::size_t k = c; k < cols; ++k) a[r][k] = a[r][k] - f * a[rank][k];
        }
        ++rank;
    }
    return rank;
}

/// Number of (component, power, monomial) slots with a negative boundary power.
std::size_t count_pole_terms(const Triple& w, const Chart& target) {
    std::size_t count = 0;
    Symbol u = target.boundary_symbol();
    for (const auto& r : w) {
        if (r.is_polynomial()) continue;
        unsigned depth = r.den().degree(u.id);
        for (const auto& [mono, c] : r.num().coefficients_in(target.var_ids()))
            if (mono.exponent(u.id) < depth && !c.is_zero()) ++count;
    }
    return count;
}

}  // namespace

TEST_CASE_FIXTURE(Fixture, "ansatz layout") {
    CHECK(ansatz.coefficients.size() == 30);
    CHECK(ansatz.basis.size() == 10);
    CHECK(ansatz.coefficient(0, 3).name() == "c4");
    CHECK(ansatz.field.components[2].num().size() == 10);
    std::vector<RationalFn> ones(30, RationalFn(1));
    CHECK(ansatz.instantiate(ones).components[0] == m.parse("1 + x + y + z + x^2 + x*y + x*z + y^2 + y*z + z^2"));
    CHECK_THROWS_AS(ansatz.instantiate({RationalFn(1)}), std::invalid_argument);
}

TEST_CASE_FIXTURE(Fixture, "constraint counts per chart") {
    ConstraintSystem s = constraints(alpha);
    REQUIRE(s.per_chart.size() == 4);
    CHECK(s.per_chart[0].second == 0);
    auto atlas = atlas_modified(m, alpha);
    for (std::size_t j = 1; j < 4; ++j) {
        CHECK(s.per_chart[j].first == atlas[j].target().name);
        CHECK(s.per_chart[j].second == count_pole_terms(oracles::pushforward_via_inverse(ansatz.field, atlas[j]), atlas[j].target()));
        CHECK(s.per_chart[j].second > 0);
    }
    CHECK(s.constraints.size() == 47);
}

TEST_CASE_FIXTURE(Fixture, "rank agrees with elimination at numeric parameters") {
    ConstraintSystem s = constraints(alpha);
    UniquenessReport r = solve_ansatz(s);
    CHECK(r.rank == 29);
    std::mt19937 rng(7);
    std::map<VarId, RationalFn> point;
    ModifiedParams a = numeric(rng);
    for (std::size_t k = 1; k <= 5; ++k) point[m.alpha(k).id] = a[k - 1];
    std::vector<std::vector<GaussianRational>> numeric_rows;
    for (const auto& c : s.constraints) {
        std::vector<GaussianRational> row;
        for (const auto& e : c.row) row.push_back(e.substitute(point).constant_value());
        numeric_rows.push_back(row);
    }
    CHECK(numeric_rank(numeric_rows) == 29);
}

TEST_CASE_FIXTURE(Fixture, "the normalized solution is the modified system") {
    UniquenessReport r = solve_ansatz(constraints(alpha), {}, system_modified(m, alpha));
    CHECK(r.constraint_count == 47);
    CHECK(r.nullspace_dimension == 0);
    CHECK(r.matches_reference);
    CHECK(r.degree_two);
    for (const auto& d : *r.difference) CHECK(d.is_zero());
}

TEST_CASE_FIXTURE(Fixture, "recovered field is polynomial in every chart and pi-invariant") {
    UniquenessReport r = solve_ansatz(constraints(alpha));
    for (const auto& phi : atlas_modified(m, alpha))
        for (const auto& c : pushforward(r.recovered, phi).components) CHECK(polynomial_value(c).has_value());
    for (const auto& c : verify_symmetry(r.recovered, symmetry_pi(m))) CHECK(c.is_zero());
}

TEST_CASE_FIXTURE(Fixture, "solving commutes with specialization") {
    UniquenessReport symbolic = solve_ansatz(constraints(alpha));
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 3; ++trial) {
        ModifiedParams a = numeric(rng);
        std::map<VarId, RationalFn> point;
        for (std::size_t k = 1; k <= 5; ++k) point[m.alpha(k).id] = a[k - 1];
        UniquenessReport special = solve_ansatz(constraints(a), {}, system_modified(m, a));
        CHECK(special.matches_reference);
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(special.recovered.components[k] == symbolic.recovered.components[k].substitute(point));
    }
    ModifiedParams zero{RationalFn(0), RationalFn(0), RationalFn(0), RationalFn(0), RationalFn(0)};
    CHECK(solve_ansatz(constraints(zero), {}, system_modified(m, zero)).matches_reference);
}

TEST_CASE_FIXTURE(Fixture, "degenerate and inconsistent normalizations") {
    UniquenessReport free = solve_ansatz(build_constraints({ChartMap::identity(m.affine(0))}, ansatz));
    CHECK(free.rank == 0);
    CHECK(free.nullspace_dimension == 29);
    CHECK_FALSE(free.degree_two);
    CHECK_THROWS_AS(solve_ansatz(constraints(alpha), Normalization{0, 4, RationalFn(1)}), InconsistentSystem);
}

TEST_CASE_FIXTURE(Fixture, "denominators off the boundary are rejected") {
    auto t = m.table();
    Chart odd{"V", {t->intern("v1", SymbolKind::state), t->intern("v2", SymbolKind::state), t->intern("v3", SymbolKind::state)},
              std::nullopt};
    ChartMap phi(m.affine(0), odd, {m.parse("x"), m.parse("1/y"), m.parse("z")}, {m.parse("v1"), m.parse("1/v2"), m.parse("v3")});
    CHECK_THROWS_AS(build_constraints({phi}, ansatz), std::domain_error);
}
