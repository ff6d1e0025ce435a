#include "doctest.h"
#include "phasespace/models.hpp"
#include "phasespace/singular.hpp"
#include "support.hpp"

using namespace phasespace;

namespace {

struct Fixture {
    ModelSpace m;
    VectorField v = system_three_wave(m, symbolic_three_wave(m));
    VectorField u1 = pushforward(v, m.projective_map(1));

    Triple T(const std::string& a, const std::string& b, const std::string& c) const {
        return {m.parse(a), m.parse(b), m.parse(c)};
    }
    Chart toy_chart() const {
        auto t = m.table();
        return Chart{"toy", {t->intern("s1", SymbolKind::state), t->intern("s2", SymbolKind::state),
                             t->intern("s3", SymbolKind::state)},
                     0};
    }
};

std::array<std::string, 3> strs(const std::array<RationalFn, 3>& a) { return {a[0].str(), a[1].str(), a[2].str()}; }

Matrix3 constant_matrix(std::initializer_list<std::initializer_list<long>> rows) {
    Matrix3 a;
    std::size_t r = 0;
    for (auto row : rows) {
        std::size_t c = 0;
        for (long e : row) a[r][c++] = RationalFn(e);
        ++r;
    }
    return a;
}

}  // namespace

TEST_CASE_FIXTURE(Fixture, "accessible points on U1") {
    AccessibleSet s = find_accessible(u1);
    CHECK(s.complete());
    REQUIRE(s.points.size() == 3);
    CHECK(s.points[0].coords == T("0", "0", "0"));
    CHECK(s.points[1].coords == T("0", "I", "0"));
    CHECK(s.points[2].coords == T("0", "-I", "0"));
}

TEST_CASE_FIXTURE(Fixture, "accessible points on the weighted chart") {
    ChartMap w = weighted_chart(m.affine(0), 0, 2, m.table());
    CHECK(w.target().name == "W1-0-2");
    AccessibleSet s = find_accessible(pushforward(v, w));
    REQUIRE(s.points.size() == 2);
    CHECK(s.points[0].coords == T("0", "delta/2", "0"));
    CHECK(s.points[1].coords == T("0", "delta/2", "-1"));
}

TEST_CASE_FIXTURE(Fixture, "a zero field is singular along the whole boundary") {
    VectorField zero{m.affine(1), T("0", "0", "0")};
    CHECK_THROWS_AS(find_accessible(zero), PositiveDimensional);
    VectorField curve{m.affine(1), T("0", "Y1/X1", "0")};
    CHECK_THROWS_AS(find_accessible(curve), PositiveDimensional);
}

TEST_CASE_FIXTURE(Fixture, "the remaining affine charts see the same points") {
    AccessibleSet s2 = find_accessible(pushforward(v, m.projective_map(2)));
    REQUIRE(s2.points.size() == 2);
    CHECK(s2.points[0].coords == T("I", "0", "0"));
    AccessibleSet s3 = find_accessible(pushforward(v, m.projective_map(3)));
    REQUIRE(s3.points.size() == 1);
    CHECK(s3.points[0].coords == T("0", "0", "0"));
}

TEST_CASE_FIXTURE(Fixture, "local indices on U1") {
    AccessibleSet s = find_accessible(u1);
    LocalIndex p1 = local_index(u1, s.points[0]);
    CHECK(strs(p1.eigenvalues) == std::array<std::string, 3>{"0", "2", "-2"});
    CHECK_FALSE(p1.ratios.has_value());
    CHECK(p1.matrix[1][0] == m.parse("-delta"));
    for (std::size_t k = 1; k <= 2; ++k) {
        LocalIndex p = local_index(u1, s.points[k]);
        CHECK(strs(p.eigenvalues) == std::array<std::string, 3>{"-2", "-4", "-4"});
        REQUIRE(p.ratios.has_value());
        CHECK(strs(*p.ratios) == std::array<std::string, 3>{"1", "2", "2"});
        CHECK(p.integral());
        CHECK_FALSE(p.spectral);
    }
}

TEST_CASE_FIXTURE(Fixture, "local indices on the weighted chart") {
    VectorField w = pushforward(v, weighted_chart(m.affine(0), 0, 2, m.table()));
    AccessibleSet s = find_accessible(w);
    LocalIndex p41 = local_index(w, s.points[0]);
    CHECK(strs(p41.eigenvalues) == std::array<std::string, 3>{"0", "2", "-2"});
    CHECK_FALSE(p41.ratios.has_value());
    LocalIndex p42 = local_index(w, s.points[1]);
    CHECK(strs(p42.eigenvalues) == std::array<std::string, 3>{"1", "2", "2"});
    CHECK(strs(*p42.ratios) == std::array<std::string, 3>{"1", "2", "2"});
    CHECK(p42.integral());
}

TEST_CASE_FIXTURE(Fixture, "diagonal toy field") {
    Chart c = toy_chart();
    VectorField toy{c, {RationalFn(1), m.parse("2*s2/s1"), m.parse("2*s3/s1")}};
    AccessiblePoint origin{c, {RationalFn(0), RationalFn(0), RationalFn(0)}, c.vars[0], ""};
    Matrix3 a = linear_part(toy, origin);
    CHECK(a == constant_matrix({{1, 0, 0}, {0, 2, 0}, {0, 0, 2}}));
    LocalIndex li = local_index(toy, origin);
    CHECK(strs(li.eigenvalues) == std::array<std::string, 3>{"1", "2", "2"});
    CHECK(li.integral());
}

TEST_CASE("spectral ordering when no permutation triangularizes") {
    auto t = testing::table_with({}, {});
    Matrix3 a = constant_matrix({{3, 0, 0}, {1, 0, 1}, {0, -1, 0}});
    LocalIndex li = local_index_of(a, 0, t);
    CHECK(li.spectral);
    CHECK(li.certificate() == "spectral");
    CHECK(strs(li.eigenvalues) == std::array<std::string, 3>{"3", "I", "-I"});
    CHECK(li.integrality[1] == Integrality::non_integer);
    Matrix3 irrational = constant_matrix({{1, 0, 0}, {0, 0, 2}, {0, 1, 0}});
    CHECK_THROWS_AS(local_index_of(irrational, 0, t), UnresolvedSpectrum);
}

TEST_CASE_FIXTURE(Fixture, "trace and determinant match the local index") {
    std::vector<std::pair<VectorField, AccessiblePoint>> cases;
    for (auto& p : find_accessible(u1).points) cases.emplace_back(u1, p);
    VectorField w = pushforward(v, weighted_chart(m.affine(0), 0, 2, m.table()));
    for (auto& p : find_accessible(w).points) cases.emplace_back(w, p);
    for (auto& [field, p] : cases) {
        Matrix3 a = linear_part(field, p);
        LocalIndex li = local_index(field, p);
        CHECK(a[0][0] + a[1][1] + a[2][2] == li.eigenvalues[0] + li.eigenvalues[1] + li.eigenvalues[2]);
        CHECK(determinant(a) == li.eigenvalues[0] * li.eigenvalues[1] * li.eigenvalues[2]);
    }
}

TEST_CASE_FIXTURE(Fixture, "local index is invariant under swapping the non-boundary coordinates") {
    Chart swapped{"U1s", {m.table()->intern("Xs", SymbolKind::state), m.table()->intern("Ys", SymbolKind::state),
                          m.table()->intern("Zs", SymbolKind::state)},
                  0};
    const Chart& c = m.affine(1);
    ChartMap swap(c, swapped, {m.sym(c.vars[0]), m.sym(c.vars[2]), m.sym(c.vars[1])},
                  {m.sym(swapped.vars[0]), m.sym(swapped.vars[2]), m.sym(swapped.vars[1])});
    VectorField s = pushforward(u1, swap);
    for (const auto& p : find_accessible(u1).points) {
        AccessiblePoint q{swapped, swap.apply(p.coords), swapped.vars[0], ""};
        auto a = local_index(u1, p).eigenvalues, b = local_index(s, q).eigenvalues;
        auto sa = strs(a), sb = strs(b);
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        CHECK(sa == sb);
    }
}

TEST_CASE_FIXTURE(Fixture, "alpha test") {
    VectorField w = pushforward(v, weighted_chart(m.affine(0), 0, 2, m.table()));
    AlphaTestReport r = alpha_test(w, find_accessible(w).points[1]);
    CHECK(r.single_valued);
    CHECK(r.ratios[1] == GaussianRational(2));
    CHECK(r.closed_form[1] == "C2*T^2");
    auto t = testing::table_with({}, {});
    Matrix3 half;
    half[0] = {RationalFn(1), RationalFn(0), RationalFn(0)};
    half[1] = {RationalFn(0), RationalFn(GaussianRational(mpq_class(1, 2))), RationalFn(0)};
    half[2] = {RationalFn(0), RationalFn(0), RationalFn(1)};
    AlphaTestReport h = alpha_test_of(local_index_of(half, 0, t));
    CHECK_FALSE(h.single_valued);
    CHECK(h.behaviour[1] == ComponentBehaviour::branch);
    AlphaTestReport j = alpha_test_of(local_index_of(constant_matrix({{1, 0, 0}, {1, 1, 0}, {0, 0, 2}}), 0, t));
    CHECK_FALSE(j.single_valued);
    CHECK(j.behaviour[1] == ComponentBehaviour::logarithmic);
    CHECK(j.behaviour[2] == ComponentBehaviour::power);
    AlphaTestReport ok = alpha_test_of(local_index_of(constant_matrix({{1, 0, 0}, {0, 1, 0}, {0, 0, 2}}), 0, t));
    CHECK(ok.single_valued);
    CHECK_THROWS_AS(alpha_test(u1, find_accessible(u1).points[0]), std::domain_error);
}

TEST_CASE_FIXTURE(Fixture, "Painleve balances") {
    auto balances = painleve_leading_orders(v, 2);
    bool found = false;
    for (const auto& b : balances)
        if (b.exponents == std::array<int, 3>{1, 0, 2}) {
            found = true;
            CHECK(b.coefficients[0] == RationalFn(1));
            CHECK(b.coefficients[1] == m.parse("delta/2"));
            CHECK(b.coefficients[2] == RationalFn(-1));
        }
    CHECK(found);
    // each balance cancels the most singular order of every equation
    auto t = m.table();
    Symbol s = t->intern("_tau", SymbolKind::state);
    for (const auto& b : balances) {
        std::map<VarId, RationalFn> ansatz;
        for (std::size_t k = 0; k < 3; ++k)
            ansatz[v.chart.vars[k].id] = b.coefficients[k] * RationalFn::variable(s).pow(-b.exponents[k]);
        for (std::size_t k = 0; k < 3; ++k) {
            RationalFn lhs = b.exponents[k] ? b.coefficients[k] * RationalFn(-b.exponents[k]) *
                                                  RationalFn::variable(s).pow(-b.exponents[k] - 1)
                                            : RationalFn(0);
            RationalFn diff = lhs - v.components[k].substitute(ansatz);
            if (diff.is_zero()) continue;
            // the leading Laurent coefficient must not sit at the most singular order reached by any term
            int worst = b.exponents[k] ? b.exponents[k] + 1 : INT32_MIN;
            for (const auto& [mono, c] : v.components[k].num().coefficients_in(v.chart.var_ids())) {
                int order = 0;
                for (std::size_t j = 0; j < 3; ++j) order += static_cast<int>(mono.exponent(v.chart.vars[j].id)) * b.exponents[j];
                worst = std::max(worst, order);
            }
            int pole = static_cast<int>(diff.den().degree(s.id)) - static_cast<int>(diff.num().min_degree(s.id));
            CHECK(pole < worst);
        }
    }
}

TEST_CASE_FIXTURE(Fixture, "Painleve toy systems") {
    Chart c = m.affine(0);
    VectorField riccati{c, T("x^2", "0", "0")};
    bool found = false;
    for (const auto& b : painleve_leading_orders(riccati, 1))
        if (b.exponents[0] == 1 && b.coefficients[0] == RationalFn(-1)) found = true;
    CHECK(found);
    VectorField linear{c, T("y", "x - z", "2*z")};
    CHECK(painleve_leading_orders(linear, 3).empty());
}

TEST_CASE_FIXTURE(Fixture, "blow-up charts") {
    VectorField w = pushforward(v, weighted_chart(m.affine(0), 0, 2, m.table()));
    AccessiblePoint p42 = find_accessible(w).points[1];
    auto charts = blow_up(w, p42);
    REQUIRE(charts.size() == 3);
    const ChartMap& phi = charts[0].map;
    CHECK(phi.forward()[0] == m.parse("X"));
    CHECK(phi.forward()[1] == m.parse("(Y - delta/2)/X"));
    CHECK(phi.forward()[2] == m.parse("(Z + 1)/X"));
    AccessibleSet next = find_accessible(charts[0].field);
    REQUIRE(next.points.size() == 1);
    CHECK(next.points[0].coords[1] == m.parse("-delta*gamma/2"));
    CHECK(next.points[0].coords[2] == m.parse("-2*(gamma + 1)"));
    VectorField zero{w.chart, T("0", "0", "0")};
    for (const auto& bc : blow_up(zero, p42))
        for (const auto& comp : bc.field.components) CHECK(comp.is_zero());
}

TEST_CASE_FIXTURE(Fixture, "explicit centre shifts") {
    VectorField w = pushforward(v, weighted_chart(m.affine(0), 0, 2, m.table()));
    AccessiblePoint p42 = find_accessible(w).points[1];
    VectorField step1 = blow_up(w, p42)[0].field;
    AccessiblePoint origin{step1.chart, T("0", "0", "0"), step1.chart.vars[0], ""};
    auto charts = blow_up(step1, origin, T("0", "-delta*gamma/2", "-2*(gamma + 1)"));
    Obstruction ob = holomorphy_obstructions(charts[0].field, charts[0].field.chart.vars[0]);
    REQUIRE(ob.conditions.size() == 2);
    CHECK(ob.conditions[0] == m.parse("delta*gamma").as_polynomial());
    CHECK(ob.conditions[1] == m.parse("gamma^2 + gamma").as_polynomial());
}

TEST_CASE_FIXTURE(Fixture, "resolution pipeline") {
    ResolutionReport r = resolve_pole(v);
    CHECK(r.balance.exponents == std::array<int, 3>{1, 0, 2});
    CHECK(r.resolved_point.coords == T("0", "delta/2", "-1"));
    CHECK(r.steps.size() == 2);
    REQUIRE(r.obstruction.conditions.size() == 2);
    CHECK(factored_display(r.obstruction.conditions[0]) == "delta*gamma");
    CHECK(factored_display(r.obstruction.conditions[1]) == "gamma*(gamma + 1)");
    const Symbol& u = r.steps.back().field.chart.vars[0];
    CHECK(r.obstruction.singular_parts[0].is_zero());
    CHECK(r.obstruction.singular_parts[1] == m.parse("delta*gamma") / RationalFn::variable(u));
    CHECK(r.obstruction.singular_parts[2] == m.parse("-2*gamma*(gamma + 1)") / RationalFn::variable(u));
    REQUIRE(r.solutions.size() == 2);
    CHECK(r.solutions[0].size() == 1);
    CHECK(r.solutions[0][0].first == m.gamma());
    CHECK(r.solutions[0][0].second == RationalFn(0));
    CHECK(r.solutions[1].size() == 2);
}

TEST_CASE_FIXTURE(Fixture, "obstructions vanish exactly when the field is polynomial") {
    ResolutionReport r = resolve_pole(v);
    const ResolutionStep& last = r.steps.back();
    auto specialize = [&](const RationalFn& d, const RationalFn& g) {
        std::map<VarId, RationalFn> b{{m.delta().id, d}, {m.gamma().id, g}};
        Triple out;
        for (std::size_t k = 0; k < 3; ++k) out[k] = last.field.components[k].substitute(b);
        return out;
    };
    for (auto [d, g] : std::vector<std::pair<RationalFn, RationalFn>>{{m.parse("3/7"), RationalFn(0)},
                                                                       {RationalFn(0), RationalFn(-1)}}) {
        for (const auto& comp : specialize(d, g)) CHECK_NOTHROW(exact_divide(comp.num(), comp.den()));
    }
    bool failed = false;
    for (const auto& comp : specialize(m.parse("2/5"), m.parse("1/3"))) try {
            exact_divide(comp.num(), comp.den());
        } catch (const NotDivisible&) {
            failed = true;
        }
    CHECK(failed);
    VectorField poly{m.affine(1), T("X1", "Y1", "1")};
    CHECK(holomorphy_obstructions(poly, m.affine(1).vars[0]).conditions.empty());
}

TEST_CASE_FIXTURE(Fixture, "solving conditions") {
    auto branches = solve_conditions({m.parse("delta*gamma").as_polynomial(), m.parse("gamma^2 + gamma").as_polynomial()});
    REQUIRE(branches.size() == 2);
    CHECK(branches[0] == ParameterBranch{{m.gamma(), RationalFn(0)}});
    CHECK(branches[1] == ParameterBranch{{m.delta(), RationalFn(0)}, {m.gamma(), RationalFn(-1)}});
    CHECK(solve_conditions({}).size() == 1);
    CHECK(solve_conditions({MultiPoly(1)}).empty());
}
