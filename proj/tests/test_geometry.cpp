#include <complex>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "phasespace/models.hpp"

using namespace phasespace;

namespace {

struct Fixture {
    ModelSpace m;
    Triple T(const std::string& a, const std::string& b, const std::string& c) const {
        return {m.parse(a), m.parse(b), m.parse(c)};
    }
};

std::complex<double> eval_c(const RationalFn& r, const std::map<VarId, std::complex<double>>& at) {
    auto ev = [&](const MultiPoly& p) {
        std::complex<double> acc = 0;
        for (const auto& t : p.terms()) {
            std::complex<double> term = t.coef.to_complex();
            for (const auto& [v, e] : t.mono.factors()) term *= std::pow(at.at(v), static_cast<int>(e));
            acc += term;
        }
        return acc;
    };
    return ev(r.num()) / ev(r.den());
}

}  // namespace

TEST_CASE_FIXTURE(Fixture, "pushforward under the identity keeps components") {
    VectorField v = system_three_wave(m, symbolic_three_wave(m));
    VectorField w = pushforward(v, ChartMap::identity(m.affine(0)));
    CHECK(w.components == v.components);
}

TEST_CASE_FIXTURE(Fixture, "pushforward of x^2 under inversion") {
    VectorField v{m.affine(0), T("x^2", "0", "0")};
    VectorField w = pushforward(v, m.projective_map(1));
    CHECK(w.components[0] == RationalFn(-1));
    CHECK(w.components[1] == m.parse("-Y1/X1"));
}

TEST_CASE_FIXTURE(Fixture, "three-wave system at (0,-1) is polynomial in the third glued chart") {
    auto atlas = atlas_three_wave(m, {RationalFn(0), RationalFn(-1)});
    VectorField w = pushforward(system_three_wave(m, {RationalFn(0), RationalFn(-1)}), atlas[3]);
    CHECK(w.is_polynomial());
}

TEST_CASE_FIXTURE(Fixture, "jacobian determinants") {
    CHECK(jacobian_determinant(ChartMap::identity(m.affine(0))) == RationalFn(1));
    CHECK(jacobian_determinant(atlas_modified(m, symbolic_modified(m))[1]) == RationalFn(1));
    CHECK(jacobian_determinant(atlas_three_wave(m, symbolic_three_wave(m))[3]) == RationalFn(1));
    CHECK(jacobian_determinant(m.projective_map(1)) == m.parse("-1/x^4"));
}

TEST_CASE_FIXTURE(Fixture, "jacobian determinant of the inverse is the reciprocal") {
    for (std::size_t j = 1; j <= 3; ++j) {
        ChartMap phi = m.projective_map(j);
        RationalFn back = jacobian_determinant(phi.inverted()).substitute(bindings_for(phi.target().vars, phi.forward()));
        CHECK(jacobian_determinant(phi) * back == RationalFn(1));
    }
}

TEST_CASE_FIXTURE(Fixture, "log-pole decomposition") {
    VectorField v = pushforward(system_three_wave(m, symbolic_three_wave(m)), m.projective_map(1));
    LogPoleForm f = log_pole_decomposition(v, m.affine(1).vars[0]);
    CHECK(f.boundary_index == 0);
    CHECK(f.g[0] == m.parse("-X1*Y1*delta - X1*Z1 - X1*gamma + 2*Y1^2").as_polynomial());
    CHECK(f.g[2] == m.parse("-Z1*(X1*Y1*delta + X1*Z1 + X1*gamma + 2*X1 - 2*Y1^2 + 2)").as_polynomial());
    VectorField bad{m.affine(1), T("0", "1/X1^2", "0")};
    CHECK_THROWS_AS(log_pole_decomposition(bad, m.affine(1).vars[0]), PoleTooHigh);
    VectorField poly{m.affine(1), T("Y1", "Z1^2", "X1")};
    LogPoleForm p = log_pole_decomposition(poly, m.affine(1).vars[0]);
    CHECK(p.g[0] == m.parse("Y1").as_polynomial());
    CHECK(p.g[1] == m.parse("X1*Z1^2").as_polynomial());
    CHECK(p.g[2] == m.parse("X1^2").as_polynomial());
}

TEST_CASE_FIXTURE(Fixture, "chart maps are verified at construction") {
    CHECK_THROWS_AS(ChartMap(m.affine(0), m.affine(1), T("1/x", "y/x", "z/x"), T("1/X1", "Y1/X1", "Z1")),
                    InvalidChartMap);
}

TEST_CASE_FIXTURE(Fixture, "pushforward is functorial") {
    VectorField v = system_modified(m, symbolic_modified(m));
    ChartMap phi = atlas_modified(m, symbolic_modified(m))[1];
    ChartMap psi = phi.inverted().then(m.projective_map(1));
    VectorField direct = pushforward(v, phi.then(psi));
    VectorField stepwise = pushforward(pushforward(v, phi), psi);
    CHECK(direct.components == stepwise.components);
}

TEST_CASE("pushforward agrees with the chain rule at numeric points") {
    ModelSpace m;
    VectorField v = system_three_wave(m, symbolic_three_wave(m));
    auto atlas = atlas_three_wave(m, symbolic_three_wave(m));
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (const auto& phi : atlas) {
        VectorField w = pushforward(v, phi);
        Matrix3 d = jacobian(phi.forward(), phi.source().vars);
        for (int trial = 0; trial < 5; ++trial) {
            std::map<VarId, std::complex<double>> at;
            at[m.delta().id] = {u(rng), u(rng)};
            at[m.gamma().id] = {u(rng), u(rng)};
            for (const auto& s : phi.source().vars) at[s.id] = {u(rng) + 2.0, u(rng)};
            std::map<VarId, std::complex<double>> image = at;
            for (std::size_t k = 0; k < 3; ++k) image[phi.target().vars[k].id] = eval_c(phi.forward()[k], at);
            for (std::size_t k = 0; k < 3; ++k) {
                std::complex<double> chain = 0;
                for (std::size_t j = 0; j < 3; ++j) chain += eval_c(d[k][j], at) * eval_c(v.components[j], at);
                std::complex<double> direct = eval_c(w.components[k], image);
                CHECK(std::abs(chain - direct) <= 1e-12 * std::max(1.0, std::abs(chain)));
            }
        }
    }
}

TEST_CASE("pushforward matches the inverse-route oracle on random charts") {
    auto t = testing::table_with({"x", "y", "z"}, {"p"});
    Chart base{"B", {*t->lookup("x"), *t->lookup("y"), *t->lookup("z")}, std::nullopt};
    oracles::RandomCharts gen(t, 41);
    for (int k = 0; k < 8; ++k) {
        ChartMap phi = gen.chart_from(base, 3);
        VectorField v = gen.field(base, *t->lookup("p"));
        VectorField w = pushforward(v, phi);
        Triple o = oracles::pushforward_via_inverse(v, phi);
        for (std::size_t c = 0; c < 3; ++c) CHECK(oracles::cross_equal(w.components[c], o[c]));
    }
}

TEST_CASE_FIXTURE(Fixture, "atlas text round trip") {
    auto atlas = atlas_modified(m, symbolic_modified(m));
    AtlasDocument doc = model_document(m, system_modified(m, symbolic_modified(m)), atlas, m.modified_parameters());
    std::ostringstream out;
    write_atlas(out, doc);
    std::istringstream in(out.str());
    AtlasDocument back = parse_atlas(in);
    REQUIRE(back.maps.size() == 3);
    REQUIRE(back.fields.size() == 1);
    CHECK(back.fields[0].components[2].str() == doc.fields[0].components[2].str());
    CHECK(back.maps[2].forward()[1].str() == doc.maps[2].forward()[1].str());
    CHECK(back.chart("MD3").boundary == std::optional<std::size_t>(0));
    std::ostringstream again;
    write_atlas(again, back);
    CHECK(again.str() == out.str());
}

TEST_CASE("atlas parser diagnostics") {
    std::istringstream bad_map("chart A x y z\nchart B u v w\nmap A -> B\nforward 1/x ; y ; z\ninverse u ; v ; w\nend\n");
    CHECK_THROWS_WITH_AS(parse_atlas(bad_map), doctest::Contains("inverse does not invert"), std::runtime_error);
    std::istringstream bad_kw("chart A x y z\nfoo\n");
    CHECK_THROWS_WITH_AS(parse_atlas(bad_kw), doctest::Contains("line 2"), std::runtime_error);
}
