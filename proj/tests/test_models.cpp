#include <sstream>

#include "doctest.h"
#include "phasespace/models.hpp"
#include "support.hpp"

using namespace phasespace;

namespace {

struct Fixture {
    ModelSpace m;
    ModifiedParams alpha = symbolic_modified(m);
    VectorField v1 = system_three_wave(m, symbolic_three_wave(m));
    VectorField v2 = system_modified(m, alpha);

    ThreeWaveParams tw(const std::string& d, const std::string& g) const { return {m.parse(d), m.parse(g)}; }
};

bool all_polynomial(const std::vector<ChartVerdict>& verdicts) {
    for (const auto& v : verdicts)
        if (!v.polynomial) return false;
    return true;
}

}  // namespace

TEST_CASE_FIXTURE(Fixture, "three-wave system components") {
    CHECK(v1.components[0] == m.parse("-2*y^2 + gamma*x + delta*y + z"));
    CHECK(v1.components[1] == m.parse("2*x*y - delta*x + gamma*y"));
    CHECK(v1.components[2] == m.parse("-2*x*z - 2*z"));
    VectorField at = system_three_wave(m, tw("1", "0"));
    CHECK(at.components[1] == m.parse("2*x*y - x"));
    CHECK(at.is_polynomial());
}

TEST_CASE_FIXTURE(Fixture, "modified system at zero parameters") {
    ModifiedParams zero{RationalFn(0), RationalFn(0), RationalFn(0), RationalFn(0), RationalFn(0)};
    VectorField f = system_modified(m, zero);
    CHECK(f.components[0] == m.parse("-2*y^2 + z"));
    CHECK(f.components[1] == m.parse("2*x*y"));
    CHECK(f.components[2] == m.parse("-2*x*z"));
}

TEST_CASE_FIXTURE(Fixture, "comparison against the three-wave system") {
    ComparisonReport r = compare_systems(m);
    CHECK(r.difference[0].is_zero());
    CHECK(r.difference[1].is_zero());
    CHECK(r.difference[2] == m.parse("-2*z"));
}

TEST_CASE_FIXTURE(Fixture, "glued charts for the three-wave system at the solution points") {
    for (auto p : {tw("0", "-1"), tw("delta", "0"), tw("5/3", "0")}) {
        auto verdicts = verify_atlas_holomorphy(system_three_wave(m, p), atlas_three_wave(m, p));
        REQUIRE(verdicts.size() == 4);
        CHECK(all_polynomial(verdicts));
        for (const auto& v : verdicts) CHECK(v.jacobian == RationalFn(1));
    }
}

TEST_CASE_FIXTURE(Fixture, "glued charts fail off the solution set") {
    auto p = symbolic_three_wave(m);
    auto verdicts = verify_atlas_holomorphy(v1, atlas_three_wave(m, p));
    CHECK(verdicts[1].polynomial);
    CHECK(verdicts[2].polynomial);
    CHECK_FALSE(verdicts[3].polynomial);
    CHECK(verdicts[3].chart == "TW3");
    REQUIRE_FALSE(verdicts[3].witnesses.empty());
    CHECK(verdicts[3].witnesses[0] == m.parse("x3").as_polynomial());
    auto off = tw("2/5", "1/3");
    CHECK_FALSE(all_polynomial(verify_atlas_holomorphy(system_three_wave(m, off), atlas_three_wave(m, off))));
}

TEST_CASE_FIXTURE(Fixture, "glued charts for the modified system are polynomial for symbolic parameters") {
    auto verdicts = verify_atlas_holomorphy(v2, atlas_modified(m, alpha));
    REQUIRE(verdicts.size() == 4);
    CHECK(all_polynomial(verdicts));
    for (const auto& v : verdicts) CHECK(v.jacobian == RationalFn(1));
    CHECK(verdicts[3].field.components[0].is_polynomial());
}

TEST_CASE_FIXTURE(Fixture, "glued chart maps are inverse pairs") {
    for (const auto& phi : atlas_modified(m, alpha)) {
        ChartMap back = phi.inverted();
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(substitute(phi.inverse(), bindings_for(phi.target().vars, phi.forward()))[k] ==
                  RationalFn::variable(phi.source().vars[k]));
        CHECK(back.target().name == phi.source().name);
    }
}

TEST_CASE_FIXTURE(Fixture, "pi is a symmetry") {
    for (const auto& r : verify_symmetry(v2, symmetry_pi(m))) CHECK(r.is_zero());
}

TEST_CASE_FIXTURE(Fixture, "s residual") {
    Triple first = verify_symmetry(v2, symmetry_s(m));
    ModelSpace fresh;
    Triple second = verify_symmetry(system_modified(fresh, symbolic_modified(fresh)), symmetry_s(fresh));
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(first[k].is_zero());
        CHECK(first[k].str() == second[k].str());
    }
    CHECK(symmetry_s(m).state[0].den() == m.parse("y - alpha5").as_polynomial());
}

TEST_CASE_FIXTURE(Fixture, "symmetries of the three-wave system do not hold off the modified family") {
    SymmetryMap flip{"flip", m.affine(0).vars, {m.parse("x"), m.parse("-y"), m.parse("z")}, {}};
    Triple r = verify_symmetry(v1, flip);
    CHECK_FALSE(r[1].is_zero());
}

TEST_CASE_FIXTURE(Fixture, "group relations") {
    std::map<std::string, SymmetryMap> maps{{"s", symmetry_s(m)}, {"pi", symmetry_pi(m)}};
    auto verdicts = verify_group_relations(maps, {{"pi", "pi"}, {"s", "pi", "s", "pi"}, {"s", "s"}, {"s", "pi"}});
    REQUIRE(verdicts.size() == 4);
    CHECK(verdicts[0].relation == "pi*pi");
    CHECK(verdicts[0].identity);
    CHECK(verdicts[1].identity);
    CHECK(verdicts[2].identity);
    CHECK_FALSE(verdicts[3].identity);
    CHECK_THROWS_AS(verify_group_relations(maps, {{}}), std::invalid_argument);
    CHECK(relation_identity(symmetry_identity(m), "1").identity);
}

TEST_CASE_FIXTURE(Fixture, "s applied twice at a numeric point") {
    // independent of after(): substitute the numeric image back into s
    SymmetryMap s = symmetry_s(m);
    std::map<VarId, RationalFn> point{{m.affine(0).vars[0].id, m.parse("2/3")},
                                      {m.affine(0).vars[1].id, m.parse("-5/7 + I")},
                                      {m.affine(0).vars[2].id, m.parse("3")}};
    const char* values[5] = {"1/2", "-3", "2/9", "4", "1/5"};
    for (std::size_t k = 1; k <= 5; ++k) point[m.alpha(k).id] = m.parse(values[k - 1]);
    std::map<VarId, RationalFn> image;
    for (std::size_t k = 0; k < 3; ++k) image[s.vars[k].id] = s.state[k].substitute(point);
    for (const auto& [sym, e] : s.params) image[sym.id] = e.substitute(point);
    for (std::size_t k = 0; k < 3; ++k) CHECK(s.state[k].substitute(image) == point.at(s.vars[k].id));
}

TEST_CASE_FIXTURE(Fixture, "model documents round-trip through text") {
    AtlasDocument doc = model_document(m, v2, atlas_modified(m, alpha), m.modified_parameters());
    std::ostringstream first;
    write_atlas(first, doc);
    std::istringstream in(first.str());
    AtlasDocument back = parse_atlas(in);
    std::ostringstream second;
    write_atlas(second, back);
    CHECK(first.str() == second.str());
    CHECK(back.maps.size() == 3);
    CHECK(back.charts.size() == 4);
    REQUIRE(back.field("U0"));
    auto verdicts = verify_atlas_holomorphy(*back.field("U0"),
                                            {ChartMap::identity(back.chart("U0")), back.maps[0], back.maps[1], back.maps[2]});
    CHECK(all_polynomial(verdicts));
}
