#include <random>
#include <sstream>

#include "doctest.h"
#include "phasespace/models.hpp"
#include "phasespace/numerics.hpp"
#include "phasespace/singular.hpp"
#include "support.hpp"

using namespace phasespace;

namespace {

struct Fixture {
    ModelSpace m;
    ModifiedParams zero{RationalFn(0), RationalFn(0), RationalFn(0), RationalFn(0), RationalFn(0)};
    ThreeWaveParams regular{RationalFn(1), RationalFn(0)};

    NumericAtlas modified(const ModifiedParams& a) const { return NumericAtlas(system_modified(m, a), atlas_modified(m, a)); }
    NumericAtlas three_wave(const ThreeWaveParams& p, bool strict = true) const {
        return NumericAtlas(system_three_wave(m, p), atlas_three_wave(m, p), strict);
    }
    NumericAtlas base_only(const std::string& a, const std::string& b, const std::string& c) const {
        return NumericAtlas(VectorField{m.affine(0), {m.parse(a), m.parse(b), m.parse(c)}}, {});
    }
};

IntegratorOptions tight(double tol = 1e-12) {
    IntegratorOptions o;
    o.tol = tol;
    return o;
}

double relative_distance(const State& a, const State& b) {
    double d = 0;
    for (std::size_t i = 0; i < 3; ++i) d = std::max(d, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
    return d;
}

State in_base(const NumericAtlas& atlas, const TrajectoryPoint& p) { return atlas.convert(p.state, p.chart, 0); }

}  // namespace

TEST_CASE_FIXTURE(Fixture, "compiled evaluation matches exact evaluation") {
    VectorField v = system_modified(m, {m.parse("1/2"), m.parse("-3"), m.parse("2/9"), m.parse("4"), m.parse("1/5")});
    std::map<VarId, GaussianRational> exact{{m.affine(0).vars[0].id, GaussianRational(mpq_class(2, 3))},
                                            {m.affine(0).vars[1].id, GaussianRational(mpq_class(-5, 7), mpq_class(1))},
                                            {m.affine(0).vars[2].id, GaussianRational(mpq_class(3))}};
    State s{Complex(2.0 / 3), Complex(-5.0 / 7, 1), Complex(3)};
    for (std::size_t k = 0; k < 3; ++k) {
        GaussianRational e = v.components[k].evaluate(exact);
        Complex c = CompiledRational(v.components[k], v.chart.vars)(s);
        CHECK(std::abs(c - Complex(e.re().get_d(), e.im().get_d())) < 1e-13);
    }
    RationalFn r = m.parse("(x + y)/(z - 1)");
    CHECK(std::abs(CompiledRational(r, v.chart.vars)(s) - (s[0] + s[1]) / (s[2] - 1.0)) < 1e-14);
    CHECK_THROWS_AS(CompiledRational(m.parse("delta*x"), v.chart.vars), std::invalid_argument);
}

TEST_CASE_FIXTURE(Fixture, "chart round trips") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-2, 2);
    for (const NumericAtlas& atlas : {modified(zero), modified({m.parse("1/3"), m.parse("-1"), m.parse("2"), m.parse("1/7"), m.parse("-3/5")}),
                                      three_wave(regular)}) {
        REQUIRE(atlas.size() == 4);
        double worst = 0;
        for (int trial = 0; trial < 200; ++trial) {
            State s{Complex(u(rng), u(rng)), Complex(u(rng), u(rng)), Complex(u(rng), u(rng))};
            if (std::abs(s[0]) < 0.05) continue;
            for (std::size_t c = 1; c < atlas.size(); ++c) {
                worst = std::max(worst, relative_distance(atlas.convert(atlas.convert(s, 0, c), c, 0), s));
                worst = std::max(worst, relative_distance(atlas.convert(atlas.convert(s, c, 0), 0, c), s));
            }
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE_FIXTURE(Fixture, "strict atlases reject non-polynomial charts") {
    ThreeWaveParams off{m.parse("2/5"), m.parse("1/3")};
    CHECK_THROWS_AS(three_wave(off), std::invalid_argument);
    CHECK(three_wave(off, false).size() == 3);
    CHECK_THROWS_AS(NumericAtlas(system_three_wave(m, regular), {m.projective_map(1).inverted()}), std::invalid_argument);
}

TEST_CASE_FIXTURE(Fixture, "constant trajectory on the invariant ray") {
    ThreeWaveParams trivial{RationalFn(0), RationalFn(0)};
    NumericAtlas atlas = three_wave(trivial);
    Trajectory t = integrate(atlas, {0, {Complex(0.7, -0.2), 0, 0}, 0, 0}, {2.0, Complex(2, 1)});
    CHECK(t.switches.empty());
    for (const auto& p : t.points) CHECK(relative_distance(p.state, {Complex(0.7, -0.2), 0, 0}) == 0);
    CHECK(t.back().t == Complex(2, 1));
}

TEST_CASE_FIXTURE(Fixture, "single step converges at fifth order") {
    NumericAtlas atlas = modified(zero);
    State y{Complex(0.2, 0.1), Complex(0.3), Complex(-1, 0.2)};
    std::vector<double> errors;
    for (double h : {0.05, 0.025, 0.0125}) {
        // step-doubling reference: two half steps
        State half = dormand_prince_step(atlas, 0, dormand_prince_step(atlas, 0, y, h / 2).state, h / 2).state;
        errors.push_back(relative_distance(dormand_prince_step(atlas, 0, y, h).state, half));
    }
    for (std::size_t k = 1; k < errors.size(); ++k) {
        double order = std::log2(errors[k - 1] / errors[k]);
        CHECK(order > 5.5);
        CHECK(order < 6.5);
    }
}

TEST_CASE_FIXTURE(Fixture, "tolerance controls the error") {
    NumericAtlas atlas = modified(zero);
    TrajectoryPoint start{0, {0, 0.1, -1}, 0, 0};
    Trajectory coarse = integrate(atlas, start, {1.0}, tight(1e-8));
    Trajectory halved = integrate(atlas, start, {1.0}, tight(5e-9));
    Trajectory fine = integrate(atlas, start, {1.0}, tight(1e-10));
    Trajectory reference = integrate(atlas, start, {1.0}, tight(1e-14));
    CHECK(halved.back().error < coarse.back().error);
    double ratio = static_cast<double>(halved.points.size()) / static_cast<double>(coarse.points.size());
    CHECK(ratio > 1.0);
    CHECK(ratio < 1.4);
    double moved = relative_distance(fine.back().state, coarse.back().state);
    CHECK(moved < 10 * coarse.back().error);
    CHECK(relative_distance(fine.back().state, reference.back().state) < relative_distance(coarse.back().state, reference.back().state));
}

TEST_CASE_FIXTURE(Fixture, "integration through a movable pole") {
    NumericAtlas atlas = modified(zero);
    TrajectoryPoint start{0, {0, 0.1, -1}, 0, 0};
    Trajectory through = integrate(atlas, start, {3.0}, tight());
    REQUIRE_FALSE(through.switches.empty());
    CHECK(atlas.name(through.switches[0].to) == "MD3");
    PoleFit fit = fit_pole(atlas, pole_segment(atlas, through, 0, 0.1));
    CHECK(std::abs(fit.location - 1.564) < 0.01);
    CHECK(fit.exponents == std::array<int, 3>{1, -2, 2});
    std::vector<Complex> detour{fit.location - 0.5};
    const double pi = std::acos(-1.0);
    for (int k = 1; k <= 64; ++k) detour.push_back(fit.location + std::polar(0.5, pi - pi * k / 64));
    detour.push_back(3.0);
    Trajectory around = integrate(atlas, start, detour, tight());
    CHECK(around.back().t == Complex(3.0));
    CHECK(relative_distance(in_base(atlas, through.back()), in_base(atlas, around.back())) <= 1e-9);
}

TEST_CASE_FIXTURE(Fixture, "pole fit on the three-wave system") {
    NumericAtlas atlas = three_wave(regular);
    Trajectory t = integrate(atlas, {0, {0, 0.5, -2}, 0, 0}, {4.0}, tight());
    REQUIRE(t.switches.size() >= 1);
    CHECK(atlas.name(t.switches[0].to) == "TW3");
    PoleFit fit = fit_pole(atlas, pole_segment(atlas, t, 0, 0.1));
    CHECK(fit.exponents == std::array<int, 3>{1, 0, 2});
    CHECK(fit.residual < 1e-3);
    CHECK(std::abs(fit.location - Complex(3 * std::acos(-1.0) / 4)) < 1e-6);
    CHECK(std::abs(fit.coefficients[1] - 0.5) < 1e-6);
    CHECK(std::abs(fit.coefficients[2] + 1.0) < 1e-4);
    bool balance = false;
    for (const auto& b : painleve_leading_orders(system_three_wave(m, regular), 2))
        if (b.exponents == fit.exponents) balance = true;
    CHECK(balance);
}

TEST_CASE_FIXTURE(Fixture, "pole fit on a generic start") {
    NumericAtlas atlas = three_wave(regular);
    Trajectory t = integrate(atlas, {0, {-0.2, 0.1, -3}, 0, 0}, {4.0}, tight());
    REQUIRE_FALSE(t.switches.empty());
    PoleFit fit = fit_pole(atlas, pole_segment(atlas, t, 0, 0.1));
    CHECK(fit.exponents == std::array<int, 3>{1, 0, 2});
    CHECK(std::abs(fit.coefficients[1] - 0.5) < 1e-6);
    CHECK(std::abs(fit.coefficients[2] + 1.0) < 1e-4);
}

TEST_CASE_FIXTURE(Fixture, "linear growth is not a pole") {
    NumericAtlas atlas = base_only("x", "2*y", "-z");
    Trajectory t = integrate(atlas, {0, {1, 1, 1}, 0, 0}, {3.0});
    CHECK_THROWS_AS(fit_pole(atlas, t.points), FitAmbiguous);
    std::vector<TrajectoryPoint> few(t.points.begin(), t.points.begin() + 3);
    CHECK_THROWS_AS(fit_pole(atlas, few), FitAmbiguous);
}

TEST_CASE_FIXTURE(Fixture, "blow-up without a chart underflows") {
    NumericAtlas atlas = base_only("x^2", "0", "0");
    CHECK_THROWS_AS(integrate(atlas, {0, {1, 0, 0}, 0, 0}, {2.0}), StepUnderflow);
    try {
        integrate(atlas, {0, {1, 0, 0}, 0, 0}, {2.0});
    } catch (const StepUnderflow& e) {
        CHECK(std::abs(e.time() - 1.0) < 1e-3);
    }
}

TEST_CASE_FIXTURE(Fixture, "monodromy loops") {
    NumericAtlas atlas = modified(zero);
    TrajectoryPoint start{0, {0, 0.1, -1}, 0, 0};
    CHECK(monodromy_check(atlas, start, Complex(0.3, 0.1), 0.2, tight()).deviation <= 1e-9);
    Trajectory through = integrate(atlas, start, {3.0}, tight());
    PoleFit fit = fit_pole(atlas, pole_segment(atlas, through, 0, 0.1));
    MonodromyReport around = monodromy_check(atlas, start, fit.location, 0.5, tight());
    CHECK(around.deviation <= 1e-6);
    CHECK(around.loop.back().t == around.loop.points.front().t);
}

TEST_CASE_FIXTURE(Fixture, "monodromy detects branching when holomorphy fails") {
    ThreeWaveParams off{RationalFn(1), m.parse("1/2")};
    NumericAtlas atlas = three_wave(off, false);
    TrajectoryPoint start{0, {0, 0.3, -2}, 0, 0};
    Complex blow_up;
    try {
        integrate(atlas, start, {5.0}, tight());
        FAIL("expected the trajectory to leave every chart");
    } catch (const StepUnderflow& e) {
        blow_up = e.time();
    }
    double deviation = monodromy_check(atlas, start, blow_up, 0.2, tight()).deviation;
    CHECK(deviation > 1e-3);
    ThreeWaveParams on{RationalFn(1), RationalFn(0)};
    NumericAtlas good = three_wave(on);
    Trajectory t = integrate(good, start, {5.0}, tight());
    PoleFit fit = fit_pole(good, pole_segment(good, t, 0, 0.1));
    CHECK(monodromy_check(good, start, fit.location, 0.2, tight()).deviation <= 1e-9);
}

TEST_CASE_FIXTURE(Fixture, "trajectory output") {
    NumericAtlas atlas = modified(zero);
    Trajectory t = integrate(atlas, {0, {0, 0.1, -1}, 0, 0}, {3.0}, tight(1e-8));
    std::ostringstream lines, csv;
    write_records(lines, atlas, t);
    write_csv(csv, atlas, t);
    std::istringstream in(lines.str());
    std::string line;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        double tre, tim;
        std::string chart;
        fields >> tre >> tim >> chart;
        CHECK((chart == "U0" || chart == "MD3"));
        ++count;
    }
    CHECK(count == t.points.size());
    CHECK(csv.str().rfind("t_re,t_im,chart,x_re,x_im,y_re,y_im,z_re,z_im,error\n", 0) == 0);
}
