#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "phasespace/geometry.hpp"

namespace phasespace {

using Complex = std::complex<double>;
using State = std::array<Complex, 3>;

/// A rational function of the three chart variables, evaluated in complex
/// double precision. Every other symbol must already be specialized.
class CompiledRational {
public:
    CompiledRational() = default;
    CompiledRational(const RationalFn& r, const std::array<Symbol, 3>& vars);
    Complex operator()(const State& s) const;

private:
    struct Term {
        Complex coef;
        std::array<unsigned, 3> exps;
    };
    static std::vector<Term> compile(const MultiPoly& p, const std::array<Symbol, 3>& vars);
    static Complex eval(const std::vector<Term>& terms, const State& s);
    std::vector<Term> num_, den_;
    bool polynomial_ = true;
};

struct CompiledTriple {
    std::array<CompiledRational, 3> f;
    State operator()(const State& s) const { return {f[0](s), f[1](s), f[2](s)}; }
};

double max_norm(const State& s);

/// The field and the maps of an atlas compiled for numeric work. Chart 0 is
/// the base chart; the other charts are reached through the base.
class NumericAtlas {
public:
    /// `base` is the field on the source chart of every map. With strict set,
    /// a chart in which the field is not polynomial is an error; otherwise
    /// such charts are left out.
    NumericAtlas(const VectorField& base, const std::vector<ChartMap>& atlas, bool strict = true);

    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t chart) const { return names_.at(chart); }
    std::size_t index(const std::string& name) const;

    State field(std::size_t chart, const State& s) const { return fields_.at(chart)(s); }
    /// Coordinates of the same point in another chart.
    State convert(const State& s, std::size_t from, std::size_t to) const;

private:
    std::vector<std::string> names_;
    std::vector<CompiledTriple> fields_, to_base_, from_base_;
};

struct TrajectoryPoint {
    Complex t;
    State state;
    std::size_t chart = 0;
    /// Accumulated local error estimate up to this point.
    double error = 0;
};

struct SwitchEvent {
    Complex t;
    std::size_t from = 0, to = 0;
    /// Index in Trajectory::points of the first point in the new chart.
    std::size_t point = 0;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    std::vector<SwitchEvent> switches;
    std::size_t rejected = 0;

    const TrajectoryPoint& back() const { return points.back(); }
};

class StepUnderflow : public std::runtime_error {
public:
    StepUnderflow(const std::string& what, Complex t) : std::runtime_error(what), t_(t) {}
    Complex time() const { return t_; }

private:
    Complex t_;
};

struct StepResult {
    State state;
    /// Difference between the embedded 5th- and 4th-order solutions.
    State error;
};
/// One Dormand–Prince 5(4) step of dy/dt = v(y) in `chart` over the complex increment dt.
StepResult dormand_prince_step(const NumericAtlas& atlas, std::size_t chart, const State& y, Complex dt);

struct IntegratorOptions {
    double tol = 1e-10;
    double switch_threshold = 10;
    double switch_factor = 4;
    std::size_t max_steps = 200000;
};

/// Dormand–Prince 5(4) with PI step control along the piecewise-linear path
/// start.t -> path[0] -> path[1] -> ...; switches chart when the state's max
/// norm exceeds the threshold and another chart is smaller by the factor.
Trajectory integrate(const NumericAtlas& atlas, const TrajectoryPoint& start, const std::vector<Complex>& path,
                     const IntegratorOptions& options = {});

class FitAmbiguous : public std::runtime_error {
public:
    FitAmbiguous(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

struct PoleFit {
    Complex location;
    std::array<int, 3> exponents{};
    std::array<double, 3> raw_exponents{};
    State coefficients{};
    /// Relative misfit of the power law; also covers the distance of the
    /// raw exponents from integers.
    double residual = 0;
};

/// Fits x_k ≈ a_k (t − t₁)^(−e_k) on base-chart samples near a pole. The
/// location comes from the dominant component through x/ẋ ≈ −(t − t₁)/m.
PoleFit fit_pole(const NumericAtlas& atlas, const std::vector<TrajectoryPoint>& segment, double threshold = 0.05);

/// Samples of `trajectory` within `window` of `center` (in time).
std::vector<TrajectoryPoint> segment_near(const Trajectory& trajectory, Complex center, double window);

/// Samples within `window` of the point of largest base-chart norm between
/// switch event `event` and the next switch.
std::vector<TrajectoryPoint> pole_segment(const NumericAtlas& atlas, const Trajectory& trajectory, std::size_t event,
                                          double window);

struct MonodromyReport {
    /// |end − start|∞ / max(1, |start|∞) in the chart of the loop start.
    double deviation = 0;
    Trajectory loop;
};

/// Integrates from start to the nearest point of the circle, then once
/// around it (as a polygon with `vertices` corners) back to that point.
MonodromyReport monodromy_check(const NumericAtlas& atlas, const TrajectoryPoint& start, Complex center, double radius,
                                const IntegratorOptions& options = {}, std::size_t vertices = 96);

/// One record per line: t_re t_im chart x_re x_im y_re y_im z_re z_im error.
void write_records(std::ostream& out, const NumericAtlas& atlas, const Trajectory& trajectory);
/// The same columns as CSV with a header row.
void write_csv(std::ostream& out, const NumericAtlas& atlas, const Trajectory& trajectory);

}  // namespace phasespace
