#include "phasespace/numerics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace phasespace {

namespace {

Complex to_complex(const GaussianRational& g) { return {g.re().get_d(), g.im().get_d()}; }

bool finite(const State& s) {
    for (const auto& c : s)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

CompiledTriple compile(const Triple& t, const std::array<Symbol, 3>& vars) {
    return {{CompiledRational(t[0], vars), CompiledRational(t[1], vars), CompiledRational(t[2], vars)}};
}

}  // namespace

std::vector<CompiledRational::Term> CompiledRational::compile(const MultiPoly& p, const std::array<Symbol, 3>& vars) {
    std::vector<Term> out;
    for (const auto& t : p.terms()) {
        Term c{to_complex(t.coef), {0, 0, 0}};
        std::uint32_t seen = 0;
        for (std::size_t k = 0; k < 3; ++k) {
            c.exps[k] = t.mono.exponent(vars[k].id);
            seen += c.exps[k];
        }
        if (seen != t.mono.degree())
            throw std::invalid_argument("unspecialized symbol in " + p.str() + "; numeric work needs exact parameter values");
        out.push_back(c);
    }
    return out;
}

CompiledRational::CompiledRational(const RationalFn& r, const std::array<Symbol, 3>& vars)
    : num_(compile(r.num(), vars)), den_(compile(r.den(), vars)), polynomial_(r.is_polynomial()) {
    if (polynomial_) {
        Complex d = den_.empty() ? Complex(1) : den_[0].coef;
        for (auto& t : num_) t.coef /= d;
    }
}

Complex CompiledRational::eval(const std::vector<Term>& terms, const State& s) {
    Complex acc = 0;
    for (const auto& t : terms) {
        Complex v = t.coef;
        for (std::size_t k = 0; k < 3; ++k)
            for (unsigned e = 0; e < t.exps[k]; ++e) v *= s[k];
        acc += v;
    }
    return acc;
}

Complex CompiledRational::operator()(const State& s) const {
    if (polynomial_) return eval(num_, s);
    return eval(num_, s) / eval(den_, s);
}

double max_norm(const State& s) {
    return std::max({std::abs(s[0]), std::abs(s[1]), std::abs(s[2])});
}

NumericAtlas::NumericAtlas(const VectorField& base, const std::vector<ChartMap>& atlas, bool strict) {
    names_.push_back(base.chart.name);
    fields_.push_back(compile(base.components, base.chart.vars));
    Triple id{RationalFn::variable(base.chart.vars[0]), RationalFn::variable(base.chart.vars[1]),
              RationalFn::variable(base.chart.vars[2])};
    to_base_.push_back(compile(id, base.chart.vars));
    from_base_.push_back(to_base_.back());
    for (const auto& phi : atlas) {
        if (phi.source().name != base.chart.name)
            throw std::invalid_argument("atlas map " + phi.source().name + " -> " + phi.target().name +
                                        " does not start at " + base.chart.name);
        if (phi.target().name == base.chart.name) continue;
        VectorField w = pushforward(base, phi);
        if (!w.is_polynomial()) {
            if (strict) throw std::invalid_argument("field is not polynomial in chart " + phi.target().name);
            continue;
        }
        names_.push_back(phi.target().name);
        fields_.push_back(compile(w.components, phi.target().vars));
        to_base_.push_back(compile(phi.inverse(), phi.target().vars));
        from_base_.push_back(compile(phi.forward(), base.chart.vars));
    }
}

std::size_t NumericAtlas::index(const std::string& name) const {
    for (std::size_t k = 0; k < names_.size(); ++k)
        if (names_[k] == name) return k;
    throw std::invalid_argument("no chart named " + name);
}

State NumericAtlas::convert(const State& s, std::size_t from, std::size_t to) const {
    if (from == to) return s;
    State b = from == 0 ? s : to_base_.at(from)(s);
    return to == 0 ? b : from_base_.at(to)(b);
}

namespace {

// Dormand–Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

State axpy(const State& y, Complex h, std::initializer_list<std::pair<double, const State*>> terms) {
    State out = y;
    for (std::size_t i = 0; i < 3; ++i) {
        Complex acc = 0;
        for (const auto& [c, k] : terms) acc += c * (*k)[i];
        out[i] += h * acc;
    }
    return out;
}

}  // namespace

StepResult dormand_prince_step(const NumericAtlas& atlas, std::size_t chart, const State& y, Complex dt) {
    auto f = [&](const State& s) { return atlas.field(chart, s); };
    State k1 = f(y);
    State k2 = f(axpy(y, dt, {{a21, &k1}}));
    State k3 = f(axpy(y, dt, {{a31, &k1}, {a32, &k2}}));
    State k4 = f(axpy(y, dt, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    State k5 = f(axpy(y, dt, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    State k6 = f(axpy(y, dt, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    StepResult r;
    r.state = axpy(y, dt, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    State k7 = f(r.state);
    for (std::size_t i = 0; i < 3; ++i)
        r.error[i] = dt * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    return r;
}

namespace {

class Stepper {
public:
    Stepper(const NumericAtlas& atlas, const IntegratorOptions& options, Trajectory& out)
        : atlas_(atlas), opt_(options), out_(out) {}

    void run(TrajectoryPoint start, const std::vector<Complex>& path) {
        cur_ = start;
        out_.points.push_back(cur_);
        for (Complex target : path) segment(target);
    }

private:
    void segment(Complex target) {
        Complex t0 = cur_.t;
        double length = std::abs(target - t0);
        if (length == 0) return;
        Complex dir = (target - t0) / length;
        double s = 0;
        if (h_ <= 0) h_ = std::min(length, 1e-2);
        while (s < length) {
            if (++steps_ > opt_.max_steps) throw StepUnderflow("step limit exceeded", cur_.t);
            double h = std::min(h_, length - s);
            bool last = h >= length - s;
            if (h < 1e-14 * std::max(1.0, std::abs(cur_.t))) throw StepUnderflow("step size underflow", cur_.t);
            const State& y = cur_.state;
            StepResult step = dormand_prince_step(atlas_, cur_.chart, y, dir * h);
            double err = 0, abs_err = 0;
            bool ok = finite(step.state) && finite(step.error);
            if (ok)
                for (std::size_t i = 0; i < 3; ++i) {
                    double scale = opt_.tol * (1 + std::max(std::abs(y[i]), std::abs(step.state[i])));
                    err = std::max(err, std::abs(step.error[i]) / scale);
                    abs_err = std::max(abs_err, std::abs(step.error[i]));
                }
            if (!ok || !(err <= 1)) {
                ++out_.rejected;
                h_ = h * (ok ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2);
                continue;
            }
            s += h;
            cur_.t = last ? target : t0 + dir * s;
            cur_.state = step.state;
            cur_.error += abs_err;
            out_.points.push_back(cur_);
            double factor = err == 0 ? 5 : 0.9 * std::pow(err, -0.7 / 5) * std::pow(err_prev_, 0.4 / 5);
            err_prev_ = std::max(err, 1e-4);
            if (!last) h_ = h * std::clamp(factor, 0.2, 5.0);
            maybe_switch();
        }
    }

    void maybe_switch() {
        double norm = max_norm(cur_.state);
        if (norm <= opt_.switch_threshold) return;
        std::size_t best = cur_.chart;
        double best_norm = norm;
        State best_state = cur_.state;
        for (std::size_t c = 0; c < atlas_.size(); ++c) {
            if (c == cur_.chart) continue;
            State image = atlas_.convert(cur_.state, cur_.chart, c);
            if (!finite(image)) continue;
            double n = max_norm(image);
            if (n < best_norm) {
                best = c;
                best_norm = n;
                best_state = image;
            }
        }
        if (best == cur_.chart || best_norm * opt_.switch_factor > norm) return;
        out_.switches.push_back({cur_.t, cur_.chart, best, out_.points.size()});
        cur_.chart = best;
        cur_.state = best_state;
        out_.points.push_back(cur_);
    }

    const NumericAtlas& atlas_;
    IntegratorOptions opt_;
    Trajectory& out_;
    TrajectoryPoint cur_;
    double h_ = 0;
    double err_prev_ = 1e-4;
    std::size_t steps_ = 0;
};

}  // namespace

Trajectory integrate(const NumericAtlas& atlas, const TrajectoryPoint& start, const std::vector<Complex>& path,
                     const IntegratorOptions& options) {
    if (start.chart >= atlas.size()) throw std::invalid_argument("start chart outside the atlas");
    if (!finite(start.state)) throw std::invalid_argument("start state is not finite");
    Trajectory out;
    Stepper(atlas, options, out).run(start, path);
    return out;
}

std::vector<TrajectoryPoint> segment_near(const Trajectory& trajectory, Complex center, double window) {
    std::vector<TrajectoryPoint> out;
    for (const auto& p : trajectory.points)
        if (std::abs(p.t - center) <= window) out.push_back(p);
    return out;
}

std::vector<TrajectoryPoint> pole_segment(const NumericAtlas& atlas, const Trajectory& trajectory, std::size_t event,
                                          double window) {
    if (event >= trajectory.switches.size()) throw std::out_of_range("no such switch event");
    std::size_t first = trajectory.switches[event].point;
    std::size_t last = event + 1 < trajectory.switches.size() ? trajectory.switches[event + 1].point : trajectory.points.size();
    std::size_t peak = first;
    double best = -1;
    for (std::size_t i = first; i < last; ++i) {
        const auto& p = trajectory.points[i];
        State b = atlas.convert(p.state, p.chart, 0);
        double n = finite(b) ? max_norm(b) : std::numeric_limits<double>::infinity();
        if (n > best) {
            best = n;
            peak = i;
        }
    }
    return segment_near(trajectory, trajectory.points[peak].t, window);
}

PoleFit fit_pole(const NumericAtlas& atlas, const std::vector<TrajectoryPoint>& segment, double threshold) {
    std::vector<Complex> ts;
    std::vector<State> xs;
    for (const auto& p : segment) {
        State b = atlas.convert(p.state, p.chart, 0);
        if (!finite(b)) continue;
        if (!ts.empty() && ts.back() == p.t) continue;
        ts.push_back(p.t);
        xs.push_back(b);
    }
    const std::size_t n = ts.size();
    if (n < 6) throw FitAmbiguous("too few samples for a pole fit", std::numeric_limits<double>::infinity());

    std::size_t peak = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (max_norm(xs[i]) > max_norm(xs[peak])) peak = i;
    std::size_t k = 0;
    for (std::size_t j = 1; j < 3; ++j)
        if (std::abs(xs[peak][j]) > std::abs(xs[peak][k])) k = j;

    // x/ẋ = −(t − t₁)/m + O((t − t₁)²): polynomial fit, then a local refit
    // on the samples nearest the root
    std::vector<Complex> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = xs[i][k] / atlas.field(0, xs[i])[k];
    for (const auto& v : g)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw FitAmbiguous("field vanishes on the segment", std::numeric_limits<double>::infinity());
    Complex origin = ts[peak], root = 0, slope = 0;
    double misfit = 0;
    auto fit_root = [&](const std::vector<std::size_t>& rows, int degree) {
        Eigen::MatrixXcd a(rows.size(), degree + 1);
        Eigen::VectorXcd b(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            Complex dt = ts[rows[r]] - origin, power = 1;
            for (int d = 0; d <= degree; ++d, power *= dt) a(r, d) = power;
            b(r) = g[rows[r]];
        }
        Eigen::VectorXcd q = a.colPivHouseholderQr().solve(b);
        misfit = (a * q - b).norm() / b.norm();
        auto value = [&](Complex x, bool derivative) {
            Complex acc = 0;
            for (int d = degree; d >= (derivative ? 1 : 0); --d)
                acc = acc * x + (derivative ? static_cast<double>(d) : 1.0) * q(d);
            return acc;
        };
        for (int it = 0; it < 50; ++it) {
            Complex der = value(root, true);
            if (der == Complex(0)) break;
            Complex step = value(root, false) / der;
            root -= step;
            if (std::abs(step) < 1e-15 * (1 + std::abs(root))) break;
        }
        slope = value(root, true);
    };
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    fit_root(rows, 2);
    std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(ts[a] - origin - root) < std::abs(ts[b] - origin - root);
    });
    rows.resize(std::min<std::size_t>(n, 10));
    fit_root(rows, 3);
    double m = slope == Complex(0) ? std::numeric_limits<double>::infinity() : (-1.0 / slope).real();
    if (!std::isfinite(m) || m < 0.5 || m > 20)
        throw FitAmbiguous("no pole: growth does not follow a power law", std::isfinite(misfit) ? misfit : 1.0);

    PoleFit fit;
    fit.location = origin + root;
    // log|x_j| = A − e_j log|τ| + Re(c₁τ + c₂τ²), τ = t − t₁
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(ts[i] - fit.location) > 1e-9) used.push_back(i);
    const int corrections = used.size() >= 12 ? 2 : used.size() >= 8 ? 1 : 0;
    Eigen::MatrixXd l(used.size(), 2 + 2 * corrections);
    for (std::size_t r = 0; r < used.size(); ++r) {
        Complex tau = ts[used[r]] - fit.location, power = 1;
        l(r, 0) = 1;
        l(r, 1) = -std::log(std::abs(tau));
        for (int c = 0; c < corrections; ++c) {
            power *= tau;
            l(r, 2 + 2 * c) = power.real();
            l(r, 3 + 2 * c) = power.imag();
        }
    }
    auto qr = l.colPivHouseholderQr();
    double defect = 0;
    std::size_t nearest = used.front();
    for (std::size_t i : used)
        if (std::abs(ts[i] - fit.location) < std::abs(ts[nearest] - fit.location)) nearest = i;
    for (std::size_t j = 0; j < 3; ++j) {
        Eigen::VectorXd y(used.size());
        for (std::size_t r = 0; r < used.size(); ++r) y(r) = std::log(std::abs(xs[used[r]][j]));
        if (!y.allFinite()) throw FitAmbiguous("component vanishes on the segment", 1.0);
        Eigen::VectorXd c = qr.solve(y);
        fit.raw_exponents[j] = c(1);
        fit.exponents[j] = static_cast<int>(std::lround(c(1)));
        defect = std::max(defect, std::abs(c(1) - fit.exponents[j]));
        fit.coefficients[j] = xs[nearest][j] * std::pow(ts[nearest] - fit.location, fit.exponents[j]);
    }
    fit.residual = std::max(misfit, defect);
    if (fit.residual > threshold) throw FitAmbiguous("pole fit residual above threshold", fit.residual);
    return fit;
}

MonodromyReport monodromy_check(const NumericAtlas& atlas, const TrajectoryPoint& start, Complex center, double radius,
                                const IntegratorOptions& options, std::size_t vertices) {
    if (radius <= 0 || vertices < 3) throw std::invalid_argument("monodromy loop needs a positive radius and 3+ vertices");
    // enter the circle at the point nearest the start
    double phase = start.t == center ? 0.0 : std::arg(start.t - center);
    Complex on_circle = center + std::polar(radius, phase);
    Trajectory lead = integrate(atlas, start, {on_circle}, options);
    const TrajectoryPoint& begin = lead.back();
    std::vector<Complex> loop;
    const double pi = std::acos(-1.0);
    for (std::size_t k = 1; k <= vertices; ++k)
        loop.push_back(center +
                       std::polar(radius, phase + 2 * pi * static_cast<double>(k) / static_cast<double>(vertices)));
    loop.back() = on_circle;
    MonodromyReport report;
    report.loop = integrate(atlas, begin, loop, options);
    State end = atlas.convert(report.loop.back().state, report.loop.back().chart, begin.chart);
    double diff = 0;
    for (std::size_t i = 0; i < 3; ++i) diff = std::max(diff, std::abs(end[i] - begin.state[i]));
    report.deviation = finite(end) ? diff / std::max(1.0, max_norm(begin.state)) : std::numeric_limits<double>::infinity();
    return report;
}

namespace {

void emit(std::ostream& out, const NumericAtlas& atlas, const Trajectory& trajectory, char sep) {
    char buf[64];
    for (const auto& p : trajectory.points) {
        auto num = [&](double v) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << buf;
        };
        num(p.t.real());
        out << sep;
        num(p.t.imag());
        out << sep << atlas.name(p.chart);
        for (const auto& c : p.state) {
            out << sep;
            num(c.real());
            out << sep;
            num(c.imag());
        }
        out << sep;
        num(p.error);
        out << '\n';
    }
}

}  // namespace

void write_records(std::ostream& out, const NumericAtlas& atlas, const Trajectory& trajectory) {
    emit(out, atlas, trajectory, ' ');
}

void write_csv(std::ostream& out, const NumericAtlas& atlas, const Trajectory& trajectory) {
    out << "t_re,t_im,chart,x_re,x_im,y_re,y_im,z_re,z_im,error\n";
    emit(out, atlas, trajectory, ',');
}

}  // namespace phasespace
