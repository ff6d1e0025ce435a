#include "phasespace/singular.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "phasespace/roots.hpp"
#include "phasespace/text.hpp"

namespace phasespace {

namespace {

std::size_t index_of(const Chart& c, const Symbol& s) {
    for (std::size_t k = 0; k < 3; ++k)
        if (c.vars[k] == s) return k;
    throw std::invalid_argument(s.name() + " is not a coordinate of chart " + c.name);
}

RationalFn at_point(const RationalFn& r, const Chart& c, const Triple& coords) {
    return r.substitute(bindings_for(c.vars, coords));
}

MultiPoly numerator_at(const MultiPoly& p, const std::map<VarId, RationalFn>& b) { return RationalFn(p).substitute(b).num(); }

bool has_state(const MultiPoly& p) {
    for (VarId v : p.variables())
        if (p.table()->kind(v) == SymbolKind::state) return true;
    return false;
}

/// Default values for symbols left unbound when a numeric specialization
/// is required.
GaussianRational default_value(std::size_t k) {
    static const long nums[] = {3, 5, 7, 11, 13, 17, 19, 23};
    return GaussianRational(mpq_class(nums[k % 8], 29 + static_cast<long>(k)));
}

}  // namespace

std::string AccessiblePoint::str() const {
    std::string out = chart.name + "(";
    for (std::size_t k = 0; k < 3; ++k) out += (k ? ", " : "") + coords[k].str();
    return out + ")";
}

AccessibleSet find_accessible(const VectorField& v) {
    if (!v.chart.boundary) throw std::invalid_argument("chart " + v.chart.name + " has no boundary coordinate");
    return find_accessible(v, v.chart.boundary_symbol());
}

AccessibleSet find_accessible(const VectorField& v, const Symbol& boundary) {
    LogPoleForm f = log_pole_decomposition(v, boundary);
    const std::size_t b = f.boundary_index, ia = (b + 1) % 3 < (b + 2) % 3 ? (b + 1) % 3 : (b + 2) % 3,
                      ic = 3 - b - ia;
    const Chart& chart = v.chart;
    const Symbol A = chart.vars[ia], C = chart.vars[ic];
    std::map<VarId, RationalFn> on_boundary{{boundary.id, RationalFn(0)}};
    MultiPoly ha = numerator_at(f.g[ia], on_boundary), hc = numerator_at(f.g[ic], on_boundary);
    auto in_plane = [&](const MultiPoly& p) { return p.contains(A.id) || p.contains(C.id); };

    AccessibleSet out;
    if (ha.is_zero() && hc.is_zero())
        throw PositiveDimensional("every point of the boundary of " + chart.name + " is singular");
    if (ha.is_zero() || hc.is_zero()) {
        const MultiPoly& other = ha.is_zero() ? hc : ha;
        if (in_plane(other)) throw PositiveDimensional("singular curve on the boundary of " + chart.name);
        return out;
    }
    MultiPoly common = gcd(ha, hc);
    if (in_plane(common))
        throw PositiveDimensional("common factor " + common.str() + " on the boundary of " + chart.name);

    std::vector<std::pair<RationalFn, RationalFn>> solutions;
    auto add_along = [&](const RationalFn& a0) {
        std::map<VarId, RationalFn> sub{{A.id, a0}};
        MultiPoly ra = numerator_at(ha, sub), rc = numerator_at(hc, sub);
        if (ra.is_zero() && rc.is_zero())
            throw PositiveDimensional("singular line " + A.name() + " = " + a0.str() + " on " + chart.name);
        MultiPoly g = gcd(ra, rc);
        if (g.is_zero() || g.degree(C.id) == 0) return;
        RootsResult roots = find_roots(g, C);
        if (!roots.complete()) out.unresolved.push_back(roots.residual);
        for (auto& [c0, mult] : roots.roots) solutions.emplace_back(a0, c0);
    };
    if (!ha.contains(C.id) && !hc.contains(C.id)) {
        // both curves are lines A = const: a common root exists only if gcd in A is nontrivial
        MultiPoly g = gcd(ha, hc);
        if (g.degree(A.id) > 0) throw PositiveDimensional("singular line on the boundary of " + chart.name);
        return out;
    }
    MultiPoly r = resultant(ha, hc, C.id);
    if (r.degree(A.id) > 0) {
        RootsResult roots = find_roots(r, A);
        if (!roots.complete()) out.unresolved.push_back(roots.residual);
        for (auto& [a0, mult] : roots.roots) add_along(a0);
    }
    for (auto& [a0, c0] : solutions) {
        Triple coords;
        coords[b] = RationalFn(0);
        coords[ia] = a0;
        coords[ic] = c0;
        bool duplicate = false;
        for (const auto& p : out.points)
            if (p.coords == coords) duplicate = true;
        if (duplicate) continue;
        for (std::size_t k = 0; k < 3; ++k)
            if (k != b && !RationalFn(f.g[k]).substitute(bindings_for(chart.vars, coords)).is_zero())
                throw std::logic_error("accessible point failed verification: " + chart.name);
        out.points.push_back(AccessiblePoint{chart, coords, boundary, ""});
    }
    return out;
}

Matrix3 linear_part(const VectorField& v, const AccessiblePoint& p) {
    LogPoleForm f = log_pole_decomposition(v, p.boundary);
    const Chart& c = v.chart;
    MultiPoly x1 = MultiPoly::variable(p.boundary);
    Matrix3 a;
    for (std::size_t k = 0; k < 3; ++k) {
        MultiPoly w = k == f.boundary_index ? f.g[k] * x1 : f.g[k];
        for (std::size_t j = 0; j < 3; ++j) a[k][j] = at_point(RationalFn(w.derivative(c.vars[j].id)), c, p.coords);
    }
    return a;
}

std::string to_string(Integrality i) {
    switch (i) {
        case Integrality::integer: return "integer";
        case Integrality::non_integer: return "non-integer";
        case Integrality::parameter_dependent: return "parameter-dependent";
        case Integrality::undefined: return "undefined";
    }
    return "?";
}

bool LocalIndex::integral() const {
    if (!ratios) return false;
    return std::all_of(integrality.begin(), integrality.end(), [](Integrality i) { return i == Integrality::integer; });
}

std::string LocalIndex::certificate() const {
    if (spectral) return "spectral";
    std::string out;
    for (std::size_t k : permutation) out += (out.empty() ? "" : ",") + std::to_string(k);
    return out;
}

MultiPoly characteristic_polynomial(const Matrix3& a, const TablePtr& table) {
    Symbol lambda = table->intern("_lambda", SymbolKind::state);
    Matrix3 m;
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) m[r][c] = (r == c ? RationalFn::variable(lambda) : RationalFn(0)) - a[r][c];
    RationalFn d = determinant(m);
    return d.num().monic();
}

namespace {

std::vector<std::vector<std::size_t>> candidate_orders(std::size_t boundary) {
    std::vector<std::size_t> rest;
    for (std::size_t k = 0; k < 3; ++k)
        if (k != boundary) rest.push_back(k);
    std::vector<std::vector<std::size_t>> out{{boundary, rest[0], rest[1]}, {boundary, rest[1], rest[0]}};
    std::vector<std::size_t> perm{0, 1, 2};
    do {
        if (perm[0] != boundary) out.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

std::complex<double> numeric_value(const RationalFn& r) {
    std::map<VarId, GaussianRational> at;
    std::size_t k = 0;
    for (VarId v : r.variables()) at[v] = default_value(k++);
    return r.evaluate(at).to_complex();
}

}  // namespace

LocalIndex local_index_of(const Matrix3& a, std::size_t boundary, const TablePtr& table) {
    LocalIndex out;
    out.matrix = a;
    for (const auto& order : candidate_orders(boundary)) {
        bool lower = true;
        for (std::size_t i = 0; i < 3 && lower; ++i)
            for (std::size_t j = i + 1; j < 3; ++j)
                if (!a[order[i]][order[j]].is_zero()) lower = false;
        if (lower) {
            out.permutation = order;
            for (std::size_t k = 0; k < 3; ++k) out.eigenvalues[k] = a[order[k]][order[k]];
            break;
        }
    }
    if (out.permutation.empty()) {
        out.spectral = true;
        MultiPoly chi = characteristic_polynomial(a, table);
        Symbol lambda = *table->lookup("_lambda");
        RootsResult roots = find_roots(chi, lambda);
        if (!roots.complete())
            throw UnresolvedSpectrum("characteristic polynomial does not split: " + roots.residual.str());
        std::vector<RationalFn> spectrum;
        for (auto& [r, m] : roots.roots)
            for (unsigned k = 0; k < m; ++k) spectrum.push_back(r);
        const RationalFn& a11 = a[boundary][boundary];
        auto it = std::find(spectrum.begin(), spectrum.end(), a11);
        if (it == spectrum.end()) throw std::logic_error("boundary entry is not an eigenvalue");
        spectrum.erase(it);
        std::sort(spectrum.begin(), spectrum.end(), [](const RationalFn& x, const RationalFn& y) {
            auto cx = numeric_value(x), cy = numeric_value(y);
            if (cx.real() != cy.real()) return cx.real() > cy.real();
            if (cx.imag() != cy.imag()) return cx.imag() > cy.imag();
            return x.str() < y.str();
        });
        out.eigenvalues = {a11, spectrum[0], spectrum[1]};
    }
    if (out.eigenvalues[0].is_zero()) {
        out.integrality.fill(Integrality::undefined);
        return out;
    }
    std::array<RationalFn, 3> ratios;
    for (std::size_t k = 0; k < 3; ++k) {
        ratios[k] = out.eigenvalues[k] / out.eigenvalues[0];
        if (!ratios[k].is_constant())
            out.integrality[k] = Integrality::parameter_dependent;
        else
            out.integrality[k] = ratios[k].constant_value().is_integer() ? Integrality::integer : Integrality::non_integer;
    }
    out.ratios = ratios;
    return out;
}

LocalIndex local_index(const VectorField& v, const AccessiblePoint& p) {
    return local_index_of(linear_part(v, p), index_of(v.chart, p.boundary), v.chart.vars[0].table->shared());
}

std::string to_string(ComponentBehaviour b) {
    switch (b) {
        case ComponentBehaviour::power: return "power";
        case ComponentBehaviour::branch: return "branch";
        case ComponentBehaviour::logarithmic: return "logarithmic";
    }
    return "?";
}

namespace {

std::size_t numeric_rank(std::array<std::array<GaussianRational, 3>, 3> m) {
    std::size_t rank = 0;
    for (std::size_t c = 0; c < 3 && rank < 3; ++c) {
        std::size_t piv = rank;
        while (piv < 3 && m[piv][c].is_zero()) ++piv;
        if (piv == 3) continue;
        std::swap(m[piv], m[rank]);
        for (std::size_t r = rank + 1; r < 3; ++r) {
            GaussianRational f = m[r][c] / m[rank][c];
            for (std::size_t k = c; k < 3; ++k) m[r][k] -= f * m[rank][k];
        }
        ++rank;
    }
    return rank;
}

}  // namespace

AlphaTestReport alpha_test_of(const LocalIndex& index, const std::map<VarId, GaussianRational>& specialization) {
    std::map<VarId, GaussianRational> at = specialization;
    std::size_t k = 0;
    std::vector<std::size_t> order = index.permutation.empty() ? std::vector<std::size_t>{0, 1, 2} : index.permutation;
    auto eval = [&](const RationalFn& r) {
        for (VarId v : r.variables())
            if (!at.count(v)) at[v] = default_value(k++);
        return r.evaluate(at);
    };
    AlphaTestReport out;
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) out.reduced[r][c] = eval(index.matrix[order[r]][order[c]]);
    for (std::size_t i = 0; i < 3; ++i) out.eigenvalues[i] = eval(index.eigenvalues[i]);
    if (out.eigenvalues[0].is_zero()) throw std::domain_error("alpha test needs a nonzero boundary eigenvalue");
    for (std::size_t i = 0; i < 3; ++i) out.ratios[i] = out.eigenvalues[i] / out.eigenvalues[0];
    // geometric vs algebraic multiplicity decides logarithmic terms
    std::array<std::array<GaussianRational, 3>, 3> a;
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) a[r][c] = eval(index.matrix[r][c]);
    for (std::size_t i = 0; i < 3; ++i) {
        out.behaviour[i] = out.ratios[i].is_integer() ? ComponentBehaviour::power : ComponentBehaviour::branch;
    }
    std::vector<bool> done(3, false);
    for (std::size_t i = 0; i < 3; ++i) {
        if (done[i]) continue;
        std::vector<std::size_t> same;
        for (std::size_t j = i; j < 3; ++j)
            if (out.eigenvalues[j] == out.eigenvalues[i]) {
                same.push_back(j);
                done[j] = true;
            }
        auto shifted = a;
        for (std::size_t d = 0; d < 3; ++d) shifted[d][d] -= out.eigenvalues[i];
        std::size_t geometric = 3 - numeric_rank(shifted);
        for (std::size_t deficit = same.size() - std::min(same.size(), geometric); deficit > 0; --deficit)
            out.behaviour[same[same.size() - deficit]] = ComponentBehaviour::logarithmic;
    }
    for (std::size_t i = 0; i < 3; ++i) {
        std::string c = "C" + std::to_string(i + 1);
        std::string r = out.ratios[i].str();
        std::string power = out.ratios[i].is_integer() ? "T^" + r : "T^(" + r + ")";
        if (i == 0)
            out.closed_form[i] = out.eigenvalues[0].str() + "*T";
        else if (out.behaviour[i] == ComponentBehaviour::logarithmic)
            out.closed_form[i] = "(" + c + " + K" + std::to_string(i + 1) + "*log(T))*" + power;
        else
            out.closed_form[i] = c + "*" + power;
    }
    out.single_valued = std::all_of(out.behaviour.begin(), out.behaviour.end(),
                                    [](ComponentBehaviour b) { return b == ComponentBehaviour::power; });
    return out;
}

AlphaTestReport alpha_test(const VectorField& v, const AccessiblePoint& p,
                           const std::map<VarId, GaussianRational>& specialization) {
    return alpha_test_of(local_index(v, p), specialization);
}

namespace {

using Assignment = std::map<VarId, RationalFn>;

/// Branching solver for polynomial equations in `unknowns`; other symbols
/// are generic. Unknowns in `nonzero` may not vanish.
class BranchSolver {
public:
    BranchSolver(TablePtr table, std::set<VarId> unknowns, std::set<VarId> nonzero)
        : table_(std::move(table)), unknowns_(std::move(unknowns)), nonzero_(std::move(nonzero)) {}

    std::vector<Assignment> solve(const std::vector<MultiPoly>& eqs) {
        std::vector<Assignment> out;
        recurse(eqs, {}, out, 0);
        return out;
    }

private:
    bool has_unknown(const MultiPoly& p) const {
        for (VarId v : p.variables())
            if (unknowns_.count(v)) return true;
        return false;
    }

    MultiPoly strip_nonzero(const MultiPoly& p) const {
        Monomial m = monomial_content(p);
        Monomial drop;
        for (const auto& [v, e] : m.factors())
            if (nonzero_.count(v) || !unknowns_.count(v)) drop = drop * Monomial::var(v, e);
        if (drop.is_one()) return p;
        std::vector<Term> ts;
        for (const auto& t : p.terms()) ts.push_back({*t.mono.divide(drop), t.coef});
        return MultiPoly(p.table(), std::move(ts));
    }

    void recurse(std::vector<MultiPoly> eqs, Assignment assigned, std::vector<Assignment>& out, int depth) {
        if (depth > 12) return;
        std::vector<MultiPoly> live;
        for (auto& e : eqs) {
            MultiPoly q = assigned.empty() ? e : RationalFn(e).substitute(assigned).num();
            if (q.is_zero()) continue;
            q = strip_nonzero(q);
            if (!has_unknown(q)) return;  // nonzero for generic parameters
            live.push_back(q.monic());
        }
        if (live.empty()) {
            out.push_back(assigned);
            return;
        }
        // pick (equation, unknown) minimizing (number of unknowns, degree)
        std::size_t best_eq = 0;
        VarId best_var = 0;
        std::pair<std::size_t, std::uint32_t> best_key{SIZE_MAX, UINT32_MAX};
        for (std::size_t i = 0; i < live.size(); ++i) {
            std::size_t count = 0;
            for (VarId v : live[i].variables()) count += unknowns_.count(v);
            for (VarId v : live[i].variables()) {
                if (!unknowns_.count(v)) continue;
                std::pair<std::size_t, std::uint32_t> key{count, live[i].degree(v)};
                if (key < best_key) {
                    best_key = key;
                    best_eq = i;
                    best_var = v;
                }
            }
        }
        const MultiPoly& p = live[best_eq];
        MultiPoly content = content_in(p, best_var);
        if (has_unknown(content)) {
            std::vector<MultiPoly> alt = live;
            alt[best_eq] = content;
            recurse(alt, assigned, out, depth + 1);
        }
        MultiPoly prim = has_unknown(content) ? exact_divide(p, content) : p;
        RootsResult roots = find_roots(prim, table_->at(best_var));
        for (auto& [root, mult] : roots.roots) {
            if (root.is_zero() && nonzero_.count(best_var)) continue;
            Assignment next;
            try {
                for (auto& [v, e] : assigned) next[v] = e.substitute({{best_var, root}});
            } catch (const std::domain_error&) {
                continue;
            }
            next[best_var] = root;
            recurse(live, next, out, depth + 1);
        }
    }

    TablePtr table_;
    std::set<VarId> unknowns_, nonzero_;
};

}  // namespace

std::vector<Balance> painleve_leading_orders(const VectorField& v, int bound) {
    if (bound < 1) throw std::invalid_argument("painleve_leading_orders: bound must be >= 1");
    const Chart& chart = v.chart;
    TablePtr table = chart.vars[0].table->shared();
    std::array<MultiPoly, 3> f;
    for (std::size_t k = 0; k < 3; ++k) {
        auto p = polynomial_value(v.components[k]);
        if (!p) throw std::invalid_argument("painleve_leading_orders needs a polynomial field");
        f[k] = *p;
    }
    std::array<Symbol, 3> c{table->intern("_c1", SymbolKind::state), table->intern("_c2", SymbolKind::state),
                            table->intern("_c3", SymbolKind::state)};
    std::set<VarId> unknowns{c[0].id, c[1].id, c[2].id};
    const std::set<VarId> state = chart.var_ids();
    std::vector<Balance> out;
    std::array<int, 3> e{};
    for (e[0] = -bound; e[0] <= bound; ++e[0])
        for (e[1] = -bound; e[1] <= bound; ++e[1])
            for (e[2] = -bound; e[2] <= bound; ++e[2]) {
                if (std::max({e[0], e[1], e[2]}) <= 0) continue;
                // per component: LHS − RHS collected by order of singularity
                std::vector<MultiPoly> eqs;
                bool impossible = false;
                for (std::size_t k = 0; k < 3 && !impossible; ++k) {
                    std::map<int, MultiPoly> by_order;
                    if (e[k] != 0) by_order[e[k] + 1] += MultiPoly::variable(c[k]).scaled(GaussianRational(-e[k]));
                    for (const auto& [mono, coef] : f[k].coefficients_in(state)) {
                        int order = 0;
                        MultiPoly term = coef;
                        for (std::size_t j = 0; j < 3; ++j) {
                            std::uint32_t d = mono.exponent(chart.vars[j].id);
                            order += static_cast<int>(d) * e[j];
                            if (d) term *= MultiPoly::variable(c[j]).pow(d);
                        }
                        by_order[order] -= term;
                    }
                    // the most singular order with a nonzero total must balance
                    for (auto it = by_order.rbegin(); it != by_order.rend(); ++it) {
                        if (it->second.is_zero()) continue;
                        eqs.push_back(it->second);
                        break;
                    }
                }
                if (impossible) continue;
                BranchSolver solver(table, unknowns, unknowns);
                for (auto& sol : solver.solve(eqs)) {
                    Balance bal{e, {}, {}};
                    bool ok = true;
                    for (std::size_t k = 0; k < 3; ++k) {
                        auto it = sol.find(c[k].id);
                        if (it == sol.end()) {
                            bal.coefficients[k] = RationalFn::variable(c[k]);
                            bal.free.push_back(k);
                        } else {
                            bal.coefficients[k] = it->second;
                            if (it->second.is_zero()) ok = false;
                        }
                    }
                    for (const auto& eq : eqs)
                        if (!RationalFn(eq).substitute(sol).is_zero()) ok = false;
                    if (ok) out.push_back(std::move(bal));
                }
            }
    return out;
}

ChartMap weighted_chart(const Chart& base, int n, int p, const TablePtr& table) {
    Chart w{"W1-" + std::to_string(n) + "-" + std::to_string(p),
            {table->intern("X", SymbolKind::state), table->intern("Y", SymbolKind::state),
             table->intern("Z", SymbolKind::state)},
            0};
    RationalFn x = RationalFn::variable(base.vars[0]), y = RationalFn::variable(base.vars[1]),
               z = RationalFn::variable(base.vars[2]);
    RationalFn X = RationalFn::variable(w.vars[0]), Y = RationalFn::variable(w.vars[1]),
               Z = RationalFn::variable(w.vars[2]);
    return ChartMap(base, w, {RationalFn(1) / x, y * x.pow(-n), z * x.pow(-p)},
                    {RationalFn(1) / X, Y * X.pow(-n), Z * X.pow(-p)});
}

std::vector<BlowUpChart> blow_up(const VectorField& v, const AccessiblePoint& p, const std::optional<Triple>& shifts,
                                 const std::optional<std::array<BlowUpNames, 3>>& names) {
    const Chart& src = v.chart;
    if (p.chart.name != src.name) throw std::invalid_argument("point and field live on different charts");
    TablePtr table = src.vars[0].table->shared();
    Triple center = p.coords;
    if (shifts)
        for (std::size_t k = 0; k < 3; ++k) center[k] += (*shifts)[k];
    std::vector<BlowUpChart> out;
    for (std::size_t k = 0; k < 3; ++k) {
        BlowUpNames n;
        if (names) {
            n = (*names)[k];
        } else {
            n.chart = src.name + "/b" + std::to_string(k);
            for (std::size_t j = 0; j < 3; ++j) n.vars[j] = src.vars[j].name() + "_b" + std::to_string(k);
        }
        Chart tgt{n.chart, {}, k};
        for (std::size_t j = 0; j < 3; ++j) tgt.vars[j] = table->intern(n.vars[j], SymbolKind::state);
        Triple fwd, inv;
        RationalFn lead = RationalFn::variable(src.vars[k]) - center[k];
        RationalFn t = RationalFn::variable(tgt.vars[k]);
        for (std::size_t j = 0; j < 3; ++j) {
            RationalFn xj = RationalFn::variable(src.vars[j]) - center[j];
            fwd[j] = j == k ? xj : xj / lead;
            inv[j] = j == k ? t + center[k] : center[j] + RationalFn::variable(tgt.vars[j]) * t;
        }
        ChartMap phi(src, tgt, fwd, inv);
        out.push_back(BlowUpChart{k, phi, pushforward(v, phi)});
    }
    return out;
}

Obstruction holomorphy_obstructions(const VectorField& v, const Symbol& exceptional) {
    Obstruction out;
    const std::set<VarId> state = v.chart.var_ids();
    std::vector<MultiPoly> conditions;
    for (std::size_t k = 0; k < 3; ++k) {
        const RationalFn& r = v.components[k];
        std::uint32_t order = r.den().min_degree(exceptional.id);
        if (order != r.den().degree(exceptional.id))
            throw std::invalid_argument("denominator of component " + std::to_string(k + 1) +
                                        " is not a power of " + exceptional.name() + " times parameters");
        MultiPoly rest = exact_divide(r.den(), MultiPoly::monomial(Monomial::var(exceptional.id, order), 1, r.den().table()));
        if (has_state(rest))
            throw std::invalid_argument("component " + std::to_string(k + 1) + " has a pole off the exceptional divisor");
        MultiPoly singular_num(0);
        for (auto& [j, nj] : r.num().coefficients_in(exceptional.id)) {
            if (j >= order) continue;
            singular_num += nj * MultiPoly::monomial(Monomial::var(exceptional.id, j), 1, r.num().table());
            for (auto& [mono, coef] : nj.coefficients_in(state)) conditions.push_back(coef.monic());
        }
        out.singular_parts[k] = RationalFn(singular_num, r.den());
    }
    // drop duplicates and conditions implied by a divisor among the others
    std::sort(conditions.begin(), conditions.end(), [](const MultiPoly& a, const MultiPoly& b) {
        if (a.total_degree() != b.total_degree()) return a.total_degree() < b.total_degree();
        return a.str() < b.str();
    });
    for (const auto& c : conditions) {
        bool implied = false;
        for (const auto& kept : out.conditions)
            if (try_divide(c, kept)) implied = true;
        if (!implied) out.conditions.push_back(c);
    }
    return out;
}

std::vector<ParameterBranch> solve_conditions(const std::vector<MultiPoly>& conditions) {
    std::set<VarId> params;
    TablePtr table;
    for (const auto& c : conditions) {
        if (c.is_constant() && !c.is_zero()) return {};
        if (!table) table = c.table();
        for (VarId v : c.variables()) params.insert(v);
    }
    if (!table) return {ParameterBranch{}};
    BranchSolver solver(table, params, {});
    std::vector<Assignment> raw = solver.solve(conditions);
    // a branch is dropped when it lies inside another branch
    std::vector<Assignment> kept;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        bool dropped = false;
        for (std::size_t j = 0; j < raw.size() && !dropped; ++j) {
            if (i == j) continue;
            bool inside = true;
            for (const auto& [v, e] : raw[j]) {
                RationalFn lhs = raw[i].count(v) ? raw[i].at(v) : RationalFn::variable(table->at(v));
                if (!(lhs - e.substitute(raw[i])).is_zero()) inside = false;
            }
            bool equal = raw[i].size() == raw[j].size() && inside;
            if (inside && (!equal || j < i)) dropped = true;
        }
        if (!dropped) kept.push_back(raw[i]);
    }
    std::vector<ParameterBranch> out;
    for (const auto& a : kept) {
        ParameterBranch b;
        for (const auto& [v, e] : a) b.emplace_back(table->at(v), e);
        out.push_back(std::move(b));
    }
    return out;
}

ResolutionReport resolve_pole(const VectorField& v, int bound) {
    TablePtr table = v.chart.vars[0].table->shared();
    std::optional<Balance> chosen;
    for (auto& b : painleve_leading_orders(v, bound))
        if (b.exponents[0] == 1 && b.exponents[1] >= 0 && b.exponents[2] >= 0 && b.free.empty()) {
            chosen = b;
            break;
        }
    if (!chosen) throw std::runtime_error("no simple-pole balance with nonnegative weights");
    ChartMap weighted = weighted_chart(v.chart, chosen->exponents[1], chosen->exponents[2], table);
    VectorField field = pushforward(v, weighted);
    AccessibleSet points = find_accessible(field);
    std::optional<AccessiblePoint> point;
    std::optional<LocalIndex> index;
    for (const auto& p : points.points) {
        LocalIndex li = local_index(field, p);
        if (li.ratios && li.integral() && !li.eigenvalues[0].is_zero()) {
            point = p;
            index = li;
            break;
        }
    }
    if (!point) throw std::runtime_error("no accessible point with integral resonances on " + field.chart.name);
    long blowups = 1;
    for (std::size_t k = 1; k < 3; ++k)
        blowups = std::max(blowups, index->ratios->at(k).constant_value().re().get_num().get_si());

    std::vector<ResolutionStep> steps;
    VectorField current = field;
    AccessiblePoint center = *point;
    for (long s = 1; s <= blowups; ++s) {
        std::array<BlowUpNames, 3> names;
        const std::string tag = std::to_string(s);
        for (std::size_t k = 0; k < 3; ++k)
            names[k] = {field.chart.name + "/B" + tag + (k ? "." + std::to_string(k) : ""),
                        {"u" + tag + (k ? "_" + std::to_string(k) : ""), "v" + tag + (k ? "_" + std::to_string(k) : ""),
                         "w" + tag + (k ? "_" + std::to_string(k) : "")}};
        const std::size_t dir = *current.chart.boundary;
        std::vector<BlowUpChart> charts = blow_up(current, center, std::nullopt, names);
        const BlowUpChart& bc = charts.at(dir);
        steps.push_back(ResolutionStep{"blow up " + center.str(), bc.map, bc.field});
        current = bc.field;
        if (s < blowups) {
            AccessibleSet next = find_accessible(current);
            if (next.points.empty()) break;
            center = next.points.front();
        }
    }
    Obstruction obstruction = holomorphy_obstructions(current, current.chart.boundary_symbol());
    std::vector<ParameterBranch> solutions = solve_conditions(obstruction.conditions);
    return ResolutionReport{*chosen, weighted, field, points, *point, *index, steps, obstruction, solutions};
}

}  // namespace phasespace
