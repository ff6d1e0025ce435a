#include "phasespace/uniqueness.hpp"

namespace phasespace {

VectorField QuadraticAnsatz::instantiate(const std::vector<RationalFn>& values) const {
    if (values.size() != coefficients.size()) throw std::invalid_argument("ansatz expects 30 coefficient values");
    std::map<VarId, RationalFn> b;
    for (std::size_t k = 0; k < coefficients.size(); ++k) b[coefficients[k].id] = values[k];
    return VectorField{field.chart, substitute(field.components, b)};
}

QuadraticAnsatz quadratic_ansatz(const Chart& chart) {
    auto table = chart.vars[0].table->shared();
    QuadraticAnsatz a;
    a.field.chart = chart;
    VarId x = chart.vars[0].id, y = chart.vars[1].id, z = chart.vars[2].id;
    a.basis = {Monomial(),          Monomial::var(x),    Monomial::var(y),
               Monomial::var(z),    Monomial::var(x, 2), Monomial::var(x) * Monomial::var(y),
               Monomial::var(x) * Monomial::var(z),      Monomial::var(y, 2),
               Monomial::var(y) * Monomial::var(z),      Monomial::var(z, 2)};
    for (std::size_t k = 0; k < 3; ++k) {
        MultiPoly comp = MultiPoly::constant(0, table);
        for (std::size_t j = 0; j < a.basis.size(); ++j) {
            a.coefficients.push_back(table->intern("c" + std::to_string(10 * k + j + 1), SymbolKind::parameter));
            comp += MultiPoly::monomial(a.basis[j], 1, table) * MultiPoly::variable(a.coefficients.back());
        }
        a.field.components[k] = RationalFn(comp);
    }
    return a;
}

Matrix ConstraintSystem::matrix() const {
    Matrix m;
    for (const auto& c : constraints) m.push_back(c.row);
    return m;
}

ConstraintSystem build_constraints(const std::vector<ChartMap>& atlas, const QuadraticAnsatz& ansatz) {
    ConstraintSystem out{ansatz, {}, {}};
    std::set<VarId> unknowns;
    std::map<VarId, std::size_t> column;
    for (std::size_t k = 0; k < ansatz.coefficients.size(); ++k) {
        unknowns.insert(ansatz.coefficients[k].id);
        column[ansatz.coefficients[k].id] = k;
    }
    for (const auto& phi : atlas) {
        std::size_t before = out.constraints.size();
        VectorField w = pushforward(ansatz.field, phi);
        const Chart& target = phi.target();
        for (std::size_t k = 0; k < 3; ++k) {
            const RationalFn& r = w.components[k];
            if (r.is_polynomial()) continue;
            if (!target.boundary || !r.den().is_monomial())
                throw std::domain_error("denominator " + r.den().str() + " in chart " + target.name +
                                        " is not a power of the boundary coordinate");
            Symbol u = target.boundary_symbol();
            const Term& d = r.den().leading_term();
            unsigned depth = d.mono.exponent(u.id);
            if (d.mono.degree() != depth) throw std::domain_error("denominator " + r.den().str() + " in chart " + target.name + " is not a power of the boundary coordinate");
            std::set<VarId> state = target.var_ids();
            for (const auto& [mono, coef] : r.num().coefficients_in(state)) {
                unsigned e = mono.exponent(u.id);
                if (e >= depth) continue;
                Constraint c{target.name, k, depth - e, mono.without(u.id), std::vector<RationalFn>(unknowns.size())};
                for (const auto& [cm, alpha] : coef.coefficients_in(unknowns)) {
                    if (cm.degree() != 1) throw std::logic_error("ansatz constraint is not linear");
                    c.row[column.at(cm.factors()[0].first)] = RationalFn(alpha.scaled(d.coef.inverse()));
                }
                out.constraints.push_back(std::move(c));
            }
        }
        out.per_chart.emplace_back(target.name, out.constraints.size() - before);
    }
    return out;
}

UniquenessReport solve_ansatz(const ConstraintSystem& system, const Normalization& normalization,
                              const std::optional<VectorField>& reference) {
    UniquenessReport r;
    Matrix a = system.matrix();
    r.constraint_count = a.size();
    std::size_t n = system.ansatz.coefficients.size();
    r.rank = a.empty() ? 0 : matrix_rank(a);
    std::vector<RationalFn> b(a.size());
    std::vector<RationalFn> norm(n);
    norm.at(10 * normalization.component + normalization.monomial) = RationalFn(1);
    a.push_back(norm);
    b.push_back(normalization.value);
    LinearSolution s = linear_solve(a, b);
    r.nullspace_dimension = s.nullspace.size();
    r.coefficients = s.particular;
    r.nullspace = s.nullspace;
    r.recovered = system.ansatz.instantiate(s.particular);
    r.degree_two = true;
    for (std::size_t k = 0; k < 3; ++k) {
        bool quadratic = false;
        for (std::size_t j = 4; j < 10; ++j) quadratic = quadratic || !s.particular[10 * k + j].is_zero();
        r.degree_two = r.degree_two && quadratic;
    }
    if (reference) {
        Triple diff;
        r.matches_reference = true;
        for (std::size_t k = 0; k < 3; ++k) {
            diff[k] = r.recovered.components[k] - reference->components[k];
            r.matches_reference = r.matches_reference && diff[k].is_zero();
        }
        r.difference = diff;
    }
    return r;
}

}  // namespace phasespace
