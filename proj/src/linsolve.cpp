#include "phasespace/linsolve.hpp"

#include <algorithm>

namespace phasespace {

namespace {

using PolyRow = std::vector<MultiPoly>;

MultiPoly lcm(const MultiPoly& a, const MultiPoly& b) {
    if (a.is_constant()) return b;
    if (b.is_constant()) return a;
    return exact_divide(a, gcd(a, b)) * b;
}

PolyRow clear_denominators(const std::vector<RationalFn>& row, MultiPoly* multiplier = nullptr) {
    MultiPoly l(1);
    for (const auto& e : row) l = lcm(l, e.den());
    if (multiplier) *multiplier = l;
    PolyRow out;
    out.reserve(row.size());
    for (const auto& e : row) out.push_back(e.num() * exact_divide(l, e.den()));
    return out;
}

struct Echelon {
    std::vector<PolyRow> rows;  // pivot rows first, in pivot order
    std::vector<std::size_t> pivots;
};

/// Fraction-free (Bareiss) row echelon form on the first `ncols` columns.
/// Every entry stays a polynomial: each update is divided exactly by the
/// previous pivot.
Echelon eliminate(std::vector<PolyRow> rows, std::size_t ncols) {
    Echelon e;
    std::size_t top = 0;
    MultiPoly previous(1);
    for (std::size_t col = 0; col < ncols && top < rows.size(); ++col) {
        std::size_t best = rows.size();
        std::size_t best_cost = 0;
        for (std::size_t r = top; r < rows.size(); ++r) {
            if (rows[r][col].is_zero()) continue;
            std::size_t cost = rows[r][col].size() * 64 + rows[r][col].total_degree();
            if (best == rows.size() || cost < best_cost) {
                best = r;
                best_cost = cost;
            }
        }
        if (best == rows.size()) continue;
        std::swap(rows[top], rows[best]);
        const PolyRow& prow = rows[top];
        const MultiPoly& p = prow[col];
        for (std::size_t r = top + 1; r < rows.size(); ++r) {
            PolyRow& row = rows[r];
            const MultiPoly f = row[col];
            for (std::size_t k = col; k < row.size(); ++k) {
                MultiPoly updated = f.is_zero() || prow[k].is_zero() ? row[k] * p : row[k] * p - f * prow[k];
                row[k] = previous.is_constant() ? updated.scaled(previous.constant_value().inverse())
                                                : exact_divide(updated, previous);
            }
        }
        previous = p;
        e.pivots.push_back(col);
        ++top;
    }
    e.rows = std::move(rows);
    return e;
}

}  // namespace

LinearSolution linear_solve(const Matrix& a, const std::vector<RationalFn>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("linear_solve: row count mismatch");
    const std::size_t n = a.empty() ? 0 : a.front().size();
    std::vector<PolyRow> rows;
    std::vector<MultiPoly> multipliers(a.size());
    for (std::size_t r = 0; r < a.size(); ++r) {
        if (a[r].size() != n) throw std::invalid_argument("linear_solve: ragged matrix");
        std::vector<RationalFn> aug = a[r];
        aug.push_back(b[r]);
        rows.push_back(clear_denominators(aug, &multipliers[r]));
    }
    Echelon e = eliminate(rows, n);
    const std::size_t rank = e.pivots.size();
    for (std::size_t r = rank; r < e.rows.size(); ++r) {
        if (e.rows[r][n].is_zero()) continue;
        // redo with an identity block to recover the row multipliers
        std::vector<PolyRow> tracked = rows;
        for (std::size_t i = 0; i < tracked.size(); ++i)
            for (std::size_t j = 0; j < tracked.size(); ++j) tracked[i].push_back(MultiPoly(i == j ? 1 : 0));
        Echelon t = eliminate(tracked, n);
        for (std::size_t k = rank; k < t.rows.size(); ++k) {
            if (t.rows[k][n].is_zero()) continue;
            std::vector<RationalFn> y;
            RationalFn value;
            for (std::size_t j = 0; j < rows.size(); ++j) {
                y.push_back(RationalFn(t.rows[k][n + 1 + j] * multipliers[j]));
                value += y.back() * b[j];
            }
            throw InconsistentSystem(std::move(y), value);
        }
    }
    LinearSolution sol;
    sol.rank = rank;
    sol.pivot_columns = e.pivots;
    std::vector<bool> is_pivot(n, false);
    for (std::size_t c : e.pivots) is_pivot[c] = true;
    // x with the free unknowns fixed, solved upward through the pivot rows
    auto back_substitute = [&](std::vector<RationalFn> x, bool homogeneous) {
        for (std::size_t k = rank; k-- > 0;) {
            const PolyRow& row = e.rows[k];
            const std::size_t c = e.pivots[k];
            RationalFn acc = homogeneous ? RationalFn(0) : RationalFn(row[n]);
            for (std::size_t j = c + 1; j < n; ++j)
                if (!row[j].is_zero() && !x[j].is_zero()) acc -= RationalFn(row[j]) * x[j];
            x[c] = acc / RationalFn(row[c]);
        }
        return x;
    };
    sol.particular = back_substitute(std::vector<RationalFn>(n, RationalFn(0)), false);
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        std::vector<RationalFn> v(n, RationalFn(0));
        v[f] = RationalFn(1);
        sol.nullspace.push_back(back_substitute(std::move(v), true));
    }
    return sol;
}

std::size_t matrix_rank(const Matrix& a) {
    if (a.empty()) return 0;
    std::vector<PolyRow> rows;
    for (const auto& r : a) rows.push_back(clear_denominators(r));
    return eliminate(rows, a.front().size()).pivots.size();
}

}  // namespace phasespace
