#include "phasespace/roots.hpp"

#include <algorithm>
#include <complex>

#include <Eigen/Eigenvalues>

namespace phasespace {

namespace {

using cld = std::complex<long double>;

cld to_cld(const GaussianRational& g) {
    return {static_cast<long double>(g.re().get_d()), static_cast<long double>(g.im().get_d())};
}

GaussianRational eval_univariate(const std::vector<GaussianRational>& coeffs, const GaussianRational& x) {
    GaussianRational acc(0);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

mpz_class lcm_of_denominators(const std::vector<GaussianRational>& coeffs) {
    mpz_class l = 1;
    for (const auto& c : coeffs) {
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.re().get_den_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.im().get_den_mpz_t());
    }
    return l;
}

}  // namespace

std::vector<GaussianRational> gaussian_rational_roots(const std::vector<GaussianRational>& input) {
    std::vector<GaussianRational> coeffs = input;
    while (!coeffs.empty() && coeffs.back().is_zero()) coeffs.pop_back();
    std::vector<GaussianRational> roots;
    if (coeffs.size() < 2) return roots;
    std::size_t shift = 0;
    while (coeffs[shift].is_zero()) ++shift;
    if (shift) roots.emplace_back(0);
    coeffs.erase(coeffs.begin(), coeffs.begin() + static_cast<long>(shift));
    const std::size_t n = coeffs.size() - 1;
    if (n == 0) return roots;
    if (n == 1) {
        roots.push_back(-coeffs[0] / coeffs[1]);
        return roots;
    }
    // denominators of the roots divide the norm of the integral leading coefficient
    mpz_class l = lcm_of_denominators(coeffs);
    GaussianRational lc_int = coeffs.back() * GaussianRational(mpq_class(l));
    mpz_class bound = lc_int.norm().get_num();
    if (bound < 1) bound = 1;

    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(static_cast<long>(n), static_cast<long>(n));
    std::complex<double> lead = coeffs.back().to_complex();
    for (std::size_t k = 0; k < n; ++k) {
        companion(0, static_cast<long>(k)) = -coeffs[n - 1 - k].to_complex() / lead;
        if (k + 1 < n) companion(static_cast<long>(k + 1), static_cast<long>(k)) = 1.0;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    std::vector<cld> lcoeffs;
    for (const auto& c : coeffs) lcoeffs.push_back(to_cld(c));
    for (long k = 0; k < static_cast<long>(n); ++k) {
        cld z(solver.eigenvalues()[k].real(), solver.eigenvalues()[k].imag());
        for (int iter = 0; iter < 8; ++iter) {  // Newton polish
            cld p = 0, dp = 0;
            for (auto it = lcoeffs.rbegin(); it != lcoeffs.rend(); ++it) {
                dp = dp * z + p;
                p = p * z + *it;
            }
            if (std::abs(dp) == 0.0L) break;
            z -= p / dp;
        }
        GaussianRational candidate(rational_approximation(z.real(), bound), rational_approximation(z.imag(), bound));
        if (!eval_univariate(coeffs, candidate).is_zero()) continue;
        if (std::find(roots.begin(), roots.end(), candidate) == roots.end()) roots.push_back(candidate);
    }
    return roots;
}

std::optional<RationalFn> ratfn_sqrt(const RationalFn& r) {
    if (r.den().is_constant()) {
        auto s = poly_sqrt(r.as_polynomial());
        if (!s) return std::nullopt;
        return RationalFn(*s);
    }
    auto s = poly_sqrt(r.num() * r.den());
    if (!s) return std::nullopt;
    return RationalFn(*s, r.den());
}

namespace {

struct Piece {
    MultiPoly factor;
    unsigned mult;
};

std::vector<std::pair<RationalFn, unsigned>> linear_roots_only(const MultiPoly& p, const Symbol& var, int depth);

/// Partial factorization of a polynomial in the parameters: monomial
/// content, square-free parts, and their linear factors.
void collect_pieces(const MultiPoly& q, int depth, std::vector<Piece>& out) {
    if (q.is_constant()) return;
    Monomial m = monomial_content(q);
    for (const auto& [v, e] : m.factors()) out.push_back({MultiPoly::monomial(Monomial::var(v), 1, q.table()), e});
    MultiPoly rest = q;
    if (!m.is_one()) {
        std::vector<Term> ts;
        for (const auto& t : q.terms()) ts.push_back({*t.mono.divide(m), t.coef});
        rest = MultiPoly(q.table(), std::move(ts));
    }
    if (rest.is_constant()) return;
    VarId w = *rest.variables().begin();
    MultiPoly content = content_in(rest, w);
    if (!content.is_constant()) {
        collect_pieces(content, depth, out);
        rest = exact_divide(rest, content);
    }
    for (auto& [f, mult] : squarefree_decomposition(rest, w)) {
        MultiPoly remaining = f;
        if (depth > 0 && f.degree(w) > 1) {
            Symbol ws = q.table()->at(w);
            for (const auto& [root, rm] : linear_roots_only(f, ws, depth - 1)) {
                MultiPoly lin = (MultiPoly::variable(ws) * root.den() - root.num()).monic();
                if (auto quotient = try_divide(remaining, lin)) {
                    remaining = *quotient;
                    out.push_back({lin, mult});
                }
            }
        }
        if (!remaining.is_constant()) out.push_back({remaining.monic(), mult});
    }
}

std::vector<MultiPoly> divisors_from(const std::vector<Piece>& pieces, const TablePtr& table, std::size_t cap) {
    std::vector<MultiPoly> divs{MultiPoly::constant(1, table)};
    for (const auto& piece : pieces) {
        std::vector<MultiPoly> next;
        for (const auto& d : divs) {
            MultiPoly acc = d;
            next.push_back(acc);
            for (unsigned k = 0; k < piece.mult && next.size() < cap; ++k) {
                acc *= piece.factor;
                next.push_back(acc);
            }
        }
        divs = std::move(next);
        if (divs.size() >= cap) break;
    }
    return divs;
}

std::vector<GaussianRational> coefficient_vector(const MultiPoly& p, VarId v, const std::map<VarId, GaussianRational>& at) {
    std::vector<GaussianRational> coeffs(p.degree(v) + 1, GaussianRational(0));
    for (auto& [e, c] : p.coefficients_in(v)) coeffs[e] = c.evaluate(at);
    return coeffs;
}

std::map<VarId, GaussianRational> specialization(const std::set<VarId>& params, unsigned attempt) {
    static const long primes[] = {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73};
    std::map<VarId, GaussianRational> at;
    std::size_t k = 0;
    for (VarId v : params) {
        long base = primes[(k + 3 * attempt) % 20];
        at[v] = GaussianRational(mpq_class(base + static_cast<long>(attempt), static_cast<long>(attempt % 3 + 2)));
        ++k;
    }
    return at;
}

/// A root r of the square-free polynomial f (degree >= 1) lying in Q(i)(params).
std::optional<RationalFn> find_linear_root(const MultiPoly& f, const Symbol& var, int depth) {
    const VarId v = var.id;
    std::set<VarId> params = f.variables();
    params.erase(v);
    const std::uint32_t d = f.degree(v);
    MultiPoly lc = f.coefficient(v, d), tc = f.coefficient(v, 0);
    if (params.empty()) {
        auto roots = gaussian_rational_roots(coefficient_vector(f, v, {}));
        if (roots.empty()) return std::nullopt;
        return RationalFn(MultiPoly::constant(roots.front(), f.table()));
    }
    std::vector<Piece> lc_pieces, tc_pieces;
    collect_pieces(lc, depth, lc_pieces);
    collect_pieces(tc, depth, tc_pieces);
    auto alphas = divisors_from(lc_pieces, f.table(), 128);
    auto betas = divisors_from(tc_pieces, f.table(), 128);

    std::map<VarId, GaussianRational> s;
    for (unsigned attempt = 0; attempt < 6; ++attempt) {
        s = specialization(params, attempt);
        if (!lc.evaluate(s).is_zero() && !tc.evaluate(s).is_zero()) break;
    }
    auto numeric_roots = gaussian_rational_roots(coefficient_vector(f, v, s));
    auto check_at = specialization(params, 7);
    MultiPoly x = MultiPoly::variable(var);
    for (const auto& rho : numeric_roots) {
        for (const auto& alpha : alphas) {
            GaussianRational alpha_s = alpha.evaluate(s);
            if (alpha_s.is_zero()) continue;
            for (const auto& beta : betas) {
                GaussianRational beta_s = beta.evaluate(s);
                if (beta_s.is_zero()) continue;
                GaussianRational c = rho * alpha_s / beta_s;
                // cheap screen at a second specialization, then the exact test
                GaussianRational a2 = alpha.evaluate(check_at);
                if (!a2.is_zero()) {
                    GaussianRational r2 = c * beta.evaluate(check_at) / a2;
                    auto cv = coefficient_vector(f, v, check_at);
                    if (!eval_univariate(cv, r2).is_zero()) continue;
                }
                MultiPoly lin = alpha * x - beta.scaled(c);
                if (try_divide(f, lin)) return RationalFn(beta.scaled(c), alpha);
            }
        }
    }
    return std::nullopt;
}

struct SplitResult {
    std::vector<RationalFn> roots;
    MultiPoly residual;
};

SplitResult split_squarefree(const MultiPoly& f, const Symbol& var, int depth, bool linear_only) {
    const VarId v = var.id;
    SplitResult out{{}, MultiPoly::constant(1, f.table())};
    MultiPoly work = f;
    MultiPoly x = MultiPoly::variable(var);
    while (work.degree(v) >= 1) {
        const std::uint32_t d = work.degree(v);
        if (d == 1) {
            out.roots.push_back(RationalFn(-work.coefficient(v, 0), work.coefficient(v, 1)));
            return out;
        }
        if (d == 2 && !linear_only) {
            RationalFn a = work.coefficient(v, 2), b = work.coefficient(v, 1), c = work.coefficient(v, 0);
            RationalFn disc = b * b - RationalFn(4) * a * c;
            if (auto s = ratfn_sqrt(disc)) {
                RationalFn two_a = RationalFn(2) * a;
                out.roots.push_back((-b + *s) / two_a);
                out.roots.push_back((-b - *s) / two_a);
                return out;
            }
            out.residual *= work;
            return out;
        }
        auto root = find_linear_root(work, var, depth);
        if (!root) {
            out.residual *= work;
            return out;
        }
        out.roots.push_back(*root);
        work = exact_divide(work, x * root->den() - root->num());
    }
    return out;
}

std::vector<std::pair<RationalFn, unsigned>> linear_roots_only(const MultiPoly& p, const Symbol& var, int depth) {
    std::vector<std::pair<RationalFn, unsigned>> roots;
    for (auto& [f, mult] : squarefree_decomposition(p, var.id)) {
        auto split = split_squarefree(f, var, depth, true);
        for (auto& r : split.roots) roots.emplace_back(r, mult);
    }
    return roots;
}

}  // namespace

RootsResult find_roots(const MultiPoly& p, const Symbol& var) {
    if (p.is_zero()) throw std::invalid_argument("find_roots: zero polynomial");
    RootsResult result;
    result.var = var.id;
    result.residual = MultiPoly::constant(1, p.table());
    const VarId v = var.id;
    if (p.degree(v) == 0) return result;
    MultiPoly work = p;
    if (auto k = p.min_degree(v); k > 0) {
        result.roots.emplace_back(RationalFn(MultiPoly::constant(0, p.table())), k);
        work = exact_divide(work, MultiPoly::monomial(Monomial::var(v, k), 1, p.table()));
    }
    for (auto& [f, mult] : squarefree_decomposition(work, v)) {
        auto split = split_squarefree(f, var, 2, false);
        for (auto& r : split.roots) result.roots.emplace_back(std::move(r), mult);
        if (!split.residual.is_constant()) result.residual *= split.residual.pow(mult);
    }
    return result;
}

}  // namespace phasespace
