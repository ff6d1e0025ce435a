#pragma once

#include <utility>
#include <vector>

#include "phasespace/ratfn.hpp"

namespace phasespace {

struct RootsResult {
    /// Distinct roots in Q(i)(parameters), each with its multiplicity.
    std::vector<std::pair<RationalFn, unsigned>> roots;
    /// Product of the factors that did not split; constant when p split fully.
    MultiPoly residual;
    VarId var = 0;

    bool complete() const { return residual.degree(var) == 0; }
};

/// Roots of p, viewed as a univariate polynomial in var with coefficients in
/// the other symbols. Linear factors are found by candidate search and the
/// quadratic formula finishes degree-2 factors when the discriminant is a
/// perfect square; anything else is returned as residual.
RootsResult find_roots(const MultiPoly& p, const Symbol& var);

/// Gaussian-rational roots of a univariate polynomial with Q(i) coefficients
/// (index = power). Each returned root is verified exactly.
std::vector<GaussianRational> gaussian_rational_roots(const std::vector<GaussianRational>& coeffs);

/// Exact square root of a rational function, if it is a perfect square.
std::optional<RationalFn> ratfn_sqrt(const RationalFn& r);

}  // namespace phasespace
