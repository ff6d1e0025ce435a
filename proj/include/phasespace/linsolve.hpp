#pragma once

#include <stdexcept>
#include <vector>

#include "phasespace/ratfn.hpp"

namespace phasespace {

using Matrix = std::vector<std::vector<RationalFn>>;

struct LinearSolution {
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_columns;
    /// Solution with every free unknown set to zero.
    std::vector<RationalFn> particular;
    /// One basis vector per free column, in increasing column order.
    std::vector<std::vector<RationalFn>> nullspace;
};

/// y with yᵀA = 0 and yᵀb ≠ 0.
class InconsistentSystem : public std::runtime_error {
public:
    InconsistentSystem(std::vector<RationalFn> certificate, RationalFn value)
        : std::runtime_error("inconsistent linear system"), certificate_(std::move(certificate)), value_(std::move(value)) {}
    const std::vector<RationalFn>& certificate() const { return certificate_; }
    const RationalFn& value() const { return value_; }

private:
    std::vector<RationalFn> certificate_;
    RationalFn value_;
};

/// Solves A·x = b exactly over the field of rational functions in the
/// symbols occurring in A and b. Rows are cleared of denominators and
/// brought to echelon form by Bareiss elimination, preferring pivots with
/// fewest terms; back substitution works in RationalFn. Throws
/// InconsistentSystem.
LinearSolution linear_solve(const Matrix& a, const std::vector<RationalFn>& b);

/// Rank of A over the same field.
std::size_t matrix_rank(const Matrix& a);

}  // namespace phasespace
