#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "phasespace/geometry.hpp"
#include "phasespace/linsolve.hpp"

namespace phasespace {

/// General field of degree ≤ 2 on a chart: component k has coefficient
/// c[10k + j] on basis monomial j of {1, x, y, z, x², xy, xz, y², yz, z²}.
struct QuadraticAnsatz {
    VectorField field;
    std::vector<Symbol> coefficients;
    std::vector<Monomial> basis;

    const Symbol& coefficient(std::size_t component, std::size_t monomial) const {
        return coefficients.at(10 * component + monomial);
    }
    /// The field with every coefficient replaced by its value.
    VectorField instantiate(const std::vector<RationalFn>& values) const;
};

/// Interns c1..c30 as parameters of the chart's table.
QuadraticAnsatz quadratic_ansatz(const Chart& chart);

/// Coefficient of boundary^(-order) · monomial in one pushed-forward component.
struct Constraint {
    std::string chart;
    std::size_t component = 0;
    unsigned order = 0;
    Monomial monomial;
    std::vector<RationalFn> row;
};

struct ConstraintSystem {
    QuadraticAnsatz ansatz;
    std::vector<Constraint> constraints;
    /// Constraint count per atlas entry, in atlas order.
    std::vector<std::pair<std::string, std::size_t>> per_chart;

    Matrix matrix() const;
};

/// Pushes the ansatz through every map of the atlas and collects the
/// coefficients of negative powers of each target's boundary variable.
/// Throws std::domain_error if a denominator is not a boundary power.
ConstraintSystem build_constraints(const std::vector<ChartMap>& atlas, const QuadraticAnsatz& ansatz);

/// Inhomogeneous row fixing one coefficient.
struct Normalization {
    std::size_t component = 0;
    std::size_t monomial = 3;  // z
    RationalFn value = RationalFn(1);
};

struct UniquenessReport {
    std::size_t constraint_count = 0;
    /// Rank of the homogeneous constraints.
    std::size_t rank = 0;
    /// Dimension of the normalized solution space.
    std::size_t nullspace_dimension = 0;
    std::vector<RationalFn> coefficients;
    std::vector<std::vector<RationalFn>> nullspace;
    VectorField recovered;
    /// Quadratic part of every component nonzero.
    bool degree_two = false;
    std::optional<Triple> difference;
    bool matches_reference = false;
};

/// Throws InconsistentSystem when no normalized solution exists.
UniquenessReport solve_ansatz(const ConstraintSystem& system, const Normalization& normalization = {},
                              const std::optional<VectorField>& reference = std::nullopt);

}  // namespace phasespace
