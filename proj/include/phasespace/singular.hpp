#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phasespace/geometry.hpp"

namespace phasespace {

class PositiveDimensional : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnresolvedSpectrum : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AccessiblePoint {
    Chart chart;
    Triple coords;  // parameters only; boundary coordinate is 0
    Symbol boundary;
    std::string label;

    std::string str() const;
};

struct AccessibleSet {
    std::vector<AccessiblePoint> points;
    /// Factors whose roots are not in the Gaussian-rational parameter field.
    std::vector<MultiPoly> unresolved;
    bool complete() const { return unresolved.empty(); }
};

/// Points on {boundary = 0} where the non-boundary numerators g_k vanish.
AccessibleSet find_accessible(const VectorField& v, const Symbol& boundary);
/// Uses the chart's own boundary coordinate.
AccessibleSet find_accessible(const VectorField& v);

/// Degree-1 part at p of the boundary-scaled field x₁·v, in chart order.
Matrix3 linear_part(const VectorField& v, const AccessiblePoint& p);

enum class Integrality { integer, non_integer, parameter_dependent, undefined };
std::string to_string(Integrality i);

struct LocalIndex {
    Matrix3 matrix;
    /// Coordinate order that makes the linear part lower-triangular,
    /// boundary coordinate first; empty when the order is spectral.
    std::vector<std::size_t> permutation;
    bool spectral = false;
    std::array<RationalFn, 3> eigenvalues;
    std::optional<std::array<RationalFn, 3>> ratios;
    std::array<Integrality, 3> integrality{};
    /// Every ratio is an integer.
    bool integral() const;
    std::string certificate() const;
};

LocalIndex local_index(const VectorField& v, const AccessiblePoint& p);
/// Index of a given linear part whose row `boundary` is (a₁₁ at boundary, 0, 0).
LocalIndex local_index_of(const Matrix3& a, std::size_t boundary, const TablePtr& table);

/// Characteristic polynomial det(λ·I − A) in the symbol "_lambda".
MultiPoly characteristic_polynomial(const Matrix3& a, const TablePtr& table);

enum class ComponentBehaviour { power, branch, logarithmic };
std::string to_string(ComponentBehaviour b);

struct AlphaTestReport {
    /// Linear part at the specialization, coordinates in index order.
    std::array<std::array<GaussianRational, 3>, 3> reduced;
    std::array<GaussianRational, 3> eigenvalues;
    std::array<GaussianRational, 3> ratios;
    std::array<ComponentBehaviour, 3> behaviour{};
    std::array<std::string, 3> closed_form;
    bool single_valued = false;
};

/// The scaling limit t = t₀ + εT reduces the field near p to dX/dτ = A·X
/// with X₁ = a₁₁T; solutions are X₁^{A/a₁₁}. Component k is single-valued
/// iff its ratio is an integer and its eigenvalue has no Jordan block.
AlphaTestReport alpha_test(const VectorField& v, const AccessiblePoint& p,
                           const std::map<VarId, GaussianRational>& specialization = {});
AlphaTestReport alpha_test_of(const LocalIndex& index, const std::map<VarId, GaussianRational>& specialization = {});

struct Balance {
    std::array<int, 3> exponents;  // x_k ~ c_k (t - t₁)^(-exponents[k])
    std::array<RationalFn, 3> coefficients;
    /// Coefficients left undetermined by the dominant balance.
    std::vector<std::size_t> free;
};

/// Dominant balances with max|exponent| <= bound and at least one positive
/// exponent. Parameters are treated as generic (nonzero) symbols.
std::vector<Balance> painleve_leading_orders(const VectorField& v, int bound);

/// Chart (1/x, y/x^n, z/x^p) on the base chart of v, named "W1-n-p".
ChartMap weighted_chart(const Chart& base, int n, int p, const TablePtr& table);

struct BlowUpChart {
    std::size_t direction;
    ChartMap map;
    VectorField field;
};

/// Point blow-up at p + shifts. In direction k the new coordinates are
/// x_k − c_k and (x_j − c_j)/(x_k − c_k). `names[k]` names the chart and
/// variables of direction k; defaults derive from the source chart.
struct BlowUpNames {
    std::string chart;
    std::array<std::string, 3> vars;
};
std::vector<BlowUpChart> blow_up(const VectorField& v, const AccessiblePoint& p,
                                 const std::optional<Triple>& shifts = std::nullopt,
                                 const std::optional<std::array<BlowUpNames, 3>>& names = std::nullopt);

struct Obstruction {
    /// Monic parameter polynomials whose vanishing is exactly polynomiality.
    std::vector<MultiPoly> conditions;
    /// Per component: singular part Σ_{j<k} N_j u^{j-k} (zero when polynomial).
    Triple singular_parts;
};
Obstruction holomorphy_obstructions(const VectorField& v, const Symbol& exceptional);

/// Solutions of a set of parameter polynomials: each branch fixes some
/// parameters; the rest stay free. Branches contained in others are dropped.
using ParameterBranch = std::vector<std::pair<Symbol, RationalFn>>;
std::vector<ParameterBranch> solve_conditions(const std::vector<MultiPoly>& conditions);

struct ResolutionStep {
    std::string description;
    ChartMap map;
    VectorField field;
};

struct ResolutionReport {
    Balance balance;
    ChartMap weighted;
    VectorField weighted_field;
    AccessibleSet weighted_points;
    AccessiblePoint resolved_point;
    LocalIndex resolved_index;
    std::vector<ResolutionStep> steps;
    Obstruction obstruction;
    std::vector<ParameterBranch> solutions;
};

/// Painlevé balance → weighted chart → accessible point with a₁₁ ≠ 0 →
/// repeated blow-ups along the boundary direction, centred at the
/// accessible point of each exceptional divisor → obstructions.
ResolutionReport resolve_pole(const VectorField& v, int bound = 2);

}  // namespace phasespace
