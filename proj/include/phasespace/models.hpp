#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "phasespace/geometry.hpp"

namespace phasespace {

/// Symbol table and named charts shared by the concrete systems.
class ModelSpace {
public:
    ModelSpace();

    const TablePtr& table() const { return table_; }
    const Symbol& delta() const { return delta_; }
    const Symbol& gamma() const { return gamma_; }
    const Symbol& alpha(std::size_t k) const { return alpha_.at(k - 1); }  // k = 1..5
    std::vector<Symbol> three_wave_parameters() const { return {delta_, gamma_}; }
    std::vector<Symbol> modified_parameters() const { return {alpha_.begin(), alpha_.end()}; }

    /// U0 = (x, y, z) and the standard affine charts U1..U3 of P³.
    const Chart& affine(std::size_t j) const { return affine_.at(j); }
    /// Charts 1..3 of the two glued atlases (chart 0 is U0).
    const Chart& three_wave_chart(std::size_t j) const { return t2_.at(j - 1); }
    const Chart& modified_chart(std::size_t j) const { return t3_.at(j - 1); }

    /// Map U0 -> Uj of the compactification.
    ChartMap projective_map(std::size_t j) const;

    RationalFn sym(const Symbol& s) const { return RationalFn::variable(s); }
    RationalFn parse(const std::string& text) const;

private:
    TablePtr table_;
    Symbol delta_, gamma_;
    std::array<Symbol, 5> alpha_;
    std::array<Chart, 4> affine_;
    std::array<Chart, 3> t2_, t3_;
};

struct ThreeWaveParams {
    RationalFn delta, gamma;
};
using ModifiedParams = std::array<RationalFn, 5>;

ThreeWaveParams symbolic_three_wave(const ModelSpace& m);
ModifiedParams symbolic_modified(const ModelSpace& m);

/// dx/dt = -2y² + γx + δy + z, dy/dt = 2xy - δx + γy, dz/dt = -2xz - 2z.
VectorField system_three_wave(const ModelSpace& m, const ThreeWaveParams& p);
VectorField system_modified(const ModelSpace& m, const ModifiedParams& a);

/// Charts 0)..3) as maps out of U0; entry 0 is the identity.
std::vector<ChartMap> atlas_three_wave(const ModelSpace& m, const ThreeWaveParams& p);
std::vector<ChartMap> atlas_modified(const ModelSpace& m, const ModifiedParams& a);

struct ChartVerdict {
    std::string chart;
    bool polynomial = false;
    /// Denominators of the components that are not polynomial.
    std::vector<MultiPoly> witnesses;
    VectorField field;
    RationalFn jacobian;
};
std::vector<ChartVerdict> verify_atlas_holomorphy(const VectorField& v, const std::vector<ChartMap>& atlas);

/// A transformation of state × parameter space. `state` gives the new
/// x, y, z in the old state and parameters; `params` gives each new
/// parameter value in the old parameters.
struct SymmetryMap {
    std::string name;
    std::array<Symbol, 3> vars;
    Triple state;
    std::vector<std::pair<Symbol, RationalFn>> params;

    std::map<VarId, RationalFn> bindings() const;
    /// Applies *this after `first`.
    SymmetryMap after(const SymmetryMap& first) const;
};

SymmetryMap symmetry_identity(const ModelSpace& m);
SymmetryMap symmetry_s(const ModelSpace& m);
SymmetryMap symmetry_pi(const ModelSpace& m);

/// Ds·v(x; α) − v(σ(x; α); σ(α)); zero exactly when σ maps solutions of v
/// to solutions of v with transformed parameters.
Triple verify_symmetry(const VectorField& v, const SymmetryMap& sigma);

struct RelationVerdict {
    std::string relation;
    bool identity = false;
    /// Composite minus identity, state components then parameters.
    std::vector<RationalFn> residual;
};
/// Each word is a list of map names applied right to left, e.g. {"s","pi","s","pi"}.
std::vector<RelationVerdict> verify_group_relations(const std::map<std::string, SymmetryMap>& maps,
                                                    const std::vector<std::vector<std::string>>& words);
RelationVerdict relation_identity(const SymmetryMap& composite, const std::string& label);

/// Three-wave field at γ = 0 minus the modified field at α = (0, 0, 0, 0, δ/2).
struct ComparisonReport {
    VectorField three_wave;
    VectorField modified;
    Triple difference;
};
ComparisonReport compare_systems(const ModelSpace& m);

/// Document with the field on U0 and the atlas maps, ready for write_atlas.
AtlasDocument model_document(const ModelSpace& m, const VectorField& v, const std::vector<ChartMap>& atlas,
                             const std::vector<Symbol>& parameters);

}  // namespace phasespace
