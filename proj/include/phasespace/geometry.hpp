#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phasespace/ratfn.hpp"

namespace phasespace {

/// A named coordinate system on three state symbols. `boundary` is the index
/// of the coordinate whose zero set is the divisor at infinity, if any.
struct Chart {
    std::string name;
    std::array<Symbol, 3> vars;
    std::optional<std::size_t> boundary;

    Symbol boundary_symbol() const;
    std::set<VarId> var_ids() const { return {vars[0].id, vars[1].id, vars[2].id}; }
};

struct VectorField {
    Chart chart;
    Triple components;

    bool is_polynomial() const;
    std::string str() const;
};

class InvalidChartMap : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Birational map between charts. forward gives target coordinates in the
/// source variables; inverse gives source coordinates in the target
/// variables. Both compositions are checked to be the identity.
class ChartMap {
public:
    ChartMap(Chart source, Chart target, Triple forward, Triple inverse);

    static ChartMap identity(const Chart& c);

    const Chart& source() const { return source_; }
    const Chart& target() const { return target_; }
    const Triple& forward() const { return forward_; }
    const Triple& inverse() const { return inverse_; }

    ChartMap inverted() const;
    /// next ∘ *this, from source() to next.target().
    ChartMap then(const ChartMap& next) const;

    /// Image of a point given by coordinates in the source chart.
    Triple apply(const Triple& point) const;

private:
    struct Trusted {};
    ChartMap(Chart source, Chart target, Triple forward, Triple inverse, Trusted);

    Chart source_, target_;
    Triple forward_, inverse_;
};

using Matrix3 = std::array<std::array<RationalFn, 3>, 3>;

/// ∂f_i/∂vars_j.
Matrix3 jacobian(const Triple& f, const std::array<Symbol, 3>& vars);
RationalFn determinant(const Matrix3& m);

VectorField pushforward(const VectorField& v, const ChartMap& phi);
RationalFn jacobian_determinant(const ChartMap& phi);

class PoleTooHigh : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Certificate that dx₁/dt = g₁ and dx_k/dt = g_k/x₁ with polynomial g,
/// where x₁ is the boundary coordinate. g is indexed like the chart
/// variables; g[boundary index] is the boundary component itself.
struct LogPoleForm {
    Symbol boundary;
    std::size_t boundary_index = 0;
    std::array<MultiPoly, 3> g;
};
LogPoleForm log_pole_decomposition(const VectorField& v, const Symbol& boundary);

/// Polynomial value of r via exact division, or nullopt.
std::optional<MultiPoly> polynomial_value(const RationalFn& r);

/// Charts, fields and maps sharing one symbol table; the text format is
///   chart NAME VAR VAR VAR [boundary VAR]
///   params NAME...
///   field CHART : E1 ; E2 ; E3
///   map SOURCE -> TARGET
///   forward E1 ; E2 ; E3
///   inverse E1 ; E2 ; E3
///   end
/// with '#' starting a comment.
struct AtlasDocument {
    TablePtr table;
    std::vector<Symbol> parameters;
    std::vector<Chart> charts;
    std::vector<VectorField> fields;
    std::vector<ChartMap> maps;

    const Chart& chart(const std::string& name) const;
    const VectorField* field(const std::string& chart_name) const;
};

AtlasDocument parse_atlas(std::istream& in, TablePtr table = nullptr);
AtlasDocument load_atlas(const std::string& path, TablePtr table = nullptr);
void write_atlas(std::ostream& out, const AtlasDocument& doc);

}  // namespace phasespace
