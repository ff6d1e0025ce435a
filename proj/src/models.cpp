#include "phasespace/models.hpp"

#include "phasespace/text.hpp"

namespace phasespace {

namespace {

Chart make_chart(const TablePtr& t, std::string name, std::array<const char*, 3> vars,
                 std::optional<std::size_t> boundary) {
    Chart c{std::move(name), {}, boundary};
    for (std::size_t k = 0; k < 3; ++k) c.vars[k] = t->intern(vars[k], SymbolKind::state);
    return c;
}

/// Parses each of the three expressions after binding the named helper
/// symbols (e.g. "a1") to the given values.
Triple parse_triple(const ModelSpace& m, std::array<std::string, 3> text,
                    const std::map<VarId, RationalFn>& bindings = {}) {
    Triple t;
    for (std::size_t k = 0; k < 3; ++k) {
        t[k] = m.parse(text[k]);
        if (!bindings.empty()) t[k] = t[k].substitute(bindings);
    }
    return t;
}

std::map<VarId, RationalFn> three_wave_bindings(const ModelSpace& m, const ThreeWaveParams& p) {
    return {{m.delta().id, p.delta}, {m.gamma().id, p.gamma}};
}

std::map<VarId, RationalFn> modified_bindings(const ModelSpace& m, const ModifiedParams& a) {
    std::map<VarId, RationalFn> b;
    for (std::size_t k = 1; k <= 5; ++k) b[m.alpha(k).id] = a[k - 1];
    return b;
}

}  // namespace

ModelSpace::ModelSpace() : table_(SymbolTable::create()) {
    affine_[0] = make_chart(table_, "U0", {"x", "y", "z"}, std::nullopt);
    affine_[1] = make_chart(table_, "U1", {"X1", "Y1", "Z1"}, 0);
    affine_[2] = make_chart(table_, "U2", {"X2", "Y2", "Z2"}, 1);
    affine_[3] = make_chart(table_, "U3", {"X3", "Y3", "Z3"}, 2);
    for (std::size_t j = 1; j <= 3; ++j) {
        std::string x = "x" + std::to_string(j), y = "y" + std::to_string(j), z = "z" + std::to_string(j);
        t2_[j - 1] = make_chart(table_, "TW" + std::to_string(j), {x.c_str(), y.c_str(), z.c_str()}, 0);
        t3_[j - 1] = make_chart(table_, "MD" + std::to_string(j), {x.c_str(), y.c_str(), z.c_str()}, 0);
    }
    delta_ = table_->intern("delta", SymbolKind::parameter);
    gamma_ = table_->intern("gamma", SymbolKind::parameter);
    for (std::size_t k = 0; k < 5; ++k) alpha_[k] = table_->intern("alpha" + std::to_string(k + 1), SymbolKind::parameter);
}

RationalFn ModelSpace::parse(const std::string& text) const { return parse_expression(text, table_); }

ChartMap ModelSpace::projective_map(std::size_t j) const {
    static const std::array<std::array<const char*, 3>, 4> forward{{{"x", "y", "z"},
                                                                    {"1/x", "y/x", "z/x"},
                                                                    {"x/y", "1/y", "z/y"},
                                                                    {"x/z", "y/z", "1/z"}}};
    static const std::array<std::array<const char*, 3>, 4> inverse{{{"x", "y", "z"},
                                                                    {"1/X1", "Y1/X1", "Z1/X1"},
                                                                    {"X2/Y2", "1/Y2", "Z2/Y2"},
                                                                    {"X3/Z3", "Y3/Z3", "1/Z3"}}};
    if (j == 0) return ChartMap::identity(affine_[0]);
    return ChartMap(affine_[0], affine_.at(j), parse_triple(*this, {forward[j][0], forward[j][1], forward[j][2]}),
                    parse_triple(*this, {inverse[j][0], inverse[j][1], inverse[j][2]}));
}

ThreeWaveParams symbolic_three_wave(const ModelSpace& m) { return {m.sym(m.delta()), m.sym(m.gamma())}; }

ModifiedParams symbolic_modified(const ModelSpace& m) {
    ModifiedParams a;
    for (std::size_t k = 1; k <= 5; ++k) a[k - 1] = m.sym(m.alpha(k));
    return a;
}

VectorField system_three_wave(const ModelSpace& m, const ThreeWaveParams& p) {
    return VectorField{m.affine(0), parse_triple(m,
                                                 {"-2*y^2 + gamma*x + delta*y + z", "2*x*y - delta*x + gamma*y",
                                                  "-2*x*z - 2*z"},
                                                 three_wave_bindings(m, p))};
}

VectorField system_modified(const ModelSpace& m, const ModifiedParams& a) {
    return VectorField{
        m.affine(0),
        parse_triple(m,
                     {"-2*y^2 - (alpha1 + alpha3 - 2*alpha5)*y + z + (alpha2 + alpha4 + 2*(alpha1 + alpha3)*alpha5)/2",
                      "2*x*y - 2*alpha5*x + I*(alpha1 - alpha3)*y - I*(alpha2 - alpha4 + 2*(alpha1 - alpha3)*alpha5)/2",
                      "-2*x*z - (alpha2 + alpha4)*x + I*(alpha2 - alpha4)*y - I*(alpha1 - alpha3)*z"
                      " + I*(alpha2*alpha3 - alpha1*alpha4)"},
                     modified_bindings(m, a))};
}

std::vector<ChartMap> atlas_three_wave(const ModelSpace& m, const ThreeWaveParams& p) {
    auto b = three_wave_bindings(m, p);
    std::vector<ChartMap> atlas{ChartMap::identity(m.affine(0))};
    atlas.emplace_back(m.affine(0), m.three_wave_chart(1), parse_triple(m, {"1/x", "-(y - I*x)*x", "z*x"}, b),
                       parse_triple(m, {"1/x1", "-y1*x1 + I/x1", "z1*x1"}, b));
    atlas.emplace_back(m.affine(0), m.three_wave_chart(2), parse_triple(m, {"1/x", "-(y + I*x)*x", "z*x"}, b),
                       parse_triple(m, {"1/x2", "-y2*x2 - I/x2", "z2*x2"}, b));
    atlas.emplace_back(m.affine(0), m.three_wave_chart(3),
                       parse_triple(m, {"1/x", "-((y - delta/2)*x + delta*gamma/2)*x", "z + x^2 + 2*(gamma + 1)*x"}, b),
                       parse_triple(m,
                                    {"1/x3", "delta/2 - y3*x3^2 - delta*gamma/2*x3",
                                     "z3 - 1/x3^2 - 2*(gamma + 1)/x3"},
                                    b));
    return atlas;
}

std::vector<ChartMap> atlas_modified(const ModelSpace& m, const ModifiedParams& a) {
    auto b = modified_bindings(m, a);
    std::vector<ChartMap> atlas{ChartMap::identity(m.affine(0))};
    atlas.emplace_back(m.affine(0), m.modified_chart(1),
                       parse_triple(m, {"1/x", "-(y - I*x + alpha1)*x", "(z + alpha2)*x"}, b),
                       parse_triple(m, {"1/x1", "-y1*x1 + I/x1 - alpha1", "z1*x1 - alpha2"}, b));
    atlas.emplace_back(m.affine(0), m.modified_chart(2),
                       parse_triple(m, {"1/x", "-(y + I*x + alpha3)*x", "(z + alpha4)*x"}, b),
                       parse_triple(m, {"1/x2", "-y2*x2 - I/x2 - alpha3", "z2*x2 - alpha4"}, b));
    atlas.emplace_back(
        m.affine(0), m.modified_chart(3),
        parse_triple(m,
                     {"1/x", "-((y - alpha5)*x - I*(alpha2 - alpha4)/2)*x", "z + x^2 + I*(alpha1 - alpha3)*x"}, b),
        parse_triple(m,
                     {"1/x3", "alpha5 + I*(alpha2 - alpha4)/2*x3 - y3*x3^2", "z3 - 1/x3^2 - I*(alpha1 - alpha3)/x3"},
                     b));
    return atlas;
}

std::vector<ChartVerdict> verify_atlas_holomorphy(const VectorField& v, const std::vector<ChartMap>& atlas) {
    std::vector<ChartVerdict> out;
    for (const auto& phi : atlas) {
        ChartVerdict verdict{phi.target().name, true, {}, pushforward(v, phi), jacobian_determinant(phi)};
        for (const auto& c : verdict.field.components)
            if (!polynomial_value(c)) {
                verdict.polynomial = false;
                verdict.witnesses.push_back(c.den());
            }
        out.push_back(std::move(verdict));
    }
    return out;
}

std::map<VarId, RationalFn> SymmetryMap::bindings() const {
    auto b = bindings_for(vars, state);
    for (const auto& [s, e] : params) b[s.id] = e;
    return b;
}

SymmetryMap SymmetryMap::after(const SymmetryMap& first) const {
    SymmetryMap out{name + "*" + first.name, vars, substitute(state, first.bindings()), {}};
    // parameters of `first` that *this does not move keep first's value
    std::map<VarId, RationalFn> first_params;
    for (const auto& [s, e] : first.params) first_params[s.id] = e;
    std::set<VarId> mine;
    for (const auto& [s, e] : params) {
        out.params.emplace_back(s, e.substitute(first_params));
        mine.insert(s.id);
    }
    for (const auto& [s, e] : first.params)
        if (!mine.count(s.id)) out.params.emplace_back(s, e);
    return out;
}

SymmetryMap symmetry_identity(const ModelSpace& m) {
    const Chart& c = m.affine(0);
    SymmetryMap id{"1", c.vars, {m.sym(c.vars[0]), m.sym(c.vars[1]), m.sym(c.vars[2])}, {}};
    for (std::size_t k = 1; k <= 5; ++k) id.params.emplace_back(m.alpha(k), m.sym(m.alpha(k)));
    return id;
}

SymmetryMap symmetry_s(const ModelSpace& m) {
    const Chart& c = m.affine(0);
    SymmetryMap s{"s", c.vars,
                  parse_triple(m, {"x - I*(alpha2 - alpha4)/(2*(y - alpha5))", "y",
                                   "(4*y^2*z - 8*alpha5*y*z + 4*I*(alpha2 - alpha4)*x*y - 4*I*(alpha2 - alpha4)*alpha5*x"
                                   " - 2*(alpha1 - alpha3)*(alpha2 - alpha4)*y + 4*alpha5^2*z"
                                   " + (alpha2 - alpha4)*(alpha2 - alpha4 + 2*(alpha1 - alpha3)*alpha5))"
                                   "/(4*(y - alpha5)^2)"}),
                  {}};
    const char* images[5] = {"alpha1", "alpha4", "alpha3", "alpha2", "alpha5"};
    for (std::size_t k = 1; k <= 5; ++k) s.params.emplace_back(m.alpha(k), m.parse(images[k - 1]));
    return s;
}

SymmetryMap symmetry_pi(const ModelSpace& m) {
    const Chart& c = m.affine(0);
    SymmetryMap p{"pi", c.vars, parse_triple(m, {"x", "-y", "z"}), {}};
    const char* images[5] = {"-alpha3", "alpha4", "-alpha1", "alpha2", "-alpha5"};
    for (std::size_t k = 1; k <= 5; ++k) p.params.emplace_back(m.alpha(k), m.parse(images[k - 1]));
    return p;
}

Triple verify_symmetry(const VectorField& v, const SymmetryMap& sigma) {
    Matrix3 d = jacobian(sigma.state, sigma.vars);
    Triple image = substitute(v.components, sigma.bindings());
    Triple residual;
    for (std::size_t k = 0; k < 3; ++k) {
        RationalFn acc;
        for (std::size_t j = 0; j < 3; ++j)
            if (!d[k][j].is_zero()) acc += d[k][j] * v.components[j];
        residual[k] = acc - image[k];
    }
    return residual;
}

RelationVerdict relation_identity(const SymmetryMap& composite, const std::string& label) {
    RelationVerdict out{label, true, {}};
    for (std::size_t k = 0; k < 3; ++k) {
        out.residual.push_back(composite.state[k] - RationalFn::variable(composite.vars[k]));
        if (!out.residual.back().is_zero()) out.identity = false;
    }
    for (const auto& [s, e] : composite.params) {
        out.residual.push_back(e - RationalFn::variable(s));
        if (!out.residual.back().is_zero()) out.identity = false;
    }
    return out;
}

std::vector<RelationVerdict> verify_group_relations(const std::map<std::string, SymmetryMap>& maps,
                                                    const std::vector<std::vector<std::string>>& words) {
    std::vector<RelationVerdict> out;
    for (const auto& word : words) {
        if (word.empty()) throw std::invalid_argument("empty relation word");
        std::string label;
        for (const auto& w : word) label += (label.empty() ? "" : "*") + w;
        SymmetryMap acc = maps.at(word.back());
        for (std::size_t k = word.size() - 1; k-- > 0;) acc = maps.at(word[k]).after(acc);
        out.push_back(relation_identity(acc, label));
    }
    return out;
}

ComparisonReport compare_systems(const ModelSpace& m) {
    ComparisonReport r;
    r.three_wave = system_three_wave(m, {m.sym(m.delta()), RationalFn(0)});
    ModifiedParams a{RationalFn(0), RationalFn(0), RationalFn(0), RationalFn(0), m.sym(m.delta()) / RationalFn(2)};
    r.modified = system_modified(m, a);
    for (std::size_t k = 0; k < 3; ++k) r.difference[k] = r.three_wave.components[k] - r.modified.components[k];
    return r;
}

AtlasDocument model_document(const ModelSpace& m, const VectorField& v, const std::vector<ChartMap>& atlas,
                             const std::vector<Symbol>& parameters) {
    AtlasDocument doc;
    doc.table = m.table();
    doc.parameters = parameters;
    doc.charts.push_back(v.chart);
    for (const auto& phi : atlas)
        if (phi.target().name != v.chart.name) doc.charts.push_back(phi.target());
    doc.fields.push_back(v);
    for (const auto& phi : atlas)
        if (phi.target().name != phi.source().name) doc.maps.push_back(phi);
    return doc;
}

}  // namespace phasespace
