#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "phasespace/models.hpp"
#include "phasespace/numerics.hpp"
#include "phasespace/singular.hpp"
#include "phasespace/text.hpp"
#include "phasespace/uniqueness.hpp"

namespace phasespace::cli {

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string system = "three-wave";
    std::string params;
    std::string atlas;
    std::string point;
    std::string chart;
    std::string out;
    std::string format = "json";
    double tol = 1e-10;
    // command specific
    int bound = 2;
    std::string map = "all";
    std::string start;
    std::string path;
    std::string center;
    double locate = 0;
    double radius = 0.5;
    double threshold = 1e-6;
    std::size_t vertices = 96;
    bool lenient = false;
};

/// The system, its parameters and its atlas after parameter binding.
struct Setup {
    std::optional<ModelSpace> model;
    std::optional<AtlasDocument> document;
    TablePtr table;
    VectorField field;
    std::vector<Symbol> parameters;
    std::map<VarId, RationalFn> bindings;
    std::string atlas_name;
    std::vector<ChartMap> atlas;
    Json params_json = Json::object();

    bool numeric() const {
        for (const auto& p : parameters)
            if (!bindings.count(p.id) || !bindings.at(p.id).is_constant()) return false;
        return true;
    }
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

Triple bound_triple(const Triple& t, const std::map<VarId, RationalFn>& b) { return b.empty() ? t : substitute(t, b); }

ChartMap bound_map(const ChartMap& phi, const std::map<VarId, RationalFn>& b) {
    if (b.empty()) return phi;
    return ChartMap(phi.source(), phi.target(), substitute(phi.forward(), b), substitute(phi.inverse(), b));
}

Setup make_setup(const Options& o, bool numeric) {
    Setup s;
    if (o.system == "three-wave" || o.system == "modified") {
        s.model.emplace();
        const ModelSpace& m = *s.model;
        s.table = m.table();
        bool tw = o.system == "three-wave";
        s.parameters = tw ? m.three_wave_parameters() : m.modified_parameters();
        s.field = tw ? system_three_wave(m, symbolic_three_wave(m)) : system_modified(m, symbolic_modified(m));
        s.atlas_name = o.atlas.empty() ? o.system : o.atlas;
        if (s.atlas_name == "theorem2") s.atlas_name = "three-wave";
        if (s.atlas_name == "theorem3") s.atlas_name = "modified";
        if (s.atlas_name == "three-wave")
            s.atlas = atlas_three_wave(m, symbolic_three_wave(m));
        else if (s.atlas_name == "modified")
            s.atlas = atlas_modified(m, symbolic_modified(m));
        else if (s.atlas_name == "projective")
            s.atlas = {m.projective_map(0), m.projective_map(1), m.projective_map(2), m.projective_map(3)};
        else
            throw UsageError("unknown atlas '" + s.atlas_name + "' (three-wave, modified, projective)");
        if (s.atlas_name != "projective" && s.atlas_name != o.system)
            throw UsageError("atlas " + s.atlas_name + " belongs to the other system");
    } else if (o.system == "file") {
        if (o.atlas.empty()) throw UsageError("--system file needs --atlas PATH");
        s.document = load_atlas(o.atlas);
        s.table = s.document->table;
        if (s.document->fields.empty()) throw UsageError("atlas file " + o.atlas + " has no field");
        s.field = s.document->fields.front();
        s.parameters = s.document->parameters;
        s.atlas_name = o.atlas;
        s.atlas.push_back(ChartMap::identity(s.field.chart));
        for (const auto& phi : s.document->maps)
            if (phi.source().name == s.field.chart.name) s.atlas.push_back(phi);
    } else {
        throw UsageError("unknown system '" + o.system + "' (three-wave, modified, file)");
    }
    ParseOptions po;
    po.allow_decimals = numeric;
    for (const auto& item : split(o.params, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("parameter binding '" + item + "' is not name=value");
        std::string name = trim(item.substr(0, eq));
        auto sym = s.table->lookup(name);
        bool known = false;
        for (const auto& p : s.parameters) known = known || (sym && p == *sym);
        if (!known) throw UsageError("system " + o.system + " has no parameter '" + name + "'");
        RationalFn value;
        try {
            value = parse_expression(trim(item.substr(eq + 1)), s.table, po);
        } catch (const ParseError& e) {
            throw UsageError("parameter " + name + ": " + e.what());
        }
        for (VarId v : value.variables())
            if (s.table->kind(v) != SymbolKind::parameter)
                throw UsageError("parameter " + name + " bound to a state variable");
        s.bindings[sym->id] = value;
    }
    for (const auto& p : s.parameters)
        s.params_json[p.name()] = s.bindings.count(p.id) ? s.bindings.at(p.id).str() : p.name();
    s.field.components = bound_triple(s.field.components, s.bindings);
    for (auto& phi : s.atlas) phi = bound_map(phi, s.bindings);
    return s;
}

Json triple_json(const Triple& t) { return Json::array({t[0].str(), t[1].str(), t[2].str()}); }

Json matrix_json(const Matrix3& a) {
    Json rows = Json::array();
    for (const auto& r : a) rows.push_back(triple_json(r));
    return rows;
}

Json field_json(const VectorField& v) {
    Json vars = Json::array();
    for (const auto& s : v.chart.vars) vars.push_back(s.name());
    return Json{{"chart", v.chart.name}, {"vars", vars}, {"components", triple_json(v.components)}};
}

Json map_json(const ChartMap& phi) {
    return Json{{"source", phi.source().name},
                {"target", phi.target().name},
                {"forward", triple_json(phi.forward())},
                {"inverse", triple_json(phi.inverse())}};
}

/// The field expressed in the named chart.
VectorField field_in(const Setup& s, const std::string& name) {
    if (name.empty() || name == s.field.chart.name) return s.field;
    for (const auto& phi : s.atlas)
        if (phi.target().name == name) return pushforward(s.field, phi);
    if (s.model)
        for (std::size_t j = 1; j <= 3; ++j)
            if (s.model->affine(j).name == name) return pushforward(s.field, s.model->projective_map(j));
    int n = 0, p = 0;
    char tail = 0;
    if (std::sscanf(name.c_str(), "W1-%d-%d%c", &n, &p, &tail) == 2)
        return pushforward(s.field, weighted_chart(s.field.chart, n, p, s.table));
    throw UsageError("unknown chart '" + name + "'");
}

std::string default_weighted(const Setup& s) {
    for (const auto& b : painleve_leading_orders(s.field, 2))
        if (b.exponents[0] == 1 && b.exponents[1] >= 0 && b.exponents[2] >= 0 && b.free.empty())
            return "W1-" + std::to_string(b.exponents[1]) + "-" + std::to_string(b.exponents[2]);
    throw UsageError("no weighted chart: no pole balance with exponents (1, n, p)");
}

std::string label_for(const std::string& chart, std::size_t k) {
    if (chart == "U1") return "P" + std::to_string(k + 1);
    if (chart.rfind("W1-", 0) == 0) return "P4-" + std::to_string(k + 1);
    return chart + ":" + std::to_string(k + 1);
}

std::vector<AccessiblePoint> labelled_points(const VectorField& v) {
    AccessibleSet set = find_accessible(v);
    for (std::size_t k = 0; k < set.points.size(); ++k) set.points[k].label = label_for(v.chart.name, k);
    return set.points;
}

struct Located {
    VectorField field;
    AccessiblePoint point;
};

Located locate_point(const Setup& s, const Options& o) {
    if (o.point.empty()) throw UsageError("--point is required");
    std::string chart = o.chart;
    bool label = o.point.find(',') == std::string::npos;
    if (chart.empty() && label) chart = o.point.rfind("P4-", 0) == 0 ? default_weighted(s) : "U1";
    if (chart.empty()) throw UsageError("--point with coordinates needs --chart");
    VectorField v = field_in(s, chart);
    if (!v.chart.boundary) throw UsageError("chart " + chart + " has no boundary coordinate");
    if (label) {
        for (auto& p : labelled_points(v))
            if (p.label == o.point) return {v, p};
        throw UsageError("no accessible point labelled " + o.point + " in chart " + chart);
    }
    auto parts = split(o.point, ',');
    if (parts.size() != 3) throw UsageError("--point needs three comma-separated coordinates");
    Triple c;
    for (std::size_t k = 0; k < 3; ++k) {
        try {
            c[k] = parse_expression(trim(parts[k]), s.table);
        } catch (const ParseError& e) {
            throw UsageError(std::string("--point: ") + e.what());
        }
        if (!c[k].only_in({}) && !std::all_of(c[k].variables().begin(), c[k].variables().end(), [&](VarId id) {
                return s.table->kind(id) == SymbolKind::parameter;
            }))
            throw UsageError("--point coordinates may only involve parameters");
    }
    c = bound_triple(c, s.bindings);
    if (!c[*v.chart.boundary].is_zero()) throw UsageError("the boundary coordinate of a point at infinity is 0");
    return {v, AccessiblePoint{v.chart, c, v.chart.boundary_symbol(), o.point}};
}

Json point_json(const AccessiblePoint& p) {
    return Json{{"label", p.label}, {"chart", p.chart.name}, {"coords", triple_json(p.coords)}};
}

Json index_json(const LocalIndex& li) {
    Json integrality = Json::array();
    for (auto i : li.integrality) integrality.push_back(to_string(i));
    Json out{{"linear_part", matrix_json(li.matrix)},
             {"eigenvalues", triple_json(li.eigenvalues)},
             {"ratios", li.ratios ? triple_json(*li.ratios) : Json(nullptr)},
             {"integrality", integrality},
             {"certificate", li.certificate()}};
    return out;
}

Json conditions_json(const std::vector<MultiPoly>& cs) {
    Json out = Json::array();
    for (const auto& c : cs) out.push_back(Json{{"canonical", c.str()}, {"display", factored_display(c)}});
    return out;
}

Json branches_json(const std::vector<ParameterBranch>& bs) {
    Json out = Json::array();
    for (const auto& b : bs) {
        Json branch = Json::object();
        for (const auto& [s, e] : b) branch[s.name()] = e.str();
        out.push_back(branch);
    }
    return out;
}

// ---- subcommands --------------------------------------------------------

struct Result {
    Json body;
    bool pass = true;
};

Result cmd_singularities(const Options& o) {
    Setup s = make_setup(o, false);
    std::string chart = o.chart.empty() ? "U1" : o.chart;
    VectorField v = field_in(s, chart);
    if (!v.chart.boundary) throw UsageError("chart " + chart + " has no boundary coordinate");
    AccessibleSet set = find_accessible(v);
    Json points = Json::array();
    for (std::size_t k = 0; k < set.points.size(); ++k) {
        set.points[k].label = label_for(chart, k);
        points.push_back(point_json(set.points[k]));
    }
    Json unresolved = Json::array();
    for (const auto& u : set.unresolved) unresolved.push_back(u.str());
    return {Json{{"chart", chart}, {"field", field_json(v)}, {"points", points}, {"unresolved", unresolved}}, true};
}

Result cmd_index(const Options& o) {
    Setup s = make_setup(o, false);
    Located at = locate_point(s, o);
    return {Json{{"point", point_json(at.point)}, {"index", index_json(local_index(at.field, at.point))}}, true};
}

Result cmd_alpha(const Options& o) {
    Setup s = make_setup(o, false);
    Located at = locate_point(s, o);
    AlphaTestReport r = alpha_test(at.field, at.point);
    Json comps = Json::array();
    for (std::size_t k = 0; k < 3; ++k)
        comps.push_back(Json{{"eigenvalue", r.eigenvalues[k].str()},
                             {"ratio", r.ratios[k].str()},
                             {"behaviour", to_string(r.behaviour[k])},
                             {"solution", r.closed_form[k]}});
    return {Json{{"point", point_json(at.point)}, {"components", comps}, {"single_valued", r.single_valued}},
            r.single_valued};
}

Result cmd_painleve(const Options& o) {
    Setup s = make_setup(o, false);
    Json balances = Json::array();
    for (const auto& b : painleve_leading_orders(s.field, o.bound)) {
        Json free = Json::array();
        for (auto k : b.free) free.push_back(k);
        balances.push_back(Json{{"exponents", b.exponents}, {"coefficients", triple_json(b.coefficients)}, {"free", free}});
    }
    return {Json{{"bound", o.bound}, {"balances", balances}}, true};
}

Result cmd_blowup(const Options& o) {
    Setup s = make_setup(o, false);
    if (!o.point.empty()) {
        Located at = locate_point(s, o);
        Json charts = Json::array();
        for (const auto& bc : blow_up(at.field, at.point))
            charts.push_back(Json{{"direction", bc.direction}, {"map", map_json(bc.map)}, {"field", field_json(bc.field)},
                                  {"polynomial", bc.field.is_polynomial()}});
        return {Json{{"point", point_json(at.point)}, {"charts", charts}}, true};
    }
    ResolutionReport r = resolve_pole(s.field);
    Json steps = Json::array();
    for (const auto& st : r.steps)
        steps.push_back(Json{{"description", st.description}, {"map", map_json(st.map)}, {"field", field_json(st.field)}});
    return {Json{{"balance", r.balance.exponents},
                 {"weighted", map_json(r.weighted)},
                 {"resolved_point", point_json(r.resolved_point)},
                 {"resolved_index", index_json(r.resolved_index)},
                 {"steps", steps}},
            true};
}

Result cmd_obstructions(const Options& o) {
    Setup s = make_setup(o, false);
    ResolutionReport r = resolve_pole(s.field);
    bool constant_obstruction = false;
    for (const auto& c : r.obstruction.conditions) constant_obstruction = constant_obstruction || c.is_constant();
    return {Json{{"balance", r.balance.exponents},
                 {"blowups", r.steps.size()},
                 {"exceptional_chart", r.steps.back().field.chart.name},
                 {"conditions", conditions_json(r.obstruction.conditions)},
                 {"singular_parts", triple_json(r.obstruction.singular_parts)},
                 {"solutions", branches_json(r.solutions)}},
            !constant_obstruction};
}

Result cmd_verify_atlas(const Options& o) {
    Setup s = make_setup(o, false);
    Json charts = Json::array();
    bool pass = true;
    for (const auto& v : verify_atlas_holomorphy(s.field, s.atlas)) {
        Json witnesses = Json::array();
        for (const auto& w : v.witnesses) witnesses.push_back(w.str());
        charts.push_back(Json{{"chart", v.chart},
                              {"polynomial", v.polynomial},
                              {"jacobian", v.jacobian.str()},
                              {"field", triple_json(v.field.components)},
                              {"witnesses", witnesses}});
        pass = pass && v.polynomial;
    }
    return {Json{{"atlas", s.atlas_name}, {"charts", charts}}, pass};
}

Result cmd_verify_symmetry(const Options& o) {
    if (o.system != "modified") throw UsageError("symmetries are defined for --system modified only");
    Setup s = make_setup(o, false);
    if (!s.bindings.empty()) throw UsageError("symmetries act on the parameters; leave them symbolic");
    const ModelSpace& m = *s.model;
    std::map<std::string, SymmetryMap> maps{{"s", symmetry_s(m)}, {"pi", symmetry_pi(m)}};
    if (o.map != "all" && !maps.count(o.map)) throw UsageError("unknown map '" + o.map + "' (s, pi, all)");
    bool pass = true;
    Json residuals = Json::object();
    for (const auto& [name, sigma] : maps) {
        if (o.map != "all" && o.map != name) continue;
        Triple r = verify_symmetry(s.field, sigma);
        bool zero = r[0].is_zero() && r[1].is_zero() && r[2].is_zero();
        residuals[name] = Json{{"residual", triple_json(r)}, {"invariant", zero}};
        pass = pass && zero;
    }
    Json relations = Json::array();
    if (o.map == "all")
        for (const auto& v : verify_group_relations(maps, {{"pi", "pi"}, {"s", "pi", "s", "pi"}, {"s", "s"}})) {
            Json res = Json::array();
            for (const auto& e : v.residual) res.push_back(e.str());
            relations.push_back(Json{{"relation", v.relation}, {"identity", v.identity}, {"residual", res}});
            pass = pass && v.identity;
        }
    return {Json{{"maps", residuals}, {"relations", relations}}, pass};
}

Result cmd_uniqueness(const Options& o) {
    Setup s = make_setup(o, false);
    QuadraticAnsatz ansatz = quadratic_ansatz(s.field.chart);
    ConstraintSystem cs = build_constraints(s.atlas, ansatz);
    std::optional<VectorField> reference;
    if (o.system != "file") reference = s.field;
    Json per_chart = Json::object();
    for (const auto& [name, n] : cs.per_chart) per_chart[name] = n;
    UniquenessReport r;
    try {
        r = solve_ansatz(cs, {}, reference);
    } catch (const InconsistentSystem&) {
        return {Json{{"atlas", s.atlas_name},
                     {"constraints", cs.constraints.size()},
                     {"per_chart", per_chart},
                     {"consistent", false}},
                false};
    }
    Json nullspace = Json::array();
    for (const auto& v : r.nullspace) {
        Json vec = Json::array();
        for (const auto& e : v) vec.push_back(e.str());
        nullspace.push_back(vec);
    }
    Json body{{"atlas", s.atlas_name},
              {"constraints", r.constraint_count},
              {"per_chart", per_chart},
              {"consistent", true},
              {"rank", r.rank},
              {"normalization", ansatz.coefficient(0, 3).name() + " = 1"},
              {"nullspace_dimension", r.nullspace_dimension},
              {"nullspace", nullspace},
              {"recovered", triple_json(r.recovered.components)},
              {"degree_two", r.degree_two}};
    if (r.difference) {
        body["difference"] = triple_json(*r.difference);
        body["matches_reference"] = r.matches_reference;
    }
    return {body, !reference || r.matches_reference};
}

Complex complex_value(const std::string& text, const TablePtr& table) {
    ParseOptions po;
    po.allow_decimals = true;
    RationalFn r;
    try {
        r = parse_expression(trim(text), table, po);
    } catch (const ParseError& e) {
        throw UsageError("'" + text + "': " + e.what());
    }
    if (!r.is_constant()) throw UsageError("'" + text + "' is not a number");
    GaussianRational g = r.constant_value();
    return {g.re().get_d(), g.im().get_d()};
}

struct NumericSetup {
    Setup setup;
    NumericAtlas atlas;
    TrajectoryPoint start;
    IntegratorOptions options;
};

NumericSetup numeric_setup(const Options& o) {
    Setup s = make_setup(o, true);
    if (!s.numeric()) throw UsageError("numeric commands need a value for every parameter (--params)");
    NumericAtlas atlas(s.field, s.atlas, !o.lenient);
    auto parts = split(o.start, ',');
    if (parts.size() != 3) throw UsageError("--start needs three comma-separated values");
    TrajectoryPoint start{0, {}, o.chart.empty() ? 0 : atlas.index(o.chart), 0};
    for (std::size_t k = 0; k < 3; ++k) start.state[k] = complex_value(parts[k], s.table);
    IntegratorOptions opt;
    opt.tol = o.tol;
    if (!(o.tol > 0)) throw UsageError("--tol must be positive");
    return {std::move(s), std::move(atlas), start, opt};
}

Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Json trajectory_json(const NumericAtlas& atlas, const Trajectory& t) {
    Json points = Json::array();
    for (const auto& p : t.points)
        points.push_back(Json{{"t", complex_json(p.t)},
                              {"chart", atlas.name(p.chart)},
                              {"state", Json::array({complex_json(p.state[0]), complex_json(p.state[1]), complex_json(p.state[2])})},
                              {"error", p.error}});
    Json switches = Json::array();
    for (const auto& e : t.switches)
        switches.push_back(Json{{"t", complex_json(e.t)}, {"from", atlas.name(e.from)}, {"to", atlas.name(e.to)}});
    return Json{{"points", points}, {"switches", switches}, {"rejected", t.rejected}};
}

struct Rendered {
    std::string text;
    bool pass = true;
};

Rendered cmd_integrate(const Options& o, Json header) {
    NumericSetup n = numeric_setup(o);
    std::vector<Complex> path;
    for (const auto& t : split(o.path, ',')) path.push_back(complex_value(t, n.setup.table));
    if (path.empty()) throw UsageError("--path needs at least one time");
    Trajectory t = integrate(n.atlas, n.start, path, n.options);
    std::ostringstream out;
    if (o.format == "csv") {
        write_csv(out, n.atlas, t);
    } else if (o.format == "text") {
        write_records(out, n.atlas, t);
    } else {
        header["params"] = n.setup.params_json;
        header["tol"] = o.tol;
        header["trajectory"] = trajectory_json(n.atlas, t);
        header["status"] = "pass";
        out << header.dump(2) << '\n';
    }
    return {out.str(), true};
}

Result cmd_monodromy(const Options& o) {
    NumericSetup n = numeric_setup(o);
    Complex center;
    Json located = Json::object();
    if (!o.center.empty()) {
        center = complex_value(o.center, n.setup.table);
        located["source"] = "given";
    } else {
        if (!(o.locate > 0)) throw UsageError("give --center or --locate T");
        try {
            Trajectory t = integrate(n.atlas, n.start, {Complex(o.locate)}, n.options);
            if (t.switches.empty()) throw UsageError("no chart switch on [0, " + std::to_string(o.locate) + "]");
            PoleFit fit = fit_pole(n.atlas, pole_segment(n.atlas, t, 0, 0.1));
            center = fit.location;
            located["source"] = "pole fit";
            located["exponents"] = fit.exponents;
            located["residual"] = fit.residual;
        } catch (const StepUnderflow& e) {
            center = e.time();
            located["source"] = "step underflow";
        }
    }
    located["center"] = complex_json(center);
    MonodromyReport r = monodromy_check(n.atlas, n.start, center, o.radius, n.options, o.vertices);
    bool pass = r.deviation <= o.threshold;
    return {Json{{"tol", o.tol},
                 {"center", located},
                 {"radius", o.radius},
                 {"vertices", o.vertices},
                 {"deviation", r.deviation},
                 {"threshold", o.threshold},
                 {"threshold_note", "engineering choice"},
                 {"switches", r.loop.switches.size()}},
            pass};
}

void text_lines(std::ostream& out, const Json& j, const std::string& prefix) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) text_lines(out, v, prefix.empty() ? k : prefix + "." + k);
    } else if (j.is_array() && std::any_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); })) {
        for (std::size_t i = 0; i < j.size(); ++i) text_lines(out, j[i], prefix + "[" + std::to_string(i) + "]");
    } else {
        out << prefix << " = " << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
    }
}

void emit(const Options& o, const std::string& command, const std::string& text, std::ostream& out) {
    std::string path = o.out;
    const char* dir = std::getenv("PHASESPACE_REPORT_DIR");
    std::string ext = o.format == "json" ? "json" : o.format == "csv" ? "csv" : "txt";
    if (path.empty() && dir && *dir) path = command + "." + ext;
    if (path.empty()) {
        out << text;
        return;
    }
    std::filesystem::path p(path);
    if (p.is_relative() && dir && *dir) p = std::filesystem::path(dir) / p;
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream file(p);
    if (!file) throw UsageError("cannot write " + p.string());
    file << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Singularity analysis and chart verification for the reduced three-wave system", "phasespace"};
    app.require_subcommand(1);
    Options o;
    auto common = [&o](CLI::App* c, bool numeric) {
        c->add_option("--system", o.system, "three-wave, modified or file")->capture_default_str();
        c->add_option("--params", o.params, "name=value,... (exact values; decimals only in numeric commands)");
        c->add_option("--atlas", o.atlas, "three-wave, modified, projective, or a path with --system file");
        c->add_option("--out", o.out, "report path (relative to $PHASESPACE_REPORT_DIR when set)");
        c->add_option("--format", o.format, "json, text or csv")->check(CLI::IsMember({"json", "text", "csv"}));
        c->add_option("--chart", o.chart, numeric ? "chart of the start state" : "chart name");
        if (numeric) c->add_option("--tol", o.tol, "integrator tolerance")->capture_default_str();
    };
    auto pointed = [&o](CLI::App* c) { c->add_option("--point", o.point, "label (P1, P4-2, ...) or coordinates a,b,c"); };

    std::map<CLI::App*, std::string> names;
    auto sub = [&](const std::string& name, const std::string& help, bool numeric) {
        CLI::App* c = app.add_subcommand(name, help);
        common(c, numeric);
        names[c] = name;
        return c;
    };
    sub("singularities", "accessible singular points on a boundary chart", false);
    pointed(sub("index", "local index at an accessible point", false));
    pointed(sub("alpha-test", "resonance and single-valuedness test at an accessible point", false));
    sub("painleve", "dominant balances of the Painleve test", false)->add_option("--bound", o.bound, "exponent bound");
    pointed(sub("blowup", "blow-up sequence resolving the pole (or at --point)", false));
    sub("obstructions", "holomorphy conditions after resolving the pole", false);
    sub("verify-atlas", "check the field is polynomial in every chart", false);
    sub("verify-symmetry", "symmetry residuals and group relations", false)->add_option("--map", o.map, "s, pi or all");
    sub("uniqueness", "solve for all quadratic fields holomorphic on the atlas", false);
    CLI::App* integ = sub("integrate", "integrate along a complex path with chart switching", true);
    integ->add_option("--start", o.start, "x,y,z at t = 0")->required();
    integ->add_option("--path", o.path, "t1,t2,... vertices of the path")->required();
    integ->add_flag("--lenient", o.lenient, "drop charts where the field is not polynomial");
    CLI::App* mono = sub("monodromy", "integrate a loop around a pole and measure the deviation", true);
    mono->add_option("--start", o.start, "x,y,z at t = 0")->required();
    mono->add_option("--center", o.center, "loop centre");
    mono->add_option("--locate", o.locate, "find the centre as the first pole on [0, T]");
    mono->add_option("--radius", o.radius, "loop radius")->capture_default_str();
    mono->add_option("--threshold", o.threshold, "largest deviation that passes")->capture_default_str();
    mono->add_option("--vertices", o.vertices, "polygon corners")->capture_default_str();
    mono->add_flag("--lenient", o.lenient, "drop charts where the field is not polynomial");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "phasespace: " << e.what() << '\n';
        return 2;
    }
    std::string command = names.at(app.get_subcommands().front());
    try {
        if (o.format == "csv" && command != "integrate") throw UsageError("--format csv is only available for integrate");
        if (command == "integrate") {
            Rendered r = cmd_integrate(o, Json{{"schema_version", schema_version}, {"command", command}, {"system", o.system}});
            emit(o, command, r.text, out);
            return 0;
        }
        Result r;
        if (command == "singularities") r = cmd_singularities(o);
        else if (command == "index") r = cmd_index(o);
        else if (command == "alpha-test") r = cmd_alpha(o);
        else if (command == "painleve") r = cmd_painleve(o);
        else if (command == "blowup") r = cmd_blowup(o);
        else if (command == "obstructions") r = cmd_obstructions(o);
        else if (command == "verify-atlas") r = cmd_verify_atlas(o);
        else if (command == "verify-symmetry") r = cmd_verify_symmetry(o);
        else if (command == "uniqueness") r = cmd_uniqueness(o);
        else r = cmd_monodromy(o);
        Json report{{"schema_version", schema_version}, {"command", command}, {"system", o.system}};
        Setup params = make_setup(o, command == "monodromy");
        report["params"] = params.params_json;
        for (auto& [k, v] : r.body.items()) report[k] = v;
        report["status"] = r.pass ? "pass" : "fail";
        std::ostringstream text;
        if (o.format == "text")
            text_lines(text, report, "");
        else
            text << report.dump(2) << '\n';
        emit(o, command, text.str(), out);
        return r.pass ? 0 : 1;
    } catch (const UsageError& e) {
        err << "phasespace " << command << ": " << e.what() << '\n';
    } catch (const StepUnderflow& e) {
        err << "phasespace " << command << ": " << e.what() << " at t = " << e.time() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "phasespace " << command << ": " << e.what() << '\n';
    }
    return 2;
}

}  // namespace phasespace::cli
