#include "phasespace/geometry.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "phasespace/text.hpp"

namespace phasespace {

Symbol Chart::boundary_symbol() const {
    if (!boundary) throw std::logic_error("chart " + name + " has no boundary coordinate");
    return vars[*boundary];
}

bool VectorField::is_polynomial() const {
    for (const auto& c : components)
        if (!polynomial_value(c)) return false;
    return true;
}

std::string VectorField::str() const {
    std::string out = chart.name + ": (";
    for (std::size_t k = 0; k < 3; ++k) out += (k ? ", " : "") + components[k].str();
    return out + ")";
}

namespace {

Triple chart_identity(const Chart& c) {
    return {RationalFn::variable(c.vars[0]), RationalFn::variable(c.vars[1]), RationalFn::variable(c.vars[2])};
}

}  // namespace

ChartMap::ChartMap(Chart source, Chart target, Triple forward, Triple inverse, Trusted)
    : source_(std::move(source)), target_(std::move(target)), forward_(std::move(forward)), inverse_(std::move(inverse)) {}

ChartMap::ChartMap(Chart source, Chart target, Triple forward, Triple inverse)
    : ChartMap(std::move(source), std::move(target), std::move(forward), std::move(inverse), Trusted{}) {
    const std::set<VarId> sv = source_.var_ids(), tv = target_.var_ids();
    for (const auto& f : forward_)
        for (VarId v : f.variables())
            if (tv.count(v) && !sv.count(v))
                throw InvalidChartMap(source_.name + " -> " + target_.name + ": forward uses target variables");
    Triple fi, if_;
    try {
        fi = substitute(forward_, bindings_for(source_.vars, inverse_));
        if_ = substitute(inverse_, bindings_for(target_.vars, forward_));
    } catch (const std::domain_error& e) {
        throw InvalidChartMap(source_.name + " -> " + target_.name + ": " + e.what());
    }
    if (fi != chart_identity(target_) || if_ != chart_identity(source_))
        throw InvalidChartMap(source_.name + " -> " + target_.name + ": inverse does not invert forward");
}

ChartMap ChartMap::identity(const Chart& c) { return ChartMap(c, c, chart_identity(c), chart_identity(c), Trusted{}); }

ChartMap ChartMap::inverted() const { return ChartMap(target_, source_, inverse_, forward_, Trusted{}); }

ChartMap ChartMap::then(const ChartMap& next) const {
    if (next.source_.name != target_.name)
        throw std::invalid_argument("cannot compose " + source_.name + "->" + target_.name + " with " +
                                    next.source_.name + "->" + next.target_.name);
    Triple fwd = substitute(next.forward_, bindings_for(target_.vars, forward_));
    Triple inv = substitute(inverse_, bindings_for(target_.vars, next.inverse_));
    return ChartMap(source_, next.target_, std::move(fwd), std::move(inv), Trusted{});
}

Triple ChartMap::apply(const Triple& point) const { return substitute(forward_, bindings_for(source_.vars, point)); }

Matrix3 jacobian(const Triple& f, const std::array<Symbol, 3>& vars) {
    Matrix3 j;
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) j[r][c] = f[r].derivative(vars[c].id);
    return j;
}

RationalFn determinant(const Matrix3& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

VectorField pushforward(const VectorField& v, const ChartMap& phi) {
    if (v.chart.name != phi.source().name)
        throw std::invalid_argument("vector field on " + v.chart.name + " pushed through map from " + phi.source().name);
    Matrix3 j = jacobian(phi.forward(), phi.source().vars);
    Triple w;
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t i = 0; i < 3; ++i)
            if (!j[k][i].is_zero() && !v.components[i].is_zero()) w[k] += j[k][i] * v.components[i];
    return VectorField{phi.target(), substitute(w, bindings_for(phi.source().vars, phi.inverse()))};
}

RationalFn jacobian_determinant(const ChartMap& phi) { return determinant(jacobian(phi.forward(), phi.source().vars)); }

std::optional<MultiPoly> polynomial_value(const RationalFn& r) {
    if (r.den().is_constant()) return r.as_polynomial();
    return try_divide(r.num(), r.den());
}

LogPoleForm log_pole_decomposition(const VectorField& v, const Symbol& boundary) {
    LogPoleForm out;
    out.boundary = boundary;
    bool found = false;
    for (std::size_t k = 0; k < 3; ++k)
        if (v.chart.vars[k] == boundary) {
            out.boundary_index = k;
            found = true;
        }
    if (!found) throw std::invalid_argument(boundary.name() + " is not a coordinate of chart " + v.chart.name);
    MultiPoly x1 = MultiPoly::variable(boundary);
    for (std::size_t k = 0; k < 3; ++k) {
        const RationalFn& c = v.components[k];
        RationalFn scaled = k == out.boundary_index ? c : c * RationalFn(x1);
        auto g = polynomial_value(scaled);
        if (!g) {
            std::string which = k == out.boundary_index ? "boundary component" : "component " + std::to_string(k + 1);
            throw PoleTooHigh(which + " of the field on " + v.chart.name + " is not of logarithmic form along " +
                              boundary.name() + ": " + c.str());
        }
        out.g[k] = *g;
    }
    return out;
}

const Chart& AtlasDocument::chart(const std::string& name) const {
    for (const auto& c : charts)
        if (c.name == name) return c;
    throw std::out_of_range("unknown chart " + name);
}

const VectorField* AtlasDocument::field(const std::string& chart_name) const {
    for (const auto& f : fields)
        if (f.chart.name == chart_name) return &f;
    return nullptr;
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

class AtlasReader {
public:
    AtlasReader(std::istream& in, TablePtr table) : in_(in) {
        doc_.table = table ? std::move(table) : SymbolTable::create();
    }

    AtlasDocument read() {
        std::string line;
        while (next(line)) {
            std::istringstream ls(line);
            std::string keyword;
            ls >> keyword;
            if (keyword == "params") {
                std::string name;
                while (ls >> name) doc_.parameters.push_back(doc_.table->intern(name, SymbolKind::parameter));
            } else if (keyword == "chart") {
                read_chart(ls);
            } else if (keyword == "field") {
                read_field(line.substr(line.find("field") + 5));
            } else if (keyword == "map") {
                read_map(line.substr(line.find("map") + 3));
            } else {
                fail("unknown keyword '" + keyword + "'");
            }
        }
        return std::move(doc_);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw std::runtime_error("atlas line " + std::to_string(line_no_) + ": " + msg);
    }

    bool next(std::string& line) {
        std::string raw;
        while (std::getline(in_, raw)) {
            ++line_no_;
            if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
            line = trim(raw);
            if (!line.empty()) return true;
        }
        return false;
    }

    void read_chart(std::istringstream& ls) {
        Chart c;
        std::string v[3];
        if (!(ls >> c.name >> v[0] >> v[1] >> v[2])) fail("chart needs a name and three variables");
        for (std::size_t k = 0; k < 3; ++k) c.vars[k] = doc_.table->intern(v[k], SymbolKind::state);
        std::string word, b;
        if (ls >> word) {
            if (word != "boundary" || !(ls >> b)) fail("expected 'boundary VAR'");
            for (std::size_t k = 0; k < 3; ++k)
                if (v[k] == b) c.boundary = k;
            if (!c.boundary) fail("boundary " + b + " is not a chart variable");
        }
        for (const auto& other : doc_.charts)
            if (other.name == c.name) fail("duplicate chart " + c.name);
        doc_.charts.push_back(std::move(c));
    }

    Triple triple(const std::string& text) {
        Triple t;
        std::size_t start = 0;
        for (std::size_t k = 0; k < 3; ++k) {
            std::size_t end = text.find(';', start);
            if ((k < 2) == (end == std::string::npos)) fail("expected three ';'-separated expressions");
            std::string piece = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
            try {
                t[k] = parse_expression(piece, doc_.table);
            } catch (const std::exception& e) {
                fail(e.what());
            }
            start = end + 1;
        }
        return t;
    }

    const Chart& chart(const std::string& name) {
        try {
            return doc_.chart(name);
        } catch (const std::out_of_range&) {
            fail("unknown chart " + name);
        }
    }

    void read_field(const std::string& rest) {
        auto colon = rest.find(':');
        if (colon == std::string::npos) fail("field needs 'CHART : E1 ; E2 ; E3'");
        const Chart& c = chart(trim(rest.substr(0, colon)));
        doc_.fields.push_back(VectorField{c, triple(rest.substr(colon + 1))});
    }

    void read_map(const std::string& rest) {
        auto arrow = rest.find("->");
        if (arrow == std::string::npos) fail("map needs 'SOURCE -> TARGET'");
        Chart src = chart(trim(rest.substr(0, arrow)));
        Chart tgt = chart(trim(rest.substr(arrow + 2)));
        std::optional<Triple> fwd, inv;
        std::string line;
        while (next(line)) {
            if (line == "end") break;
            std::istringstream ls(line);
            std::string keyword;
            ls >> keyword;
            if (keyword == "forward")
                fwd = triple(line.substr(7));
            else if (keyword == "inverse")
                inv = triple(line.substr(7));
            else
                fail("expected forward, inverse or end");
        }
        if (!fwd || !inv) fail("map " + src.name + " -> " + tgt.name + " needs forward and inverse");
        try {
            doc_.maps.emplace_back(src, tgt, *fwd, *inv);
        } catch (const InvalidChartMap& e) {
            fail(e.what());
        }
    }

    std::istream& in_;
    AtlasDocument doc_;
    std::size_t line_no_ = 0;
};

std::string triple_text(const Triple& t) { return t[0].str() + " ; " + t[1].str() + " ; " + t[2].str(); }

}  // namespace

AtlasDocument parse_atlas(std::istream& in, TablePtr table) { return AtlasReader(in, std::move(table)).read(); }

AtlasDocument load_atlas(const std::string& path, TablePtr table) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open atlas file " + path);
    return parse_atlas(in, std::move(table));
}

void write_atlas(std::ostream& out, const AtlasDocument& doc) {
    for (const auto& c : doc.charts) {
        out << "chart " << c.name;
        for (const auto& v : c.vars) out << ' ' << v.name();
        if (c.boundary) out << " boundary " << c.vars[*c.boundary].name();
        out << '\n';
    }
    if (!doc.parameters.empty()) {
        out << "params";
        for (const auto& p : doc.parameters) out << ' ' << p.name();
        out << '\n';
    }
    for (const auto& f : doc.fields) out << "field " << f.chart.name << " : " << triple_text(f.components) << '\n';
    for (const auto& m : doc.maps) {
        out << "map " << m.source().name << " -> " << m.target().name << '\n';
        out << "forward " << triple_text(m.forward()) << '\n';
        out << "inverse " << triple_text(m.inverse()) << '\n';
        out << "end\n";
    }
}

}  // namespace phasespace
