#include "phasespace/poly.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace phasespace {

// ---------------------------------------------------------------- symbols

const std::string& Symbol::name() const { return table->name(id); }
SymbolKind Symbol::kind() const { return table->kind(id); }

Symbol SymbolTable::intern(std::string_view name, SymbolKind kind) {
    std::lock_guard lock(mutex_);
    auto it = index_.find(std::string(name));
    if (it != index_.end()) {
        if (entries_[it->second]->kind != kind)
            throw std::invalid_argument("symbol '" + std::string(name) + "' already declared with another kind");
        return Symbol{it->second, this};
    }
    if (name.empty()) throw std::invalid_argument("empty symbol name");
    auto id = static_cast<VarId>(entries_.size());
    entries_.push_back(std::make_unique<Entry>(Entry{std::string(name), kind}));
    index_.emplace(std::string(name), id);
    return Symbol{id, this};
}

std::optional<Symbol> SymbolTable::lookup(std::string_view name) const {
    std::lock_guard lock(mutex_);
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return Symbol{it->second, this};
}

Symbol SymbolTable::at(VarId id) const {
    std::lock_guard lock(mutex_);
    if (id >= entries_.size()) throw std::out_of_range("unknown symbol id");
    return Symbol{id, this};
}

const std::string& SymbolTable::name(VarId id) const {
    std::lock_guard lock(mutex_);
    return entries_.at(id)->name;
}

SymbolKind SymbolTable::kind(VarId id) const {
    std::lock_guard lock(mutex_);
    return entries_.at(id)->kind;
}

std::size_t SymbolTable::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

// --------------------------------------------------------------- monomials

Monomial Monomial::var(VarId v, std::uint32_t e) {
    Monomial m;
    if (e > 0) {
        m.factors_.emplace_back(v, e);
        m.degree_ = e;
    }
    return m;
}

std::uint32_t Monomial::exponent(VarId v) const {
    for (const auto& [var, e] : factors_)
        if (var == v) return e;
    return 0;
}

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial r;
    r.factors_.reserve(factors_.size() + o.factors_.size());
    auto i = factors_.begin(), j = o.factors_.begin();
    while (i != factors_.end() || j != o.factors_.end()) {
        if (j == o.factors_.end() || (i != factors_.end() && i->first < j->first)) {
            r.factors_.push_back(*i++);
        } else if (i == factors_.end() || j->first < i->first) {
            r.factors_.push_back(*j++);
        } else {
            r.factors_.emplace_back(i->first, i->second + j->second);
            ++i;
            ++j;
        }
    }
    r.degree_ = degree_ + o.degree_;
    return r;
}

std::optional<Monomial> Monomial::divide(const Monomial& o) const {
    if (o.degree_ > degree_) return std::nullopt;
    Monomial r;
    auto i = factors_.begin();
    auto j = o.factors_.begin();
    while (i != factors_.end() || j != o.factors_.end()) {
        if (j == o.factors_.end() || (i != factors_.end() && i->first < j->first)) {
            r.factors_.push_back(*i++);
        } else if (i == factors_.end() || j->first < i->first) {
            return std::nullopt;
        } else {
            if (j->second > i->second) return std::nullopt;
            if (i->second > j->second) r.factors_.emplace_back(i->first, i->second - j->second);
            ++i;
            ++j;
        }
    }
    r.degree_ = degree_ - o.degree_;
    return r;
}

Monomial Monomial::without(VarId v) const {
    Monomial r;
    for (const auto& f : factors_)
        if (f.first != v) {
            r.factors_.push_back(f);
            r.degree_ += f.second;
        }
    return r;
}

Monomial Monomial::gcd(const Monomial& o) const {
    Monomial r;
    auto i = factors_.begin(), j = o.factors_.begin();
    while (i != factors_.end() && j != o.factors_.end()) {
        if (i->first < j->first) {
            ++i;
        } else if (j->first < i->first) {
            ++j;
        } else {
            auto e = std::min(i->second, j->second);
            r.factors_.emplace_back(i->first, e);
            r.degree_ += e;
            ++i;
            ++j;
        }
    }
    return r;
}

bool grlex_less(const Monomial& a, const Monomial& b) {
    if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
    auto i = a.factors_.begin(), j = b.factors_.begin();
    while (i != a.factors_.end() && j != b.factors_.end()) {
        if (i->first != j->first) return i->first > j->first;
        if (i->second != j->second) return i->second < j->second;
        ++i;
        ++j;
    }
    return i == a.factors_.end() && j != b.factors_.end();
}

// ------------------------------------------------------------- polynomials

NotDivisible::NotDivisible(std::shared_ptr<const MultiPoly> remainder)
    : std::runtime_error("not divisible; remainder " + remainder->str()), remainder_(std::move(remainder)) {}

MultiPoly::MultiPoly(const GaussianRational& c) {
    if (!c.is_zero()) terms_.push_back({Monomial(), c});
}

MultiPoly::MultiPoly(TablePtr table, std::vector<Term> terms) : table_(std::move(table)), terms_(std::move(terms)) {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return grlex_less(b.mono, a.mono); });
    normalize_sorted();
}

MultiPoly MultiPoly::constant(const GaussianRational& c, TablePtr table) {
    MultiPoly p(c);
    p.table_ = std::move(table);
    return p;
}

MultiPoly MultiPoly::variable(const Symbol& s) {
    if (!s.table) throw std::invalid_argument("symbol without table");
    MultiPoly p;
    p.table_ = const_cast<SymbolTable*>(s.table)->shared();
    p.terms_.push_back({Monomial::var(s.id), GaussianRational(1)});
    return p;
}

MultiPoly MultiPoly::monomial(const Monomial& m, const GaussianRational& c, TablePtr table) {
    MultiPoly p;
    p.table_ = std::move(table);
    if (!c.is_zero()) p.terms_.push_back({m, c});
    return p;
}

void MultiPoly::normalize_sorted() {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& t : terms_) {
        if (!out.empty() && out.back().mono == t.mono) {
            out.back().coef += t.coef;
        } else {
            if (!out.empty() && out.back().coef.is_zero()) out.pop_back();
            out.push_back(std::move(t));
        }
    }
    if (!out.empty() && out.back().coef.is_zero()) out.pop_back();
    terms_ = std::move(out);
}

void MultiPoly::check_table(const MultiPoly& o) const {
    if (table_ && o.table_ && table_ != o.table_) throw SymbolTableMismatch();
}

void MultiPoly::adopt_table(const MultiPoly& o) {
    check_table(o);
    if (!table_) table_ = o.table_;
}

GaussianRational MultiPoly::constant_term() const {
    if (!terms_.empty() && terms_.back().mono.is_one()) return terms_.back().coef;
    return GaussianRational(0);
}

GaussianRational MultiPoly::constant_value() const {
    if (!is_constant()) throw std::logic_error("polynomial is not constant: " + str());
    return constant_term();
}

const Term& MultiPoly::leading_term() const {
    if (terms_.empty()) throw std::logic_error("leading term of zero polynomial");
    return terms_.front();
}

std::uint32_t MultiPoly::total_degree() const { return terms_.empty() ? 0 : terms_.front().mono.degree(); }

std::uint32_t MultiPoly::degree(VarId v) const {
    std::uint32_t d = 0;
    for (const auto& t : terms_) d = std::max(d, t.mono.exponent(v));
    return d;
}

std::uint32_t MultiPoly::min_degree(VarId v) const {
    if (terms_.empty()) return 0;
    std::uint32_t d = UINT32_MAX;
    for (const auto& t : terms_) d = std::min(d, t.mono.exponent(v));
    return d;
}

std::set<VarId> MultiPoly::variables() const {
    std::set<VarId> vars;
    for (const auto& t : terms_)
        for (const auto& f : t.mono.factors()) vars.insert(f.first);
    return vars;
}

bool MultiPoly::contains(VarId v) const {
    for (const auto& t : terms_)
        if (t.mono.exponent(v)) return true;
    return false;
}

bool MultiPoly::only_in(const std::set<VarId>& vars) const {
    for (const auto& t : terms_)
        for (const auto& f : t.mono.factors())
            if (!vars.count(f.first)) return false;
    return true;
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly r = *this;
    for (auto& t : r.terms_) t.coef = -t.coef;
    return r;
}

namespace {

std::vector<Term> merge_terms(const std::vector<Term>& a, const std::vector<Term>& b, bool subtract) {
    std::vector<Term> out;
    out.reserve(a.size() + b.size());
    auto i = a.begin(), j = b.begin();
    while (i != a.end() || j != b.end()) {
        if (j == b.end() || (i != a.end() && grlex_less(j->mono, i->mono))) {
            out.push_back(*i++);
        } else if (i == a.end() || grlex_less(i->mono, j->mono)) {
            out.push_back(subtract ? Term{j->mono, -j->coef} : *j);
            ++j;
        } else {
            GaussianRational c = subtract ? i->coef - j->coef : i->coef + j->coef;
            if (!c.is_zero()) out.push_back({i->mono, std::move(c)});
            ++i;
            ++j;
        }
    }
    return out;
}

}  // namespace

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
    adopt_table(o);
    if (o.terms_.empty()) return *this;
    terms_ = merge_terms(terms_, o.terms_, false);
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
    adopt_table(o);
    if (o.terms_.empty()) return *this;
    terms_ = merge_terms(terms_, o.terms_, true);
    return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.check_table(b);
    MultiPoly r;
    r.table_ = a.table_ ? a.table_ : b.table_;
    if (a.terms_.empty() || b.terms_.empty()) return r;
    if (b.terms_.size() == 1) return a.times_monomial(b.terms_[0].mono, b.terms_[0].coef).with_table(r.table_);
    if (a.terms_.size() == 1) return b.times_monomial(a.terms_[0].mono, a.terms_[0].coef).with_table(r.table_);
    r.terms_.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& s : a.terms_)
        for (const auto& t : b.terms_) r.terms_.push_back({s.mono * t.mono, s.coef * t.coef});
    std::sort(r.terms_.begin(), r.terms_.end(),
              [](const Term& x, const Term& y) { return grlex_less(y.mono, x.mono); });
    r.normalize_sorted();
    return r;
}

MultiPoly& MultiPoly::operator*=(const MultiPoly& o) { return *this = *this * o; }

bool operator==(const MultiPoly& a, const MultiPoly& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t k = 0; k < a.terms_.size(); ++k)
        if (!(a.terms_[k].mono == b.terms_[k].mono) || !(a.terms_[k].coef == b.terms_[k].coef)) return false;
    return true;
}

MultiPoly MultiPoly::with_table(TablePtr t) const {
    MultiPoly r = *this;
    if (!r.table_) r.table_ = std::move(t);
    return r;
}

MultiPoly MultiPoly::scaled(const GaussianRational& c) const {
    MultiPoly r;
    r.table_ = table_;
    if (c.is_zero()) return r;
    r.terms_ = terms_;
    for (auto& t : r.terms_) t.coef *= c;
    return r;
}

MultiPoly MultiPoly::times_monomial(const Monomial& m, const GaussianRational& c) const {
    MultiPoly r;
    r.table_ = table_;
    if (c.is_zero()) return r;
    r.terms_.reserve(terms_.size());
    // multiplication by a monomial preserves the graded-lex order
    for (const auto& t : terms_) r.terms_.push_back({t.mono * m, t.coef * c});
    return r;
}

MultiPoly MultiPoly::pow(unsigned e) const {
    MultiPoly result = MultiPoly::constant(1, table_), base = *this;
    while (e) {
        if (e & 1u) result *= base;
        e >>= 1u;
        if (e) base *= base;
    }
    return result;
}

MultiPoly MultiPoly::monic() const {
    if (terms_.empty() || leading_coef().is_one()) return *this;
    return scaled(leading_coef().inverse());
}

std::map<std::uint32_t, MultiPoly> MultiPoly::coefficients_in(VarId v) const {
    std::map<std::uint32_t, std::vector<Term>> buckets;
    for (const auto& t : terms_) buckets[t.mono.exponent(v)].push_back({t.mono.without(v), t.coef});
    std::map<std::uint32_t, MultiPoly> out;
    for (auto& [e, ts] : buckets) out.emplace(e, MultiPoly(table_, std::move(ts)));
    return out;
}

MultiPoly MultiPoly::coefficient(VarId v, std::uint32_t e) const {
    std::vector<Term> ts;
    for (const auto& t : terms_)
        if (t.mono.exponent(v) == e) ts.push_back({t.mono.without(v), t.coef});
    return MultiPoly(table_, std::move(ts));
}

std::map<Monomial, MultiPoly, GrlexGreater> MultiPoly::coefficients_in(const std::set<VarId>& vars) const {
    std::map<Monomial, std::vector<Term>, GrlexGreater> buckets;
    for (const auto& t : terms_) {
        Monomial in, out;
        for (const auto& [v, e] : t.mono.factors()) {
            if (vars.count(v))
                in = in * Monomial::var(v, e);
            else
                out = out * Monomial::var(v, e);
        }
        buckets[in].push_back({out, t.coef});
    }
    std::map<Monomial, MultiPoly, GrlexGreater> result;
    for (auto& [m, ts] : buckets) result.emplace(m, MultiPoly(table_, std::move(ts)));
    return result;
}

MultiPoly MultiPoly::derivative(VarId v) const {
    std::vector<Term> ts;
    for (const auto& t : terms_) {
        auto e = t.mono.exponent(v);
        if (e == 0) continue;
        ts.push_back({t.mono.without(v) * Monomial::var(v, e - 1), t.coef * GaussianRational(static_cast<long>(e))});
    }
    return MultiPoly(table_, std::move(ts));
}

MultiPoly MultiPoly::substitute(const std::map<VarId, MultiPoly>& bindings) const {
    TablePtr table = table_;
    for (const auto& [v, p] : bindings) {
        if (table && p.table_ && table != p.table_) throw SymbolTableMismatch();
        if (!table) table = p.table_;
    }
    std::map<std::pair<VarId, std::uint32_t>, MultiPoly> powers;
    auto power = [&](VarId v, std::uint32_t e) -> const MultiPoly& {
        auto key = std::make_pair(v, e);
        auto it = powers.find(key);
        if (it != powers.end()) return it->second;
        return powers.emplace(key, bindings.at(v).pow(e)).first->second;
    };
    std::vector<Term> acc;
    for (const auto& t : terms_) {
        Monomial kept;
        MultiPoly factor = MultiPoly::constant(t.coef, table);
        for (const auto& [v, e] : t.mono.factors()) {
            if (bindings.count(v))
                factor *= power(v, e);
            else
                kept = kept * Monomial::var(v, e);
        }
        for (const auto& ft : factor.terms_) acc.push_back({ft.mono * kept, ft.coef});
    }
    return MultiPoly(table, std::move(acc));
}

GaussianRational MultiPoly::evaluate(const std::map<VarId, GaussianRational>& point) const {
    GaussianRational sum(0);
    for (const auto& t : terms_) {
        GaussianRational v = t.coef;
        for (const auto& [var, e] : t.mono.factors()) {
            auto it = point.find(var);
            if (it == point.end()) throw std::invalid_argument("evaluate: unbound variable " + (table_ ? table_->name(var) : std::string("?")));
            v *= it->second.pow(e);
        }
        sum += v;
    }
    return sum;
}

std::string MultiPoly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& t : terms_) {
        std::string mono;
        for (const auto& [v, e] : t.mono.factors()) {
            if (!mono.empty()) mono += "*";
            mono += table_ ? table_->name(v) : ("v" + std::to_string(v));
            if (e > 1) mono += "^" + std::to_string(e);
        }
        std::string coef;
        const auto& c = t.coef;
        bool negative = false;
        if (mono.empty()) {
            coef = c.str();
            if (coef[0] == '-') {
                negative = true;
                coef.erase(0, 1);
            }
        } else if (c.is_one()) {
            coef.clear();
        } else if (c == GaussianRational(-1)) {
            negative = true;
        } else {
            coef = c.str();
            if (coef[0] == '-') {
                negative = true;
                coef.erase(0, 1);
            }
            coef += "*";
        }
        std::string body = mono.empty() ? coef : coef + mono;
        if (first) {
            out << (negative ? "-" : "") << body;
        } else {
            out << (negative ? " - " : " + ") << body;
        }
        first = false;
    }
    return out.str();
}

// -------------------------------------------------------------- division

DivisionResult divide_with_remainder(const MultiPoly& a, const MultiPoly& b) {
    if (b.is_zero()) throw std::domain_error("division by zero polynomial");
    if (a.table() && b.table() && a.table() != b.table()) throw SymbolTableMismatch();
    TablePtr table = a.table() ? a.table() : b.table();
    const Term& lb = b.leading_term();
    GaussianRational inv = lb.coef.inverse();
    std::vector<Term> q, r;
    MultiPoly p = a;
    while (!p.is_zero()) {
        const Term& lp = p.leading_term();
        if (auto m = lp.mono.divide(lb.mono)) {
            GaussianRational c = lp.coef * inv;
            q.push_back({*m, c});
            p -= b.times_monomial(*m, c);
        } else {
            r.push_back(lp);
            p -= MultiPoly::monomial(lp.mono, lp.coef, table);
        }
    }
    return {MultiPoly(table, std::move(q)), MultiPoly(table, std::move(r))};
}

std::optional<MultiPoly> try_divide(const MultiPoly& a, const MultiPoly& b) {
    if (b.is_zero()) throw std::domain_error("division by zero polynomial");
    if (a.table() && b.table() && a.table() != b.table()) throw SymbolTableMismatch();
    TablePtr table = a.table() ? a.table() : b.table();
    if (a.is_zero()) return MultiPoly::constant(0, table);
    if (b.is_constant()) return a.scaled(b.constant_value().inverse()).with_table(table);
    // cheap degree screen
    for (VarId v : b.variables())
        if (b.degree(v) > a.degree(v)) return std::nullopt;
    if (b.is_monomial()) {
        const Term& lb = b.leading_term();
        GaussianRational inv = lb.coef.inverse();
        std::vector<Term> q;
        q.reserve(a.size());
        for (const auto& t : a.terms()) {
            auto m = t.mono.divide(lb.mono);
            if (!m) return std::nullopt;
            q.push_back({*m, t.coef * inv});
        }
        return MultiPoly(table, std::move(q));
    }
    const Term& lb = b.leading_term();
    GaussianRational inv = lb.coef.inverse();
    std::vector<Term> q;
    MultiPoly p = a;
    while (!p.is_zero()) {
        const Term& lp = p.leading_term();
        auto m = lp.mono.divide(lb.mono);
        if (!m) return std::nullopt;
        GaussianRational c = lp.coef * inv;
        q.push_back({*m, c});
        p -= b.times_monomial(*m, c);
    }
    return MultiPoly(table, std::move(q));
}

MultiPoly exact_divide(const MultiPoly& a, const MultiPoly& b) {
    if (auto q = try_divide(a, b)) return *q;
    auto rem = divide_with_remainder(a, b).remainder;
    throw NotDivisible(std::make_shared<const MultiPoly>(std::move(rem)));
}

// ------------------------------------------------------------------- gcd

Monomial monomial_content(const MultiPoly& p) {
    if (p.is_zero()) return Monomial();
    Monomial g = p.terms().front().mono;
    for (const auto& t : p.terms()) {
        g = g.gcd(t.mono);
        if (g.is_one()) break;
    }
    return g;
}

namespace {

MultiPoly divide_by_monomial(const MultiPoly& p, const Monomial& m) {
    if (m.is_one()) return p;
    std::vector<Term> ts;
    ts.reserve(p.size());
    for (const auto& t : p.terms()) ts.push_back({*t.mono.divide(m), t.coef});
    return MultiPoly(p.table(), std::move(ts));
}

MultiPoly gcd_core(const MultiPoly& a, const MultiPoly& b);

std::vector<GaussianRational> univariate_image(const MultiPoly& p, VarId v, const std::map<VarId, GaussianRational>& at) {
    std::vector<GaussianRational> out(p.degree(v) + 1, GaussianRational(0));
    for (const auto& t : p.terms()) {
        GaussianRational c = t.coef;
        for (const auto& [w, e] : t.mono.factors())
            if (w != v) c *= at.at(w).pow(e);
        out[t.mono.exponent(v)] += c;
    }
    while (!out.empty() && out.back().is_zero()) out.pop_back();
    return out;
}

std::size_t univariate_gcd_degree(std::vector<GaussianRational> a, std::vector<GaussianRational> b) {
    if (a.size() < b.size()) std::swap(a, b);
    while (!b.empty()) {
        // a mod b
        GaussianRational inv = b.back().inverse();
        while (a.size() >= b.size()) {
            GaussianRational q = a.back() * inv;
            std::size_t shift = a.size() - b.size();
            for (std::size_t k = 0; k < b.size(); ++k) a[shift + k] -= q * b[k];
            a.pop_back();
            while (!a.empty() && a.back().is_zero()) a.pop_back();
        }
        std::swap(a, b);
    }
    return a.empty() ? 0 : a.size() - 1;
}

/// True when a specialization of all but one variable shows, for every
/// shared variable, that the gcd has degree zero in it. Leading
/// coefficients must survive the specialization, so the image gcd degree
/// bounds the true one from above.
bool coprime_by_images(const MultiPoly& a, const MultiPoly& b, const std::set<VarId>& vars) {
    static const long values[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (VarId v : vars) {
        bool decided = false;
        for (int attempt = 0; attempt < 4 && !decided; ++attempt) {
            std::map<VarId, GaussianRational> at;
            std::size_t k = 0;
            for (VarId w : vars)
                if (w != v) at[w] = GaussianRational(mpq_class(values[(k++ + 5 * attempt) % 12], 1 + attempt));
            auto ia = univariate_image(a, v, at), ib = univariate_image(b, v, at);
            if (ia.size() != a.degree(v) + 1 || ib.size() != b.degree(v) + 1) continue;
            if (univariate_gcd_degree(std::move(ia), std::move(ib)) > 0) return false;
            decided = true;
        }
        if (!decided) return false;
    }
    return true;
}

MultiPoly primitive_in(const MultiPoly& p, VarId v) {
    MultiPoly c = content_in(p, v);
    if (c.is_constant()) return p.monic();
    return exact_divide(p, c).monic();
}

MultiPoly gcd_core(const MultiPoly& a, const MultiPoly& b) {
    TablePtr table = a.table() ? a.table() : b.table();
    MultiPoly one = MultiPoly::constant(1, table);
    if (a.is_constant() || b.is_constant()) return one;
    if (a.size() <= b.size()) {
        if (try_divide(b, a)) return a.monic();
    } else if (try_divide(a, b)) {
        return b.monic();
    }
    auto va = a.variables(), vb = b.variables();
    for (VarId v : va)
        if (!vb.count(v)) return gcd(content_in(a, v), b);
    for (VarId v : vb)
        if (!va.count(v)) return gcd(a, content_in(b, v));
    if (coprime_by_images(a, b, va)) return one;

    VarId main = *va.begin();
    std::uint32_t best = UINT32_MAX;
    for (VarId v : va) {
        auto d = std::max(a.degree(v), b.degree(v));
        if (d < best) {
            best = d;
            main = v;
        }
    }
    MultiPoly ca = content_in(a, main), cb = content_in(b, main);
    MultiPoly pa = ca.is_constant() ? a : exact_divide(a, ca);
    MultiPoly pb = cb.is_constant() ? b : exact_divide(b, cb);
    MultiPoly cg = gcd(ca, cb);
    if (pa.degree(main) < pb.degree(main)) std::swap(pa, pb);
    while (true) {
        MultiPoly r = pseudo_remainder(pa, pb, main);
        if (r.is_zero()) break;
        if (r.degree(main) == 0) {
            pb = one;
            break;
        }
        pa = std::move(pb);
        pb = primitive_in(r, main);
    }
    if (!pb.is_constant()) pb = primitive_in(pb, main);
    return (pb * cg).monic();
}

}  // namespace

MultiPoly content_in(const MultiPoly& p, VarId v) {
    auto coeffs = p.coefficients_in(v);
    std::vector<MultiPoly> list;
    for (auto& [e, c] : coeffs) list.push_back(std::move(c));
    std::sort(list.begin(), list.end(), [](const MultiPoly& x, const MultiPoly& y) { return x.size() < y.size(); });
    if (list.empty()) return MultiPoly::constant(0, p.table());
    MultiPoly g = list.front().monic();
    for (std::size_t k = 1; k < list.size() && !g.is_constant(); ++k) g = gcd(g, list[k]);
    return g.is_constant() ? MultiPoly::constant(1, p.table()) : g;
}

MultiPoly gcd(const MultiPoly& a, const MultiPoly& b) {
    if (a.table() && b.table() && a.table() != b.table()) throw SymbolTableMismatch();
    TablePtr table = a.table() ? a.table() : b.table();
    if (a.is_zero()) return b.monic().with_table(table);
    if (b.is_zero()) return a.monic().with_table(table);
    if (a.is_constant() || b.is_constant()) return MultiPoly::constant(1, table);
    Monomial ma = monomial_content(a), mb = monomial_content(b);
    Monomial mg = ma.gcd(mb);
    MultiPoly ra = divide_by_monomial(a, ma), rb = divide_by_monomial(b, mb);
    MultiPoly g = gcd_core(ra, rb);
    return g.times_monomial(mg, 1).monic().with_table(table);
}

MultiPoly pseudo_remainder(const MultiPoly& a, const MultiPoly& b, VarId v) {
    if (b.is_zero()) throw std::domain_error("pseudo-remainder by zero");
    std::uint32_t db = b.degree(v);
    MultiPoly lcb = b.coefficient(v, db);
    MultiPoly r = a;
    int steps = static_cast<int>(a.degree(v)) - static_cast<int>(db) + 1;
    if (steps < 0) steps = 0;
    int used = 0;
    while (!r.is_zero() && r.degree(v) >= db) {
        std::uint32_t d = r.degree(v);
        MultiPoly lr = r.coefficient(v, d);
        r = lcb * r - lr * b.times_monomial(Monomial::var(v, d - db), 1);
        ++used;
    }
    if (used < steps) r *= lcb.pow(static_cast<unsigned>(steps - used));
    return r;
}

// ------------------------------------------------------------- resultant

namespace {

MultiPoly bareiss_determinant(std::vector<std::vector<MultiPoly>> m, TablePtr table) {
    const std::size_t n = m.size();
    if (n == 0) return MultiPoly::constant(1, table);
    bool negate = false;
    MultiPoly prev = MultiPoly::constant(1, table);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        std::size_t pivot = n;
        for (std::size_t i = k; i < n; ++i)
            if (!m[i][k].is_zero() && (pivot == n || m[i][k].size() < m[pivot][k].size())) pivot = i;
        if (pivot == n) return MultiPoly::constant(0, table);
        if (pivot != k) {
            std::swap(m[pivot], m[k]);
            negate = !negate;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j)
                m[i][j] = exact_divide(m[k][k] * m[i][j] - m[i][k] * m[k][j], prev);
            m[i][k] = MultiPoly::constant(0, table);
        }
        prev = m[k][k];
    }
    return negate ? -m[n - 1][n - 1] : m[n - 1][n - 1];
}

}  // namespace

MultiPoly resultant(const MultiPoly& a, const MultiPoly& b, VarId v) {
    TablePtr table = a.table() ? a.table() : b.table();
    if (a.is_zero() || b.is_zero()) return MultiPoly::constant(0, table);
    const std::uint32_t m = a.degree(v), n = b.degree(v);
    if (m == 0) return a.pow(n);
    if (n == 0) return b.pow(m);
    auto ca = a.coefficients_in(v), cb = b.coefficients_in(v);
    const std::size_t size = m + n;
    std::vector<std::vector<MultiPoly>> s(size, std::vector<MultiPoly>(size, MultiPoly::constant(0, table)));
    for (std::uint32_t r = 0; r < n; ++r)
        for (auto& [e, c] : ca) s[r][r + (m - e)] = c;
    for (std::uint32_t r = 0; r < m; ++r)
        for (auto& [e, c] : cb) s[n + r][r + (n - e)] = c;
    return bareiss_determinant(std::move(s), table);
}

// ------------------------------------------------------- square-free parts

std::vector<std::pair<MultiPoly, unsigned>> squarefree_decomposition(const MultiPoly& p, VarId v) {
    std::vector<std::pair<MultiPoly, unsigned>> out;
    if (p.is_zero() || p.degree(v) == 0) return out;
    MultiPoly f = primitive_in(p, v);
    MultiPoly df = f.derivative(v);
    MultiPoly a0 = gcd(f, df);
    MultiPoly b = exact_divide(f, a0);
    MultiPoly c = exact_divide(df, a0);
    MultiPoly d = c - b.derivative(v);
    unsigned mult = 1;
    while (b.degree(v) > 0) {
        MultiPoly a = gcd(b, d);
        if (a.degree(v) > 0) out.emplace_back(a, mult);
        MultiPoly bn = exact_divide(b, a);
        MultiPoly cn = exact_divide(d, a);
        d = cn - bn.derivative(v);
        b = std::move(bn);
        ++mult;
    }
    return out;
}

// ---------------------------------------------------------------- sqrt

std::optional<MultiPoly> poly_sqrt(const MultiPoly& p) {
    TablePtr table = p.table();
    if (p.is_zero()) return MultiPoly::constant(0, table);
    const Term& lt = p.leading_term();
    Monomial root_mono;
    for (const auto& [v, e] : lt.mono.factors()) {
        if (e % 2) return std::nullopt;
        root_mono = root_mono * Monomial::var(v, e / 2);
    }
    auto root_coef = lt.coef.sqrt();
    if (!root_coef) return std::nullopt;
    MultiPoly s = MultiPoly::monomial(root_mono, *root_coef, table);
    Term lead{root_mono, *root_coef};
    Monomial last = root_mono;
    MultiPoly r = p - s * s;
    GaussianRational two_lead_inv = (GaussianRational(2) * lead.coef).inverse();
    std::size_t guard = 4 * p.size() + 8;
    while (!r.is_zero()) {
        if (guard-- == 0) return std::nullopt;
        const Term& lr = r.leading_term();
        auto m = lr.mono.divide(lead.mono);
        if (!m || !grlex_less(*m, last)) return std::nullopt;
        MultiPoly t = MultiPoly::monomial(*m, lr.coef * two_lead_inv, table);
        r -= (s.scaled(2) + t) * t;
        s += t;
        last = *m;
    }
    return s;
}

}  // namespace phasespace
