#include "phasespace/ratfn.hpp"

namespace phasespace {

MultiPoly poly_arith(const MultiPoly& a, const MultiPoly& b, ArithOp op) {
    switch (op) {
        case ArithOp::add: return a + b;
        case ArithOp::sub: return a - b;
        case ArithOp::mul: return a * b;
    }
    throw std::invalid_argument("unknown arithmetic op");
}

RationalFn::RationalFn(const MultiPoly& num, const MultiPoly& den) : num_(num), den_(den) {
    if (den_.is_zero()) throw std::domain_error("rational function with zero denominator");
    reduce();
}

void RationalFn::reduce() {
    TablePtr t = table();
    if (num_.is_zero()) {
        num_ = MultiPoly::constant(0, t);
        den_ = MultiPoly::constant(1, t);
        return;
    }
    if (!den_.is_constant()) {
        MultiPoly g = gcd(num_, den_);
        if (!g.is_constant()) {
            num_ = exact_divide(num_, g);
            den_ = exact_divide(den_, g);
        }
    }
    const GaussianRational& lc = den_.leading_coef();
    if (!lc.is_one()) {
        GaussianRational inv = lc.inverse();
        num_ = num_.scaled(inv);
        den_ = den_.scaled(inv);
    }
    num_ = num_.with_table(t);
    den_ = den_.with_table(t);
}

GaussianRational RationalFn::constant_value() const {
    return num_.constant_value() / den_.constant_value();
}

MultiPoly RationalFn::as_polynomial() const {
    if (!den_.is_constant()) throw std::logic_error("not a polynomial: " + str());
    return num_.scaled(den_.constant_value().inverse());
}

std::set<VarId> RationalFn::variables() const {
    auto v = num_.variables();
    auto d = den_.variables();
    v.insert(d.begin(), d.end());
    return v;
}

RationalFn RationalFn::operator-() const { return RationalFn(-num_, den_, Unreduced{}); }

RationalFn operator+(const RationalFn& a, const RationalFn& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den_ == b.den_) return RationalFn(a.num_ + b.num_, a.den_);
    if (a.den_.is_constant() && b.den_.is_constant())
        return RationalFn(a.num_ + b.num_.scaled(a.den_.constant_value() / b.den_.constant_value()), a.den_);
    MultiPoly g = gcd(a.den_, b.den_);
    MultiPoly bd = exact_divide(b.den_, g), ad = exact_divide(a.den_, g);
    MultiPoly num = a.num_ * bd + b.num_ * ad;
    MultiPoly den = a.den_ * bd;
    if (num.is_zero()) return RationalFn(MultiPoly::constant(0, a.table() ? a.table() : b.table()));
    // any common factor of num and den divides g
    if (g.is_constant()) {
        RationalFn r(std::move(num), std::move(den), RationalFn::Unreduced{});
        const GaussianRational& lc = r.den_.leading_coef();
        if (!lc.is_one()) {
            r.num_ = r.num_.scaled(lc.inverse());
            r.den_ = r.den_.scaled(lc.inverse());
        }
        return r;
    }
    return RationalFn(num, den);
}

RationalFn operator-(const RationalFn& a, const RationalFn& b) { return a + (-b); }

RationalFn operator*(const RationalFn& a, const RationalFn& b) {
    TablePtr t = a.table() ? a.table() : b.table();
    if (a.is_zero() || b.is_zero()) return RationalFn(MultiPoly::constant(0, t));
    MultiPoly g1 = gcd(a.num_, b.den_), g2 = gcd(b.num_, a.den_);
    MultiPoly an = g1.is_constant() ? a.num_ : exact_divide(a.num_, g1);
    MultiPoly bd = g1.is_constant() ? b.den_ : exact_divide(b.den_, g1);
    MultiPoly bn = g2.is_constant() ? b.num_ : exact_divide(b.num_, g2);
    MultiPoly ad = g2.is_constant() ? a.den_ : exact_divide(a.den_, g2);
    RationalFn r(an * bn, ad * bd, RationalFn::Unreduced{});
    const GaussianRational& lc = r.den_.leading_coef();
    if (!lc.is_one()) {
        r.num_ = r.num_.scaled(lc.inverse());
        r.den_ = r.den_.scaled(lc.inverse());
    }
    r.num_ = r.num_.with_table(t);
    r.den_ = r.den_.with_table(t);
    return r;
}

RationalFn operator/(const RationalFn& a, const RationalFn& b) {
    if (b.is_zero()) throw std::domain_error("rational function division by zero");
    return a * RationalFn(b.den_, b.num_, RationalFn::Unreduced{}).with_monic_den();
}

RationalFn RationalFn::with_monic_den() const {
    RationalFn r = *this;
    const GaussianRational& lc = r.den_.leading_coef();
    if (!lc.is_one()) {
        r.num_ = r.num_.scaled(lc.inverse());
        r.den_ = r.den_.scaled(lc.inverse());
    }
    return r;
}

RationalFn RationalFn::pow(int e) const {
    if (e < 0) {
        if (is_zero()) throw std::domain_error("negative power of zero");
        return RationalFn(den_, num_, Unreduced{}).with_monic_den().pow(-e);
    }
    return RationalFn(num_.pow(static_cast<unsigned>(e)), den_.pow(static_cast<unsigned>(e)), Unreduced{});
}

RationalFn RationalFn::derivative(VarId v) const {
    if (den_.is_constant()) return RationalFn(num_.derivative(v), den_, Unreduced{});
    return RationalFn(num_.derivative(v) * den_ - num_ * den_.derivative(v), den_ * den_);
}

namespace {

/// P(bindings) as an unreduced quotient with denominator prod D_j^{deg_j P}.
std::pair<MultiPoly, MultiPoly> substitute_poly(const MultiPoly& p, const std::map<VarId, RationalFn>& bindings,
                                                const TablePtr& table) {
    std::map<VarId, std::uint32_t> degs;
    for (const auto& [v, r] : bindings) {
        auto d = p.degree(v);
        if (d > 0 && !r.den().is_constant()) degs[v] = d;
    }
    std::map<std::pair<VarId, std::uint32_t>, MultiPoly> num_pow, den_pow;
    auto npow = [&](VarId v, std::uint32_t e) -> const MultiPoly& {
        auto key = std::make_pair(v, e);
        auto it = num_pow.find(key);
        if (it != num_pow.end()) return it->second;
        const RationalFn& r = bindings.at(v);
        MultiPoly base = r.den().is_constant() ? r.num().scaled(r.den().constant_value().inverse()) : r.num();
        return num_pow.emplace(key, base.pow(e)).first->second;
    };
    auto dpow = [&](VarId v, std::uint32_t e) -> const MultiPoly& {
        auto key = std::make_pair(v, e);
        auto it = den_pow.find(key);
        if (it != den_pow.end()) return it->second;
        return den_pow.emplace(key, bindings.at(v).den().pow(e)).first->second;
    };
    std::vector<Term> acc;
    for (const auto& t : p.terms()) {
        Monomial kept;
        MultiPoly factor = MultiPoly::constant(t.coef, table);
        std::map<VarId, std::uint32_t> used;
        for (const auto& [v, e] : t.mono.factors()) {
            if (bindings.count(v)) {
                factor *= npow(v, e);
                used[v] = e;
            } else {
                kept = kept * Monomial::var(v, e);
            }
        }
        for (const auto& [v, d] : degs) {
            auto e = used.count(v) ? used[v] : 0u;
            if (d > e) factor *= dpow(v, d - e);
        }
        for (const auto& ft : factor.terms()) acc.push_back({ft.mono * kept, ft.coef});
    }
    MultiPoly den = MultiPoly::constant(1, table);
    for (const auto& [v, d] : degs) den *= dpow(v, d);
    return {MultiPoly(table, std::move(acc)), den};
}

}  // namespace

RationalFn RationalFn::substitute(const std::map<VarId, RationalFn>& bindings) const {
    TablePtr t = table();
    for (const auto& [v, r] : bindings) {
        auto rt = r.table();
        if (t && rt && t != rt) throw SymbolTableMismatch();
        if (!t) t = rt;
    }
    auto [nn, nd] = substitute_poly(num_, bindings, t);
    if (den_.is_constant()) return RationalFn(nn, nd.scaled(den_.constant_value()));
    auto [dn, dd] = substitute_poly(den_, bindings, t);
    if (dn.is_zero()) throw std::domain_error("denominator vanishes identically after substitution: " + str());
    return RationalFn(nn, nd) / RationalFn(dn, dd);
}

GaussianRational RationalFn::evaluate(const std::map<VarId, GaussianRational>& point) const {
    GaussianRational d = den_.evaluate(point);
    if (d.is_zero()) throw std::domain_error("evaluation on the denominator locus of " + str());
    return num_.evaluate(point) / d;
}

std::string RationalFn::str() const {
    if (den_.is_constant()) return as_polynomial().str();
    std::string n = num_.str(), d = den_.str();
    if (num_.size() > 1) n = "(" + n + ")";
    bool simple_den = den_.is_monomial() && den_.leading_term().mono.factors().size() == 1 && den_.leading_coef().is_one();
    if (!simple_den) d = "(" + d + ")";
    return n + "/" + d;
}

Triple substitute(const Triple& f, const std::map<VarId, RationalFn>& bindings) {
    return {f[0].substitute(bindings), f[1].substitute(bindings), f[2].substitute(bindings)};
}

std::map<VarId, RationalFn> bindings_for(const std::array<Symbol, 3>& vars, const Triple& values) {
    return {{vars[0].id, values[0]}, {vars[1].id, values[1]}, {vars[2].id, values[2]}};
}

}  // namespace phasespace
