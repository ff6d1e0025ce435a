#pragma once

#include <array>
#include <map>
#include <string>

#include "phasespace/poly.hpp"

namespace phasespace {

enum class ArithOp { add, sub, mul };

MultiPoly poly_arith(const MultiPoly& a, const MultiPoly& b, ArithOp op);

/// Reduced quotient num/den. After every public operation gcd(num, den) = 1
/// and the graded-lex leading coefficient of den is 1.
class RationalFn {
public:
    RationalFn() : den_(1) {}
    RationalFn(const MultiPoly& p) : num_(p), den_(MultiPoly::constant(1, p.table())) {}
    RationalFn(const GaussianRational& c) : num_(c), den_(1) {}
    RationalFn(long c) : num_(c), den_(1) {}
    /// Reduces; throws std::domain_error on a zero denominator.
    RationalFn(const MultiPoly& num, const MultiPoly& den);

    static RationalFn variable(const Symbol& s) { return RationalFn(MultiPoly::variable(s)); }

    const MultiPoly& num() const { return num_; }
    const MultiPoly& den() const { return den_; }
    TablePtr table() const { return num_.table() ? num_.table() : den_.table(); }

    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_constant(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    GaussianRational constant_value() const;
    /// The polynomial value; throws when a non-constant denominator remains.
    MultiPoly as_polynomial() const;

    std::set<VarId> variables() const;
    bool only_in(const std::set<VarId>& vars) const { return num_.only_in(vars) && den_.only_in(vars); }
    bool contains(VarId v) const { return num_.contains(v) || den_.contains(v); }

    RationalFn operator-() const;
    friend RationalFn operator+(const RationalFn& a, const RationalFn& b);
    friend RationalFn operator-(const RationalFn& a, const RationalFn& b);
    friend RationalFn operator*(const RationalFn& a, const RationalFn& b);
    friend RationalFn operator/(const RationalFn& a, const RationalFn& b);
    RationalFn& operator+=(const RationalFn& o) { return *this = *this + o; }
    RationalFn& operator-=(const RationalFn& o) { return *this = *this - o; }
    RationalFn& operator*=(const RationalFn& o) { return *this = *this * o; }
    friend bool operator==(const RationalFn& a, const RationalFn& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

    RationalFn pow(int e) const;
    RationalFn derivative(VarId v) const;

    /// Simultaneous substitution of variables by rational functions.
    RationalFn substitute(const std::map<VarId, RationalFn>& bindings) const;

    GaussianRational evaluate(const std::map<VarId, GaussianRational>& point) const;

    /// Canonical text: "num" or "(num)/(den)".
    std::string str() const;

private:
    struct Unreduced {};
    RationalFn(MultiPoly num, MultiPoly den, Unreduced) : num_(std::move(num)), den_(std::move(den)) {}
    void reduce();
    RationalFn with_monic_den() const;

    MultiPoly num_;
    MultiPoly den_;
};

using Triple = std::array<RationalFn, 3>;

/// Simultaneous substitution into each component.
Triple substitute(const Triple& f, const std::map<VarId, RationalFn>& bindings);

/// f with the given variables renamed positionally to the bindings.
std::map<VarId, RationalFn> bindings_for(const std::array<Symbol, 3>& vars, const Triple& values);

}  // namespace phasespace
