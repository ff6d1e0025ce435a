#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "phasespace/gaussian.hpp"

namespace phasespace {

using VarId = std::uint32_t;

enum class SymbolKind { state, parameter };

class SymbolTable;

/// A named variable. The id fixes its position in the graded-lex order:
/// smaller ids rank higher.
struct Symbol {
    VarId id = 0;
    const SymbolTable* table = nullptr;

    const std::string& name() const;
    SymbolKind kind() const;
    friend bool operator==(const Symbol& a, const Symbol& b) { return a.id == b.id && a.table == b.table; }
    friend bool operator<(const Symbol& a, const Symbol& b) { return a.id < b.id; }
};

/// Append-only registry of symbols. Interning is thread-safe; ids are stable.
class SymbolTable : public std::enable_shared_from_this<SymbolTable> {
public:
    static std::shared_ptr<SymbolTable> create() { return std::shared_ptr<SymbolTable>(new SymbolTable()); }

    /// Returns the existing symbol when the name is known; the kind must agree.
    Symbol intern(std::string_view name, SymbolKind kind);
    std::optional<Symbol> lookup(std::string_view name) const;
    Symbol at(VarId id) const;

    const std::string& name(VarId id) const;
    SymbolKind kind(VarId id) const;
    std::size_t size() const;

    /// Interning only appends, so a shared handle may be taken from a const table.
    std::shared_ptr<SymbolTable> shared() const {
        return std::const_pointer_cast<SymbolTable>(shared_from_this());
    }

private:
    SymbolTable() = default;
    struct Entry {
        std::string name;
        SymbolKind kind;
    };
    mutable std::mutex mutex_;
    std::vector<std::unique_ptr<Entry>> entries_;
    std::unordered_map<std::string, VarId> index_;
};

using TablePtr = std::shared_ptr<SymbolTable>;

class SymbolTableMismatch : public std::logic_error {
public:
    SymbolTableMismatch() : std::logic_error("polynomials belong to different symbol tables") {}
};

/// Sparse exponent vector: (variable, exponent) pairs sorted by variable id,
/// exponents strictly positive.
class Monomial {
public:
    Monomial() = default;
    static Monomial var(VarId v, std::uint32_t e = 1);

    const std::vector<std::pair<VarId, std::uint32_t>>& factors() const { return factors_; }
    std::uint32_t degree() const { return degree_; }
    std::uint32_t exponent(VarId v) const;
    bool is_one() const { return factors_.empty(); }

    Monomial operator*(const Monomial& o) const;
    /// Quotient when o divides *this.
    std::optional<Monomial> divide(const Monomial& o) const;
    Monomial without(VarId v) const;
    Monomial gcd(const Monomial& o) const;

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.factors_ == b.factors_; }

    /// Graded lexicographic order; variables with smaller ids are larger.
    friend bool grlex_less(const Monomial& a, const Monomial& b);

private:
    std::vector<std::pair<VarId, std::uint32_t>> factors_;
    std::uint32_t degree_ = 0;
};

struct GrlexGreater {
    bool operator()(const Monomial& a, const Monomial& b) const { return grlex_less(b, a); }
};

struct Term {
    Monomial mono;
    GaussianRational coef;
};

class MultiPoly;

class NotDivisible : public std::runtime_error {
public:
    explicit NotDivisible(std::shared_ptr<const MultiPoly> remainder);
    const MultiPoly& remainder() const { return *remainder_; }

private:
    std::shared_ptr<const MultiPoly> remainder_;
};

/// Sparse multivariate polynomial over Q(i). Terms are kept sorted in
/// decreasing graded-lex order with no zero coefficients. A polynomial
/// without a table is a constant and combines with any table.
class MultiPoly {
public:
    MultiPoly() = default;
    MultiPoly(const GaussianRational& c);
    MultiPoly(long c) : MultiPoly(GaussianRational(c)) {}
    MultiPoly(TablePtr table, std::vector<Term> terms);

    static MultiPoly constant(const GaussianRational& c, TablePtr table = nullptr);
    static MultiPoly variable(const Symbol& s);
    static MultiPoly monomial(const Monomial& m, const GaussianRational& c, TablePtr table);

    const TablePtr& table() const { return table_; }
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one()); }
    bool is_monomial() const { return terms_.size() == 1; }
    GaussianRational constant_term() const;
    /// Value when is_constant().
    GaussianRational constant_value() const;

    const Term& leading_term() const;
    const GaussianRational& leading_coef() const { return leading_term().coef; }

    std::uint32_t total_degree() const;
    std::uint32_t degree(VarId v) const;
    std::uint32_t min_degree(VarId v) const;
    std::set<VarId> variables() const;
    bool contains(VarId v) const;
    bool only_in(const std::set<VarId>& vars) const;

    MultiPoly operator-() const;
    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly& operator-=(const MultiPoly& o);
    MultiPoly& operator*=(const MultiPoly& o);
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    friend bool operator==(const MultiPoly& a, const MultiPoly& b);

    MultiPoly scaled(const GaussianRational& c) const;
    /// Copy bound to the given table when this one has none.
    MultiPoly with_table(TablePtr t) const;
    MultiPoly times_monomial(const Monomial& m, const GaussianRational& c) const;
    MultiPoly pow(unsigned e) const;

    /// Leading coefficient scaled to 1 (zero stays zero).
    MultiPoly monic() const;

    /// Coefficients of *this viewed as a univariate polynomial in v.
    std::map<std::uint32_t, MultiPoly> coefficients_in(VarId v) const;
    /// Coefficient of v^e.
    MultiPoly coefficient(VarId v, std::uint32_t e) const;
    /// Coefficient of the given monomial in the listed variables (others kept).
    std::map<Monomial, MultiPoly, GrlexGreater> coefficients_in(const std::set<VarId>& vars) const;

    MultiPoly derivative(VarId v) const;

    /// Replace variables by polynomials (simultaneously).
    MultiPoly substitute(const std::map<VarId, MultiPoly>& bindings) const;

    /// Exact value at a point where every variable is bound to a constant.
    GaussianRational evaluate(const std::map<VarId, GaussianRational>& point) const;

    std::string str() const;

private:
    void check_table(const MultiPoly& o) const;
    void adopt_table(const MultiPoly& o);
    void normalize_sorted();

    TablePtr table_;
    std::vector<Term> terms_;
};

/// Full multivariate division by b under graded-lex order.
struct DivisionResult {
    MultiPoly quotient;
    MultiPoly remainder;
};
DivisionResult divide_with_remainder(const MultiPoly& a, const MultiPoly& b);

/// q with a = q*b; throws NotDivisible carrying the remainder otherwise.
MultiPoly exact_divide(const MultiPoly& a, const MultiPoly& b);
/// q with a = q*b, or nullopt.
std::optional<MultiPoly> try_divide(const MultiPoly& a, const MultiPoly& b);

/// Monic greatest common divisor over Q(i) (zero only when both inputs vanish).
MultiPoly gcd(const MultiPoly& a, const MultiPoly& b);

/// gcd of the coefficients of p as a polynomial in v.
MultiPoly content_in(const MultiPoly& p, VarId v);

/// Pseudo-remainder of a by b as polynomials in v.
MultiPoly pseudo_remainder(const MultiPoly& a, const MultiPoly& b, VarId v);

/// Resultant with respect to v (Sylvester determinant, fraction-free).
MultiPoly resultant(const MultiPoly& a, const MultiPoly& b, VarId v);

/// Square-free decomposition in v: pairs (factor, multiplicity), factors
/// square-free, pairwise coprime, and primitive in v up to constants.
std::vector<std::pair<MultiPoly, unsigned>> squarefree_decomposition(const MultiPoly& p, VarId v);

/// Exact square root if p is a perfect square.
std::optional<MultiPoly> poly_sqrt(const MultiPoly& p);

/// Monomial factor common to all terms.
Monomial monomial_content(const MultiPoly& p);

}  // namespace phasespace
