#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "phasespace/ratfn.hpp"

namespace phasespace {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t pos)
        : std::runtime_error(what + " at offset " + std::to_string(pos)), pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

struct ParseOptions {
    /// Decimal literals ("0.25", "1e-3") are converted exactly when allowed.
    bool allow_decimals = false;
    /// Unknown identifiers are interned with this kind; nullopt rejects them.
    std::optional<SymbolKind> auto_intern;
};

/// Parses the canonical expression syntax: + - * / ^, parentheses, integer
/// and rational literals, I for the imaginary unit, identifiers.
RationalFn parse_expression(std::string_view text, const TablePtr& table, const ParseOptions& options = {});

/// Parses a constant expression (no identifiers) to an exact value.
GaussianRational parse_constant(std::string_view text, bool allow_decimals);

/// Display form with the monomial and numeric content pulled out, e.g.
/// "gamma*(gamma + 1)". Purely cosmetic; the canonical form is str().
std::string factored_display(const MultiPoly& p);

}  // namespace phasespace
