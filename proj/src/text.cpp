#include "phasespace/text.hpp"

#include <cctype>

namespace phasespace {

namespace {

class Parser {
public:
    Parser(std::string_view text, TablePtr table, const ParseOptions& options)
        : text_(text), table_(std::move(table)), options_(options) {}

    RationalFn parse() {
        RationalFn r = expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
        return r;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    RationalFn expr() {
        RationalFn acc = term();
        while (true) {
            if (accept('+'))
                acc = acc + term();
            else if (accept('-'))
                acc = acc - term();
            else
                return acc;
        }
    }

    RationalFn term() {
        RationalFn acc = unary();
        while (true) {
            if (accept('*')) {
                acc = acc * unary();
            } else if (accept('/')) {
                RationalFn d = unary();
                if (d.is_zero()) fail("division by zero");
                acc = acc / d;
            } else {
                return acc;
            }
        }
    }

    RationalFn unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    RationalFn power() {
        RationalFn base = atom();
        if (accept('^')) {
            bool negative = accept('-');
            skip_space();
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (start == pos_) fail("expected integer exponent");
            int e = std::stoi(std::string(text_.substr(start, pos_ - start)));
            if (negative && base.is_zero()) fail("negative power of zero");
            return base.pow(negative ? -e : e);
        }
        return base;
    }

    RationalFn atom() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            RationalFn r = expr();
            if (!accept(')')) fail("expected ')'");
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return RationalFn(MultiPoly::constant(number(), table_));
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string name(text_.substr(start, pos_ - start));
            if (name == "I") return RationalFn(MultiPoly::constant(GaussianRational::i(), table_));
            if (!table_) fail("identifier '" + name + "' in a constant expression");
            if (auto s = table_->lookup(name)) return RationalFn::variable(*s);
            if (options_.auto_intern) return RationalFn::variable(table_->intern(name, *options_.auto_intern));
            pos_ = start;
            fail("unknown symbol '" + name + "'");
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    GaussianRational number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        mpz_class integer_part(start == pos_ ? std::string("0") : std::string(text_.substr(start, pos_ - start)));
        mpq_class value(integer_part);
        bool decimal = false;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            decimal = true;
            ++pos_;
            std::size_t fs = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            std::string digits(text_.substr(fs, pos_ - fs));
            if (!digits.empty()) {
                mpz_class scale;
                mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits.size());
                value += mpq_class(mpz_class(digits), scale);
            }
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            bool neg = false;
            if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) neg = text_[pos_++] == '-';
            std::size_t es = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (es == pos_) {
                pos_ = save;
            } else {
                decimal = true;
                unsigned long e = std::stoul(std::string(text_.substr(es, pos_ - es)));
                mpz_class scale;
                mpz_ui_pow_ui(scale.get_mpz_t(), 10, e);
                value = neg ? mpq_class(value / mpq_class(scale)) : mpq_class(value * mpq_class(scale));
            }
        }
        if (decimal && !options_.allow_decimals) {
            pos_ = start;
            fail("floating-point literal not allowed in exact input");
        }
        value.canonicalize();
        return GaussianRational(value);
    }

    std::string_view text_;
    TablePtr table_;
    ParseOptions options_;
    std::size_t pos_ = 0;
};

}  // namespace

RationalFn parse_expression(std::string_view text, const TablePtr& table, const ParseOptions& options) {
    return Parser(text, table, options).parse();
}

GaussianRational parse_constant(std::string_view text, bool allow_decimals) {
    ParseOptions options;
    options.allow_decimals = allow_decimals;
    RationalFn r = Parser(text, nullptr, options).parse();
    return r.constant_value();
}

std::string factored_display(const MultiPoly& p) {
    if (p.is_zero()) return "0";
    Monomial m = monomial_content(p);
    if (m.is_one() || p.is_monomial()) return p.str();
    std::vector<Term> rest;
    for (const auto& t : p.terms()) rest.push_back({*t.mono.divide(m), t.coef});
    MultiPoly cofactor(p.table(), std::move(rest));
    std::string out = MultiPoly::monomial(m, 1, p.table()).str();
    return out + "*(" + cofactor.str() + ")";
}

}  // namespace phasespace
