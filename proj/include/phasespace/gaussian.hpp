#pragma once

#include <complex>
#include <optional>
#include <string>

#include <gmpxx.h>

namespace phasespace {

/// Exact element re + im*i of Q(i). Both parts are canonical GMP rationals.
class GaussianRational {
public:
    GaussianRational() = default;
    GaussianRational(long v) : re_(v) {}
    GaussianRational(mpq_class re) : re_(std::move(re)) { re_.canonicalize(); }
    GaussianRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
        re_.canonicalize();
        im_.canonicalize();
    }

    static GaussianRational i() { return {mpq_class(0), mpq_class(1)}; }
    static GaussianRational fraction(long num, long den) { return mpq_class(num, den); }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }
    bool is_integer() const { return is_real() && re_.get_den() == 1; }

    GaussianRational conj() const { return {re_, -im_}; }
    mpq_class norm() const { return re_ * re_ + im_ * im_; }
    GaussianRational inverse() const;

    GaussianRational operator-() const { return {-re_, -im_}; }
    GaussianRational& operator+=(const GaussianRational& o);
    GaussianRational& operator-=(const GaussianRational& o);
    GaussianRational& operator*=(const GaussianRational& o);
    GaussianRational& operator/=(const GaussianRational& o);

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

    GaussianRational pow(unsigned e) const;

    /// Exact square root in Q(i), if one exists (the one with positive real part,
    /// or positive imaginary part when the real part vanishes).
    std::optional<GaussianRational> sqrt() const;

    /// Total order used only for canonical tie-breaking: (re, im) lexicographic.
    friend bool canonical_less(const GaussianRational& a, const GaussianRational& b) {
        if (a.re_ != b.re_) return a.re_ < b.re_;
        return a.im_ < b.im_;
    }

    std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

    /// Canonical text: "3/2", "-I", "2/3*I", "(1+2*I)".
    std::string str() const;
    /// True when str() needs no parentheses as a factor in a product.
    bool is_atomic() const { return sgn(re_) == 0 || sgn(im_) == 0; }

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

/// Exact square root of a non-negative rational, if it is a perfect square.
std::optional<mpq_class> rational_sqrt(const mpq_class& q);

/// Best rational approximation with denominator <= max_den (continued fractions).
mpq_class rational_approximation(long double value, const mpz_class& max_den);

}  // namespace phasespace
