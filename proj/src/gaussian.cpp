#include "phasespace/gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace phasespace {

GaussianRational GaussianRational::inverse() const {
    if (is_zero()) throw std::domain_error("GaussianRational: division by zero");
    mpq_class n = norm();
    return {re_ / n, -im_ / n};
}

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
        re_ *= o.re_;
        return *this;
    }
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
    if (sgn(o.im_) == 0) {
        if (sgn(o.re_) == 0) throw std::domain_error("GaussianRational: division by zero");
        re_ /= o.re_;
        im_ /= o.re_;
        return *this;
    }
    return *this *= o.inverse();
}

GaussianRational GaussianRational::pow(unsigned e) const {
    GaussianRational result(1), base = *this;
    while (e) {
        if (e & 1u) result *= base;
        e >>= 1u;
        if (e) base *= base;
    }
    return result;
}

std::optional<mpq_class> rational_sqrt(const mpq_class& q) {
    if (sgn(q) < 0) return std::nullopt;
    if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t()))
        return std::nullopt;
    mpz_class n = sqrt(q.get_num()), d = sqrt(q.get_den());
    mpq_class r(n, d);
    r.canonicalize();
    return r;
}

std::optional<GaussianRational> GaussianRational::sqrt() const {
    if (is_zero()) return GaussianRational(0);
    // (u + w i)^2 = re + im i  =>  u^2 = (re + |z|)/2, w = im / (2u)
    auto modulus = rational_sqrt(norm());
    if (!modulus) return std::nullopt;
    mpq_class u2 = (re_ + *modulus) / 2;
    if (sgn(u2) != 0) {
        auto u = rational_sqrt(u2);
        if (!u) return std::nullopt;
        return GaussianRational(*u, im_ / (2 * *u));
    }
    mpq_class w2 = (*modulus - re_) / 2;
    auto w = rational_sqrt(w2);
    if (!w) return std::nullopt;
    return GaussianRational(mpq_class(0), *w);
}

namespace {

std::string rational_str(const mpq_class& q) { return q.get_str(); }

}  // namespace

std::string GaussianRational::str() const {
    if (sgn(im_) == 0) return rational_str(re_);
    std::string imag;
    if (im_ == 1)
        imag = "I";
    else if (im_ == -1)
        imag = "-I";
    else
        imag = rational_str(im_) + "*I";
    if (sgn(re_) == 0) return imag;
    std::string out = "(" + rational_str(re_);
    if (sgn(im_) > 0) out += "+";
    out += imag + ")";
    return out;
}

mpq_class rational_approximation(long double value, const mpz_class& max_den) {
    if (!std::isfinite(value)) throw std::domain_error("rational_approximation: non-finite value");
    // continued-fraction convergents h/k
    mpz_class h_m2 = 0, h_m1 = 1, k_m2 = 1, k_m1 = 0;
    long double x = value;
    for (int iter = 0; iter < 64; ++iter) {
        long double a_f = std::floor(x);
        if (std::fabs(a_f) >= 9007199254740992.0L) break;
        mpz_class a(static_cast<double>(a_f));
        mpz_class h = a * h_m1 + h_m2, k = a * k_m1 + k_m2;
        if (k > max_den) break;
        h_m2 = h_m1;
        h_m1 = h;
        k_m2 = k_m1;
        k_m1 = k;
        long double frac = x - a_f;
        if (frac < 1e-15L) break;
        x = 1.0L / frac;
    }
    if (k_m1 == 0) return mpq_class(0);
    mpq_class best(h_m1, k_m1);
    best.canonicalize();
    return best;
}

}  // namespace phasespace
