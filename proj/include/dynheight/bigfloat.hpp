#pragma once

// Arbitrary-precision real and complex values with an explicit mantissa width
// in bits. BigFloat is a value-semantics handle around an MPFR number; every
// result carries the larger precision of its operands.

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>

#include "dynheight/errors.hpp"

namespace dynheight {

inline constexpr unsigned kMinMantissaBits = 53;

class BigFloat {
public:
    explicit BigFloat(unsigned bits = kMinMantissaBits) { mpfr_init2(v_, clamp(bits)); mpfr_set_zero(v_, 1); }
    BigFloat(double x, unsigned bits) { mpfr_init2(v_, clamp(bits)); mpfr_set_d(v_, x, MPFR_RNDN); }
    BigFloat(long x, unsigned bits) { mpfr_init2(v_, clamp(bits)); mpfr_set_si(v_, x, MPFR_RNDN); }
    BigFloat(int x, unsigned bits) : BigFloat(static_cast<long>(x), bits) {}
    BigFloat(const mpz_class& x, unsigned bits) { mpfr_init2(v_, clamp(bits)); mpfr_set_z(v_, x.get_mpz_t(), MPFR_RNDN); }
    BigFloat(const mpq_class& x, unsigned bits) { mpfr_init2(v_, clamp(bits)); mpfr_set_q(v_, x.get_mpq_t(), MPFR_RNDN); }

    BigFloat(const BigFloat& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    BigFloat(BigFloat&& o) noexcept {
        mpfr_init2(v_, kMinMantissaBits);
        mpfr_swap(v_, o.v_);
    }
    BigFloat& operator=(const BigFloat& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(v_); }

    unsigned bits() const noexcept { return static_cast<unsigned>(mpfr_get_prec(v_)); }
    mpfr_srcptr get() const noexcept { return v_; }
    mpfr_ptr get() noexcept { return v_; }

    double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }
    bool is_finite() const noexcept { return mpfr_number_p(v_) != 0; }
    bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
    int sign() const noexcept { return mpfr_sgn(v_); }

    /// Binary exponent e with |x| in [2^{e-1}, 2^e); undefined for zero.
    long exponent() const noexcept { return mpfr_get_exp(v_); }

    /// Decimal string with the given number of significant digits.
    std::string to_string(int digits = 0) const {
        if (digits <= 0) digits = static_cast<int>(bits() * 0.30103) + 1;
        char* s = nullptr;
        mpfr_asprintf(&s, "%.*Rg", digits, v_);
        std::string out(s);
        mpfr_free_str(s);
        return out;
    }

    BigFloat& operator+=(const BigFloat& o) { widen(o); mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
    BigFloat& operator-=(const BigFloat& o) { widen(o); mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
    BigFloat& operator*=(const BigFloat& o) { widen(o); mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
    BigFloat& operator/=(const BigFloat& o) { widen(o); mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
    BigFloat& operator*=(long s) { mpfr_mul_si(v_, v_, s, MPFR_RNDN); return *this; }
    BigFloat& operator/=(long s) { mpfr_div_si(v_, v_, s, MPFR_RNDN); return *this; }

    friend BigFloat operator+(BigFloat a, const BigFloat& b) { return a += b; }
    friend BigFloat operator-(BigFloat a, const BigFloat& b) { return a -= b; }
    friend BigFloat operator*(BigFloat a, const BigFloat& b) { return a *= b; }
    friend BigFloat operator/(BigFloat a, const BigFloat& b) { return a /= b; }
    friend BigFloat operator*(BigFloat a, long s) { return a *= s; }
    friend BigFloat operator/(BigFloat a, long s) { return a /= s; }
    friend BigFloat operator-(BigFloat a) { mpfr_neg(a.v_, a.v_, MPFR_RNDN); return a; }

    friend int compare(const BigFloat& a, const BigFloat& b) noexcept { return mpfr_cmp(a.v_, b.v_); }
    friend bool operator<(const BigFloat& a, const BigFloat& b) noexcept { return compare(a, b) < 0; }
    friend bool operator>(const BigFloat& a, const BigFloat& b) noexcept { return compare(a, b) > 0; }
    friend bool operator<=(const BigFloat& a, const BigFloat& b) noexcept { return compare(a, b) <= 0; }
    friend bool operator>=(const BigFloat& a, const BigFloat& b) noexcept { return compare(a, b) >= 0; }
    friend bool operator==(const BigFloat& a, const BigFloat& b) noexcept { return mpfr_equal_p(a.v_, b.v_) != 0; }

    friend BigFloat abs(BigFloat a) { mpfr_abs(a.v_, a.v_, MPFR_RNDN); return a; }
    friend BigFloat sqrt(BigFloat a) { mpfr_sqrt(a.v_, a.v_, MPFR_RNDN); return a; }
    friend BigFloat log(BigFloat a) { mpfr_log(a.v_, a.v_, MPFR_RNDN); return a; }
    friend BigFloat log1p(BigFloat a) { mpfr_log1p(a.v_, a.v_, MPFR_RNDN); return a; }
    friend BigFloat exp(BigFloat a) { mpfr_exp(a.v_, a.v_, MPFR_RNDN); return a; }
    friend BigFloat cos(BigFloat a) { mpfr_cos(a.v_, a.v_, MPFR_RNDN); return a; }
    friend BigFloat sin(BigFloat a) { mpfr_sin(a.v_, a.v_, MPFR_RNDN); return a; }
    friend BigFloat max(const BigFloat& a, const BigFloat& b) { return a < b ? b : a; }

    static BigFloat pi(unsigned bits) { BigFloat r(bits); mpfr_const_pi(r.v_, MPFR_RNDN); return r; }
    static BigFloat pow2(long e, unsigned bits) {
        BigFloat r(1L, bits);
        mpfr_mul_2si(r.v_, r.v_, e, MPFR_RNDN);
        return r;
    }
    /// log(x) for a small positive integer x.
    static BigFloat log_of(unsigned long x, unsigned bits) {
        BigFloat r(static_cast<long>(x), bits);
        return log(std::move(r));
    }

private:
    static mpfr_prec_t clamp(unsigned bits) { return std::max<unsigned>(bits, 2); }
    void widen(const BigFloat& o) {
        if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
    }
    mpfr_t v_;
};

/// Complex number over BigFloat components.
class BigComplex {
public:
    explicit BigComplex(unsigned bits = kMinMantissaBits) : re_(bits), im_(bits) {}
    BigComplex(BigFloat re, BigFloat im) : re_(std::move(re)), im_(std::move(im)) {}
    BigComplex(double re, double im, unsigned bits) : re_(re, bits), im_(im, bits) {}
    BigComplex(const mpq_class& re, const mpq_class& im, unsigned bits) : re_(re, bits), im_(im, bits) {}

    const BigFloat& real() const noexcept { return re_; }
    const BigFloat& imag() const noexcept { return im_; }
    unsigned bits() const noexcept { return std::max(re_.bits(), im_.bits()); }
    bool is_finite() const noexcept { return re_.is_finite() && im_.is_finite(); }

    /// Rounds or extends both components to the given width.
    BigComplex with_bits(unsigned bits) const {
        BigFloat r(bits), i(bits);
        mpfr_set(r.get(), re_.get(), MPFR_RNDN);
        mpfr_set(i.get(), im_.get(), MPFR_RNDN);
        return {std::move(r), std::move(i)};
    }

    BigComplex& operator+=(const BigComplex& o) { re_ += o.re_; im_ += o.im_; return *this; }
    BigComplex& operator-=(const BigComplex& o) { re_ -= o.re_; im_ -= o.im_; return *this; }
    BigComplex& operator*=(const BigComplex& o) {
        BigFloat r = re_ * o.re_ - im_ * o.im_;
        im_ = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        return *this;
    }
    BigComplex& operator/=(const BigComplex& o) {
        BigFloat den = o.re_ * o.re_ + o.im_ * o.im_;
        BigFloat r = (re_ * o.re_ + im_ * o.im_) / den;
        im_ = (im_ * o.re_ - re_ * o.im_) / den;
        re_ = std::move(r);
        return *this;
    }
    BigComplex& operator*=(long s) { re_ *= s; im_ *= s; return *this; }

    friend BigComplex operator+(BigComplex a, const BigComplex& b) { return a += b; }
    friend BigComplex operator-(BigComplex a, const BigComplex& b) { return a -= b; }
    friend BigComplex operator*(BigComplex a, const BigComplex& b) { return a *= b; }
    friend BigComplex operator/(BigComplex a, const BigComplex& b) { return a /= b; }
    friend BigComplex operator*(BigComplex a, long s) { return a *= s; }
    friend BigComplex operator*(BigComplex a, const BigFloat& s) { a.re_ *= s; a.im_ *= s; return a; }
    friend BigComplex operator-(BigComplex a) { return {-a.re_, -a.im_}; }

    /// |z|^2
    friend BigFloat norm(const BigComplex& z) { return z.re_ * z.re_ + z.im_ * z.im_; }
    friend BigFloat abs(const BigComplex& z) {
        BigFloat r(z.bits());
        mpfr_hypot(r.get(), z.re_.get(), z.im_.get(), MPFR_RNDN);
        return r;
    }
    /// log|z|
    friend BigFloat log_abs(const BigComplex& z) { return log(abs(z)); }

    /// z^k by repeated squaring.
    friend BigComplex pow(BigComplex z, unsigned long k) {
        BigComplex acc(BigFloat(1L, z.bits()), BigFloat(z.bits()));
        while (k) {
            if (k & 1) acc *= z;
            k >>= 1;
            if (k) z *= z;
        }
        return acc;
    }

    /// e^{i theta}
    static BigComplex unit(const BigFloat& theta) { return {cos(theta), sin(theta)}; }

    /// Lexicographic (real, imaginary) order on exact values.
    friend bool canonical_less(const BigComplex& a, const BigComplex& b) {
        int c = compare(a.re_, b.re_);
        return c != 0 ? c < 0 : compare(a.im_, b.im_) < 0;
    }

private:
    BigFloat re_, im_;
};

/// log max(1, t)
inline BigFloat log_plus(const BigFloat& t) {
    if (t <= BigFloat(1L, t.bits())) return BigFloat(t.bits());
    return log(t);
}

}  // namespace dynheight
