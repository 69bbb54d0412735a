#pragma once

// Exact integer/rational polynomial layer: the map phi_p(x) = (x^p - x)/p,
// its iterates, and the monic integer model F_n = p^{e_n} (phi_p^n(x) - 1).

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynheight/errors.hpp"

namespace dynheight {

using BigInt = mpz_class;
using ExactRational = mpq_class;

/// Trial division; inputs are tiny.
constexpr bool is_prime(std::uint64_t n) noexcept {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

inline void require_prime(std::uint64_t p) {
    if (!is_prime(p)) throw InvalidParameter("p = " + std::to_string(p) + " is not a prime >= 2");
}

/// Builds num/den in canonical form.
inline ExactRational make_rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw InvalidParameter("zero denominator");
    ExactRational q(num, den);
    q.canonicalize();
    return q;
}

/// Parses "a", "-a" or "a/b" with decimal integers.
inline ExactRational parse_rational(std::string_view text) {
    std::string s(text);
    auto slash = s.find('/');
    BigInt num, den = 1;
    auto parse_int = [&](const std::string& part, BigInt& out) {
        if (part.empty() || out.set_str(part, 10) != 0)
            throw InvalidParameter("cannot parse rational '" + s + "'");
    };
    if (slash == std::string::npos) {
        parse_int(s, num);
    } else {
        parse_int(s.substr(0, slash), num);
        parse_int(s.substr(slash + 1), den);
    }
    return make_rational(num, den);
}

/// Integer power p^k for small arguments.
inline BigInt ipow(unsigned long base, unsigned long exp) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
    return r;
}

/// e_n = (p^n - 1)/(p - 1), the power of p that clears the denominators of phi_p^n.
inline std::uint64_t clearing_exponent(std::uint64_t p, unsigned n) {
    std::uint64_t e = 0;
    for (unsigned k = 0; k < n; ++k) {
        if (e > (UINT64_MAX - 1) / p) throw ResourceLimit("clearing exponent overflows 64 bits");
        e = e * p + 1;
    }
    return e;
}

struct PolyCaps {
    std::size_t max_degree = std::size_t{1} << 16;
    std::size_t max_coefficient_bits = std::size_t{1} << 26;
};

namespace detail {

inline std::size_t bit_size(const BigInt& v) {
    return v == 0 ? 0 : mpz_sizeinbase(v.get_mpz_t(), 2);
}

// Packs coefficients c[lo..hi) as sum c_i 2^{slot (i-lo)} by splitting the range in halves.
inline BigInt kronecker_pack(const std::vector<BigInt>& c, std::size_t lo, std::size_t hi, std::size_t slot) {
    if (hi - lo == 1) return c[lo];
    std::size_t mid = lo + (hi - lo) / 2;
    BigInt high = kronecker_pack(c, mid, hi, slot);
    BigInt out;
    mpz_mul_2exp(out.get_mpz_t(), high.get_mpz_t(), slot * (mid - lo));
    out += kronecker_pack(c, lo, mid, slot);
    return out;
}

// Inverse of kronecker_pack with balanced (signed) digits.
inline void kronecker_unpack(BigInt value, std::size_t lo, std::size_t hi, std::size_t slot, std::vector<BigInt>& out) {
    if (hi - lo == 1) {
        out[lo] = std::move(value);
        return;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    std::size_t shift = slot * (mid - lo);
    BigInt low;
    mpz_fdiv_r_2exp(low.get_mpz_t(), value.get_mpz_t(), shift);
    BigInt half;
    mpz_setbit(half.get_mpz_t(), shift - 1);
    if (low >= half) {
        BigInt full;
        mpz_mul_2exp(full.get_mpz_t(), BigInt(1).get_mpz_t(), shift);
        low -= full;
    }
    value -= low;
    BigInt high;
    mpz_fdiv_q_2exp(high.get_mpz_t(), value.get_mpz_t(), shift);
    kronecker_unpack(std::move(low), lo, mid, slot, out);
    kronecker_unpack(std::move(high), mid, hi, slot, out);
}

inline std::vector<BigInt> mul_schoolbook(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
    std::vector<BigInt> r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) mpz_addmul(r[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
    return r;
}

// Kronecker substitution: one big-integer product replaces the quadratic loop.
inline std::vector<BigInt> mul_kronecker(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
    std::size_t abits = 0, bbits = 0;
    for (const auto& c : a) abits = std::max(abits, bit_size(c));
    for (const auto& c : b) bbits = std::max(bbits, bit_size(c));
    std::size_t terms = std::min(a.size(), b.size());
    std::size_t slot = abits + bbits + bit_size(BigInt(static_cast<unsigned long>(terms))) + 2;
    BigInt prod = kronecker_pack(a, 0, a.size(), slot) * kronecker_pack(b, 0, b.size(), slot);
    std::vector<BigInt> r(a.size() + b.size() - 1);
    kronecker_unpack(std::move(prod), 0, r.size(), slot, r);
    return r;
}

}  // namespace detail

/// Dense integer polynomial, coefficients low to high. The zero polynomial
/// has no coefficients.
class IntPoly {
public:
    IntPoly() = default;
    explicit IntPoly(std::vector<BigInt> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

    static IntPoly monomial(std::size_t degree, BigInt c = 1) {
        std::vector<BigInt> v(degree + 1);
        v[degree] = std::move(c);
        return IntPoly(std::move(v));
    }

    bool is_zero() const noexcept { return coeffs_.empty(); }
    /// Degree; -1 for the zero polynomial.
    long degree() const noexcept { return static_cast<long>(coeffs_.size()) - 1; }
    const std::vector<BigInt>& coefficients() const noexcept { return coeffs_; }
    const BigInt& operator[](std::size_t i) const { return coeffs_.at(i); }
    const BigInt& leading() const { return coeffs_.back(); }
    bool is_monic() const { return !is_zero() && leading() == 1; }

    std::size_t max_coefficient_bits() const {
        std::size_t b = 0;
        for (const auto& c : coeffs_) b = std::max(b, detail::bit_size(c));
        return b;
    }

    friend IntPoly operator+(const IntPoly& a, const IntPoly& b) {
        std::vector<BigInt> r(std::max(a.coeffs_.size(), b.coeffs_.size()));
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) r[i] += a.coeffs_[i];
        for (std::size_t i = 0; i < b.coeffs_.size(); ++i) r[i] += b.coeffs_[i];
        return IntPoly(std::move(r));
    }
    friend IntPoly operator-(const IntPoly& a, const IntPoly& b) {
        std::vector<BigInt> r(std::max(a.coeffs_.size(), b.coeffs_.size()));
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) r[i] += a.coeffs_[i];
        for (std::size_t i = 0; i < b.coeffs_.size(); ++i) r[i] -= b.coeffs_[i];
        return IntPoly(std::move(r));
    }
    friend IntPoly operator*(const IntPoly& a, const BigInt& s) {
        if (s == 0) return {};
        std::vector<BigInt> r = a.coeffs_;
        for (auto& c : r) c *= s;
        return IntPoly(std::move(r));
    }
    friend IntPoly operator*(const IntPoly& a, const IntPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        if (std::min(a.coeffs_.size(), b.coeffs_.size()) <= kSchoolbookCutoff)
            return IntPoly(detail::mul_schoolbook(a.coeffs_, b.coeffs_));
        return IntPoly(detail::mul_kronecker(a.coeffs_, b.coeffs_));
    }
    friend bool operator==(const IntPoly&, const IntPoly&) = default;

    static constexpr std::size_t kSchoolbookCutoff = 24;

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    }
    std::vector<BigInt> coeffs_;
};

/// Dense rational polynomial, coefficients low to high.
class RationalPoly {
public:
    RationalPoly() = default;
    explicit RationalPoly(std::vector<ExactRational> coeffs) : coeffs_(std::move(coeffs)) {
        for (auto& c : coeffs_) c.canonicalize();
        while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    }
    static RationalPoly identity() { return RationalPoly({ExactRational(0), ExactRational(1)}); }
    static RationalPoly constant(ExactRational c) { return RationalPoly({std::move(c)}); }

    bool is_zero() const noexcept { return coeffs_.empty(); }
    long degree() const noexcept { return static_cast<long>(coeffs_.size()) - 1; }
    const std::vector<ExactRational>& coefficients() const noexcept { return coeffs_; }
    const ExactRational& operator[](std::size_t i) const { return coeffs_.at(i); }

    /// Splits into (integer polynomial, positive common denominator).
    std::pair<IntPoly, BigInt> clear_denominators() const {
        BigInt den = 1;
        for (const auto& c : coeffs_) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
        std::vector<BigInt> ints;
        ints.reserve(coeffs_.size());
        for (const auto& c : coeffs_) ints.emplace_back(c.get_num() * (den / c.get_den()));
        return {IntPoly(std::move(ints)), den};
    }

    static RationalPoly from_int(const IntPoly& f, const BigInt& den = 1) {
        std::vector<ExactRational> v;
        v.reserve(f.coefficients().size());
        for (const auto& c : f.coefficients()) v.push_back(make_rational(c, den));
        return RationalPoly(std::move(v));
    }

    friend RationalPoly operator+(const RationalPoly& a, const RationalPoly& b) {
        std::vector<ExactRational> r(std::max(a.coeffs_.size(), b.coeffs_.size()));
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) r[i] += a.coeffs_[i];
        for (std::size_t i = 0; i < b.coeffs_.size(); ++i) r[i] += b.coeffs_[i];
        return RationalPoly(std::move(r));
    }
    friend RationalPoly operator*(const RationalPoly& a, const RationalPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        auto [ai, ad] = a.clear_denominators();
        auto [bi, bd] = b.clear_denominators();
        return from_int(ai * bi, ad * bd);
    }
    friend bool operator==(const RationalPoly&, const RationalPoly&) = default;

private:
    std::vector<ExactRational> coeffs_;
};

/// phi_p(x) = (x^p - x)/p.
inline RationalPoly phi_step_poly(std::uint64_t p) {
    require_prime(p);
    std::vector<ExactRational> c(p + 1);
    c[p] = ExactRational(1, p);
    c[1] = -ExactRational(1, p);
    return RationalPoly(std::move(c));
}

inline ExactRational eval_poly(const RationalPoly& f, const ExactRational& x) {
    ExactRational acc = 0;
    for (auto it = f.coefficients().rbegin(); it != f.coefficients().rend(); ++it) acc = acc * x + *it;
    return acc;
}

inline ExactRational eval_poly(const IntPoly& f, const ExactRational& x) {
    ExactRational acc = 0;
    for (auto it = f.coefficients().rbegin(); it != f.coefficients().rend(); ++it) acc = acc * x + ExactRational(*it);
    return acc;
}

/// f(g) by Horner's rule with a polynomial argument.
inline RationalPoly compose(const RationalPoly& f, const RationalPoly& g) {
    RationalPoly acc;
    for (auto it = f.coefficients().rbegin(); it != f.coefficients().rend(); ++it)
        acc = acc * g + RationalPoly::constant(*it);
    return acc;
}

/// n-fold composition f o ... o f; n = 0 gives the identity x.
inline RationalPoly iterate_poly(const RationalPoly& f, unsigned n, const PolyCaps& caps = {}) {
    if (n == 0) return RationalPoly::identity();
    if (f.degree() >= 1) {
        double projected = 1.0;
        for (unsigned k = 0; k < n; ++k) projected *= static_cast<double>(f.degree());
        if (projected > static_cast<double>(caps.max_degree))
            throw ResourceLimit("degree of iterate exceeds degree cap " + std::to_string(caps.max_degree));
    }
    RationalPoly acc = f;
    for (unsigned k = 1; k < n; ++k) acc = compose(f, acc);
    return acc;
}

/// F_n = p^{e_n} (phi_p^n(x) - 1), computed through the integer recursion
/// G_0 = x, G_k = G_{k-1}^p - p^{(p-1) e_{k-1}} G_{k-1}, with G_k = p^{e_k} phi_p^k.
inline IntPoly integral_model(std::uint64_t p, unsigned n, const PolyCaps& caps = {}) {
    require_prime(p);
    if (n == 0) throw InvalidParameter("integral model needs n >= 1");
    double degree = 1.0;
    for (unsigned k = 0; k < n; ++k) degree *= static_cast<double>(p);
    if (degree > static_cast<double>(caps.max_degree))
        throw ResourceLimit("degree p^n exceeds degree cap " + std::to_string(caps.max_degree));
    const std::uint64_t e_n = clearing_exponent(p, n);
    // Coefficients are bounded by roughly p^{e_n} times a binomial-sized factor.
    double projected_bits = static_cast<double>(e_n) * std::log2(static_cast<double>(p)) + degree;
    if (projected_bits > static_cast<double>(caps.max_coefficient_bits))
        throw ResourceLimit("coefficient size exceeds coefficient bit cap " + std::to_string(caps.max_coefficient_bits));

    IntPoly g = IntPoly::monomial(1);
    std::uint64_t e = 0;
    for (unsigned k = 1; k <= n; ++k) {
        IntPoly power = g;
        for (std::uint64_t i = 1; i < p; ++i) power = power * g;
        g = power - g * ipow(p, (p - 1) * e);
        e = e * p + 1;
    }
    IntPoly f = g - IntPoly::monomial(0, ipow(p, e_n));
    if (f.max_coefficient_bits() > caps.max_coefficient_bits)
        throw ResourceLimit("coefficient size exceeds coefficient bit cap " + std::to_string(caps.max_coefficient_bits));
    return f;
}

}  // namespace dynheight
