#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// it is used to check.

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

/// Schoolbook product of integer coefficient vectors.
inline std::vector<mpz_class> poly_mul(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) {
    std::vector<mpz_class> r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

/// phi_p applied k times to a rational, straight from the definition.
inline mpq_class phi_iter(const mpq_class& x0, unsigned long p, unsigned k) {
    mpq_class x = x0;
    for (unsigned i = 0; i < k; ++i) {
        mpq_class xp = 1;
        for (unsigned long j = 0; j < p; ++j) xp *= x;
        x = (xp - x) / p;
        x.canonicalize();
    }
    return x;
}

/// Real roots and the complex pair of x^3 - x - c by Cardano's formula
/// (one real root when the discriminant is negative).
inline std::vector<std::complex<double>> cubic_roots_depressed(double c) {
    // x^3 + a x + b with a = -1, b = -c
    const double a = -1.0, b = -c;
    const double disc = b * b / 4.0 + a * a * a / 27.0;
    const double r = std::cbrt(-b / 2.0 + std::sqrt(disc)) + std::cbrt(-b / 2.0 - std::sqrt(disc));
    // Remaining quadratic x^2 + r x + (r^2 + a)
    const std::complex<double> q = std::sqrt(std::complex<double>(r * r - 4.0 * (r * r + a)));
    return {r, (-r + q) / 2.0, (-r - q) / 2.0};
}

/// Roots of a real polynomial (low to high) by Newton's method with deflation
/// in double precision. Adequate for small, well-separated test polynomials.
inline std::vector<std::complex<double>> newton_deflation_roots(std::vector<double> coeffs) {
    std::vector<std::complex<double>> c(coeffs.begin(), coeffs.end());
    std::vector<std::complex<double>> roots;
    while (c.size() > 2) {
        std::complex<double> z(0.4, 0.9);
        for (int it = 0; it < 500; ++it) {
            std::complex<double> v = c.back(), d = 0;
            for (std::size_t i = c.size() - 1; i-- > 0;) {
                d = d * z + v;
                v = v * z + c[i];
            }
            std::complex<double> step = v / d;
            z -= step;
            if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        roots.push_back(z);
        // synthetic division by (x - z)
        std::vector<std::complex<double>> q(c.size() - 1);
        std::complex<double> carry = c.back();
        for (std::size_t i = c.size() - 1; i-- > 0;) {
            q[i] = carry;
            carry = c[i] + carry * z;
        }
        c = q;
    }
    roots.push_back(-c[0] / c[1]);
    return roots;
}

inline std::mt19937_64 rng(std::uint64_t seed = 20240601) { return std::mt19937_64(seed); }

/// A random rational with numerator and denominator up to `bound`.
inline mpq_class random_rational(std::mt19937_64& g, long bound = 50) {
    std::uniform_int_distribution<long> num(-bound, bound), den(1, bound);
    mpq_class q(num(g), den(g));
    q.canonicalize();
    return q;
}

}  // namespace oracle
