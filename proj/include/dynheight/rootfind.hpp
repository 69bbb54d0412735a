#pragma once

// Simultaneous polynomial root iteration over BigComplex coefficients.
// Weierstrass (Durand-Kerner) for the small fiber equations, Aberth-Ehrlich
// for whole-polynomial solves such as Mahler measures.

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "dynheight/bigfloat.hpp"
#include "dynheight/errors.hpp"

namespace dynheight {

enum class RootMethod { durand_kerner, aberth };

struct RootOptions {
    RootMethod method = RootMethod::durand_kerner;
    unsigned bits = 128;
    /// Stop once every step satisfies |dz| <= 2^{step_log2} * max(1, |z|).
    /// Zero selects 2^{-(bits - 8)}.
    long step_log2 = 0;
    unsigned max_iterations = 0;  ///< 0 selects 60 + 4 * degree
};

struct RootResult {
    std::vector<BigComplex> roots;
    unsigned iterations = 0;
    bool converged = false;
};

namespace detail {

inline BigComplex horner(std::span<const BigComplex> coeffs, const BigComplex& z) {
    BigComplex acc = coeffs.back();
    for (std::size_t i = coeffs.size() - 1; i-- > 0;) {
        acc *= z;
        acc += coeffs[i];
    }
    return acc;
}

// sum |a_i| |z|^i, the scale of the rounding error in evaluating the polynomial.
inline BigFloat evaluation_scale(std::span<const BigComplex> coeffs, const BigFloat& r) {
    BigFloat acc = abs(coeffs.back());
    for (std::size_t i = coeffs.size() - 1; i-- > 0;) {
        acc *= r;
        acc += abs(coeffs[i]);
    }
    return acc;
}

// Value and derivative in one pass.
inline std::pair<BigComplex, BigComplex> horner_with_derivative(std::span<const BigComplex> coeffs, const BigComplex& z) {
    BigComplex value = coeffs.back();
    BigComplex deriv(z.bits());
    for (std::size_t i = coeffs.size() - 1; i-- > 0;) {
        deriv *= z;
        deriv += value;
        value *= z;
        value += coeffs[i];
    }
    return {std::move(value), std::move(deriv)};
}

}  // namespace detail

/// Fujiwara bound 2 max(|a_{d-1}/a_d|, |a_{d-2}/a_d|^{1/2}, ..., |a_0/(2 a_d)|^{1/d})
/// on the moduli of the roots. Much tighter than the Cauchy bound when only the
/// constant term is large.
inline BigFloat fujiwara_root_bound(std::span<const BigComplex> coeffs) {
    const unsigned bits = coeffs.back().bits();
    const std::size_t d = coeffs.size() - 1;
    BigFloat lead = abs(coeffs.back());
    BigFloat m(bits);
    for (std::size_t k = 1; k <= d; ++k) {
        BigFloat ratio = abs(coeffs[d - k]) / lead;
        if (k == d) ratio /= 2L;
        if (ratio.is_zero()) continue;
        BigFloat root = exp(log(std::move(ratio)) / static_cast<long>(k));
        m = max(m, root);
    }
    return m * 2L;
}

/// All roots of sum coeffs[i] z^i (low to high, nonzero leading term), sorted
/// canonically. Non-convergence is reported in the result, not thrown.
inline RootResult simultaneous_roots(std::span<const BigComplex> input, const RootOptions& opt) {
    if (input.size() < 2) throw InvalidParameter("polynomial must have degree >= 1");
    const unsigned bits = opt.bits;
    std::vector<BigComplex> coeffs;
    coeffs.reserve(input.size());
    for (const auto& c : input) coeffs.push_back(c.with_bits(bits));
    if (abs(coeffs.back()).is_zero()) throw InvalidParameter("leading coefficient is zero");

    const std::size_t degree = coeffs.size() - 1;
    // Make the polynomial monic so the Weierstrass correction needs no leading factor.
    {
        BigComplex lead = coeffs.back();
        for (auto& c : coeffs) c /= lead;
    }

    RootResult out;
    out.roots.reserve(degree);
    if (degree == 1) {
        out.roots.push_back(-coeffs[0]);
        out.converged = true;
        return out;
    }

    // Initial guesses: points on the circle of the root-bound radius, rotated off the axes.
    const BigFloat radius = fujiwara_root_bound(coeffs);
    const BigFloat two_pi = BigFloat::pi(bits) * 2L;
    for (std::size_t k = 0; k < degree; ++k) {
        BigFloat theta = two_pi * BigFloat(static_cast<long>(k), bits) / static_cast<long>(degree) + BigFloat(0.4, bits);
        out.roots.push_back(BigComplex::unit(theta) * radius);
    }

    const long step_exp = opt.step_log2 != 0 ? opt.step_log2 : -static_cast<long>(bits - 8);
    const BigFloat tolerance = BigFloat::pow2(step_exp, bits);
    const BigFloat one(1L, bits);
    const BigFloat noise = BigFloat::pow2(-static_cast<long>(bits) + 16, bits);
    const unsigned cap = opt.max_iterations ? opt.max_iterations : 60 + 4 * static_cast<unsigned>(degree);
    std::vector<bool> settled(degree, false);

    for (unsigned it = 1; it <= cap; ++it) {
        bool all_small = true;
        for (std::size_t i = 0; i < degree; ++i) {
            if (settled[i]) continue;
            const BigComplex& z = out.roots[i];
            BigComplex step(bits);
            BigComplex value(bits);
            if (opt.method == RootMethod::durand_kerner) {
                value = detail::horner(coeffs, z);
                BigComplex den(one, BigFloat(bits));
                for (std::size_t j = 0; j < degree; ++j)
                    if (j != i) den *= z - out.roots[j];
                step = value / den;
            } else {
                auto [v, deriv] = detail::horner_with_derivative(coeffs, z);
                value = std::move(v);
                if (norm(value).is_zero()) {
                    settled[i] = true;
                    continue;
                }
                BigComplex newton = value / deriv;
                BigComplex repulsion(bits);
                for (std::size_t j = 0; j < degree; ++j)
                    if (j != i) repulsion += BigComplex(one, BigFloat(bits)) / (z - out.roots[j]);
                step = newton / (BigComplex(one, BigFloat(bits)) - newton * repulsion);
            }
            if (!step.is_finite()) {
                all_small = false;
                continue;
            }
            // A value at the rounding-noise level cannot be improved further.
            const bool at_noise = abs(value) <= noise * detail::evaluation_scale(coeffs, abs(z));
            out.roots[i] -= step;
            if (at_noise || abs(step) <= tolerance * max(one, abs(out.roots[i])))
                settled[i] = true;
            else
                all_small = false;
        }
        out.iterations = it;
        if (all_small) {
            out.converged = true;
            break;
        }
    }
    std::sort(out.roots.begin(), out.roots.end(), [](const auto& a, const auto& b) { return canonical_less(a, b); });
    return out;
}

}  // namespace dynheight
