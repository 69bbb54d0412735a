#pragma once

// Archimedean dynamics of phi_p(x) = (x^p - x)/p: complex backward orbits by
// fiber-wise simultaneous iteration, the escape-rate (Green's) function, and
// filled Julia set membership.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dynheight/arithmetic.hpp"
#include "dynheight/bigfloat.hpp"
#include "dynheight/errors.hpp"
#include "dynheight/padic.hpp"
#include "dynheight/parallel.hpp"
#include "dynheight/rootfind.hpp"

namespace dynheight {

inline constexpr unsigned kDefaultBits = 128;

/// (z^p - z)/p
inline BigComplex phi_complex(const BigComplex& z, std::uint64_t p) {
    BigComplex w = pow(z, p) - z;
    BigFloat inv_p = BigFloat(1L, z.bits()) / static_cast<long>(p);
    return w * inv_p;
}

/// log p/(p-1), the limit of the heights and the value of the pairing.
inline BigFloat limit_constant(std::uint64_t p, unsigned bits) {
    return BigFloat::log_of(p, bits) / static_cast<long>(p - 1);
}

/// log(p+1)/(p-1), the uniform height bound.
inline BigFloat bound_constant(std::uint64_t p, unsigned bits) {
    return BigFloat::log_of(p + 1, bits) / static_cast<long>(p - 1);
}

/// (p+1)^{1/(p-1)}: outside this radius every orbit escapes to infinity.
inline BigFloat escape_radius(std::uint64_t p, unsigned bits) {
    return exp(bound_constant(p, bits));
}

/// Residual |x^p - x - p c|.
inline BigFloat fiber_residual(const BigComplex& x, const BigComplex& c, std::uint64_t p) {
    return abs(pow(x, p) - x - c * static_cast<long>(p));
}

/// The p solutions of phi_p(x) = c, i.e. roots of x^p - x - p c, sorted by
/// (real, imaginary). Throws PrecisionEscalation when a residual stays above
/// `tolerance` (absolute).
inline std::vector<BigComplex> solve_fiber(const BigComplex& c, std::uint64_t p, unsigned bits, const BigFloat& tolerance) {
    require_prime(p);
    if (tolerance.sign() <= 0) throw InvalidParameter("fiber tolerance must be positive");
    std::vector<BigComplex> coeffs;
    coeffs.reserve(p + 1);
    coeffs.push_back(-(c.with_bits(bits) * static_cast<long>(p)));
    coeffs.emplace_back(BigFloat(-1L, bits), BigFloat(bits));
    for (std::uint64_t k = 2; k < p; ++k) coeffs.emplace_back(bits);
    coeffs.emplace_back(BigFloat(1L, bits), BigFloat(bits));

    RootOptions opt;
    opt.method = RootMethod::durand_kerner;
    opt.bits = bits;
    RootResult res = simultaneous_roots(coeffs, opt);
    for (const auto& r : res.roots) {
        if (!r.is_finite() || fiber_residual(r, c, p) >= tolerance)
            throw PrecisionEscalation("fiber solve did not reach tolerance at " + std::to_string(bits) + " bits");
    }
    return std::move(res.roots);
}

inline std::vector<BigComplex> solve_fiber(const BigComplex& c, std::uint64_t p, unsigned bits) {
    return solve_fiber(c, p, bits, BigFloat::pow2(-static_cast<long>(bits) + 16, bits));
}

struct ComplexLeaf {
    BigComplex value;
    std::vector<std::uint16_t> address;  // index within the sorted fiber at each level
    BigFloat residual;                   // |phi^n(value) - target| by forward iteration
};

struct ComplexOrbit {
    std::uint64_t p = 0;
    unsigned depth = 0;
    unsigned bits = 0;
    BigComplex target;
    std::vector<ComplexLeaf> leaves;  // sorted by (real, imaginary)
    BigFloat max_residual;
};

struct ComplexOrbitOptions {
    unsigned bits = kDefaultBits;
    std::size_t orbit_cap = std::size_t{1} << 16;
    unsigned threads = 0;
    bool allow_escalation = true;  // one retry at twice the bits
};

namespace detail {

struct TreeNode {
    BigComplex value;
    std::vector<std::uint16_t> address;
};

inline std::vector<TreeNode> expand_level(const std::vector<TreeNode>& frontier, std::uint64_t p, unsigned bits, unsigned threads) {
    std::vector<TreeNode> next(frontier.size() * p, TreeNode{BigComplex(bits), {}});
    const BigFloat tol = BigFloat::pow2(-static_cast<long>(bits) + 16, bits);
    parallel_for(frontier.size(), threads, [&](std::size_t i) {
        auto roots = solve_fiber(frontier[i].value, p, bits, tol);
        for (std::size_t a = 0; a < p; ++a) {
            auto& node = next[i * p + a];
            node.value = std::move(roots[a]);
            node.address = frontier[i].address;
            node.address.push_back(static_cast<std::uint16_t>(a));
        }
    });
    return next;
}

// Forward-verifies every node and sorts canonically.
inline ComplexOrbit finalize_orbit(const std::vector<TreeNode>& nodes, std::uint64_t p, unsigned depth, const BigComplex& target,
                                   unsigned bits, unsigned threads) {
    ComplexOrbit orbit{p, depth, bits, target.with_bits(bits), {}, BigFloat(bits)};
    orbit.leaves.resize(nodes.size(), ComplexLeaf{BigComplex(bits), {}, BigFloat(bits)});
    parallel_for(nodes.size(), threads, [&](std::size_t i) {
        BigComplex y = nodes[i].value;
        for (unsigned k = 0; k < depth; ++k) y = phi_complex(y, p);
        orbit.leaves[i] = ComplexLeaf{nodes[i].value, nodes[i].address, abs(y - orbit.target)};
    });
    std::sort(orbit.leaves.begin(), orbit.leaves.end(),
              [](const auto& a, const auto& b) { return canonical_less(a.value, b.value); });
    for (const auto& leaf : orbit.leaves) orbit.max_residual = max(orbit.max_residual, leaf.residual);
    return orbit;
}

inline BigFloat orbit_acceptance(unsigned bits) { return BigFloat::pow2(-static_cast<long>(bits / 2), bits); }

}  // namespace detail

/// Visits the backward orbit of `target` at every depth 1..n_max, reusing
/// each level as the parent of the next. On a solver or acceptance failure the
/// whole walk restarts once at twice the bits.
template <class Visitor>
void walk_backward_orbit(std::uint64_t p, unsigned n_max, const BigComplex& target, const ComplexOrbitOptions& opt, Visitor&& visit) {
    require_prime(p);
    if (n_max == 0) throw InvalidParameter("orbit depth must be positive");
    if (opt.bits < kMinMantissaBits) throw InvalidParameter("mantissa bits must be at least 53");
    if (!target.is_finite()) throw InvalidParameter("orbit target must be finite");
    checked_orbit_size(p, n_max, opt.orbit_cap);

    unsigned bits = opt.bits;
    const unsigned attempts = opt.allow_escalation ? 2 : 1;
    unsigned start_level = 1;
    for (unsigned attempt = 0; attempt < attempts; ++attempt, bits *= 2) {
        try {
            std::vector<detail::TreeNode> frontier{{target.with_bits(bits), {}}};
            for (unsigned level = 1; level <= n_max; ++level) {
                frontier = detail::expand_level(frontier, p, bits, opt.threads);
                ComplexOrbit orbit = detail::finalize_orbit(frontier, p, level, target, bits, opt.threads);
                if (orbit.max_residual >= detail::orbit_acceptance(bits))
                    throw PrecisionEscalation("orbit residual " + orbit.max_residual.to_string(6) + " above acceptance threshold");
                // Levels already reported at lower precision are not repeated.
                if (level >= start_level) {
                    visit(std::move(orbit));
                    start_level = level + 1;
                }
            }
            return;
        } catch (const PrecisionEscalation& e) {
            if (attempt + 1 == attempts)
                throw NumericalFailure(std::string("backward orbit failed after precision escalation: ") + e.what());
        }
    }
}

/// Leaves of phi_p^n(x) = target, forward-verified and sorted canonically.
inline ComplexOrbit backward_orbit_complex(std::uint64_t p, unsigned n, const BigComplex& target, const ComplexOrbitOptions& opt = {}) {
    ComplexOrbit result;
    walk_backward_orbit(p, n, target, opt, [&](ComplexOrbit&& orbit) {
        if (orbit.depth == n) result = std::move(orbit);
    });
    return result;
}

enum class GreenStatus { bounded_certified, escaped_certified };

inline const char* to_string(GreenStatus s) {
    return s == GreenStatus::bounded_certified ? "bounded-certified" : "escaped-certified";
}

struct GreenValue {
    BigFloat value;
    GreenStatus status = GreenStatus::bounded_certified;
    unsigned iterations_used = 0;
    double truncation_bound = 0.0;  // bound on the omitted tail of the telescoping series
};

struct GreenOptions {
    unsigned bits = kDefaultBits;
    double big_radius = 1e6;
    unsigned max_iterations = 256;
    long margin_log2 = -20;  // bounded test uses escape_radius * (1 + 2^margin_log2)
    unsigned tail_terms = 12;
};

namespace detail {

// log|1 - u| computed as log1p(|1-u|^2 - 1)/2 to keep small u accurate.
inline BigFloat log_abs_one_minus(const BigComplex& u) {
    BigFloat x = norm(u) - u.real() * 2L;
    return log1p(std::move(x)) / 2L;
}

// Escape rate of a point with |w| > big radius, summed over the telescoping tail
//   G(w) = log|w| - log p/(p-1) + sum_j p^{-(j+1)} log|1 - w_j^{-(p-1)}|.
inline std::pair<BigFloat, double> escaped_green(BigComplex w, std::uint64_t p, unsigned bits, unsigned tail_terms) {
    BigFloat value = log_abs(w) - limit_constant(p, bits);
    const BigFloat floor = BigFloat::pow2(-static_cast<long>(bits) - 4, bits);
    BigFloat weight(1L, bits);
    const BigComplex one(BigFloat(1L, bits), BigFloat(bits));
    double tail = 0.0;
    for (unsigned j = 0; j <= tail_terms; ++j) {
        weight /= static_cast<long>(p);
        BigComplex u = one / pow(w, p - 1);
        // |log|1-u|| <= 2|u| once |u| <= 1/2; the omitted terms shrink faster than geometrically.
        BigFloat bound = weight * abs(u) * 2L;
        if (j == tail_terms || bound < floor) {
            tail = bound.to_double() * 2.0;
            break;
        }
        value += weight * log_abs_one_minus(u);
        w = phi_complex(w, p);
    }
    return {std::move(value), tail};
}

}  // namespace detail

/// Escape rate G(z) = lim p^{-n} log+|phi_p^n(z)|.
inline GreenValue green_function(const BigComplex& z0, std::uint64_t p, const GreenOptions& opt = {}) {
    require_prime(p);
    if (!z0.is_finite()) throw InvalidParameter("Green's function needs a finite point");
    const unsigned bits = std::max(opt.bits, kMinMantissaBits);
    const BigFloat big(opt.big_radius, bits);
    const BigFloat threshold = escape_radius(p, bits) * (BigFloat(1L, bits) + BigFloat::pow2(opt.margin_log2, bits));

    BigComplex z = z0.with_bits(bits);
    unsigned budget = opt.max_iterations;
    bool escalated = false;
    bool escaped = false;
    for (unsigned k = 0;; ++k) {
        BigFloat r = abs(z);
        if (r > big) {
            auto [tail_value, tail] = detail::escaped_green(z, p, bits, opt.tail_terms);
            BigFloat scale(1L, bits);
            for (unsigned j = 0; j < k; ++j) scale /= static_cast<long>(p);
            return {tail_value * scale, GreenStatus::escaped_certified, k, tail * scale.to_double()};
        }
        if (r > threshold) escaped = true;
        if (k == budget) {
            if (!escaped) return {BigFloat(bits), GreenStatus::bounded_certified, k, 0.0};
            if (escalated)
                throw NumericalFailure("orbit escaped the filled Julia set but did not reach the large radius within " +
                                       std::to_string(budget) + " iterations");
            escalated = true;
            budget *= 4;
        }
        z = phi_complex(z, p);
    }
}

inline bool in_filled_julia(const BigComplex& z, std::uint64_t p, const GreenOptions& opt = {}) {
    return green_function(z, p, opt).status == GreenStatus::bounded_certified;
}

/// |G(phi_p(z)) - p G(z)| / max(1, p G(z)); z must escape.
inline double functional_equation_check(const BigComplex& z, std::uint64_t p, const GreenOptions& opt = {}) {
    GreenValue gz = green_function(z, p, opt);
    if (gz.status != GreenStatus::escaped_certified)
        throw InvalidParameter("functional equation check needs an escaping point");
    GreenValue gw = green_function(phi_complex(z.with_bits(opt.bits), p), p, opt);
    BigFloat scaled = gz.value * static_cast<long>(p);
    BigFloat dev = abs(gw.value - scaled) / max(BigFloat(1L, opt.bits), scaled);
    return dev.to_double();
}

}  // namespace dynheight
