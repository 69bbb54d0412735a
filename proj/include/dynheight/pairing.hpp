#pragma once

// The Arakelov-Zhang pairing <sigma, phi_p> for sigma(x) = x^2, estimated two
// independent ways:
//
//  pullback       integrate log+|x| (the local height of sigma at every place)
//                 against the canonical measure of phi_p, sampled by the
//                 backward orbit of a base point. Finite places contribute 0.
//  decomposition  f(inf) + integral of G_phi over the unit circle, where
//                 f = log+|x| - G_phi and f(inf) = -log|1/p|/(p-1). The
//                 integral of G_phi against its own measure and the p-adic
//                 integral vanish and are certified rather than integrated.

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "dynheight/arithmetic.hpp"
#include "dynheight/bigfloat.hpp"
#include "dynheight/complexdyn.hpp"
#include "dynheight/errors.hpp"
#include "dynheight/heights.hpp"
#include "dynheight/padic.hpp"

namespace dynheight {

enum class PairingMethod { pullback, decomposition };

inline const char* to_string(PairingMethod m) { return m == PairingMethod::pullback ? "pullback" : "decomposition"; }

struct PairingReport {
    std::uint64_t p = 0;
    PairingMethod method = PairingMethod::pullback;
    double estimate = 0.0;
    double target = 0.0;  // log p/(p-1)
    double abs_error = 0.0;
    unsigned depth = 0;          // pullback
    std::size_t samples = 0;     // decomposition
    std::string base_re, base_im;  // pullback base point, exact rationals
    unsigned bits = 0;
    std::int64_t elapsed_ms = 0;
    std::vector<Certificate> certificates;
};

/// Points approximating a measure on C, each with equal weight.
struct MeasureSample {
    std::vector<BigComplex> points;

    /// Equispaced points e^{2 pi i j/M}: normalized Haar measure on the unit circle.
    static MeasureSample unit_circle(std::size_t count, unsigned bits) {
        if (count == 0) throw InvalidParameter("sample count must be positive");
        MeasureSample s;
        s.points.reserve(count);
        const BigFloat two_pi = BigFloat::pi(bits) * 2L;
        for (std::size_t j = 0; j < count; ++j) {
            if (j == 0) {
                s.points.emplace_back(BigFloat(1L, bits), BigFloat(bits));
                continue;
            }
            s.points.push_back(BigComplex::unit(two_pi * BigFloat(static_cast<long>(j), bits) / static_cast<long>(count)));
        }
        return s;
    }

    /// Leaves of a backward orbit: approximates the canonical measure of phi_p.
    static MeasureSample from_orbit(const ComplexOrbit& orbit) {
        MeasureSample s;
        s.points.reserve(orbit.leaves.size());
        for (const auto& leaf : orbit.leaves) s.points.push_back(leaf.value);
        return s;
    }
};

struct PairingOptions {
    ComplexOrbitOptions orbit;
    GreenOptions green;
};

inline BigComplex default_base_point(unsigned bits) {
    return {ExactRational(41, 100), ExactRational(37, 100), bits};
}

namespace detail {

inline std::int64_t ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// (1/p^n) sum log+|beta| over phi_p^{-n}(z0).
inline PairingReport az_pullback_estimate(std::uint64_t p, unsigned n, const ExactRational& base_re, const ExactRational& base_im,
                                          const PairingOptions& opt = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    const unsigned bits = opt.orbit.bits;
    ComplexOrbit orbit = backward_orbit_complex(p, n, BigComplex(base_re, base_im, bits), opt.orbit);
    PairingReport r;
    r.p = p;
    r.method = PairingMethod::pullback;
    r.estimate = average_log_plus(orbit).to_double();
    r.target = limit_constant(p, bits).to_double();
    r.abs_error = std::abs(r.estimate - r.target);
    r.depth = n;
    r.base_re = base_re.get_str();
    r.base_im = base_im.get_str();
    r.bits = orbit.bits;
    r.certificates.push_back({"orbit-residual", CertificateStatus::verified, "max residual " + orbit.max_residual.to_string(6)});
    r.certificates.push_back({"finite-places", CertificateStatus::verified,
                              "log+|x|_v vanishes on the support of the canonical measure at every finite place"});
    r.elapsed_ms = detail::ms_since(t0);
    return r;
}

struct CircleAverage {
    BigFloat value;
    std::size_t bounded = 0;
    std::size_t samples = 0;
};

/// (1/M) sum G(e^{2 pi i j/M}).
inline CircleAverage circle_average_green(std::uint64_t p, std::size_t samples, const GreenOptions& opt = {}) {
    require_prime(p);
    MeasureSample circle = MeasureSample::unit_circle(samples, opt.bits);
    CircleAverage out{BigFloat(opt.bits), 0, samples};
    for (const auto& z : circle.points) {
        GreenValue g = green_function(z, p, opt);
        if (g.status == GreenStatus::bounded_certified) ++out.bounded;
        out.value += g.value;
    }
    if (out.bounded != samples) throw NumericalFailure("a unit-circle sample escaped under phi_p");
    out.value /= static_cast<long>(samples);
    return out;
}

/// f(inf) = lim (log|x| - G(x)) = -log|a|/(d-1) for leading coefficient a = 1/p.
inline BigFloat f_at_infinity(std::uint64_t p, unsigned bits) {
    BigFloat a = BigFloat(1L, bits) / static_cast<long>(p);
    return -log(std::move(a)) / static_cast<long>(p - 1);
}

namespace detail {

// v_p(phi_p(x)) = p v_p(x) - 1 whenever v_p(x) < 0, so points off the p-adic
// unit disc escape and the p-adic filled Julia set lies inside it.
inline bool padic_escape_identity(std::uint64_t p) {
    const RationalPoly phi = phi_step_poly(p);
    for (unsigned k = 1; k <= 3; ++k) {
        for (long u : {1L, 2L, -3L, 7L}) {
            if (u % static_cast<long>(p) == 0) continue;
            ExactRational x = make_rational(BigInt(u), ipow(p, k));
            ExactRational y = eval_poly(phi, x);
            BigInt den = y.get_den();
            unsigned v = 0;
            while (mpz_divisible_ui_p(den.get_mpz_t(), p)) {
                mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), p);
                ++v;
            }
            if (mpz_divisible_ui_p(y.get_num_mpz_t(), p) || v != p * k + 1) return false;
        }
    }
    return true;
}

}  // namespace detail

/// f(inf) + circle average of G, with the two vanishing integrals certified.
inline PairingReport az_decomposition_estimate(std::uint64_t p, std::size_t samples, const PairingOptions& opt = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    require_prime(p);
    const unsigned bits = opt.green.bits;
    CircleAverage circle = circle_average_green(p, samples, opt.green);
    BigFloat f_inf = f_at_infinity(p, bits);
    BigFloat estimate = f_inf + circle.value;

    PairingReport r;
    r.p = p;
    r.method = PairingMethod::decomposition;
    r.estimate = estimate.to_double();
    r.target = limit_constant(p, bits).to_double();
    r.abs_error = abs(estimate - limit_constant(p, bits)).to_double();
    r.samples = samples;
    r.bits = bits;

    r.certificates.push_back({"circle-green", CertificateStatus::verified,
                              std::to_string(circle.bounded) + "/" + std::to_string(samples) + " unit-circle samples bounded"});

    // Asymptotic check: log|x| - G(x) at a large real x matches f(inf).
    {
        BigComplex far(BigFloat(1e8, bits), BigFloat(bits));
        BigFloat diff = log_abs(far) - green_function(far, p, opt.green).value - f_inf;
        bool ok = abs(diff) < BigFloat(1e-6, bits);
        r.certificates.push_back({"leading-coefficient", ok ? CertificateStatus::verified : CertificateStatus::failed,
                                  "log|x| - G(x) - f(inf) at x=1e8: " + diff.to_string(6)});
    }

    // G vanishes on the filled Julia set; backward-orbit points of 1 sit there.
    {
        ComplexOrbitOptions oo = opt.orbit;
        oo.bits = bits;
        ComplexOrbit orbit = backward_orbit_complex(p, 1, BigComplex(BigFloat(1L, bits), BigFloat(bits)), oo);
        std::size_t bounded = 0;
        for (const auto& leaf : orbit.leaves)
            if (in_filled_julia(leaf.value, p, opt.green)) ++bounded;
        bool ok = bounded == orbit.leaves.size();
        r.certificates.push_back({"julia-integral", ok ? CertificateStatus::verified : CertificateStatus::failed,
                                  "G = 0 at " + std::to_string(bounded) + "/" + std::to_string(orbit.leaves.size()) +
                                      " canonical-measure sample points; integral asserted 0"});
    }

    // Both log+|x|_p and the p-adic local height vanish on the p-adic unit disc.
    {
        bool escape_ok = detail::padic_escape_identity(p);
        Certificate split = certify_padic_splitting(p, 2, 32, std::size_t{1} << 16, opt.orbit.threads);
        bool ok = escape_ok && split.status == CertificateStatus::verified;
        r.certificates.push_back({"padic-integral", ok ? CertificateStatus::verified : CertificateStatus::failed,
                                  "filled Julia set inside the p-adic unit disc; " + split.detail + "; integral asserted 0"});
    }
    r.elapsed_ms = detail::ms_since(t0);
    return r;
}

/// |(1/p^n) sum log|w - beta| - (G(w) + log p/(p-1))| for beta in phi_p^{-n}(target).
inline double potential_consistency(std::uint64_t p, unsigned n, const BigComplex& w, const PairingOptions& opt = {},
                                    const std::optional<BigComplex>& target = std::nullopt) {
    const unsigned bits = opt.orbit.bits;
    BigFloat min_radius = escape_radius(p, bits) + BigFloat(1L, bits);
    if (!(abs(w) > min_radius)) throw InvalidParameter("potential check needs |w| > (p+1)^{1/(p-1)} + 1");
    BigComplex t = target ? target->with_bits(bits) : BigComplex(BigFloat(1L, bits), BigFloat(bits));
    ComplexOrbit orbit = backward_orbit_complex(p, n, t, opt.orbit);
    BigFloat sum(bits);
    for (const auto& leaf : orbit.leaves) sum += log_abs(w.with_bits(bits) - leaf.value);
    sum /= static_cast<long>(orbit.leaves.size());
    BigFloat expected = green_function(w, p, opt.green).value + limit_constant(p, bits);
    return abs(sum - expected).to_double();
}

}  // namespace dynheight
