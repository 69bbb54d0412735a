#pragma once

// Averaged Weil heights of the roots of phi_p^n(x) = 1 and the Mahler-measure
// cross-check.
//
// For a monic integer polynomial every root is an algebraic integer, so the
// finite places contribute nothing and the average height of the root
// multiset is (1/deg) sum log+|root| = log M(F)/deg. Both facts are certified
// per (p, n): the integer model is rebuilt and inspected, and the p-adic
// backward orbit is enumerated inside Z_p.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dynheight/arithmetic.hpp"
#include "dynheight/bigfloat.hpp"
#include "dynheight/complexdyn.hpp"
#include "dynheight/errors.hpp"
#include "dynheight/padic.hpp"
#include "dynheight/rootfind.hpp"

namespace dynheight {

enum class CertificateStatus { verified, failed, skipped };

inline const char* to_string(CertificateStatus s) {
    switch (s) {
        case CertificateStatus::verified: return "verified";
        case CertificateStatus::failed: return "failed";
        case CertificateStatus::skipped: return "skipped";
    }
    return "unknown";
}

struct Certificate {
    std::string name;
    CertificateStatus status = CertificateStatus::skipped;
    std::string detail;
};

struct HeightReport {
    std::uint64_t p = 0;
    unsigned n = 0;
    std::size_t root_count = 0;
    double avg_height = 0.0;  // nats
    double uniform_bound = 0.0;  // log(p+1)/(p-1)
    double limit = 0.0;       // log p/(p-1)
    double max_residual = 0.0;
    std::int64_t elapsed_ms = 0;
    unsigned bits = 0;
    std::vector<Certificate> certificates;

    double abs_error() const { return std::abs(avg_height - limit); }
};

struct HeightOptions {
    ComplexOrbitOptions orbit;
    bool certify = true;
    /// Integer-model certificate is built only up to this degree.
    std::size_t certificate_degree_cap = std::size_t{1} << 12;
    /// Working p-adic digits are n + this.
    unsigned padic_extra_digits = 64;
};

/// Checks F_n is monic of degree p^n with constant term -p^{e_n}.
inline Certificate certify_integral_model(std::uint64_t p, unsigned n, std::size_t degree_cap) {
    Certificate c{"integral-model", CertificateStatus::skipped, ""};
    const double degree = std::pow(static_cast<double>(p), n);
    if (degree > static_cast<double>(degree_cap)) {
        c.detail = "degree above certificate cap " + std::to_string(degree_cap);
        return c;
    }
    IntPoly f = integral_model(p, n);
    const bool ok = f.is_monic() && f.degree() == static_cast<long>(std::llround(degree)) &&
                    f[0] == -ipow(p, clearing_exponent(p, n));
    c.status = ok ? CertificateStatus::verified : CertificateStatus::failed;
    c.detail = ok ? "monic integer polynomial, constant term -p^e_n" : "integer model malformed";
    return c;
}

/// Enumerates phi_p^{-n}(1) inside Z/p^K and checks total splitting.
inline Certificate certify_padic_splitting(std::uint64_t p, unsigned n, unsigned extra_digits, std::size_t orbit_cap, unsigned threads) {
    Certificate c{"padic-splitting", CertificateStatus::skipped, ""};
    PadicOrbitOptions opt;
    opt.orbit_cap = orbit_cap;
    opt.threads = threads;
    PadicOrbit orbit = backward_orbit_padic(p, n, n + extra_digits, opt);
    SplittingReport r = verify_total_splitting(orbit);
    c.status = r.success ? CertificateStatus::verified : CertificateStatus::failed;
    c.detail = std::to_string(r.count) + " distinct roots in Z_p modulo p^" + std::to_string(r.distinct_modulus_digits);
    return c;
}

/// (1/#leaves) sum log+|leaf|, summed in canonical leaf order.
inline BigFloat average_log_plus(const ComplexOrbit& orbit) {
    BigFloat sum(orbit.bits);
    for (const auto& leaf : orbit.leaves) sum += log_plus(abs(leaf.value));
    return sum / static_cast<long>(orbit.leaves.size());
}

/// Height reports for n = 1..n_max, each depth expanding the previous one.
inline std::vector<HeightReport> height_sequence(std::uint64_t p, unsigned n_max, const HeightOptions& opt = {}) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    const unsigned bits = opt.orbit.bits;
    const BigComplex one(BigFloat(1L, bits), BigFloat(bits));
    std::vector<HeightReport> reports;
    walk_backward_orbit(p, n_max, one, opt.orbit, [&](ComplexOrbit&& orbit) {
        HeightReport r;
        r.p = p;
        r.n = orbit.depth;
        r.root_count = orbit.leaves.size();
        r.avg_height = average_log_plus(orbit).to_double();
        r.uniform_bound = bound_constant(p, bits).to_double();
        r.limit = limit_constant(p, bits).to_double();
        r.max_residual = orbit.max_residual.to_double();
        r.bits = orbit.bits;
        if (opt.certify) {
            r.certificates.push_back(certify_integral_model(p, orbit.depth, opt.certificate_degree_cap));
            r.certificates.push_back(
                certify_padic_splitting(p, orbit.depth, opt.padic_extra_digits, opt.orbit.orbit_cap, opt.orbit.threads));
        }
        r.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
        reports.push_back(std::move(r));
    });
    return reports;
}

inline HeightReport average_height(std::uint64_t p, unsigned n, const HeightOptions& opt = {}) {
    return height_sequence(p, n, opt).back();
}

struct MahlerResult {
    BigFloat log_measure;
    std::vector<BigComplex> roots;
    unsigned iterations = 0;
    unsigned bits = 0;
};

/// log M(F) = log|lead| + sum log+|root|, with the roots of F found directly
/// by Aberth iteration (independent of any fiber tree).
inline MahlerResult log_mahler_measure(const IntPoly& f, unsigned bits = 192, std::size_t degree_cap = std::size_t{1} << 12) {
    if (f.is_zero()) throw InvalidParameter("Mahler measure of the zero polynomial");
    if (static_cast<std::size_t>(f.degree()) > degree_cap)
        throw ResourceLimit("degree " + std::to_string(f.degree()) + " above Mahler root-finding cap " + std::to_string(degree_cap));
    if (f.degree() == 0) return {log(abs(BigFloat(f.leading(), bits))), {}, 0, bits};

    for (unsigned attempt = 0; attempt < 2; ++attempt, bits *= 2) {
        std::vector<BigComplex> coeffs;
        for (const auto& c : f.coefficients()) coeffs.emplace_back(BigFloat(c, bits), BigFloat(bits));
        RootOptions ro;
        ro.method = RootMethod::aberth;
        ro.bits = bits;
        ro.max_iterations = 400 + 8 * static_cast<unsigned>(f.degree());
        RootResult res = simultaneous_roots(coeffs, ro);
        if (!res.converged) continue;
        BigFloat sum = log(abs(BigFloat(f.leading(), bits)));
        for (const auto& r : res.roots) sum += log_plus(abs(r));
        return {std::move(sum), std::move(res.roots), res.iterations, bits};
    }
    throw NumericalFailure("root iteration for the Mahler measure did not converge");
}

inline double mahler_measure(const IntPoly& f, unsigned bits = 192) {
    return exp(log_mahler_measure(f, bits).log_measure).to_double();
}

enum class PreperiodicStatus { preperiodic, escaping, not_preperiodic_at_cap };

inline const char* to_string(PreperiodicStatus s) {
    switch (s) {
        case PreperiodicStatus::preperiodic: return "preperiodic";
        case PreperiodicStatus::escaping: return "escaping";
        case PreperiodicStatus::not_preperiodic_at_cap: return "not-preperiodic-at-cap";
    }
    return "unknown";
}

struct PreperiodicCertificate {
    std::uint64_t p = 0;
    PreperiodicStatus status = PreperiodicStatus::not_preperiodic_at_cap;
    std::vector<ExactRational> orbit;  // start, phi(start), ... up to the first repeat
    std::size_t preperiod = 0;         // index where the cycle starts
    std::size_t period = 0;
    std::optional<double> canonical_height;  // 0 when preperiodic
};

/// Exact forward orbit of a rational start point with cycle detection. A
/// point whose orbit leaves the escape radius (|x|^{p-1} > p+1) cannot be
/// preperiodic and is reported as escaping.
inline PreperiodicCertificate preperiodicity_certificate(std::uint64_t p, const ExactRational& start, std::size_t step_cap = 64) {
    const RationalPoly phi = phi_step_poly(p);
    PreperiodicCertificate cert;
    cert.p = p;
    ExactRational x = start;
    const ExactRational escape(static_cast<unsigned long>(p + 1));
    for (std::size_t step = 0; step <= step_cap; ++step) {
        for (std::size_t i = 0; i < cert.orbit.size(); ++i) {
            if (cert.orbit[i] == x) {
                cert.status = PreperiodicStatus::preperiodic;
                cert.preperiod = i;
                cert.period = cert.orbit.size() - i;
                cert.canonical_height = 0.0;
                return cert;
            }
        }
        cert.orbit.push_back(x);
        ExactRational power = 1;
        for (std::uint64_t k = 1; k < p; ++k) power *= x;
        if (abs(power) > escape) {
            cert.status = PreperiodicStatus::escaping;
            return cert;
        }
        x = eval_poly(phi, x);
    }
    return cert;
}

/// The canonical height of 1 vanishes because 1 -> 0 -> 0.
inline PreperiodicCertificate canonical_height_of_one(std::uint64_t p) {
    return preperiodicity_certificate(p, ExactRational(1));
}

}  // namespace dynheight
