#pragma once

// Fixed-modulus p-adic integers Z/p^K with an effective-precision counter,
// Hensel lifting of the fibers of phi_p, and the p-adic backward orbit of 1.
//
// Distinct leaves carry distinct residue addresses, and two roots with
// different addresses already differ modulo p at the first level where the
// addresses diverge. The address tree is therefore the exact certificate of
// distinctness; the mantissa comparison in verify_total_splitting is a
// numerical cross-check at the trusted precision.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dynheight/arithmetic.hpp"
#include "dynheight/errors.hpp"
#include "dynheight/parallel.hpp"

namespace dynheight {

/// The ring Z/p^K shared by all numbers of one computation.
struct PadicRing {
    std::uint64_t p;
    unsigned digits;  // K
    BigInt modulus;   // p^K

    static std::shared_ptr<const PadicRing> make(std::uint64_t p, unsigned digits) {
        require_prime(p);
        if (digits == 0) throw InvalidParameter("p-adic working precision must be positive");
        return std::make_shared<const PadicRing>(PadicRing{p, digits, ipow(p, digits)});
    }
};

using PadicRingPtr = std::shared_ptr<const PadicRing>;

class PadicNumber {
public:
    /// An exact integer, trusted to all K digits.
    PadicNumber(PadicRingPtr ring, const BigInt& value) : PadicNumber(std::move(ring), value, 0) {
        precision_ = ring_->digits;
    }
    PadicNumber(PadicRingPtr ring, const BigInt& value, unsigned precision) : ring_(std::move(ring)), precision_(precision) {
        mpz_mod(mantissa_.get_mpz_t(), value.get_mpz_t(), ring_->modulus.get_mpz_t());
        precision_ = std::min(precision_, ring_->digits);
    }

    const PadicRingPtr& ring() const noexcept { return ring_; }
    std::uint64_t prime() const noexcept { return ring_->p; }
    unsigned working_digits() const noexcept { return ring_->digits; }
    const BigInt& mantissa() const noexcept { return mantissa_; }
    /// Number of trusted base-p digits.
    unsigned precision() const noexcept { return precision_; }
    bool is_unit() const { return mpz_divisible_ui_p(mantissa_.get_mpz_t(), ring_->p) == 0; }

    /// p-adic valuation of the mantissa, capped at the trusted precision.
    unsigned valuation() const {
        if (mantissa_ == 0) return precision_;
        BigInt m = mantissa_;
        unsigned v = static_cast<unsigned>(mpz_remove(m.get_mpz_t(), m.get_mpz_t(), BigInt(ring_->p).get_mpz_t()));
        return std::min(v, precision_);
    }

    /// Equality modulo p^digits.
    bool congruent(const PadicNumber& o, unsigned digits) const {
        BigInt diff = mantissa_ - o.mantissa_;
        BigInt mod = ipow(ring_->p, digits);
        return mpz_divisible_p(diff.get_mpz_t(), mod.get_mpz_t()) != 0;
    }

    /// Mantissa reduced modulo p^{precision}, written in base p, most
    /// significant digit first, zero padded to the trusted length.
    std::string digits_string() const {
        BigInt reduced;
        mpz_mod(reduced.get_mpz_t(), mantissa_.get_mpz_t(), ipow(ring_->p, precision_).get_mpz_t());
        std::string s = reduced.get_str(static_cast<int>(ring_->p));
        if (s.size() < precision_) s.insert(0, precision_ - s.size(), '0');
        return s;
    }

    friend PadicNumber operator+(const PadicNumber& a, const PadicNumber& b) {
        check_same_ring(a, b);
        return {a.ring_, a.mantissa_ + b.mantissa_, std::min(a.precision_, b.precision_)};
    }
    friend PadicNumber operator-(const PadicNumber& a, const PadicNumber& b) {
        check_same_ring(a, b);
        return {a.ring_, a.mantissa_ - b.mantissa_, std::min(a.precision_, b.precision_)};
    }
    friend PadicNumber operator*(const PadicNumber& a, const PadicNumber& b) {
        check_same_ring(a, b);
        return {a.ring_, a.mantissa_ * b.mantissa_, std::min(a.precision_, b.precision_)};
    }

    friend PadicNumber padic_div_unit(const PadicNumber& a, const PadicNumber& b) {
        check_same_ring(a, b);
        if (!b.is_unit()) throw PrecisionViolation("division by a non-unit in Z/" + std::to_string(a.prime()) + "^K");
        BigInt inv;
        mpz_invert(inv.get_mpz_t(), b.mantissa_.get_mpz_t(), a.ring_->modulus.get_mpz_t());
        return {a.ring_, a.mantissa_ * inv, std::min(a.precision_, b.precision_)};
    }

    /// Equal mantissa and precision.
    friend bool operator==(const PadicNumber& a, const PadicNumber& b) {
        return a.ring_->p == b.ring_->p && a.ring_->digits == b.ring_->digits && a.mantissa_ == b.mantissa_ &&
               a.precision_ == b.precision_;
    }

private:
    static void check_same_ring(const PadicNumber& a, const PadicNumber& b) {
        if (a.ring_->p != b.ring_->p || a.ring_->digits != b.ring_->digits)
            throw InvalidParameter("p-adic operands live in different rings");
    }

    PadicRingPtr ring_;
    BigInt mantissa_;
    unsigned precision_ = 0;
};

inline PadicNumber padic_add(const PadicNumber& a, const PadicNumber& b) { return a + b; }
inline PadicNumber padic_mul(const PadicNumber& a, const PadicNumber& b) { return a * b; }

/// phi_p(x) = (x^p - x)/p. The division by p costs one trusted digit.
inline PadicNumber apply_phi(const PadicNumber& x) {
    const auto& ring = *x.ring();
    if (x.precision() == 0) throw PrecisionViolation("no trusted digits left to apply phi_p");
    BigInt t;
    mpz_powm_ui(t.get_mpz_t(), x.mantissa().get_mpz_t(), ring.p, ring.modulus.get_mpz_t());
    t -= x.mantissa();
    mpz_mod(t.get_mpz_t(), t.get_mpz_t(), ring.modulus.get_mpz_t());
    if (!mpz_divisible_ui_p(t.get_mpz_t(), ring.p)) throw InternalError("x^p - x not divisible by p");
    mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), ring.p);
    return {x.ring(), t, x.precision() - 1};
}

/// The p roots of x^p - x - p*beta, one per residue class a = 0..p-1 (in
/// that order), found by Newton iteration with precision doubling. A root is
/// determined modulo p^{prec(beta)+1} because p*beta is, so each root gains
/// one trusted digit over beta (capped at K).
inline std::vector<PadicNumber> padic_preimages(const PadicNumber& beta) {
    const auto& ring = *beta.ring();
    const std::uint64_t p = ring.p;
    const unsigned K = ring.digits;
    if (beta.precision() < 1) throw PrecisionViolation("preimage of a value with no trusted digits");
    const BigInt pbeta = BigInt(static_cast<unsigned long>(p)) * beta.mantissa();
    const unsigned cap = static_cast<unsigned>(std::ceil(std::log2(static_cast<double>(K)))) + 2;

    std::vector<PadicNumber> roots;
    roots.reserve(p);
    for (std::uint64_t a = 0; a < p; ++a) {
        BigInt x = static_cast<unsigned long>(a);
        unsigned known = 1;
        unsigned steps = 0;
        while (known < K) {
            if (++steps > cap) throw InternalError("Hensel lifting did not converge");
            known = std::min(2 * known, K);
            const BigInt mod = ipow(p, known);
            BigInt xp;
            mpz_powm_ui(xp.get_mpz_t(), x.get_mpz_t(), p, mod.get_mpz_t());
            BigInt g = xp - x - pbeta;
            BigInt dg;  // p x^{p-1} - 1
            mpz_powm_ui(dg.get_mpz_t(), x.get_mpz_t(), p - 1, mod.get_mpz_t());
            dg = dg * static_cast<unsigned long>(p) - 1;
            mpz_mod(dg.get_mpz_t(), dg.get_mpz_t(), mod.get_mpz_t());
            BigInt inv;
            if (mpz_invert(inv.get_mpz_t(), dg.get_mpz_t(), mod.get_mpz_t()) == 0)
                throw InternalError("derivative of the fiber polynomial is not a unit");
            x -= g * inv;
            mpz_mod(x.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t());
        }
        BigInt g;
        mpz_powm_ui(g.get_mpz_t(), x.get_mpz_t(), p, ring.modulus.get_mpz_t());
        g -= x + pbeta;
        if (!mpz_divisible_p(g.get_mpz_t(), ring.modulus.get_mpz_t())) throw InternalError("lifted root fails the fiber equation");
        roots.emplace_back(beta.ring(), x, std::min(beta.precision() + 1, K));
    }
    return roots;
}

struct PadicLeaf {
    PadicNumber value;
    std::vector<std::uint16_t> address;  // residue choice at each level, root side first
    unsigned residual_valuation = 0;     // v_p(phi^n(value) - target) at the surviving precision
    unsigned trusted_digits = 0;         // precision surviving n forward applications
};

struct PadicOrbit {
    std::uint64_t p = 0;
    unsigned depth = 0;
    unsigned digits = 0;
    std::vector<PadicLeaf> leaves;  // sorted by address
};

struct PadicOrbitOptions {
    std::size_t orbit_cap = std::size_t{1} << 16;
    unsigned margin = 16;        // K must be at least depth + margin
    unsigned threads = 0;
};

/// Address digits rendered in base 36 for p <= 36, dotted decimal otherwise.
inline std::string address_string(const std::vector<std::uint16_t>& address, std::uint64_t p) {
    static constexpr char kDigits[] = "0123456789abcdefghijklmnopqrstuvwxyz";
    std::string s;
    for (std::size_t i = 0; i < address.size(); ++i) {
        if (p <= 36) {
            s += kDigits[address[i]];
        } else {
            if (i) s += '.';
            s += std::to_string(address[i]);
        }
    }
    return s;
}

inline std::size_t checked_orbit_size(std::uint64_t p, unsigned n, std::size_t cap) {
    double size = std::pow(static_cast<double>(p), n);
    if (size > static_cast<double>(cap))
        throw ResourceLimit("p^n = " + std::to_string(p) + "^" + std::to_string(n) + " exceeds orbit cap " + std::to_string(cap));
    std::size_t s = 1;
    for (unsigned k = 0; k < n; ++k) s *= p;
    return s;
}

/// Breadth-first fiber expansion of 1 under phi_p in Z/p^K.
inline PadicOrbit backward_orbit_padic(std::uint64_t p, unsigned n, unsigned K, const PadicOrbitOptions& opt = {}) {
    require_prime(p);
    if (n == 0) throw InvalidParameter("orbit depth must be positive");
    checked_orbit_size(p, n, opt.orbit_cap);
    if (K < n + opt.margin)
        throw PrecisionViolation("p-adic precision K = " + std::to_string(K) + " is too small for depth " + std::to_string(n) +
                                 "; raise K to at least " + std::to_string(n + opt.margin));
    auto ring = PadicRing::make(p, K);

    std::vector<PadicLeaf> frontier;
    frontier.push_back({PadicNumber(ring, BigInt(1)), {}, 0, 0});
    for (unsigned level = 0; level < n; ++level) {
        std::vector<PadicLeaf> next(frontier.size() * p, PadicLeaf{PadicNumber(ring, BigInt(0)), {}, 0, 0});
        parallel_for(frontier.size(), opt.threads, [&](std::size_t i) {
            auto roots = padic_preimages(frontier[i].value);
            for (std::uint64_t a = 0; a < p; ++a) {
                auto& leaf = next[i * p + a];
                leaf.value = std::move(roots[a]);
                leaf.address = frontier[i].address;
                leaf.address.push_back(static_cast<std::uint16_t>(a));
            }
        });
        frontier = std::move(next);
    }

    const PadicNumber target(ring, BigInt(1));
    parallel_for(frontier.size(), opt.threads, [&](std::size_t i) {
        auto& leaf = frontier[i];
        PadicNumber y = leaf.value;
        for (unsigned k = 0; k < n; ++k) y = apply_phi(y);
        leaf.trusted_digits = y.precision();
        leaf.residual_valuation = (y - target).valuation();
    });

    std::sort(frontier.begin(), frontier.end(), [](const auto& a, const auto& b) { return a.address < b.address; });
    return {p, n, K, std::move(frontier)};
}

struct SplittingReport {
    std::size_t expected_count = 0;
    std::size_t count = 0;
    bool count_ok = false;
    bool addresses_distinct = false;
    bool distinct = false;
    unsigned distinct_modulus_digits = 0;  // distinctness checked modulo p^this
    unsigned max_residual_deficit = 0;     // max over leaves of trusted digits minus residual valuation
    unsigned min_trusted_digits = 0;
    bool success = false;
};

/// Checks the leaf count, pairwise distinctness modulo p^{min precision}, and
/// that every leaf maps to the target under phi_p^n at its surviving precision.
inline SplittingReport verify_total_splitting(const PadicOrbit& orbit) {
    SplittingReport r;
    r.expected_count = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(orbit.p), orbit.depth)));
    r.count = orbit.leaves.size();
    r.count_ok = r.count == r.expected_count;
    if (orbit.leaves.empty()) return r;

    unsigned min_prec = orbit.digits;
    r.min_trusted_digits = orbit.digits;
    for (const auto& leaf : orbit.leaves) {
        min_prec = std::min(min_prec, leaf.value.precision());
        r.min_trusted_digits = std::min(r.min_trusted_digits, leaf.trusted_digits);
        r.max_residual_deficit = std::max(r.max_residual_deficit, leaf.trusted_digits - std::min(leaf.trusted_digits, leaf.residual_valuation));
    }
    r.distinct_modulus_digits = min_prec;

    std::vector<std::vector<std::uint16_t>> addresses;
    std::vector<BigInt> reduced;
    const BigInt mod = ipow(orbit.p, min_prec);
    for (const auto& leaf : orbit.leaves) {
        addresses.push_back(leaf.address);
        BigInt m;
        mpz_mod(m.get_mpz_t(), leaf.value.mantissa().get_mpz_t(), mod.get_mpz_t());
        reduced.push_back(std::move(m));
    }
    std::sort(addresses.begin(), addresses.end());
    std::sort(reduced.begin(), reduced.end());
    r.addresses_distinct = std::adjacent_find(addresses.begin(), addresses.end()) == addresses.end();
    r.distinct = r.addresses_distinct && std::adjacent_find(reduced.begin(), reduced.end()) == reduced.end();
    r.success = r.count_ok && r.distinct && r.max_residual_deficit == 0;
    return r;
}

}  // namespace dynheight
