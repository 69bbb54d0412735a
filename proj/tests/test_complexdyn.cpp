#include <gtest/gtest.h>

#include <mpfr.h>

#include "dynheight/complexdyn.hpp"
#include "dynheight/heights.hpp"
#include "oracles.hpp"

using namespace dynheight;

namespace {

BigComplex cx(double re, double im, unsigned bits = kDefaultBits) { return {re, im, bits}; }

double dist(const BigComplex& a, const BigComplex& b) { return abs(a - b).to_double(); }

}  // namespace

TEST(ComplexDyn, Constants) {
    EXPECT_NEAR(limit_constant(2, 128).to_double(), std::log(2.0), 1e-15);
    EXPECT_NEAR(bound_constant(3, 128).to_double(), std::log(4.0) / 2, 1e-15);
    EXPECT_NEAR(escape_radius(2, 128).to_double(), 3.0, 1e-15);
    EXPECT_NEAR(escape_radius(5, 128).to_double(), std::pow(6.0, 0.25), 1e-15);
}

TEST(ComplexDyn, FiberOfOne) {
    auto roots = solve_fiber(cx(1, 0), 2, 128);
    ASSERT_EQ(roots.size(), 2u);
    EXPECT_LT(dist(roots[0], cx(-1, 0)), 1e-35);
    EXPECT_LT(dist(roots[1], cx(2, 0)), 1e-35);
    for (const auto& r : roots) EXPECT_LT(fiber_residual(r, cx(1, 0), 2).to_double(), 1e-30);
}

TEST(ComplexDyn, FiberOfZeroForPThree) {
    auto roots = solve_fiber(cx(0, 0), 3, 128);
    ASSERT_EQ(roots.size(), 3u);
    for (int k = 0; k < 3; ++k) EXPECT_LT(dist(roots[k], cx(k - 1.0, 0)), 1e-35);
}

TEST(ComplexDyn, FiberMatchesCardano) {
    for (double c : {0.3, 1.0, 2.5}) {
        auto expected = oracle::cubic_roots_depressed(3 * c);
        auto roots = solve_fiber(cx(c, 0), 3, 128);
        for (const auto& e : expected) {
            double best = 1e9;
            for (const auto& r : roots) best = std::min(best, std::abs(std::complex<double>(r.real().to_double(), r.imag().to_double()) - e));
            EXPECT_LT(best, 1e-12) << "c=" << c;
        }
    }
}

TEST(ComplexDyn, FiberRejectsBadTolerance) {
    EXPECT_THROW(solve_fiber(cx(1, 0), 2, 128, BigFloat(0L, 128)), InvalidParameter);
    EXPECT_THROW(solve_fiber(cx(1, 0), 6, 128), InvalidParameter);
}

// phi_2^{-2}(1): (1 +- sqrt 17)/2 and (1 +- i sqrt 7)/2.
TEST(ComplexDyn, DepthTwoLeavesInClosedForm) {
    const unsigned b = 128;
    BigFloat half(0.5, b);
    BigFloat s17 = sqrt(BigFloat(17L, b)) * half, s7 = sqrt(BigFloat(7L, b)) * half;
    std::vector<BigComplex> expected{{half - s17, BigFloat(b)}, {half, -s7}, {half, s7}, {half + s17, BigFloat(b)}};
    ComplexOrbit orbit = backward_orbit_complex(2, 2, cx(1, 0));
    ASSERT_EQ(orbit.leaves.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(dist(orbit.leaves[i].value, expected[i]), 1e-35) << i;
}

// Leaves of the fiber tree coincide with the roots of the integer model F_n,
// found directly by Aberth iteration.
TEST(ComplexDyn, OrbitMatchesIntegerModelRoots) {
    ComplexOrbitOptions opt;
    opt.bits = 192;
    for (unsigned n = 1; n <= 6; ++n) {
        ComplexOrbit orbit = backward_orbit_complex(2, n, cx(1, 0, 192), opt);
        MahlerResult m = log_mahler_measure(integral_model(2, n), 192);
        ASSERT_EQ(m.roots.size(), orbit.leaves.size());
        std::vector<bool> used(m.roots.size(), false);
        for (const auto& leaf : orbit.leaves) {
            std::size_t best = 0;
            double d = 1e9;
            for (std::size_t j = 0; j < m.roots.size(); ++j) {
                double e = dist(leaf.value, m.roots[j]);
                if (!used[j] && e < d) d = e, best = j;
            }
            used[best] = true;
            EXPECT_LT(d, 1e-20) << "n=" << n;
        }
    }
}

TEST(ComplexDyn, OrbitResidualsAndOrdering) {
    ComplexOrbit orbit = backward_orbit_complex(3, 4, cx(1, 0));
    EXPECT_EQ(orbit.leaves.size(), 81u);
    EXPECT_LT(orbit.max_residual.to_double(), 1e-30);
    for (std::size_t i = 1; i < orbit.leaves.size(); ++i)
        EXPECT_TRUE(canonical_less(orbit.leaves[i - 1].value, orbit.leaves[i].value));
}

TEST(ComplexDyn, OrbitArgumentChecks) {
    EXPECT_THROW(backward_orbit_complex(2, 0, cx(1, 0)), InvalidParameter);
    EXPECT_THROW(backward_orbit_complex(9, 2, cx(1, 0)), InvalidParameter);
    ComplexOrbitOptions opt;
    opt.orbit_cap = 100;
    EXPECT_THROW(backward_orbit_complex(2, 7, cx(1, 0), opt), ResourceLimit);
    opt.orbit_cap = 1 << 16;
    opt.bits = 32;
    EXPECT_THROW(backward_orbit_complex(2, 3, cx(1, 0), opt), InvalidParameter);
}

TEST(ComplexDyn, ThreadCountDoesNotChangeLeaves) {
    ComplexOrbitOptions one, four;
    one.threads = 1;
    four.threads = 4;
    ComplexOrbit a = backward_orbit_complex(2, 8, cx(0.41, 0.37), one);
    ComplexOrbit b = backward_orbit_complex(2, 8, cx(0.41, 0.37), four);
    ASSERT_EQ(a.leaves.size(), b.leaves.size());
    for (std::size_t i = 0; i < a.leaves.size(); ++i) {
        EXPECT_EQ(a.leaves[i].address, b.leaves[i].address);
        EXPECT_EQ(a.leaves[i].value.real(), b.leaves[i].value.real());
        EXPECT_EQ(a.leaves[i].value.imag(), b.leaves[i].value.imag());
    }
}

// Outside the escape radius, |phi(z)| > |z|.
TEST(ComplexDyn, EscapeRadiusGrowth) {
    auto g = oracle::rng(3);
    std::uniform_real_distribution<double> theta(0, 2 * M_PI), stretch(1.0001, 20.0);
    for (std::uint64_t p : {2, 3, 5}) {
        const double R = escape_radius(p, 128).to_double();
        for (int i = 0; i < 100; ++i) {
            double r = R * stretch(g), t = theta(g);
            BigComplex z = cx(r * std::cos(t), r * std::sin(t));
            EXPECT_GT(abs(phi_complex(z, p)), abs(z));
            EXPECT_EQ(green_function(z, p).status, GreenStatus::escaped_certified);
        }
    }
}

TEST(ComplexDyn, BoundedPoints) {
    for (std::uint64_t p : {2, 3, 5}) {
        for (const auto& z : {cx(0, 0), cx(1, 0), cx(-1, 0)}) {
            GreenValue g = green_function(z, p);
            EXPECT_EQ(g.status, GreenStatus::bounded_certified);
            EXPECT_TRUE(g.value.is_zero());
        }
    }
    EXPECT_TRUE(in_filled_julia(cx(0, 1), 2));
    EXPECT_TRUE(in_filled_julia(cx(2, 0), 2));  // 2 -> 1 -> 0
    EXPECT_TRUE(in_filled_julia(cx(3, 0), 2));  // fixed
    EXPECT_FALSE(in_filled_julia(cx(4, 0), 2));
}

TEST(ComplexDyn, UnitCircleIsBounded) {
    for (std::uint64_t p : {2, 3, 5}) {
        for (int j = 0; j < 32; ++j) {
            double t = 2 * M_PI * j / 32;
            EXPECT_TRUE(in_filled_julia(cx(std::cos(t), std::sin(t)), p)) << "p=" << p << " j=" << j;
        }
    }
}

// G(z) - log|z| tends to -log p/(p-1), with error shrinking as |z| grows.
TEST(ComplexDyn, AsymptoticExpansion) {
    for (std::uint64_t p : {2, 3}) {
        double prev = 1e9;
        for (double r : {1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8}) {
            BigComplex z = cx(r * 0.6, r * 0.8);
            double err = abs(green_function(z, p).value - log_abs(z) + limit_constant(p, 128)).to_double();
            EXPECT_LT(err, prev) << "p=" << p << " r=" << r;
            prev = err;
        }
        EXPECT_LT(prev, 1e-6);
    }
}

// Direct escape rate p^{-n} (log|phi^n(z)| - L) with n = 40 (p = 2) or 30
// (p = 3, keeping the exponent inside MPFR's range): the omitted term is
// smaller than |phi^n(z)|^{-(p-1)}, far below the tolerance.
TEST(ComplexDyn, GreenMatchesDirectIteration) {
    const mpfr_exp_t old_emax = mpfr_get_emax();
    mpfr_set_emax(mpfr_get_emax_max());
    for (std::uint64_t p : {2, 3}) {
        for (double x : {1e8, 7.5}) {
            BigComplex z = cx(x, 0.5);
            BigComplex w = z;
            const unsigned n = p == 2 ? 40 : 30;
            for (unsigned k = 0; k < n; ++k) w = phi_complex(w, p);
            ASSERT_TRUE(w.is_finite());
            BigFloat direct = log_abs(w) - limit_constant(p, 128);
            for (unsigned k = 0; k < n; ++k) direct /= static_cast<long>(p);
            GreenValue g = green_function(z, p);
            EXPECT_LT(abs(g.value - direct).to_double(), 1e-25) << "p=" << p << " x=" << x;
        }
    }
    mpfr_set_emax(old_emax);
}

TEST(ComplexDyn, GreenAtLargeRealPoint) {
    GreenValue g = green_function(cx(1e8, 0), 2);
    EXPECT_EQ(g.status, GreenStatus::escaped_certified);
    EXPECT_NEAR(g.value.to_double(), std::log(1e8) - std::log(2.0), 1e-6);
    EXPECT_LT(g.truncation_bound, 1e-30);
}

TEST(ComplexDyn, FunctionalEquation) {
    auto g = oracle::rng(9);
    std::uniform_real_distribution<double> coord(-50, 50);
    for (std::uint64_t p : {2, 3, 5}) {
        int checked = 0;
        while (checked < 30) {
            BigComplex z = cx(coord(g), coord(g));
            if (in_filled_julia(z, p)) continue;
            EXPECT_LT(functional_equation_check(z, p), 1e-12);
            ++checked;
        }
    }
}

TEST(ComplexDyn, FunctionalEquationNeedsEscapingPoint) {
    EXPECT_THROW(functional_equation_check(cx(0.5, 0), 2), InvalidParameter);
}

TEST(ComplexDyn, GreenRejectsNonFinite) {
    BigComplex nan(BigFloat(std::nan(""), 128), BigFloat(128));
    EXPECT_THROW(green_function(nan, 2), InvalidParameter);
}
