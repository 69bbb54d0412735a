#include <gtest/gtest.h>

#include "dynheight/rootfind.hpp"
#include "oracles.hpp"

using namespace dynheight;

namespace {

std::vector<BigComplex> real_coeffs(std::initializer_list<double> c, unsigned bits) {
    std::vector<BigComplex> out;
    for (double x : c) out.emplace_back(x, 0.0, bits);
    return out;
}

}  // namespace

TEST(Rootfind, QuadraticWithRealRoots) {
    for (RootMethod m : {RootMethod::durand_kerner, RootMethod::aberth}) {
        RootOptions opt;
        opt.method = m;
        auto res = simultaneous_roots(real_coeffs({-2, -1, 1}, 128), opt);
        ASSERT_TRUE(res.converged);
        ASSERT_EQ(res.roots.size(), 2u);
        EXPECT_NEAR(res.roots[0].real().to_double(), -1.0, 1e-30);
        EXPECT_NEAR(res.roots[1].real().to_double(), 2.0, 1e-30);
        EXPECT_LT(abs(res.roots[1].imag()).to_double(), 1e-30);
    }
}

TEST(Rootfind, RootsOfUnity) {
    RootOptions opt;
    opt.bits = 160;
    auto res = simultaneous_roots(real_coeffs({-1, 0, 0, 0, 0, 1}, 160), opt);
    ASSERT_TRUE(res.converged);
    for (const auto& z : res.roots) EXPECT_LT(std::abs(abs(z).to_double() - 1.0), 1e-40);
    // sorted canonically: the two roots with the most negative real part first
    EXPECT_LT(res.roots[0].real().to_double(), res.roots[2].real().to_double());
}

TEST(Rootfind, AgreesWithDeflationOracle) {
    std::vector<double> c{3, -1, 4, 1, -5, 9, 2, 1};
    auto expected = oracle::newton_deflation_roots(c);
    std::vector<BigComplex> coeffs;
    for (double x : c) coeffs.emplace_back(x, 0.0, 128);
    RootOptions opt;
    opt.method = RootMethod::aberth;
    auto res = simultaneous_roots(coeffs, opt);
    ASSERT_TRUE(res.converged);
    ASSERT_EQ(res.roots.size(), expected.size());
    for (const auto& z : res.roots) {
        double best = 1e9;
        for (const auto& e : expected)
            best = std::min(best, std::abs(std::complex<double>(z.real().to_double(), z.imag().to_double()) - e));
        EXPECT_LT(best, 1e-9);
    }
}

TEST(Rootfind, LinearAndNonMonic) {
    RootOptions opt;
    auto lin = simultaneous_roots(real_coeffs({3, 2}, 128), opt);
    ASSERT_EQ(lin.roots.size(), 1u);
    EXPECT_DOUBLE_EQ(lin.roots[0].real().to_double(), -1.5);
    auto q = simultaneous_roots(real_coeffs({-8, 0, 2}, 128), opt);
    ASSERT_TRUE(q.converged);
    EXPECT_NEAR(q.roots[0].real().to_double(), -2.0, 1e-30);
    EXPECT_NEAR(q.roots[1].real().to_double(), 2.0, 1e-30);
}

TEST(Rootfind, FujiwaraBoundEnclosesRoots) {
    auto coeffs = real_coeffs({-6, 11, -6, 1}, 128);  // roots 1, 2, 3
    double bound = fujiwara_root_bound(coeffs).to_double();
    EXPECT_GE(bound, 3.0);
    RootOptions opt;
    auto res = simultaneous_roots(coeffs, opt);
    ASSERT_TRUE(res.converged);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(res.roots[k].real().to_double(), k + 1.0, 1e-30);
}
