#include <gtest/gtest.h>
#include <packsdp/exact_linalg.hpp>
#include <packsdp/relations.hpp>

using namespace packsdp;

namespace {
Integer det2(const IntMatrix& B) { return B[0][0] * B[1][1] - B[0][1] * B[1][0]; }
Integer norm2(const std::vector<Integer>& v) {
    Integer s = 0;
    for (auto& x : v) s += x * x;
    return s;
}
}  // namespace

TEST(Lll, IdentityUnchanged) {
    IntMatrix I{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    EXPECT_EQ(lll_reduce(I), I);
}

TEST(Lll, UnimodularTwoByTwo) {
    IntMatrix B{{1, 0}, {4, 1}};
    auto R = lll_reduce(B, Rational(3, 4));
    EXPECT_LE(norm2(R[0]), 2);
    EXPECT_EQ(abs(det2(R)), 1);
}

TEST(Lll, ShortestVectorByBruteForce) {
    IntMatrix B{{201, 37}, {1648, 297}};
    Integer best = -1;
    for (int a = -50; a <= 50; ++a)
        for (int b = -50; b <= 50; ++b) {
            if (a == 0 && b == 0) continue;
            std::vector<Integer> v{a * B[0][0] + b * B[1][0], a * B[0][1] + b * B[1][1]};
            if (best < 0 || norm2(v) < best) best = norm2(v);
        }
    auto R = lll_reduce(B);
    EXPECT_EQ(abs(det2(R)), abs(det2(B)));
    // delta = 0.99 in dimension 2: first vector within factor 1/(delta - 1/4) of the minimum
    EXPECT_LE(norm2(R[0]) * 74, best * 100);
    Integer minkowski = abs(det2(B)) * 4 / 3;  // Hermite constant gamma_2^2 = 4/3
    EXPECT_LE(norm2(R[0]), minkowski + 1);
}

TEST(Lindep, Examples) {
    std::vector<HpFloat> v{HpFloat(1L, 256), HpFloat(Rational(1, 3), 256)};
    EXPECT_EQ(lindep(v, Integer(1000)).coefficients, (std::vector<Integer>{1, -3}));
    HpFloat s2 = sqrt(HpFloat(2L, 256));
    auto r = lindep({HpFloat(1L, 256), s2, HpFloat(1L, 256) + s2}, Integer(1) << 20);
    EXPECT_EQ(r.coefficients, (std::vector<Integer>{1, 1, -1}));
    EXPECT_THROW(lindep({HpFloat(1L, 256), pi(256)}, Integer(1000)), NotFound);
}

TEST(Lindep, ResidualIsRecomputable) {
    HpFloat s3 = sqrt(HpFloat(3L, 256));
    std::vector<HpFloat> v{HpFloat(2L, 256), s3, HpFloat(2L, 256) * 5L - s3 * 7L};
    auto r = lindep(v, Integer(1) << 20);
    HpFloat s(256);
    for (int i = 0; i < 3; ++i) s += v[i] * HpFloat(r.coefficients[i], 256);
    EXPECT_TRUE(abs(abs(s) - r.residual) <= pow2(-250, 256));
}

TEST(KernelRelations, AllOnesKernel) {
    HpMatrix N(2, 1, 256);
    HpFloat h = sqrt(HpFloat(2L, 256)) / 2L;
    N(0, 0) = h;
    N(1, 0) = h;
    auto rel = kernel_relations(N, 1, Integer(1) << 20);
    ASSERT_EQ(rel.size(), 1u);
    EXPECT_EQ(abs(rel[0][0]), 1);
    EXPECT_EQ(rel[0][0], -rel[0][1]);
}

TEST(KernelRelations, PlaneNormal) {
    HpMatrix N(3, 2, 256);
    HpFloat a = sqrt(HpFloat(2L, 256)), b = sqrt(HpFloat(6L, 256));
    N(0, 0) = HpFloat(1L, 256) / a;
    N(1, 0) = -(HpFloat(1L, 256) / a);
    N(0, 1) = HpFloat(1L, 256) / b;
    N(1, 1) = HpFloat(1L, 256) / b;
    N(2, 1) = HpFloat(-2L, 256) / b;
    auto rel = kernel_relations(N, 1, Integer(1) << 20);
    ASSERT_EQ(rel.size(), 1u);
    EXPECT_EQ(abs(rel[0][0]), 1);
    EXPECT_EQ(rel[0][0], rel[0][1]);
    EXPECT_EQ(rel[0][1], rel[0][2]);
}

TEST(KernelRelations, EmptyKernel) { EXPECT_TRUE(kernel_relations(HpMatrix(3, 0, 256), 0, Integer(100)).empty()); }

TEST(QuadKernelRelations, RationalFieldMatchesNullspace) {
    HpMatrix N(2, 1, 256);
    HpFloat h = sqrt(HpFloat(2L, 256)) / 2L;
    N(0, 0) = h;
    N(1, 0) = -h;
    auto kb = quad_kernel_relations(N, 1, 1, Integer(1) << 20);
    auto rk = rational_kernel_basis(N, Integer(1) << 20);
    ASSERT_EQ(kb.vectors.size(), 1u);
    ASSERT_EQ(rk.vectors.size(), 1u);
    EXPECT_EQ(kb.vectors[0][0], QuadraticNumber(rk.vectors[0][0]));
    EXPECT_EQ(kb.vectors[0][1], QuadraticNumber(rk.vectors[0][1]));
}

TEST(QuadKernelRelations, SqrtTwoKernel) {
    // kernel of [[2,-sqrt2],[-sqrt2,1]] is span{(1, sqrt2)}
    HpMatrix N(2, 1, 256);
    HpFloat s3 = sqrt(HpFloat(3L, 256));
    N(0, 0) = HpFloat(1L, 256) / s3;
    N(1, 0) = sqrt(HpFloat(2L, 256)) / s3;
    auto kb = quad_kernel_relations(N, 2, 1, Integer(1) << 20);
    ASSERT_EQ(kb.vectors.size(), 1u);
    QuadraticNumber s = QuadraticNumber::sqrt_ell(2);
    ExactMatrix<QuadraticNumber> X{{2, -s}, {-s, 1}};
    auto Xv = X * kb.vectors[0];
    EXPECT_TRUE(is_zero(Xv[0]) && is_zero(Xv[1]));
    EXPECT_FALSE(is_zero(kb.vectors[0][0]) && is_zero(kb.vectors[0][1]));
}

TEST(QuadKernelRelations, RationalKernelOverQuadraticField) {
    HpMatrix N(3, 1, 256);
    HpFloat s = sqrt(HpFloat(14L, 256));
    N(0, 0) = HpFloat(1L, 256) / s;
    N(1, 0) = HpFloat(2L, 256) / s;
    N(2, 0) = HpFloat(-3L, 256) / s;
    auto kb = quad_kernel_relations(N, 2, 2, Integer(1) << 20);
    ASSERT_EQ(kb.vectors.size(), 1u);
    auto& v = kb.vectors[0];
    for (auto& x : v) EXPECT_TRUE(x.is_rational());
    // proportional to (1,2,-3) with a common (possibly irrational) factor
    EXPECT_EQ(v[1], v[0] * QuadraticNumber(2));
    EXPECT_EQ(v[2], v[0] * QuadraticNumber(-3));
}
