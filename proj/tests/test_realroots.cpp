#include <gtest/gtest.h>
#include <packsdp/realroots.hpp>

using namespace packsdp;
using RP = UPoly<Rational>;

namespace {
RP poly(std::vector<Rational> c) { return RP(std::move(c)); }
}  // namespace

TEST(Sturm, ChainOfT) {
    auto ch = sturm_chain(RP::x());
    ASSERT_EQ(ch.polys.size(), 2u);
    EXPECT_EQ(ch.polys[0], RP::x());
    EXPECT_EQ(ch.polys[1], RP(Rational(1)));
}

TEST(Sturm, ChainOfTSquaredMinus2) {
    auto ch = sturm_chain(poly({-2, 0, 1}));
    ASSERT_EQ(ch.polys.size(), 3u);
    EXPECT_EQ(ch.polys[1], poly({0, 2}));
    EXPECT_EQ(ch.polys[2], RP(Rational(2)));
}

TEST(Sturm, RepeatedRootTruncates) {
    auto ch = sturm_chain(poly({1, -2, 1}));
    ASSERT_EQ(ch.polys.size(), 2u);
    EXPECT_EQ(ch.polys[1], poly({-2, 2}));
}

TEST(Sturm, ZeroPolynomial) { EXPECT_THROW(sturm_chain(RP()), ZeroPolynomial); }

TEST(CountRoots, Examples) {
    EXPECT_EQ(count_roots(sturm_chain(poly({-2, 0, 1})), Rational(1), Rational(2)), 1);
    RP cubic = poly({0, Rational(1, 2), Rational(-3, 2), 1});  // t(t-1/2)(t-1)
    EXPECT_EQ(count_roots(sturm_chain(cubic), Rational(-1, 10), Rational(1)), 3);
    EXPECT_EQ(count_roots(sturm_chain(poly({1, 0, 1})), Rational(-10), Rational(10)), 0);
}

TEST(CountRoots, RepeatedRootCountedOnce) {
    RP p = poly({1, -2, 1}) * poly({-2, 1});  // (t-1)^2 (t-2)
    EXPECT_EQ(count_roots(sturm_chain(p), Rational(0), Rational(3)), 2);
}

TEST(CountRoots, EndpointRoot) {
    auto ch = sturm_chain(poly({-1, 0, 1}));
    EXPECT_THROW(count_roots(ch, Rational(-1), Rational(2)), EndpointIsRoot);
    EXPECT_EQ(count_roots(ch, Rational(-1), Rational(2), true), 2);
    EXPECT_EQ(count_roots(ch, Rational(-2), Rational(1)), 2);  // hi is included
}

TEST(ConfirmRootSet, Examples) {
    RP cubic = poly({0, Rational(1, 2), Rational(-3, 2), 1});
    EXPECT_TRUE(confirm_root_set(cubic, Rational(-1, 10), Rational(1), {Rational(0), Rational(1, 2), Rational(1)}));
    using QP = UPoly<QuadraticNumber>;
    QP q(std::vector<QuadraticNumber>{-2, 0, 1});
    EXPECT_TRUE(confirm_root_set(q, QuadraticNumber(0), QuadraticNumber(2), {QuadraticNumber::sqrt_ell(2)}));
    EXPECT_FALSE(confirm_root_set(poly({-1, 0, 1}), Rational(-2), Rational(2), {Rational(1)}));
    EXPECT_FALSE(confirm_root_set(poly({-1, 0, 1}), Rational(-2), Rational(2), {Rational(1), Rational(1, 2)}));
}

TEST(IsolateRoots, SeparatesAndRefines) {
    RP p = poly({-2, 0, 1}) * poly({-1, 3});  // roots +-sqrt2, 1/3
    auto iv = isolate_roots(p, Rational(-2), Rational(2), Rational(1, 100));
    ASSERT_EQ(iv.size(), 3u);
    for (auto& [a, b] : iv) {
        EXPECT_LE(b - a, Rational(1, 100));
        EXPECT_EQ(count_roots(sturm_chain(p), a, b, true), 1);
    }
    HpFloat r = refine_root(p, iv.back().first, iv.back().second, 200);
    EXPECT_TRUE(abs(r - sqrt(HpFloat(2L, 200))) < pow2(-190, 200));
}
