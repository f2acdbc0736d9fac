#include <gtest/gtest.h>
#include <packsdp/fields.hpp>

using namespace packsdp;

namespace {
HpFloat sqrt2_newton(long prec) {
    // independent oracle: Newton on x^2 = 2 with exact rationals, then rounded
    Rational x(3, 2);
    for (int i = 0; i < 10; ++i) x = (x + Rational(2) / x) / 2;
    return HpFloat(x, prec);
}
}  // namespace

TEST(Fields, ApproxValueRationalIsExact) {
    QuadraticNumber h(Rational(1, 2), 0, 2);
    EXPECT_EQ(approx_value(h, 128).to_double(), 0.5);
    EXPECT_TRUE(approx_value(h, 128) == HpFloat(Rational(1, 2), 128));
}

TEST(Fields, ApproxValueSqrt2) {
    auto x = approx_value(QuadraticNumber::sqrt_ell(2), 128);
    EXPECT_EQ(x.precision(), 128);
    EXPECT_TRUE(abs(x - sqrt2_newton(128)) <= pow2(-126, 128));
    auto y = approx_value(QuadraticNumber(1, -1, 2), 128);
    EXPECT_TRUE(abs(y - (HpFloat(1L, 128) - sqrt2_newton(128))) <= pow2(-126, 128));
    EXPECT_NEAR(y.to_double(), -0.41421356237309503, 1e-15);
}

TEST(Fields, BestRationalApprox) {
    EXPECT_EQ(best_rational_approx(HpFloat("0.5", 128), Integer(100)), Rational(1, 2));
    EXPECT_EQ(best_rational_approx(HpFloat("0.333333333333", 128), Integer(100)), Rational(1, 3));
    EXPECT_EQ(best_rational_approx(HpFloat("3.14159265358979", 128), Integer(1000)), Rational(355, 113));
}

TEST(Fields, BestRationalApproxMatchesExhaustiveSearch) {
    HpFloat x("3.14159265358979", 128);
    Rational best;
    HpFloat err(1e9, 128);
    for (long q = 1; q <= 1000; ++q) {
        mpz_class p;
        HpFloat qx = x * HpFloat(q, 128);
        p = mpz_class(qx.round_to_integer());
        for (mpz_class c : std::vector<mpz_class>{p - 1, p, p + 1}) {
            HpFloat e = abs(x - HpFloat(Rational(c, q), 128));
            if (e < err) {
                err = e;
                best = Rational(c, q);
                best.canonicalize();
            }
        }
    }
    EXPECT_EQ(best, Rational(355, 113));
}

TEST(Fields, RoundTripWithinDenominatorBound) {
    for (Rational r : std::vector<Rational>{Rational(-7, 13), Rational(123456789, 987654321),
                                           Rational(Integer(1), Integer(1) << 60)}) {
        r.canonicalize();
        Integer D = Integer(1) << 100;
        EXPECT_EQ(best_rational_approx(approx_value(r, 256), D), r);
    }
}

TEST(Fields, Conjugation) {
    QuadraticNumber q(Rational(3, 4), Rational(-5, 7), 5);
    QuadraticNumber prod = q * q.conjugate();
    EXPECT_TRUE(prod.is_rational());
    EXPECT_EQ(prod.a(), Rational(9, 16) - Rational(25, 49) * 5);
}

TEST(Fields, DivisionAndSign) {
    QuadraticNumber s = QuadraticNumber::sqrt_ell(2);
    QuadraticNumber inv = QuadraticNumber(1) / (QuadraticNumber(1) + s);
    EXPECT_EQ(inv, QuadraticNumber(-1, 1, 2));
    EXPECT_EQ(QuadraticNumber(1, -1, 2).sign(), -1);
    EXPECT_EQ(QuadraticNumber(-1, 1, 2).sign(), 1);
    EXPECT_EQ(QuadraticNumber(3, -2, 2).sign(), 1);  // 3 > 2.828
    EXPECT_THROW(QuadraticNumber(1) / QuadraticNumber(0), std::domain_error);
}

TEST(Fields, FieldMismatch) {
    EXPECT_THROW(QuadraticNumber(0, 1, 2) + QuadraticNumber(0, 1, 3), FieldMismatch);
    EXPECT_THROW(QuadraticNumber(0, 1, 4), FieldMismatch);
    EXPECT_NO_THROW(QuadraticNumber(0, 1, 2) + QuadraticNumber(Rational(1, 3)));
}

TEST(Fields, Parsing) {
    EXPECT_EQ(parse_quadratic("1/2-3/4*sqrt(5)"), QuadraticNumber(Rational(1, 2), Rational(-3, 4), 5));
    EXPECT_EQ(parse_quadratic("-7/3"), QuadraticNumber(Rational(-7, 3)));
    EXPECT_EQ(parse_quadratic(QuadraticNumber(Rational(5, 8), Rational(-1, 8), 5).str()),
              QuadraticNumber(Rational(5, 8), Rational(-1, 8), 5));
    EXPECT_THROW(parse_rational("1/0"), ParseError);
    EXPECT_THROW(parse_rational("abc"), ParseError);
}

TEST(Fields, ExactSqrt) {
    EXPECT_EQ(exact_sqrt(Rational(9, 4)), QuadraticNumber(Rational(3, 2)));
    EXPECT_EQ(exact_sqrt(Rational(1, 2)), QuadraticNumber(0, Rational(1, 2), 2));
}
