#pragma once

#include <mpfr.h>
#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <utility>

namespace packsdp {

// Arbitrary precision binary float with per-value precision.
// Binary operations return a value at the larger operand precision.
class HpFloat {
public:
    static constexpr long default_precision = 512;

    HpFloat() : HpFloat(0L, default_precision) {}
    explicit HpFloat(long prec) : HpFloat(0L, prec) {}

    HpFloat(long v, long prec) { mpfr_init2(x_, prec); mpfr_set_si(x_, v, MPFR_RNDN); }
    HpFloat(int v, long prec) : HpFloat(static_cast<long>(v), prec) {}
    HpFloat(double v, long prec) { mpfr_init2(x_, prec); mpfr_set_d(x_, v, MPFR_RNDN); }
    HpFloat(const mpz_class& v, long prec) { mpfr_init2(x_, prec); mpfr_set_z(x_, v.get_mpz_t(), MPFR_RNDN); }
    HpFloat(const mpq_class& v, long prec) { mpfr_init2(x_, prec); mpfr_set_q(x_, v.get_mpq_t(), MPFR_RNDN); }
    HpFloat(const std::string& s, long prec) {
        mpfr_init2(x_, prec);
        if (mpfr_set_str(x_, s.c_str(), 10, MPFR_RNDN) != 0) mpfr_set_nan(x_);
    }

    HpFloat(const HpFloat& o) { mpfr_init2(x_, mpfr_get_prec(o.x_)); mpfr_set(x_, o.x_, MPFR_RNDN); }
    HpFloat(HpFloat&& o) noexcept {
        mpfr_init2(x_, MPFR_PREC_MIN);
        mpfr_swap(x_, o.x_);
    }
    HpFloat& operator=(const HpFloat& o) {
        if (this != &o) {
            if (mpfr_get_prec(x_) != mpfr_get_prec(o.x_)) mpfr_set_prec(x_, mpfr_get_prec(o.x_));
            mpfr_set(x_, o.x_, MPFR_RNDN);
        }
        return *this;
    }
    HpFloat& operator=(HpFloat&& o) noexcept {
        mpfr_swap(x_, o.x_);
        return *this;
    }
    ~HpFloat() { mpfr_clear(x_); }

    long precision() const { return static_cast<long>(mpfr_get_prec(x_)); }

    // changes precision while keeping the (rounded) value
    void set_precision(long prec) { mpfr_prec_round(x_, prec, MPFR_RNDN); }
    HpFloat with_precision(long prec) const {
        HpFloat r(prec);
        mpfr_set(r.x_, x_, MPFR_RNDN);
        return r;
    }

    mpfr_ptr get() { return x_; }
    mpfr_srcptr get() const { return x_; }

    double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(x_) != 0; }
    bool is_finite() const { return mpfr_number_p(x_) != 0; }
    int sign() const { return mpfr_sgn(x_); }

    // binary exponent e with 0.5 <= |x|/2^e < 1; very negative for zero
    long exponent() const { return is_zero() ? -(1L << 40) : static_cast<long>(mpfr_get_exp(x_)); }

    mpz_class round_to_integer() const {
        mpz_class z;
        mpfr_get_z(z.get_mpz_t(), x_, MPFR_RNDN);
        return z;
    }
    mpz_class floor_to_integer() const {
        mpz_class z;
        mpfr_get_z(z.get_mpz_t(), x_, MPFR_RNDD);
        return z;
    }
    // exact conversion of the binary value
    mpq_class to_rational() const {
        mpz_class m;
        mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), x_);
        mpq_class q(m);
        if (e >= 0) q *= mpq_class(mpz_class(1) << static_cast<unsigned long>(e));
        else q /= mpq_class(mpz_class(1) << static_cast<unsigned long>(-e));
        return q;
    }

    std::string to_string(int digits = 0) const {
        if (digits <= 0) digits = static_cast<int>(precision() * 0.30103) + 2;
        if (is_zero()) return "0";
        char* buf = nullptr;
        std::string fmt = "%." + std::to_string(digits) + "Rg";
        mpfr_asprintf(&buf, fmt.c_str(), x_);
        std::string s(buf);
        mpfr_free_str(buf);
        return s;
    }

    HpFloat& operator+=(const HpFloat& o) { widen(o); mpfr_add(x_, x_, o.x_, MPFR_RNDN); return *this; }
    HpFloat& operator-=(const HpFloat& o) { widen(o); mpfr_sub(x_, x_, o.x_, MPFR_RNDN); return *this; }
    HpFloat& operator*=(const HpFloat& o) { widen(o); mpfr_mul(x_, x_, o.x_, MPFR_RNDN); return *this; }
    HpFloat& operator/=(const HpFloat& o) { widen(o); mpfr_div(x_, x_, o.x_, MPFR_RNDN); return *this; }
    HpFloat& operator*=(long v) { mpfr_mul_si(x_, x_, v, MPFR_RNDN); return *this; }
    HpFloat& operator/=(long v) { mpfr_div_si(x_, x_, v, MPFR_RNDN); return *this; }

    HpFloat operator-() const {
        HpFloat r(*this);
        mpfr_neg(r.x_, r.x_, MPFR_RNDN);
        return r;
    }

    friend HpFloat operator+(HpFloat a, const HpFloat& b) { a += b; return a; }
    friend HpFloat operator-(HpFloat a, const HpFloat& b) { a -= b; return a; }
    friend HpFloat operator*(HpFloat a, const HpFloat& b) { a *= b; return a; }
    friend HpFloat operator/(HpFloat a, const HpFloat& b) { a /= b; return a; }
    friend HpFloat operator*(HpFloat a, long b) { a *= b; return a; }
    friend HpFloat operator/(HpFloat a, long b) { a /= b; return a; }

    friend bool operator<(const HpFloat& a, const HpFloat& b) { return mpfr_less_p(a.x_, b.x_); }
    friend bool operator>(const HpFloat& a, const HpFloat& b) { return mpfr_greater_p(a.x_, b.x_); }
    friend bool operator<=(const HpFloat& a, const HpFloat& b) { return mpfr_lessequal_p(a.x_, b.x_); }
    friend bool operator>=(const HpFloat& a, const HpFloat& b) { return mpfr_greaterequal_p(a.x_, b.x_); }
    friend bool operator==(const HpFloat& a, const HpFloat& b) { return mpfr_equal_p(a.x_, b.x_); }
    friend bool operator!=(const HpFloat& a, const HpFloat& b) { return !(a == b); }

    friend std::ostream& operator<<(std::ostream& os, const HpFloat& v) { return os << v.to_string(20); }

    // this += a * b
    void add_mul(const HpFloat& a, const HpFloat& b) { mpfr_fma(x_, a.x_, b.x_, x_, MPFR_RNDN); }
    // this -= a * b
    void sub_mul(const HpFloat& a, const HpFloat& b) { mpfr_fms(x_, a.x_, b.x_, x_, MPFR_RNDN); mpfr_neg(x_, x_, MPFR_RNDN); }

    void set_zero() { mpfr_set_zero(x_, 1); }

private:
    void widen(const HpFloat& o) {
        if (mpfr_get_prec(o.x_) > mpfr_get_prec(x_)) mpfr_prec_round(x_, mpfr_get_prec(o.x_), MPFR_RNDN);
    }

    mpfr_t x_;
};

inline HpFloat abs(HpFloat a) { mpfr_abs(a.get(), a.get(), MPFR_RNDN); return a; }
inline HpFloat sqrt(HpFloat a) { mpfr_sqrt(a.get(), a.get(), MPFR_RNDN); return a; }
inline HpFloat log2(HpFloat a) { mpfr_log2(a.get(), a.get(), MPFR_RNDN); return a; }
inline HpFloat hypot(const HpFloat& a, const HpFloat& b) {
    HpFloat r(std::max(a.precision(), b.precision()));
    mpfr_hypot(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}
inline HpFloat max(const HpFloat& a, const HpFloat& b) { return a < b ? b : a; }
inline HpFloat min(const HpFloat& a, const HpFloat& b) { return b < a ? b : a; }

// 2^e at the given precision
inline HpFloat pow2(long e, long prec) {
    HpFloat r(1L, prec);
    mpfr_mul_2si(r.get(), r.get(), e, MPFR_RNDN);
    return r;
}

inline HpFloat pi(long prec) {
    HpFloat r(prec);
    mpfr_const_pi(r.get(), MPFR_RNDN);
    return r;
}

} // namespace packsdp
