#pragma once

#include "errors.hpp"
#include "hp_float.hpp"

#include <gmpxx.h>

#include <cctype>
#include <ostream>
#include <string>

namespace packsdp {

using Integer = mpz_class;
using Rational = mpq_class;

inline bool is_squarefree(long ell) {
    if (ell < 1) return false;
    for (long p = 2; p * p <= ell; ++p)
        if (ell % (p * p) == 0) return false;
    return true;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline std::string trim(const std::string& s) {
    std::string r;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) r += c;
    return r;
}

// accepts "p", "p/q" and plain decimals such as "-0.125"
inline Rational parse_rational(const std::string& text) {
    std::string s = trim(text);
    if (s.empty()) throw ParseError("empty rational");
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        bool neg = s[0] == '-';
        std::string ip = s.substr(neg || s[0] == '+' ? 1 : 0, dot - (neg || s[0] == '+' ? 1 : 0));
        std::string fp = s.substr(dot + 1);
        for (char c : ip + fp)
            if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("bad decimal '" + text + "'");
        Integer num(ip.empty() ? "0" : ip);
        Integer den = 1;
        for (char c : fp) {
            num = num * 10 + (c - '0');
            den *= 10;
        }
        Rational q(neg ? Integer(-num) : num, den);
        q.canonicalize();
        return q;
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        bool ok = std::isdigit(static_cast<unsigned char>(c)) || c == '/' || ((c == '-' || c == '+') && i == 0);
        if (!ok) throw ParseError("bad rational '" + text + "'");
    }
    if (s[0] == '+') s = s.substr(1);
    Rational q;
    if (q.set_str(s, 10) != 0) throw ParseError("bad rational '" + text + "'");
    if (q.get_den() == 0) throw ParseError("zero denominator in '" + text + "'");
    q.canonicalize();
    return q;
}

// a + b*sqrt(ell); ell = 1 means the rational field
class QuadraticNumber {
public:
    QuadraticNumber() = default;
    QuadraticNumber(long v) : a_(v) {}
    QuadraticNumber(int v) : a_(v) {}
    QuadraticNumber(const Rational& a) : a_(a) { a_.canonicalize(); }
    QuadraticNumber(const Rational& a, const Rational& b, long ell) : a_(a), b_(b), ell_(ell) {
        a_.canonicalize();
        b_.canonicalize();
        if (!is_squarefree(ell)) throw FieldMismatch("ell=" + std::to_string(ell) + " is not squarefree");
        if (ell_ == 1) {
            a_ += b_;
            b_ = 0;
        }
    }
    static QuadraticNumber sqrt_ell(long ell) { return QuadraticNumber(0, 1, ell); }

    const Rational& a() const { return a_; }
    const Rational& b() const { return b_; }
    long ell() const { return ell_; }
    bool is_rational() const { return b_ == 0; }
    bool is_zero() const { return a_ == 0 && b_ == 0; }

    // exact sign via comparison of a^2 and ell*b^2
    int sign() const {
        int sa = ::sgn(a_), sb = ::sgn(b_);
        if (sb == 0) return sa;
        if (sa == 0 || sa == sb) return sb;
        Rational lhs = a_ * a_, rhs = b_ * b_ * ell_;
        int c = cmp(lhs, rhs);
        return c == 0 ? 0 : (c > 0 ? sa : sb);
    }

    QuadraticNumber conjugate() const { return make(a_, -b_, ell_); }
    Rational norm() const { return a_ * a_ - b_ * b_ * ell_; }

    QuadraticNumber& operator+=(const QuadraticNumber& o) {
        ell_ = join(o);
        a_ += o.a_;
        b_ += o.b_;
        return *this;
    }
    QuadraticNumber& operator-=(const QuadraticNumber& o) {
        ell_ = join(o);
        a_ -= o.a_;
        b_ -= o.b_;
        return *this;
    }
    QuadraticNumber& operator*=(const QuadraticNumber& o) {
        long e = join(o);
        if (o.b_ == 0) {
            a_ *= o.a_;
            b_ *= o.a_;
        } else if (b_ == 0) {
            b_ = a_ * o.b_;
            a_ *= o.a_;
        } else {
            Rational na = a_ * o.a_ + b_ * o.b_ * e;
            b_ = a_ * o.b_ + b_ * o.a_;
            a_ = na;
        }
        ell_ = e;
        return *this;
    }
    QuadraticNumber& operator/=(const QuadraticNumber& o) {
        if (o.is_zero()) throw std::domain_error("division by zero");
        if (o.b_ == 0) {
            ell_ = join(o);
            a_ /= o.a_;
            b_ /= o.a_;
            return *this;
        }
        Rational n = o.norm();
        *this *= o.conjugate();
        a_ /= n;
        b_ /= n;
        return *this;
    }

    QuadraticNumber operator-() const { return make(-a_, -b_, ell_); }

    friend QuadraticNumber operator+(QuadraticNumber x, const QuadraticNumber& y) { x += y; return x; }
    friend QuadraticNumber operator-(QuadraticNumber x, const QuadraticNumber& y) { x -= y; return x; }
    friend QuadraticNumber operator*(QuadraticNumber x, const QuadraticNumber& y) { x *= y; return x; }
    friend QuadraticNumber operator/(QuadraticNumber x, const QuadraticNumber& y) { x /= y; return x; }

    friend bool operator==(const QuadraticNumber& x, const QuadraticNumber& y) {
        return x.a_ == y.a_ && x.b_ == y.b_ && (x.b_ == 0 || x.ell_ == y.ell_);
    }
    friend bool operator!=(const QuadraticNumber& x, const QuadraticNumber& y) { return !(x == y); }
    friend bool operator<(const QuadraticNumber& x, const QuadraticNumber& y) { return (x - y).sign() < 0; }
    friend bool operator>(const QuadraticNumber& x, const QuadraticNumber& y) { return (x - y).sign() > 0; }
    friend bool operator<=(const QuadraticNumber& x, const QuadraticNumber& y) { return (x - y).sign() <= 0; }
    friend bool operator>=(const QuadraticNumber& x, const QuadraticNumber& y) { return (x - y).sign() >= 0; }

    std::string str() const {
        if (b_ == 0) return a_.get_str();
        std::string bs = b_.get_str();
        if (bs[0] != '-') bs = "+" + bs;
        return a_.get_str() + bs + "*sqrt(" + std::to_string(ell_) + ")";
    }
    friend std::ostream& operator<<(std::ostream& os, const QuadraticNumber& q) { return os << q.str(); }

    HpFloat approx(long prec) const {
        HpFloat r(a_, prec + 16);
        if (b_ != 0) {
            HpFloat s = sqrt(HpFloat(ell_, prec + 16));
            r.add_mul(HpFloat(b_, prec + 16), s);
        }
        r.set_precision(prec);
        return r;
    }

private:
    static QuadraticNumber make(const Rational& a, const Rational& b, long ell) {
        QuadraticNumber q;
        q.a_ = a;
        q.b_ = b;
        q.ell_ = ell;
        return q;
    }
    long join(const QuadraticNumber& o) const {
        if (ell_ == o.ell_) return ell_;
        if (o.b_ == 0 && o.ell_ != ell_) return ell_ == 1 ? o.ell_ : ell_;
        if (b_ == 0) return o.ell_;
        throw FieldMismatch("sqrt(" + std::to_string(ell_) + ") vs sqrt(" + std::to_string(o.ell_) + ")");
    }

    Rational a_{0};
    Rational b_{0};
    long ell_ = 1;
};

inline std::string to_string(const QuadraticNumber& q) { return q.str(); }

// sqrt(q) as an element of Q[sqrt(ell)] with ell the squarefree part of num*den
inline QuadraticNumber exact_sqrt(const Rational& q) {
    if (q < 0) throw std::domain_error("exact_sqrt of a negative number");
    if (q == 0) return QuadraticNumber(0);
    Integer m = q.get_num() * q.get_den();
    Integer sq = 1, rest = 1;
    Integer x = m;
    for (unsigned long p = 2; p * p <= x; ++p) {
        while (x % (p * p) == 0) {
            x /= p * p;
            sq *= p;
        }
    }
    rest = x;
    Rational coef(sq, q.get_den());
    coef.canonicalize();
    if (rest == 1) return QuadraticNumber(coef);
    if (!rest.fits_slong_p()) throw FieldMismatch("squarefree part too large");
    return QuadraticNumber(0, coef, rest.get_si());
}

// "p/q", "p/q+r/s*sqrt(L)", "r/s*sqrt(L)", "sqrt(L)"
inline QuadraticNumber parse_quadratic(const std::string& text) {
    std::string s = trim(text);
    auto pos = s.find("sqrt(");
    if (pos == std::string::npos) return QuadraticNumber(parse_rational(s));
    auto close = s.find(')', pos);
    if (close == std::string::npos || close + 1 != s.size()) throw ParseError("bad quadratic '" + text + "'");
    long ell = 0;
    try {
        ell = std::stol(s.substr(pos + 5, close - pos - 5));
    } catch (...) {
        throw ParseError("bad sqrt argument in '" + text + "'");
    }
    if (!is_squarefree(ell)) throw ParseError("ell not squarefree in '" + text + "'");
    std::string head = s.substr(0, pos);
    Rational b = 1;
    if (!head.empty() && head.back() == '*') head.pop_back();
    else if (!head.empty() && head.back() != '+' && head.back() != '-') throw ParseError("bad quadratic '" + text + "'");
    // split head into a-part and b-coefficient at the last sign not at index 0
    std::size_t split = std::string::npos;
    for (std::size_t i = head.size(); i-- > 1;)
        if (head[i] == '+' || head[i] == '-') {
            split = i;
            break;
        }
    Rational a = 0;
    std::string bpart = head;
    if (split != std::string::npos) {
        a = parse_rational(head.substr(0, split));
        bpart = head.substr(split);
    }
    if (bpart.empty() || bpart == "+") b = 1;
    else if (bpart == "-") b = -1;
    else b = parse_rational(bpart);
    return QuadraticNumber(a, b, ell);
}

// uniform helpers for generic code over Rational and QuadraticNumber

inline int exact_sign(const Rational& q) { return ::sgn(q); }
inline int exact_sign(const QuadraticNumber& q) { return q.sign(); }
inline bool is_zero(const Rational& q) { return ::sgn(q) == 0; }
inline bool is_zero(const QuadraticNumber& q) { return q.is_zero(); }
inline std::string exact_str(const Rational& q) { return q.get_str(); }
inline std::string exact_str(const QuadraticNumber& q) { return q.str(); }

inline HpFloat approx_value(const QuadraticNumber& q, long precision_bits) { return q.approx(precision_bits); }
inline HpFloat approx_value(const Rational& q, long precision_bits) { return HpFloat(q, precision_bits); }

template <class F>
F parse_exact(const std::string& s);
template <>
inline Rational parse_exact<Rational>(const std::string& s) { return parse_rational(s); }
template <>
inline QuadraticNumber parse_exact<QuadraticNumber>(const std::string& s) { return parse_quadratic(s); }

// Closest rational to q with denominator <= max_den (continued fraction walk with semiconvergents).
inline Rational best_rational_approx(const Rational& q, const Integer& max_den) {
    if (max_den < 1) throw std::invalid_argument("max_denominator must be >= 1");
    if (q.get_den() <= max_den) return q;
    Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    Integer n = q.get_num(), d = q.get_den();
    while (true) {
        Integer a;
        mpz_fdiv_q(a.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
        Integer q2 = q0 + a * q1;
        if (q2 > max_den) break;
        Integer p2 = p0 + a * p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        Integer r = n - a * d;
        n = d;
        d = r;
        if (d == 0) break;
    }
    Integer k = (max_den - q0) / q1;
    Rational bound1(p0 + k * p1, q0 + k * q1);
    Rational bound2(p1, q1);
    bound1.canonicalize();
    bound2.canonicalize();
    Rational e1 = abs(bound1 - q), e2 = abs(bound2 - q);
    return e2 <= e1 ? bound2 : bound1;
}

inline Rational best_rational_approx(const HpFloat& x, const Integer& max_den) {
    return best_rational_approx(x.to_rational(), max_den);
}

} // namespace packsdp
