#pragma once

#include "fields.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace packsdp {

// Dense univariate polynomial, coefficients low to high, no trailing zeros.
template <class F>
class UPoly {
public:
    UPoly() = default;
    explicit UPoly(std::vector<F> c) : c_(std::move(c)) { trim(); }
    UPoly(const F& constant) : c_{constant} { trim(); }
    static UPoly monomial(int deg, const F& coef = F(1)) {
        std::vector<F> c(deg + 1, F(0));
        c[deg] = coef;
        return UPoly(std::move(c));
    }
    static UPoly x() { return monomial(1); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<F>& coeffs() const { return c_; }
    F coeff(int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : F(0); }
    const F& lead() const { return c_.back(); }

    F operator()(const F& x) const {
        F r(0);
        for (std::size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
        return r;
    }
    template <class T>
    T eval_as(const T& x, const T& zero) const {
        T r = zero;
        for (std::size_t i = c_.size(); i-- > 0;) r = r * x + T(c_[i]);
        return r;
    }

    UPoly derivative() const {
        if (c_.size() <= 1) return UPoly();
        std::vector<F> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * F(static_cast<long>(i));
        return UPoly(std::move(d));
    }

    UPoly& operator+=(const UPoly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), F(0));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
        trim();
        return *this;
    }
    UPoly& operator-=(const UPoly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), F(0));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
        trim();
        return *this;
    }
    friend UPoly operator+(UPoly a, const UPoly& b) { a += b; return a; }
    friend UPoly operator-(UPoly a, const UPoly& b) { a -= b; return a; }
    UPoly operator-() const {
        UPoly r(*this);
        for (auto& x : r.c_) x = -x;
        return r;
    }
    friend UPoly operator*(const UPoly& a, const UPoly& b) {
        if (a.is_zero() || b.is_zero()) return UPoly();
        std::vector<F> c(a.c_.size() + b.c_.size() - 1, F(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            if (!packsdp::is_zero(a.c_[i]))
                for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return UPoly(std::move(c));
    }
    friend UPoly operator*(UPoly a, const F& s) {
        for (auto& x : a.c_) x *= s;
        a.trim();
        return a;
    }
    friend bool operator==(const UPoly& a, const UPoly& b) { return a.c_ == b.c_; }
    friend bool operator!=(const UPoly& a, const UPoly& b) { return !(a == b); }

    // quotient and remainder over the field
    static void divmod(const UPoly& num, const UPoly& den, UPoly& q, UPoly& r) {
        if (den.is_zero()) throw std::domain_error("polynomial division by zero");
        r = num;
        q = UPoly();
        if (num.degree() < den.degree()) return;
        std::vector<F> qc(num.degree() - den.degree() + 1, F(0));
        F inv = F(1) / den.lead();
        std::vector<F> rc = num.c_;
        for (int i = num.degree(); i >= den.degree(); --i) {
            if (packsdp::is_zero(rc[i])) continue;
            F f = rc[i] * inv;
            qc[i - den.degree()] = f;
            for (int j = 0; j <= den.degree(); ++j) rc[i - den.degree() + j] -= f * den.c_[j];
        }
        q = UPoly(std::move(qc));
        r = UPoly(std::move(rc));
    }
    friend UPoly operator%(const UPoly& a, const UPoly& b) {
        UPoly q, r;
        divmod(a, b, q, r);
        return r;
    }
    friend UPoly operator/(const UPoly& a, const UPoly& b) {
        UPoly q, r;
        divmod(a, b, q, r);
        return q;
    }

    UPoly monic() const {
        if (is_zero()) return *this;
        return *this * (F(1) / lead());
    }

    std::string str(const std::string& var = "t") const {
        if (c_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (std::size_t i = c_.size(); i-- > 0;) {
            if (packsdp::is_zero(c_[i])) continue;
            if (!first) os << " + ";
            first = false;
            os << "(" << exact_str(c_[i]) << ")";
            if (i >= 1) os << "*" << var;
            if (i >= 2) os << "^" << i;
        }
        return os.str();
    }

private:
    void trim() {
        while (!c_.empty() && packsdp::is_zero(c_.back())) c_.pop_back();
    }
    std::vector<F> c_;
};

template <class F>
UPoly<F> gcd(UPoly<F> a, UPoly<F> b) {
    while (!b.is_zero()) {
        UPoly<F> r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

template <class F>
UPoly<F> pow(const UPoly<F>& p, int e) {
    UPoly<F> r(F(1));
    for (int i = 0; i < e; ++i) r = r * p;
    return r;
}

using Mono3 = std::array<int, 3>;

// Sparse polynomial in (u, v, t).
template <class F>
class Poly3 {
public:
    using Map = std::map<Mono3, F>;

    Poly3() = default;
    Poly3(const F& c) {
        if (!packsdp::is_zero(c)) m_[{0, 0, 0}] = c;
    }
    static Poly3 var(int i) {
        Poly3 p;
        Mono3 e{0, 0, 0};
        e[i] = 1;
        p.m_[e] = F(1);
        return p;
    }
    static Poly3 u() { return var(0); }
    static Poly3 v() { return var(1); }
    static Poly3 t() { return var(2); }
    static Poly3 mono(const Mono3& e, const F& c = F(1)) {
        Poly3 p;
        if (!packsdp::is_zero(c)) p.m_[e] = c;
        return p;
    }

    const Map& terms() const { return m_; }
    bool is_zero() const { return m_.empty(); }
    std::size_t size() const { return m_.size(); }
    int degree() const {
        int d = -1;
        for (auto& [e, c] : m_) d = std::max(d, e[0] + e[1] + e[2]);
        return d;
    }
    F coeff(const Mono3& e) const {
        auto it = m_.find(e);
        return it == m_.end() ? F(0) : it->second;
    }

    void add_term(const Mono3& e, const F& c) {
        if (packsdp::is_zero(c)) return;
        auto it = m_.find(e);
        if (it == m_.end()) {
            m_.emplace(e, c);
        } else {
            it->second += c;
            if (packsdp::is_zero(it->second)) m_.erase(it);
        }
    }

    Poly3& operator+=(const Poly3& o) {
        for (auto& [e, c] : o.m_) add_term(e, c);
        return *this;
    }
    Poly3& operator-=(const Poly3& o) {
        for (auto& [e, c] : o.m_) add_term(e, -c);
        return *this;
    }
    friend Poly3 operator+(Poly3 a, const Poly3& b) { a += b; return a; }
    friend Poly3 operator-(Poly3 a, const Poly3& b) { a -= b; return a; }
    Poly3 operator-() const {
        Poly3 r;
        for (auto& [e, c] : m_) r.m_.emplace(e, -c);
        return r;
    }
    friend Poly3 operator*(const Poly3& a, const Poly3& b) {
        Poly3 r;
        for (auto& [ea, ca] : a.m_)
            for (auto& [eb, cb] : b.m_) r.add_term({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
        return r;
    }
    Poly3& operator*=(const Poly3& o) {
        *this = *this * o;
        return *this;
    }
    friend Poly3 operator*(Poly3 a, const F& s) {
        if (packsdp::is_zero(s)) return Poly3();
        for (auto& [e, c] : a.m_) c *= s;
        return a;
    }
    friend Poly3 operator*(const F& s, Poly3 a) { return std::move(a) * s; }
    friend bool operator==(const Poly3& a, const Poly3& b) { return a.m_ == b.m_; }
    friend bool operator!=(const Poly3& a, const Poly3& b) { return !(a == b); }

    // variables permuted: result(x0,x1,x2) = this(x_{perm[0]}, x_{perm[1]}, x_{perm[2]})
    Poly3 permuted(const std::array<int, 3>& perm) const {
        Poly3 r;
        for (auto& [e, c] : m_) {
            Mono3 ne{0, 0, 0};
            for (int i = 0; i < 3; ++i) ne[perm[i]] += e[i];
            r.add_term(ne, c);
        }
        return r;
    }
    Poly3 swap_uv() const { return permuted({1, 0, 2}); }

    F operator()(const F& x, const F& y, const F& z) const {
        F r(0);
        for (auto& [e, c] : m_) {
            F term = c;
            for (int i = 0; i < e[0]; ++i) term *= x;
            for (int i = 0; i < e[1]; ++i) term *= y;
            for (int i = 0; i < e[2]; ++i) term *= z;
            r += term;
        }
        return r;
    }

    // substitute each variable by a univariate polynomial in s
    UPoly<F> restrict(const UPoly<F>& pu, const UPoly<F>& pv, const UPoly<F>& pt) const {
        UPoly<F> r;
        for (auto& [e, c] : m_) r += pow(pu, e[0]) * pow(pv, e[1]) * pow(pt, e[2]) * c;
        return r;
    }

    std::string str() const {
        if (m_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        const char* names[3] = {"u", "v", "t"};
        for (auto& [e, c] : m_) {
            if (!first) os << " + ";
            first = false;
            os << "(" << exact_str(c) << ")";
            for (int i = 0; i < 3; ++i)
                if (e[i] == 1) os << "*" << names[i];
                else if (e[i] > 1) os << "*" << names[i] << "^" << e[i];
        }
        return os.str();
    }

private:
    Map m_;
};

template <class F>
Poly3<F> pow(const Poly3<F>& p, int e) {
    Poly3<F> r(F(1));
    for (int i = 0; i < e; ++i) r = r * p;
    return r;
}

inline std::string mono_str(const Mono3& e) {
    return "u^" + std::to_string(e[0]) + "*v^" + std::to_string(e[1]) + "*t^" + std::to_string(e[2]);
}

} // namespace packsdp
