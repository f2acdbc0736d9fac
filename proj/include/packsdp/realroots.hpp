#pragma once

#include "fields.hpp"
#include "polynomial.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace packsdp {

template <class F>
struct SturmChain {
    std::vector<UPoly<F>> polys;
};

template <class F>
SturmChain<F> sturm_chain(const UPoly<F>& p) {
    if (p.is_zero()) throw ZeroPolynomial("sturm_chain of the zero polynomial");
    SturmChain<F> ch;
    ch.polys.push_back(p);
    UPoly<F> d = p.derivative();
    if (d.is_zero()) return ch;
    ch.polys.push_back(d);
    while (true) {
        const auto& a = ch.polys[ch.polys.size() - 2];
        const auto& b = ch.polys.back();
        UPoly<F> r = -(a % b);
        if (r.is_zero()) break;
        ch.polys.push_back(std::move(r));
    }
    return ch;
}

template <class F>
UPoly<F> squarefree_part(const UPoly<F>& p) {
    if (p.degree() <= 0) return p;
    UPoly<F> g = gcd(p, p.derivative());
    return g.degree() <= 0 ? p : p / g;
}

namespace detail {
template <class F>
int sign_variations(const std::vector<UPoly<F>>& polys, const F& x) {
    int prev = 0, var = 0;
    for (auto& q : polys) {
        int s = exact_sign(q(x));
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++var;
        prev = s;
    }
    return var;
}

// chain divided by its last element, a Sturm chain of the square-free part
template <class F>
std::vector<UPoly<F>> reduced_chain(const SturmChain<F>& ch) {
    const auto& g = ch.polys.back();
    if (g.degree() <= 0) return ch.polys;
    std::vector<UPoly<F>> out;
    for (auto& q : ch.polys) out.push_back(q / g);
    return out;
}

inline Rational rational_upper_bound(const Rational& x) { return abs(x); }
inline Rational rational_upper_bound(const QuadraticNumber& x) {
    double d = std::fabs(x.approx(64).to_double());
    Rational r(d * 1.001 + 1e-300);
    return r + Rational(1, 1 << 20);
}
} // namespace detail

// Cauchy-type gap: every root of p other than c lies farther than the returned value from c.
template <class F>
Rational root_gap_at(const UPoly<F>& p, const F& c) {
    UPoly<F> sf = squarefree_part(p);
    // shifted polynomial q(s) = sf(c + s), strip factor s
    UPoly<F> shift(std::vector<F>{c, F(1)});
    UPoly<F> q;
    for (int i = sf.degree(); i >= 0; --i) q = q * shift + UPoly<F>(sf.coeff(i));
    int m = 0;
    while (m <= q.degree() && is_zero(q.coeff(m))) ++m;
    Rational low = abs(approx_value(q.coeff(m), 128).to_rational()) * Rational(999, 1000);
    Rational mx = 0;
    for (int i = m + 1; i <= q.degree(); ++i) {
        Rational b = detail::rational_upper_bound(q.coeff(i));
        if (b > mx) mx = b;
    }
    // nonzero roots of q satisfy |s| > |q_m| / (|q_m| + max|q_i|)
    return low / (low + mx);
}

// Number of distinct real roots of chain.polys[0] in (lo, hi]. With perturb, lo is
// moved left by a gap smaller than the distance to any other root, so a root at lo counts.
template <class F>
int count_roots(const SturmChain<F>& ch, const F& lo, const F& hi, bool perturb = false) {
    if (!(lo < hi)) throw std::invalid_argument("count_roots: need lo < hi");
    F a = lo;
    if (is_zero(ch.polys[0](lo))) {
        if (!perturb) throw EndpointIsRoot("lower endpoint " + exact_str(lo) + " is a root");
        a = lo - F(root_gap_at(ch.polys[0], lo) / 2);
    }
    auto polys = detail::reduced_chain(ch);
    return detail::sign_variations(polys, a) - detail::sign_variations(polys, hi);
}

template <class F>
bool confirm_root_set(const UPoly<F>& p, const F& lo, const F& hi, const std::vector<F>& candidates,
                      bool perturb = false) {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const F& c = candidates[i];
        bool inside = perturb ? (lo <= c && c <= hi) : (lo < c && c <= hi);
        if (!inside) return false;
        if (!is_zero(p(c))) return false;
        for (std::size_t j = 0; j < i; ++j)
            if (candidates[j] == c) return false;
    }
    return count_roots(sturm_chain(p), lo, hi, perturb) == static_cast<int>(candidates.size());
}

// Rational intervals (a, b] each containing exactly one root of p in (lo, hi].
template <class F>
std::vector<std::pair<F, F>> isolate_roots(const UPoly<F>& p, const F& lo, const F& hi, const Rational& width) {
    auto ch = sturm_chain(p);
    auto polys = detail::reduced_chain(ch);
    std::vector<std::pair<F, F>> out;
    std::vector<std::pair<F, F>> stack{{lo, hi}};
    while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        int n = detail::sign_variations(polys, a) - detail::sign_variations(polys, b);
        if (n == 0) continue;
        if (n == 1 && (b - a) <= F(width)) {
            out.emplace_back(a, b);
            continue;
        }
        F mid = (a + b) / F(2);
        // rational midpoint keeps evaluations cheap
        if constexpr (std::is_same_v<F, QuadraticNumber>) mid = F(best_rational_approx(mid.approx(128), Integer(1) << 40));
        if (!(a < mid && mid < b)) mid = (a + b) / F(2);
        stack.emplace_back(mid, b);
        stack.emplace_back(a, mid);
    }
    std::sort(out.begin(), out.end(), [](auto& x, auto& y) { return x.first < y.first; });
    return out;
}

// Root in (a, b] refined to prec bits by bisection.
template <class F>
HpFloat refine_root(const UPoly<F>& p, const F& a, const F& b, long prec) {
    UPoly<F> sf = squarefree_part(p);
    std::vector<HpFloat> c;
    for (auto& x : sf.coeffs()) c.push_back(approx_value(x, prec + 64));
    auto eval = [&](const HpFloat& x) {
        HpFloat r(prec + 64);
        for (std::size_t i = c.size(); i-- > 0;) {
            r *= x;
            r += c[i];
        }
        return r;
    };
    if (is_zero(sf(b))) return approx_value(b, prec);
    HpFloat lo = approx_value(a, prec + 64), hi = approx_value(b, prec + 64);
    int slo = exact_sign(sf(a));
    if (slo == 0) slo = -exact_sign(sf(b));
    for (long it = 0; it < prec + 80; ++it) {
        HpFloat mid = (lo + hi) / 2L;
        int s = eval(mid).sign();
        if (s == 0) return mid.with_precision(prec);
        if (s == slo) lo = mid;
        else hi = mid;
    }
    return ((lo + hi) / 2L).with_precision(prec);
}

} // namespace packsdp
