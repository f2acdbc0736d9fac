#pragma once

#include "packing.hpp"
#include "realroots.hpp"
#include "relations.hpp"

#include <map>
#include <string>
#include <vector>

namespace packsdp {

struct TripleCount {
    Scalar u, v, t;
    Scalar alpha;
};

struct SlacknessReport {
    std::vector<Scalar> diagonal_roots;
    std::vector<std::pair<std::pair<Scalar, Scalar>, std::vector<Scalar>>> pair_roots;
    std::vector<Scalar> inner_products;
    std::vector<TripleCount> triple_distribution;
};

namespace detail {

inline bool scalar_less(const Scalar& a, const Scalar& b) { return a < b; }

inline std::optional<Scalar> exact_guess(const UPoly<Scalar>& p, const HpFloat& x, const Scalar& a, const Scalar& b,
                                         long ell) {
    auto accept = [&](const Scalar& c) { return a <= c && c <= b && is_zero(p(c)); };
    for (long bits : {20L, 40L, 64L}) {
        Scalar q(best_rational_approx(x, Integer(1) << bits));
        if (accept(q)) return q;
    }
    if (ell > 1) {
        long prec = x.precision();
        std::vector<HpFloat> v{HpFloat(1L, prec), sqrt(HpFloat(ell, prec)), x};
        try {
            auto rel = lindep(v, Integer(1) << 40);
            if (rel.coefficients[2] != 0) {
                Scalar c = -(QuadraticNumber(Rational(rel.coefficients[0]), Rational(rel.coefficients[1]), ell)) /
                           Scalar(Rational(rel.coefficients[2]));
                if (accept(c)) return c;
            }
        } catch (const NotFound&) {
        }
    }
    return std::nullopt;
}

} // namespace detail

// Complete set of roots of p in [lo, hi] as exact field elements, certified by a Sturm count.
inline std::vector<Scalar> exact_roots(const UPoly<Scalar>& p, const Scalar& lo, const Scalar& hi, long ell,
                                       long prec = 256) {
    if (p.is_zero()) throw RootIsolationFailed("polynomial vanishes identically");
    if (!(lo <= hi)) throw std::invalid_argument("exact_roots: need lo <= hi");
    std::vector<Scalar> roots;
    if (p.degree() == 0) return roots;
    if (is_zero(p(lo))) roots.push_back(lo);
    if (lo == hi) return roots;
    for (auto& [a, b] : isolate_roots(p, lo, hi, Rational(1, 1 << 20))) {
        if (is_zero(p(b))) {
            roots.push_back(b);
            continue;
        }
        HpFloat x = refine_root(p, a, b, prec);
        auto c = detail::exact_guess(p, x, a, b, ell);
        if (!c) throw RootIsolationFailed("root near " + x.to_string(20) + " is not an element of the field");
        roots.push_back(*c);
    }
    std::sort(roots.begin(), roots.end(), detail::scalar_less);
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    if (!confirm_root_set(p, lo, hi, roots, true)) throw RootIsolationFailed("Sturm count disagrees with the root list");
    return roots;
}

// Roots of F(u,u,1) - (M-1) on [cos_phi, 1].
inline std::vector<Scalar> cap_diagonal_roots(const std::vector<ExactMatrix<Scalar>>& F, int n, const Scalar& M,
                                              const Scalar& cos_phi, long ell = 1) {
    SPoly f = kernel_polynomial('Y', n, F);
    UPoly<Scalar> g = diagonal_cap(f) - UPoly<Scalar>(M - Scalar(1));
    return exact_roots(g, cos_phi, Scalar(1), ell);
}

// Roots of F(u,u,u^2) - (M-1) on [0, rho] for the ball program.
inline std::vector<Scalar> ball_diagonal_roots(const std::vector<ExactMatrix<Scalar>>& F, int n, const Scalar& M,
                                               const Scalar& rho, long ell = 1) {
    SPoly f = kernel_polynomial('Z', n, F);
    UPoly<Scalar> g = diagonal_ball(f) - UPoly<Scalar>(M - Scalar(1));
    return exact_roots(g, Scalar(0), rho, ell);
}

// Roots t of F(u0,v0,t) + 1 in [lo, hi] that pass the region filter.
inline std::vector<Scalar> pair_roots(const SPoly& f, const Scalar& u0, const Scalar& v0, const Scalar& lo,
                                      const Scalar& hi, const std::function<bool(const Scalar&)>& keep, long ell) {
    UPoly<Scalar> g = f.restrict(UPoly<Scalar>(u0), UPoly<Scalar>(v0), UPoly<Scalar>::x()) + UPoly<Scalar>(Scalar(1));
    std::vector<Scalar> out;
    for (auto& t : exact_roots(g, lo, hi, ell))
        if (keep(t)) out.push_back(t);
    return out;
}

inline Scalar gram_det(const Scalar& u, const Scalar& v, const Scalar& t) {
    return Scalar(1) + Scalar(2) * u * v * t - u * u - v * v - t * t;
}

// For every (u0, v0) in R^2: roots of F(u0,v0,t) + 1 with -1 <= t <= cos_theta and a PSD Gram matrix.
inline std::vector<std::pair<std::pair<Scalar, Scalar>, std::vector<Scalar>>> cap_pair_roots(
    const std::vector<ExactMatrix<Scalar>>& F, int n, const std::vector<Scalar>& R, const Scalar& cos_theta,
    long ell = 1) {
    SPoly f = kernel_polynomial('Y', n, F);
    std::vector<std::pair<std::pair<Scalar, Scalar>, std::vector<Scalar>>> out;
    for (std::size_t i = 0; i < R.size(); ++i)
        for (std::size_t j = i; j < R.size(); ++j) {
            const Scalar &u0 = R[i], &v0 = R[j];
            Scalar w = (Scalar(1) - u0 * u0) * (Scalar(1) - v0 * v0);
            std::vector<Scalar> ts;
            if (exact_sign(w) < 0) {
            } else if (is_zero(w)) {
                // the slice degenerates to t = u0 v0
                Scalar t = u0 * v0;
                if (t >= Scalar(-1) && t <= cos_theta && is_zero(f(u0, v0, t) + Scalar(1))) ts.push_back(t);
            } else {
                ts = pair_roots(f, u0, v0, Scalar(-1), cos_theta,
                                [&](const Scalar& t) { return exact_sign(gram_det(u0, v0, t)) >= 0; }, ell);
            }
            out.push_back({{u0, v0}, ts});
        }
    return out;
}

// Ball analog: t ranges over the packing region |t| <= uv and u^2 + v^2 - 2t >= 4 r^2.
inline std::vector<std::pair<std::pair<Scalar, Scalar>, std::vector<Scalar>>> ball_pair_roots(
    const std::vector<ExactMatrix<Scalar>>& F, int n, const std::vector<Scalar>& R, const Scalar& r_squared,
    long ell = 1) {
    SPoly f = kernel_polynomial('Z', n, F);
    std::vector<std::pair<std::pair<Scalar, Scalar>, std::vector<Scalar>>> out;
    for (std::size_t i = 0; i < R.size(); ++i)
        for (std::size_t j = i; j < R.size(); ++j) {
            const Scalar &u0 = R[i], &v0 = R[j];
            Scalar uv = u0 * v0;
            Scalar hi = (u0 * u0 + v0 * v0) / Scalar(2) - Scalar(2) * r_squared;
            if (uv < hi) hi = uv;
            std::vector<Scalar> ts;
            if (-uv == hi) {
                if (is_zero(f(u0, v0, hi) + Scalar(1))) ts.push_back(hi);
            } else if (-uv < hi) {
                ts = pair_roots(f, u0, v0, -uv, hi, [](const Scalar&) { return true; }, ell);
            }
            out.push_back({{u0, v0}, ts});
        }
    return out;
}

// Roots of sum_k a_k P_k^n(u) + 3 F(u,u,1) + 1 on [-1, cos_theta].
inline std::vector<Scalar> threept_inner_products(const std::vector<Scalar>& a, const std::vector<ExactMatrix<Scalar>>& F,
                                                  int n, const Scalar& cos_theta, long ell = 1) {
    UPoly<Scalar> g(Scalar(1));
    for (std::size_t k = 0; k < a.size(); ++k)
        if (!is_zero(a[k])) g += to_scalar(gegenbauer(n, static_cast<int>(k))) * a[k];
    if (!F.empty()) g += diagonal_cap(kernel_polynomial('S', n, F)) * Scalar(3);
    return exact_roots(g, Scalar(-1), cos_theta, ell);
}

// Three-point distance distribution from the slackness identities.
inline std::vector<TripleCount> triple_distribution(const std::vector<Scalar>& a, const std::vector<ExactMatrix<Scalar>>& F,
                                                    int n, const std::vector<Scalar>& inner_products, long code_size) {
    std::vector<Scalar> V = inner_products;
    V.push_back(Scalar(1));
    std::sort(V.begin(), V.end(), detail::scalar_less);
    V.erase(std::unique(V.begin(), V.end()), V.end());
    SPoly f;
    if (!F.empty()) f = kernel_polynomial('S', n, F);
    int d = static_cast<int>(F.size()) - 1;
    std::vector<std::array<Scalar, 3>> orbits;
    std::vector<int> mult;
    for (std::size_t i = 0; i < V.size(); ++i)
        for (std::size_t j = i; j < V.size(); ++j)
            for (std::size_t k = j; k < V.size(); ++k) {
                const Scalar &x = V[i], &y = V[j], &z = V[k];
                if (exact_sign(gram_det(x, y, z)) < 0) continue;
                bool has_one = z == Scalar(1);
                // three distinct points need F = 0 on the triple
                if (!has_one && !F.empty() && !is_zero(f(x, y, z))) continue;
                orbits.push_back({x, y, z});
                int m = (i == j && j == k) ? 1 : (i == j || j == k) ? 3 : 6;
                mult.push_back(m);
            }
    const int K = static_cast<int>(orbits.size());
    SparseEchelon<Scalar> ech(K);
    auto add = [&](SparseRow<Scalar> row, const Scalar& rhs) {
        try {
            ech.add_row(std::move(row), rhs);
        } catch (const Inconsistent& e) {
            throw NoNonnegativeSolution(std::string("distribution system inconsistent: ") + e.what());
        }
    };
    auto diag_index = [&](const Scalar& u) -> int {
        for (int o = 0; o < K; ++o)
            if (orbits[o][0] == u && orbits[o][1] == u && orbits[o][2] == Scalar(1)) return o;
        if (u == Scalar(1))
            for (int o = 0; o < K; ++o)
                if (orbits[o][0] == Scalar(1)) return o;
        return -1;
    };
    int one = diag_index(Scalar(1));
    if (one >= 0) add({{one, Scalar(1)}}, Scalar(1));
    SparseRow<Scalar> pairs;
    for (auto& u : V) {
        int o = diag_index(u);
        if (o >= 0) pairs.emplace_back(o, Scalar(1));
    }
    add(pairs, Scalar(code_size));
    SparseRow<Scalar> all;
    for (int o = 0; o < K; ++o) all.emplace_back(o, Scalar(mult[o]));
    add(all, Scalar(code_size * code_size));
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (is_zero(a[k])) continue;
        auto P = to_scalar(gegenbauer(n, static_cast<int>(k)));
        SparseRow<Scalar> row;
        for (auto& u : V) {
            int o = diag_index(u);
            if (o >= 0) row.emplace_back(o, P(u));
        }
        add(row, Scalar(0));
    }
    for (int k = 0; k <= d; ++k) {
        if (!F.empty() && F[k].rows() == 0) continue;
        auto Z = zonal_matrix('S', n, k, d);
        SparseRow<Scalar> row;
        for (int o = 0; o < K; ++o) {
            Scalar s(0);
            for (int i = 0; i < Z.size(); ++i)
                for (int j = 0; j < Z.size(); ++j)
                    if (!is_zero(F[k](i, j))) s += F[k](i, j) * Z.entries[i][j](orbits[o][0], orbits[o][1], orbits[o][2]);
            if (!is_zero(s)) row.emplace_back(o, s * Scalar(mult[o]));
        }
        add(row, Scalar(0));
    }
    if (ech.rank() < K)
        throw Underdetermined("solution space of dimension " + std::to_string(K - ech.rank()) + " over " +
                              std::to_string(K) + " triple classes");
    auto alpha = ech.solve([](int) { return Scalar(0); });
    std::vector<TripleCount> out;
    for (int o = 0; o < K; ++o) {
        if (exact_sign(alpha[o]) < 0)
            throw NoNonnegativeSolution("negative count " + exact_str(alpha[o]) + " for (" + exact_str(orbits[o][0]) + ", " +
                                        exact_str(orbits[o][1]) + ", " + exact_str(orbits[o][2]) + ")");
        if (is_zero(alpha[o])) continue;
        out.push_back({orbits[o][0], orbits[o][1], orbits[o][2], alpha[o]});
    }
    return out;
}

inline json slackness_report_to_json(const SlacknessReport& r) {
    json j;
    auto arr = [](const std::vector<Scalar>& v) {
        json a = json::array();
        for (auto& x : v) a.push_back(exact_str(x));
        return a;
    };
    if (!r.diagonal_roots.empty()) j["diagonal_roots"] = arr(r.diagonal_roots);
    if (!r.pair_roots.empty()) {
        json pr = json::array();
        for (auto& [uv, ts] : r.pair_roots)
            pr.push_back({{"u", exact_str(uv.first)}, {"v", exact_str(uv.second)}, {"roots", arr(ts)}});
        j["pair_roots"] = pr;
    }
    if (!r.inner_products.empty()) j["inner_products"] = arr(r.inner_products);
    if (!r.triple_distribution.empty()) {
        json td = json::array();
        for (auto& c : r.triple_distribution)
            td.push_back({{"u", exact_str(c.u)}, {"v", exact_str(c.v)}, {"t", exact_str(c.t)}, {"alpha", exact_str(c.alpha)}});
        j["triple_distribution"] = td;
    }
    return j;
}

// Full analysis of an exact sharp solution of a generated program with objective value M.
inline SlacknessReport analyze_solution(const SdpProblem& p, const ExactSolution& X, const Scalar& M) {
    SlacknessReport r;
    std::string kind = p.metadata.at("kind").get<std::string>();
    int n = p.metadata.at("n").get<int>();
    long ell = X.ell;
    auto F = f_blocks(p, X);
    if (kind == "cap") {
        Scalar cphi = parse_quadratic(p.metadata.at("cos_phi").get<std::string>());
        Scalar cth = parse_quadratic(p.metadata.at("cos_theta").get<std::string>());
        r.diagonal_roots = cap_diagonal_roots(F, n, M, cphi, ell);
        r.pair_roots = cap_pair_roots(F, n, r.diagonal_roots, cth, ell);
    } else if (kind == "ball") {
        Scalar rho = parse_quadratic(p.metadata.at("rho").get<std::string>());
        Scalar r2 = parse_quadratic(p.metadata.at("r_squared").get<std::string>());
        r.diagonal_roots = ball_diagonal_roots(F, n, M, rho, ell);
        r.pair_roots = ball_pair_roots(F, n, r.diagonal_roots, r2, ell);
    } else if (kind == "threept") {
        Scalar cth = parse_quadratic(p.metadata.at("cos_theta").get<std::string>());
        auto a = a_coefficients(p, X);
        r.inner_products = threept_inner_products(a, F, n, cth, ell);
        if (!M.is_rational() || M.a().get_den() != 1) throw std::invalid_argument("analyze: code size must be an integer");
        r.triple_distribution = triple_distribution(a, F, n, r.inner_products, M.a().get_num().get_si());
    } else {
        throw std::invalid_argument("analyze: unknown program kind " + kind);
    }
    return r;
}

} // namespace packsdp
