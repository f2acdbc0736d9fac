#pragma once

#include "exact_linalg.hpp"
#include "fields.hpp"
#include "hp_numeric.hpp"

#include <optional>
#include <vector>

namespace packsdp {

using IntMatrix = std::vector<std::vector<Integer>>;

struct IntegerRelation {
    std::vector<Integer> coefficients;
    HpFloat residual;
};

template <class F>
struct ExactKernelBasis {
    std::vector<std::vector<F>> vectors;
    int block_index = -1;
};

namespace detail {
inline long max_bits(const IntMatrix& B) {
    long b = 1;
    for (auto& row : B)
        for (auto& x : row) b = std::max<long>(b, static_cast<long>(mpz_sizeinbase(x.get_mpz_t(), 2)));
    return b;
}
} // namespace detail

// LLL reduction of the rows of B with floating Gram-Schmidt at adaptive precision.
inline IntMatrix lll_reduce(IntMatrix B, const Rational& delta = Rational(99, 100)) {
    int n = static_cast<int>(B.size());
    if (n == 0) return B;
    int m = static_cast<int>(B[0].size());
    if (!(delta > Rational(1, 4) && delta < 1)) throw std::invalid_argument("lll_reduce: delta outside (1/4, 1)");
    long prec = 2 * detail::max_bits(B) + 4 * n + 128;
    HpFloat hdelta(delta, prec);
    std::vector<std::vector<HpFloat>> bstar(n, std::vector<HpFloat>(m, HpFloat(prec)));
    std::vector<std::vector<HpFloat>> mu(n, std::vector<HpFloat>(n, HpFloat(prec)));
    std::vector<HpFloat> Bn(n, HpFloat(prec));

    auto compute_row = [&](int k) {
        std::vector<HpFloat> bk(m, HpFloat(prec));
        for (int c = 0; c < m; ++c) bk[c] = HpFloat(B[k][c], prec);
        bstar[k] = bk;
        for (int j = 0; j < k; ++j) {
            HpFloat dot(prec);
            for (int c = 0; c < m; ++c) dot.add_mul(bk[c], bstar[j][c]);
            mu[k][j] = dot / Bn[j];
            for (int c = 0; c < m; ++c) bstar[k][c].sub_mul(mu[k][j], bstar[j][c]);
        }
        HpFloat s(prec);
        for (int c = 0; c < m; ++c) s.add_mul(bstar[k][c], bstar[k][c]);
        Bn[k] = s;
        // the Gram determinant of integer rows is an integer, so it is >= 1 unless the rows are dependent
        HpFloat gram = s;
        for (int j = 0; j < k; ++j) gram *= Bn[j];
        if (gram < HpFloat(0.5, prec)) throw DependentRows("lll_reduce: rows are linearly dependent");
    };

    compute_row(0);
    int k = 1;
    long guard = 0;
    while (k < n) {
        if (++guard > 10000000) throw PrecisionExhausted("lll_reduce did not terminate");
        compute_row(k);
        bool changed = false;
        for (int j = k - 1; j >= 0; --j) {
            Integer q = mu[k][j].round_to_integer();
            if (q == 0) continue;
            changed = true;
            for (int c = 0; c < m; ++c) B[k][c] -= q * B[j][c];
            HpFloat qf(q, prec);
            for (int l = 0; l < j; ++l) mu[k][l].sub_mul(qf, mu[j][l]);
            mu[k][j] -= qf;
        }
        if (changed) compute_row(k);
        HpFloat lhs = Bn[k];
        HpFloat rhs = (hdelta - mu[k][k - 1] * mu[k][k - 1]) * Bn[k - 1];
        if (lhs < rhs) {
            std::swap(B[k], B[k - 1]);
            if (k == 1) compute_row(0);
            k = std::max(k - 1, 1);
        } else {
            ++k;
        }
    }
    return B;
}

namespace detail {
// rows [e_j | round(2^s * V_j)] for the rows V_j of V
inline IntMatrix relation_lattice(const std::vector<std::vector<HpFloat>>& V, long s) {
    int n = static_cast<int>(V.size());
    int k = n ? static_cast<int>(V[0].size()) : 0;
    IntMatrix L(n, std::vector<Integer>(n + k, 0));
    for (int j = 0; j < n; ++j) {
        L[j][j] = 1;
        for (int c = 0; c < k; ++c) {
            HpFloat x = V[j][c];
            long p = std::max<long>(x.precision(), s + 64);
            x.set_precision(p);
            x *= pow2(s, p);
            L[j][n + c] = x.round_to_integer();
        }
    }
    return L;
}

inline HpFloat combination_norm(const std::vector<Integer>& c, const std::vector<std::vector<HpFloat>>& V, long prec) {
    int k = V.empty() ? 0 : static_cast<int>(V[0].size());
    HpFloat worst(prec);
    for (int col = 0; col < k; ++col) {
        HpFloat s(prec);
        for (std::size_t j = 0; j < c.size(); ++j)
            if (c[j] != 0) s.add_mul(HpFloat(c[j], prec), V[j][col]);
        HpFloat a = abs(s);
        if (a > worst) worst = a;
    }
    return worst;
}
} // namespace detail

// Integer relation c with |sum c_j v_j| small, via LLL on [I | round(2^s v)].
inline IntegerRelation lindep(const std::vector<HpFloat>& v, const Integer& coefficient_bound, long scale_bits = 0) {
    if (v.empty()) throw std::invalid_argument("lindep: empty vector");
    long prec = v[0].precision();
    for (auto& x : v) prec = std::min(prec, x.precision());
    HpFloat nrm(prec);
    for (auto& x : v) nrm = max(nrm, abs(x));
    if (nrm.is_zero()) throw std::invalid_argument("lindep: zero vector");
    long s = scale_bits > 0 ? scale_bits : prec / 2;
    s -= nrm.exponent();
    std::vector<std::vector<HpFloat>> V;
    for (auto& x : v) V.push_back({x});
    auto red = lll_reduce(detail::relation_lattice(V, s));
    HpFloat bound = nrm * pow2(-(scale_bits > 0 ? scale_bits / 2 : prec / 4), prec);
    int n = static_cast<int>(v.size());
    std::optional<IntegerRelation> best;
    for (auto& row : red) {
        std::vector<Integer> c(row.begin(), row.begin() + n);
        bool nonzero = false, small = true;
        for (auto& x : c) {
            if (x != 0) nonzero = true;
            if (abs(x) > coefficient_bound) small = false;
        }
        if (!nonzero || !small) continue;
        HpFloat res = detail::combination_norm(c, V, prec);
        if (res <= bound) {
            // canonical sign: first nonzero coefficient positive
            for (auto& x : c)
                if (x != 0) {
                    if (x < 0)
                        for (auto& y : c) y = -y;
                    break;
                }
            return {c, res};
        }
        if (!best || res < best->residual) best = IntegerRelation{c, res};
    }
    throw NotFound("no integer relation within bound (best residual " +
                   (best ? best->residual.to_string(6) : std::string("n/a")) + ")");
}

// Integer relations among the rows of N: expected_count independent c with c^T N ~ 0.
// Accepted short vectors of each LLL round are kept, their pivot rows removed, and the
// search repeated on the surviving rows.
inline IntMatrix kernel_relations(const HpMatrix& N, int expected_count, const Integer& coefficient_bound,
                                  long scale_bits = 0) {
    int n = N.rows();
    int k = N.cols();
    IntMatrix out;
    if (expected_count <= 0) return out;
    long prec = N.precision();
    long s = scale_bits > 0 ? scale_bits : prec / 2;
    SparseEchelon<Rational> ech(n);
    std::vector<int> alive(n);
    std::iota(alive.begin(), alive.end(), 0);
    HpFloat tol = pow2(-s / 2, prec);
    while (static_cast<int>(out.size()) < expected_count) {
        if (alive.empty()) break;
        std::vector<std::vector<HpFloat>> V;
        for (int r : alive) {
            std::vector<HpFloat> row;
            for (int c = 0; c < k; ++c) row.push_back(N(r, c));
            V.push_back(std::move(row));
        }
        IntMatrix red;
        if (k == 0) {
            for (std::size_t i = 0; i < alive.size(); ++i) {
                std::vector<Integer> e(alive.size(), 0);
                e[i] = 1;
                red.push_back(e);
            }
        } else {
            red = lll_reduce(detail::relation_lattice(V, s));
        }
        std::vector<int> removed;
        int before = static_cast<int>(out.size());
        for (auto& row : red) {
            if (static_cast<int>(out.size()) >= expected_count) break;
            std::vector<Integer> c(row.begin(), row.begin() + alive.size());
            bool nonzero = false, small = true;
            Integer height = 0;
            for (auto& x : c) {
                if (x != 0) nonzero = true;
                if (abs(x) > coefficient_bound) small = false;
                height = std::max(height, Integer(abs(x)));
            }
            if (!nonzero || !small) continue;
            if (k > 0 && detail::combination_norm(c, V, prec) > tol * HpFloat(height, prec)) continue;
            SparseRow<Rational> sr;
            std::vector<Integer> full(n, 0);
            for (std::size_t i = 0; i < alive.size(); ++i)
                if (c[i] != 0) {
                    sr.emplace_back(alive[i], Rational(c[i]));
                    full[alive[i]] = c[i];
                }
            int r0 = ech.rank();
            ech.add_row(sr, Rational(0));
            if (ech.rank() > r0) {
                out.push_back(full);
                removed.push_back(ech.pivots().back());
            }
        }
        if (static_cast<int>(out.size()) == before) break;
        std::vector<int> next;
        for (int r : alive)
            if (std::find(removed.begin(), removed.end(), r) == removed.end()) next.push_back(r);
        alive = std::move(next);
    }
    if (static_cast<int>(out.size()) < expected_count)
        throw InsufficientRelations("found " + std::to_string(out.size()) + " of " + std::to_string(expected_count) +
                                    " kernel relations");
    return out;
}

inline ExactMatrix<Rational> to_rational_matrix(const IntMatrix& M, int cols) {
    ExactMatrix<Rational> A(static_cast<int>(M.size()), cols);
    for (std::size_t i = 0; i < M.size(); ++i)
        for (int j = 0; j < cols; ++j) A(static_cast<int>(i), j) = Rational(M[i][j]);
    return A;
}

// Exact rational kernel basis from a numerical near-kernel N (columns).
inline ExactKernelBasis<Rational> rational_kernel_basis(const HpMatrix& N, const Integer& coefficient_bound,
                                                        long scale_bits = 0) {
    int n = N.rows();
    auto rel = kernel_relations(N, n - N.cols(), coefficient_bound, scale_bits);
    ExactKernelBasis<Rational> kb;
    kb.vectors = nullspace(to_rational_matrix(rel, n));
    return kb;
}

// Kernel basis over Q[sqrt(ell)] from relations of the stacked matrix [N; sqrt(ell) N].
// expected_count is the number of relations over the field (rows of N minus kernel dimension).
inline ExactKernelBasis<QuadraticNumber> quad_kernel_relations(const HpMatrix& N, long ell, int expected_count,
                                                               const Integer& coefficient_bound, long scale_bits = 0) {
    int n = N.rows(), k = N.cols();
    ExactKernelBasis<QuadraticNumber> kb;
    if (ell == 1) {
        auto rel = kernel_relations(N, expected_count, coefficient_bound, scale_bits);
        for (auto& v : nullspace(to_rational_matrix(rel, n))) {
            std::vector<QuadraticNumber> q(v.begin(), v.end());
            kb.vectors.push_back(std::move(q));
        }
        return kb;
    }
    long prec = N.precision();
    HpFloat r = sqrt(HpFloat(ell, prec));
    HpMatrix S(2 * n, k, prec);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < k; ++c) {
            S(i, c) = N(i, c);
            S(n + i, c) = N(i, c) * r;
        }
    auto rel = kernel_relations(S, 2 * expected_count, coefficient_bound, scale_bits);
    // H rows (lambda, ell*mu) and (mu, lambda)
    ExactMatrix<Rational> H(static_cast<int>(2 * rel.size()), 2 * n);
    for (std::size_t i = 0; i < rel.size(); ++i)
        for (int j = 0; j < n; ++j) {
            const Integer& lam = rel[i][j];
            const Integer& mu = rel[i][n + j];
            H(static_cast<int>(2 * i), j) = Rational(lam);
            H(static_cast<int>(2 * i), n + j) = Rational(mu * ell);
            H(static_cast<int>(2 * i + 1), j) = Rational(mu);
            H(static_cast<int>(2 * i + 1), n + j) = Rational(lam);
        }
    auto ns = nullspace(H);
    // reduce the rational nullspace to a basis over the field
    SparseEchelon<QuadraticNumber> ech(n);
    for (auto& w : ns) {
        std::vector<QuadraticNumber> q(n);
        SparseRow<QuadraticNumber> row;
        for (int j = 0; j < n; ++j) {
            q[j] = QuadraticNumber(w[j], w[n + j], ell);
            if (!q[j].is_zero()) row.emplace_back(j, q[j]);
        }
        if (row.empty()) continue;
        int r0 = ech.rank();
        ech.add_row(row, QuadraticNumber(0));
        if (ech.rank() > r0) kb.vectors.push_back(std::move(q));
    }
    return kb;
}

} // namespace packsdp
