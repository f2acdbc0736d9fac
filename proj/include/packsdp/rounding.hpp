#pragma once

#include "relations.hpp"
#include "sdp.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace packsdp {

struct RoundingConfig {
    Integer max_denominator = Integer(1) << 64;
    HpFloat kernel_threshold = HpFloat(0L, 64);  // relative to max_i |X_i|_inf; zero selects 2^(-prec/4)
    long precision_bits = 512;
    Integer coefficient_bound = Integer(1) << 40;
    long field_ell = 1;
};

struct BlockCertificate {
    std::string name;
    bool psd_ok = false;
    int kernel_dim = 0;
    UPoly<Scalar> charpoly;
};

struct Certificate {
    bool linear_ok = false;
    Scalar max_residual;
    std::vector<BlockCertificate> blocks;
    long field_ell = 1;

    bool ok() const {
        if (!linear_ok) return false;
        for (auto& b : blocks)
            if (!b.psd_ok) return false;
        return true;
    }
    std::vector<int> kernel_dims() const {
        std::vector<int> k;
        for (auto& b : blocks) k.push_back(b.kernel_dim);
        return k;
    }
};

inline json certificate_to_json(const Certificate& c) {
    json j;
    j["linear_ok"] = c.linear_ok;
    j["max_residual"] = exact_str(c.max_residual);
    j["field"] = c.field_ell == 1 ? std::string("Q") : "Q[sqrt(" + std::to_string(c.field_ell) + ")]";
    j["ok"] = c.ok();
    json bl = json::array();
    for (auto& b : c.blocks) {
        json e;
        e["name"] = b.name;
        e["psd_ok"] = b.psd_ok;
        e["kernel_dim"] = b.kernel_dim;
        json cp = json::array();
        for (auto& x : b.charpoly.coeffs()) cp.push_back(exact_str(x));
        e["charpoly"] = cp;
        bl.push_back(std::move(e));
    }
    j["blocks"] = bl;
    return j;
}

// Upper-triangle coordinates of all blocks, block by block, row-major.
class VariableMap {
public:
    explicit VariableMap(const std::vector<int>& sizes) : sizes_(sizes) {
        long off = 0;
        for (int n : sizes) {
            offset_.push_back(off);
            off += static_cast<long>(n) * (n + 1) / 2;
        }
        total_ = off;
    }
    int size() const { return static_cast<int>(total_); }
    int index(int b, int i, int j) const {
        if (i > j) std::swap(i, j);
        long n = sizes_[b];
        return static_cast<int>(offset_[b] + i * n - static_cast<long>(i) * (i - 1) / 2 + (j - i));
    }
    const std::vector<int>& sizes() const { return sizes_; }

private:
    std::vector<int> sizes_;
    std::vector<long> offset_;
    long total_ = 0;
};

namespace detail {

inline SparseRow<Scalar> constraint_row(const SdpConstraint& c, const VariableMap& vm) {
    std::map<int, Scalar> acc;
    for (auto& e : c.entries) {
        if (is_zero(e.value)) continue;
        Scalar v = e.i == e.j ? e.value : e.value * Scalar(2);
        acc[vm.index(e.block, e.i, e.j)] += v;
    }
    SparseRow<Scalar> r;
    for (auto& [k, v] : acc)
        if (!is_zero(v)) r.emplace_back(k, v);
    return r;
}

inline std::vector<HpFloat> flatten(const NumericSolution& X, const VariableMap& vm, long prec) {
    std::vector<HpFloat> x(vm.size(), HpFloat(prec));
    for (std::size_t b = 0; b < vm.sizes().size(); ++b) {
        int n = vm.sizes()[b];
        const HpMatrix& M = X.blocks.at(b);
        if (M.rows() != n) throw std::invalid_argument("solution block size mismatch");
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                HpFloat a = M(i, j);
                if (i != j) {
                    a += M(j, i);
                    a /= 2L;
                }
                a.set_precision(prec);
                x[vm.index(static_cast<int>(b), i, j)] = std::move(a);
            }
    }
    return x;
}

inline ExactSolution unflatten(const std::vector<Scalar>& x, const VariableMap& vm, long ell) {
    ExactSolution X;
    X.ell = ell;
    for (std::size_t b = 0; b < vm.sizes().size(); ++b) {
        int n = vm.sizes()[b];
        ExactMatrix<Scalar> M(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                M(i, j) = x[vm.index(static_cast<int>(b), i, j)];
                M(j, i) = M(i, j);
            }
        X.blocks.push_back(std::move(M));
    }
    return X;
}

inline Integer lcm_denominators(const ExactMatrix<Scalar>& M) {
    Integer L = 1;
    for (auto& x : M.entries()) {
        for (const Rational* q : {&x.a(), &x.b()}) {
            Integer d = q->get_den();
            if (d != 1) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), d.get_mpz_t());
        }
    }
    return L;
}

// rows over the field split into (a1 + a2 sqrt(ell)) parts
struct SplitRow {
    SparseRow<Rational> r1, r2;
    Rational b1, b2;
};

inline SplitRow split_row(const SparseRow<Scalar>& row, const Scalar& rhs, long ell) {
    SplitRow s;
    for (auto& [c, x] : row) {
        if (!x.is_rational() && x.ell() != ell) throw FieldMismatch("row entry " + x.str() + " outside Q[sqrt(" + std::to_string(ell) + ")]");
        if (x.a() != 0) s.r1.emplace_back(c, x.a());
        if (x.b() != 0) s.r2.emplace_back(c, x.b());
    }
    if (!rhs.is_rational() && rhs.ell() != ell) throw FieldMismatch("rhs " + rhs.str() + " outside the field");
    s.b1 = rhs.a();
    s.b2 = rhs.b();
    return s;
}

} // namespace detail

// Exact solution of the linear system closest (free coordinates rounded) to X_star.
inline ExactSolution project_affine(const SdpProblem& p, const NumericSolution& X_star, const RoundingConfig& cfg) {
    VariableMap vm(p.blocks);
    const int N = vm.size();
    long prec = std::max(X_star.precision_bits, 64L);
    std::vector<HpFloat> xs = detail::flatten(X_star, vm, prec);
    std::vector<SparseRow<Scalar>> rows;
    std::vector<Scalar> rhs;
    for (auto& c : p.constraints) {
        rows.push_back(detail::constraint_row(c, vm));
        rhs.push_back(c.rhs);
    }
    const long ell = cfg.field_ell;
    if (ell == 1) {
        SparseEchelon<Rational> ech(N);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            auto s = detail::split_row(rows[i], rhs[i], 1);
            if (!s.r2.empty() || s.b2 != 0) throw FieldMismatch("constraint '" + p.constraints[i].label + "' is irrational");
            ech.add_row(s.r1, s.b1);
        }
        auto x = ech.solve([&](int c) { return best_rational_approx(xs[c], cfg.max_denominator); });
        return detail::unflatten(std::vector<Scalar>(x.begin(), x.end()), vm, 1);
    }

    // doubled rational system in (x1, x2) with x = x1 + x2 sqrt(ell)
    SparseEchelon<Rational> ech(2 * N);
    std::vector<detail::SplitRow> indep;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto s = detail::split_row(rows[i], rhs[i], ell);
        SparseRow<Rational> top, bottom;
        for (auto& [c, a] : s.r1) {
            top.emplace_back(c, a);
            bottom.emplace_back(N + c, a);
        }
        for (auto& [c, a] : s.r2) {
            top.emplace_back(N + c, a * ell);
            bottom.emplace_back(c, a);
        }
        int r0 = ech.rank();
        ech.add_row(top, s.b1);
        ech.add_row(bottom, s.b2);
        if (ech.rank() > r0) indep.push_back(std::move(s));
    }

    // auxiliary split: y = x1 solves the conjugate system (A1 - sqrt(ell) A2) y = b1 - sqrt(ell) A2 x*
    HpFloat sq = sqrt(HpFloat(ell, prec));
    const int m = static_cast<int>(indep.size());
    std::vector<std::vector<std::pair<int, HpFloat>>> K(m);
    std::vector<HpFloat> r(m, HpFloat(prec));
    for (int i = 0; i < m; ++i) {
        std::map<int, HpFloat> acc;
        for (auto& [c, a] : indep[i].r1) acc.emplace(c, HpFloat(a, prec));
        HpFloat a2x(prec);
        for (auto& [c, a] : indep[i].r2) {
            HpFloat v = HpFloat(a, prec) * sq;
            a2x.add_mul(v, xs[c]);
            auto it = acc.find(c);
            if (it == acc.end()) acc.emplace(c, -v);
            else it->second -= v;
        }
        for (auto& [c, v] : acc)
            if (!v.is_zero()) K[i].emplace_back(c, v);
        r[i] = HpFloat(indep[i].b1, prec) - a2x;
    }
    std::vector<HpFloat> y = xs;
    if (m > 0) {
        auto dot = [&](const auto& a, const auto& b) {
            HpFloat s(prec);
            std::size_t i = 0, j = 0;
            while (i < a.size() && j < b.size()) {
                if (a[i].first < b[j].first) ++i;
                else if (b[j].first < a[i].first) ++j;
                else s.add_mul(a[i++].second, b[j++].second);
            }
            return s;
        };
        HpMatrix G(m, m, prec);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                G(i, j) = dot(K[i], K[j]);
                G(j, i) = G(i, j);
            }
        HpMatrix L;
        if (!cholesky(G, L)) throw PrecisionExhausted("auxiliary split system is numerically singular");
        for (int pass = 0; pass < 3; ++pass) {
            std::vector<HpFloat> e(m, HpFloat(prec));
            for (int i = 0; i < m; ++i) {
                HpFloat s = r[i];
                for (auto& [c, v] : K[i]) s.sub_mul(v, y[c]);
                e[i] = std::move(s);
            }
            cholesky_solve(L, e);
            for (int i = 0; i < m; ++i)
                for (auto& [c, v] : K[i]) y[c].add_mul(v, e[i]);
        }
    }
    auto x = ech.solve([&](int c) {
        if (c < N) return best_rational_approx(y[c], cfg.max_denominator);
        HpFloat x2 = (xs[c - N] - y[c - N]) / sq;
        return best_rational_approx(x2, cfg.max_denominator);
    });
    std::vector<Scalar> q(N);
    for (int c = 0; c < N; ++c) q[c] = QuadraticNumber(x[c], x[N + c], ell);
    return detail::unflatten(q, vm, ell);
}

struct BlockKernel {
    int block = 0;
    int numerical_dim = 0;
    long scale_bits = 0;
    std::vector<std::vector<Scalar>> vectors;
};

// Exact kernel bases of the near-singular blocks of X_star.
inline std::vector<BlockKernel> detect_kernels(const NumericSolution& X_star, const RoundingConfig& cfg) {
    std::vector<BlockKernel> out;
    // one scale for all blocks, so 1x1 blocks near zero are recognized
    HpFloat global(X_star.precision_bits);
    for (auto& M : X_star.blocks) global = max(global, M.norm_inf());
    for (std::size_t b = 0; b < X_star.blocks.size(); ++b) {
        const HpMatrix& M = X_star.blocks[b];
        long prec = M.precision();
        int n = M.rows();
        BlockKernel bk;
        bk.block = static_cast<int>(b);
        HpFloat nrm = global.with_precision(prec);
        if (nrm.is_zero()) nrm = HpFloat(1L, prec);
        HpFloat thr = cfg.kernel_threshold.is_zero() ? nrm * pow2(-prec / 4, prec)
                                                     : nrm * cfg.kernel_threshold.with_precision(prec);
        NearKernel nk = numerical_kernel(M, thr);
        bk.numerical_dim = nk.dim();
        if (nk.dim() == 0) {
            out.push_back(std::move(bk));
            continue;
        }
        HpFloat worst(prec);
        for (auto& l : nk.eigenvalues) worst = max(worst, abs(l));
        long s = prec / 2;
        if (!worst.is_zero() && !nk.smallest_kept.is_zero())
            s = std::min(s, nk.smallest_kept.exponent() - worst.exponent() - 16);
        s = std::max(s, 32L);
        // kernel vectors can be far less accurate than the eigenvalues suggest; back off the scale
        std::vector<long> ladder{s};
        for (long t : {s * 3 / 4, s / 2, s * 3 / 8, s / 4})
            if (t >= 32) ladder.push_back(t);
        for (std::size_t li = 0; li < ladder.size(); ++li) {
            bk.scale_bits = ladder[li];
            bk.vectors.clear();
            try {
                if (cfg.field_ell == 1) {
                    auto kb = rational_kernel_basis(nk.basis, cfg.coefficient_bound, ladder[li]);
                    for (auto& v : kb.vectors) bk.vectors.emplace_back(v.begin(), v.end());
                } else {
                    auto kb = quad_kernel_relations(nk.basis, cfg.field_ell, n - nk.dim(), cfg.coefficient_bound,
                                                    ladder[li]);
                    bk.vectors = std::move(kb.vectors);
                }
            } catch (const InsufficientRelations& e) {
                if (li + 1 == ladder.size())
                    throw InsufficientRelations("block " + std::to_string(b) + ": " + e.what());
                continue;
            }
            if (static_cast<int>(bk.vectors.size()) == nk.dim()) break;
        }
        if (static_cast<int>(bk.vectors.size()) != nk.dim())
            throw InsufficientRelations("block " + std::to_string(b) + ": exact kernel has dimension " +
                                        std::to_string(bk.vectors.size()) + ", numerical " + std::to_string(nk.dim()));
        out.push_back(std::move(bk));
    }
    return out;
}

// Appends the rows (X_i v)_r = 0 for every kernel vector v, skipping dependent ones.
inline SdpProblem add_kernel_constraints(const SdpProblem& p, const std::vector<BlockKernel>& kernels) {
    SdpProblem q = p;
    VariableMap vm(p.blocks);
    for (auto& bk : kernels) {
        if (bk.vectors.empty()) continue;
        int b = bk.block;
        int n = p.blocks[b];
        SparseEchelon<Scalar> ech(vm.size());
        for (std::size_t k = 0; k < bk.vectors.size(); ++k) {
            const auto& v = bk.vectors[k];
            for (int r = 0; r < n; ++r) {
                SdpConstraint c;
                SparseRow<Scalar> row;
                for (int j = 0; j < n; ++j) {
                    if (is_zero(v[j])) continue;
                    Scalar val = j == r ? v[j] : v[j] / Scalar(2);
                    c.entries.push_back({b, std::min(r, j), std::max(r, j), val});
                    row.emplace_back(vm.index(b, r, j), v[j]);
                }
                if (row.empty()) continue;
                if (!ech.add_row(row, Scalar(0))) continue;
                c.rhs = Scalar(0);
                c.label = "kernel:" + (b < static_cast<int>(p.block_names.size()) ? p.block_names[b] : std::to_string(b)) +
                          ":" + std::to_string(k) + ":" + std::to_string(r);
                q.constraints.push_back(std::move(c));
            }
        }
    }
    return q;
}

inline int zero_root_multiplicity(const UPoly<Scalar>& f) {
    int k = 0;
    while (k <= f.degree() && is_zero(f.coeff(k))) ++k;
    return k;
}

// Characteristic polynomial through an integral rescaling of the block.
inline UPoly<Scalar> block_charpoly(const ExactMatrix<Scalar>& M) {
    int n = M.rows();
    Integer L = detail::lcm_denominators(M);
    if (L == 1) return charpoly(M);
    ExactMatrix<Scalar> S = M;
    Scalar Ls{Rational(L)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) S(i, j) *= Ls;
    UPoly<Scalar> f = charpoly(S);
    std::vector<Scalar> c(n + 1);
    Rational scale = 1;
    for (int i = n; i >= 0; --i) {
        c[i] = f.coeff(i) / Scalar(scale);
        scale *= Rational(L);
    }
    return UPoly<Scalar>(std::move(c));
}

// Exact certificate: linear residuals and characteristic-polynomial PSD test per block.
inline Certificate verify(const SdpProblem& p, const ExactSolution& X) {
    Certificate c;
    c.field_ell = X.ell;
    if (static_cast<int>(X.blocks.size()) != p.num_blocks()) throw std::invalid_argument("verify: block count mismatch");
    for (int b = 0; b < p.num_blocks(); ++b)
        if (X.blocks[b].rows() != p.blocks[b] || X.blocks[b].cols() != p.blocks[b])
            throw std::invalid_argument("verify: block " + std::to_string(b) + " has the wrong size");
    auto res = residuals(p, X);
    c.max_residual = res.max_abs;
    c.linear_ok = is_zero(res.max_abs);
    for (int b = 0; b < p.num_blocks(); ++b) {
        BlockCertificate bc;
        bc.name = b < static_cast<int>(p.block_names.size()) ? p.block_names[b] : std::to_string(b);
        const auto& M = X.blocks[b];
        if (!M.is_symmetric()) {
            bc.psd_ok = false;
        } else {
            bc.charpoly = block_charpoly(M);
            bc.psd_ok = psd_from_charpoly(bc.charpoly, M.rows());
            bc.kernel_dim = zero_root_multiplicity(bc.charpoly);
        }
        c.blocks.push_back(std::move(bc));
    }
    return c;
}

struct RoundingResult {
    ExactSolution X;
    Certificate certificate;
    SdpProblem augmented;
    std::vector<BlockKernel> kernels;
    RoundingConfig config;
    int attempts = 1;
};

// detect_kernels -> add_kernel_constraints -> project_affine -> verify, one attempt.
// Extra rows (for example complementary slackness hints) are appended before projection.
inline RoundingResult round_solution(const SdpProblem& p, const NumericSolution& X_star, const RoundingConfig& cfg,
                                     const std::vector<SdpConstraint>& extra_rows = {}) {
    RoundingResult out;
    out.config = cfg;
    auto staged = [](const char* stage, auto&& fn) {
        try {
            return fn();
        } catch (const Error& e) {
            throw e.staged(stage);
        }
    };
    out.kernels = staged("detect_kernels", [&] { return detect_kernels(X_star, cfg); });
    out.augmented = add_kernel_constraints(p, out.kernels);
    for (auto& c : extra_rows) out.augmented.constraints.push_back(c);
    out.X = staged("project_affine", [&] { return project_affine(out.augmented, X_star, cfg); });
    out.certificate = verify(p, out.X);
    return out;
}

// Retry ladder: doubled precision (needs a re-solve), then squared denominator bound.
// resolve(prec) returns a fresh numerical solution at that precision; it may be empty.
inline RoundingResult round_with_retries(const SdpProblem& p, const NumericSolution& X_star, RoundingConfig cfg,
                                         const std::function<NumericSolution(long)>& resolve = {},
                                         const std::vector<SdpConstraint>& extra_rows = {},
                                         const std::function<void(const std::string&)>& log = {}) {
    NumericSolution X = X_star;
    std::optional<Error> last;
    std::optional<RoundingResult> last_result;
    for (int round = 0; round < 3; ++round) {
        if (round == 1) {
            if (resolve) {
                cfg.precision_bits *= 2;
                if (log) log("retry with precision " + std::to_string(cfg.precision_bits));
                X = resolve(cfg.precision_bits);
            } else {
                continue;
            }
        } else if (round == 2) {
            cfg.max_denominator *= cfg.max_denominator;
            if (log) log("retry with max denominator 2^" + std::to_string(mpz_sizeinbase(cfg.max_denominator.get_mpz_t(), 2) - 1));
        }
        try {
            auto r = round_solution(p, X, cfg, extra_rows);
            r.attempts = round + 1;
            if (r.certificate.ok()) return r;
            if (log) log("certificate failed (linear_ok=" + std::string(r.certificate.linear_ok ? "1" : "0") + ")");
            last_result = std::move(r);
        } catch (const Error& e) {
            if (log) log(e.what());
            last = e;
        }
    }
    if (last_result) return *last_result;
    throw *last;
}

} // namespace packsdp
