#pragma once

#include "hp_numeric.hpp"
#include "sdp.hpp"

#include <chrono>
#include <cstdio>
#include <functional>

namespace packsdp {

struct SolverOptions {
    long precision_bits = 512;
    // stop once primal/dual residuals fall below this (relative) and mu below gap_target
    double residual_exponent = 0.5;  // tolerance 2^(-residual_exponent * precision)
    double gap_exponent = 0.6;        // mu target 2^(-gap_exponent * precision)
    int max_iterations = 400;
    double step_fraction = 0.95;
    bool verbose = false;
    std::function<void(const std::string&)> log;
};

struct SolverResult {
    NumericSolution X;
    std::vector<HpFloat> y;
    NumericSolution Z;
    HpFloat primal_objective;
    HpFloat dual_objective;
    HpFloat mu;
    HpFloat primal_residual;
    HpFloat dual_residual;
    int iterations = 0;
    std::string status;
};

namespace detail {

struct LocalEntry {
    int i, l;
    HpFloat v;
};

struct BlockData {
    int n = 0;
    std::vector<int> cons;                     // constraint indices touching this block
    std::vector<std::vector<LocalEntry>> ent;  // parallel to cons
    std::vector<LocalEntry> obj;
    std::vector<std::pair<int, int>> pattern;  // positions (a, c) needed for the Schur complement
    std::vector<int> pattern_index;            // n*n -> index into pattern or -1
};

inline HpFloat pair_trace(const std::vector<LocalEntry>& ent, const HpMatrix& W, long prec) {
    HpFloat s(prec);
    for (auto& e : ent) {
        if (e.i == e.l) s.add_mul(e.v, W(e.i, e.i));
        else {
            HpFloat w = W(e.i, e.l) + W(e.l, e.i);
            s.add_mul(e.v, w);
        }
    }
    return s;
}

inline void add_scaled_entries(HpMatrix& W, const std::vector<LocalEntry>& ent, const HpFloat& scale) {
    for (auto& e : ent) {
        HpFloat x = e.v * scale;
        W(e.i, e.l) += x;
        if (e.i != e.l) W(e.l, e.i) += x;
    }
}

inline HpMatrix sym(const HpMatrix& A) {
    HpMatrix S = A;
    S.symmetrize();
    return S;
}

inline HpFloat frob_dot(const HpMatrix& A, const HpMatrix& B, long prec) {
    HpFloat s(prec);
    for (std::size_t k = 0; k < A.data().size(); ++k) s.add_mul(A.data()[k], B.data()[k]);
    return s;
}

inline bool inverse_spd(const HpMatrix& A, HpMatrix& inv, HpMatrix& L) {
    if (!cholesky(A, L)) return false;
    HpMatrix Li = lower_inverse(L);
    inv = Li.transpose() * Li;
    return true;
}

// largest alpha in (0, 1] with X + alpha dX PSD, scaled by the step fraction
inline double max_step(const HpMatrix& L, const HpMatrix& dX) {
    HpMatrix Li = lower_inverse(L);
    HpMatrix S = Li * dX * Li.transpose();
    auto Sd = to_double_matrix(S);
    Sd.symmetrize();
    auto eig = sym_eigen(Sd, false);
    double lmin = eig.values.front();
    if (lmin >= 0) return 1e300;
    return -1.0 / lmin;
}

} // namespace detail

// Infeasible primal-dual path following (HKM direction, Mehrotra predictor-corrector).
inline SolverResult solve_sdp_hp(const SdpProblem& p, const SolverOptions& opt = {}) {
    using namespace detail;
    const long prec = opt.precision_bits;
    auto log = [&](const std::string& s) {
        if (opt.log) opt.log(s);
        else if (opt.verbose) std::fprintf(stderr, "%s\n", s.c_str());
    };
    const int m = p.num_constraints();
    const int nb = p.num_blocks();
    std::vector<BlockData> B(nb);
    for (int b = 0; b < nb; ++b) {
        B[b].n = p.blocks[b];
        B[b].pattern_index.assign(static_cast<std::size_t>(B[b].n) * B[b].n, -1);
    }
    std::vector<HpFloat> bvec(m, HpFloat(prec));
    for (int j = 0; j < m; ++j) {
        bvec[j] = approx_value(p.constraints[j].rhs, prec);
        std::map<int, std::vector<LocalEntry>> per;
        for (auto& e : p.constraints[j].entries) {
            if (is_zero(e.value)) continue;
            per[e.block].push_back({e.i, e.j, approx_value(e.value, prec)});
        }
        for (auto& [b, ent] : per) {
            B[b].cons.push_back(j);
            for (auto& e : ent)
                for (auto [a, c] : {std::pair{e.i, e.l}, std::pair{e.l, e.i}}) {
                    int& idx = B[b].pattern_index[static_cast<std::size_t>(a) * B[b].n + c];
                    if (idx < 0) {
                        idx = static_cast<int>(B[b].pattern.size());
                        B[b].pattern.emplace_back(a, c);
                    }
                }
            B[b].ent.push_back(std::move(ent));
        }
    }
    for (auto& e : p.objective)
        if (!is_zero(e.value)) B[e.block].obj.push_back({e.i, e.j, approx_value(e.value, prec)});

    long Ntot = 0;
    for (int b = 0; b < nb; ++b) Ntot += B[b].n;

    auto A_of = [&](const std::vector<HpMatrix>& W) {
        std::vector<HpFloat> r(m, HpFloat(prec));
        for (int b = 0; b < nb; ++b)
            for (std::size_t k = 0; k < B[b].cons.size(); ++k) r[B[b].cons[k]] += pair_trace(B[b].ent[k], W[b], prec);
        return r;
    };
    auto At_of = [&](const std::vector<HpFloat>& y) {
        std::vector<HpMatrix> W;
        for (int b = 0; b < nb; ++b) {
            HpMatrix M(B[b].n, B[b].n, prec);
            for (std::size_t k = 0; k < B[b].cons.size(); ++k)
                if (!y[B[b].cons[k]].is_zero()) add_scaled_entries(M, B[b].ent[k], y[B[b].cons[k]]);
            W.push_back(std::move(M));
        }
        return W;
    };
    std::vector<HpMatrix> C;
    for (int b = 0; b < nb; ++b) {
        HpMatrix M(B[b].n, B[b].n, prec);
        add_scaled_entries(M, B[b].obj, HpFloat(1L, prec));
        C.push_back(std::move(M));
    }

    // starting point scaled to the data
    double bmax = 1, amax = 1, cmax = 0;
    for (auto& x : bvec) bmax = std::max(bmax, std::fabs(x.to_double()));
    for (int b = 0; b < nb; ++b)
        for (auto& ent : B[b].ent)
            for (auto& e : ent) amax = std::max(amax, std::fabs(e.v.to_double()));
    for (int b = 0; b < nb; ++b)
        for (auto& e : B[b].obj) cmax = std::max(cmax, std::fabs(e.v.to_double()));
    double xi = std::max(10.0, std::sqrt(static_cast<double>(Ntot)) * bmax / amax);
    double eta = std::max(10.0, std::sqrt(static_cast<double>(Ntot)) * std::max(amax, cmax));
    std::vector<HpMatrix> X, Z;
    for (int b = 0; b < nb; ++b) {
        HpMatrix I = HpMatrix::identity(B[b].n, prec);
        HpMatrix Xi = I, Zi = I;
        Xi *= HpFloat(xi, prec);
        Zi *= HpFloat(eta, prec);
        X.push_back(std::move(Xi));
        Z.push_back(std::move(Zi));
    }
    std::vector<HpFloat> y(m, HpFloat(prec));

    HpFloat res_tol = pow2(-static_cast<long>(opt.residual_exponent * prec), prec);
    HpFloat mu_target = pow2(-static_cast<long>(opt.gap_exponent * prec), prec);
    HpFloat offset = approx_value(p.objective_offset, prec);
    HpFloat bnorm(1L, prec);
    for (auto& x : bvec) bnorm = max(bnorm, abs(x));

    SolverResult out;
    std::vector<HpMatrix> LX(nb), LZ(nb), Zinv(nb);
    for (int b = 0; b < nb; ++b) {
        cholesky(X[b], LX[b]);
        inverse_spd(Z[b], Zinv[b], LZ[b]);
    }
    int small_steps = 0;
    double x_start = xi;
    for (int it = 0;; ++it) {
        auto t0 = std::chrono::steady_clock::now();
        // residuals
        std::vector<HpFloat> AX = A_of(X);
        std::vector<HpFloat> rp(m, HpFloat(prec));
        HpFloat pres(prec);
        for (int j = 0; j < m; ++j) {
            rp[j] = bvec[j] - AX[j];
            pres = max(pres, abs(rp[j]));
        }
        std::vector<HpMatrix> Aty = At_of(y);
        std::vector<HpMatrix> Rd(nb);
        HpFloat dres(prec);
        HpFloat gap(prec);
        HpFloat pobj(prec), dobj(prec);
        double xmax = 0;
        for (int b = 0; b < nb; ++b) {
            Rd[b] = C[b] - Aty[b] - Z[b];
            dres = max(dres, Rd[b].max_abs());
            gap += frob_dot(X[b], Z[b], prec);
            pobj += frob_dot(C[b], X[b], prec);
            xmax = std::max(xmax, X[b].max_abs().to_double());
        }
        for (int j = 0; j < m; ++j) dobj.add_mul(bvec[j], y[j]);
        pobj += offset;
        dobj += offset;
        HpFloat mu = gap / Ntot;
        HpFloat prel = pres / bnorm;
        out.iterations = it;
        out.mu = mu;
        out.primal_residual = pres;
        out.dual_residual = dres;
        out.primal_objective = pobj;
        out.dual_objective = dobj;
        {
            char buf[256];
            std::snprintf(buf, sizeof buf, "it %3d  mu %.3e  pres %.3e  dres %.3e  pobj %.12e  dobj %.12e", it,
                          mu.to_double(), prel.to_double(), dres.to_double(), pobj.to_double(), dobj.to_double());
            log(buf);
        }
        if (prel <= res_tol && dres <= res_tol && mu <= mu_target) {
            out.status = "converged";
            break;
        }
        if (xmax > 1e40 * std::max(1.0, x_start)) {
            throw Infeasible("primal iterates diverge (|X| = " + std::to_string(xmax) + ")");
        }
        if (it >= opt.max_iterations) {
            if (prel > pow2(-prec / 4, prec)) throw Infeasible("no primal convergence within iteration limit");
            throw PrecisionExhausted("iteration limit reached at mu = " + mu.to_string(6));
        }

        // Schur complement M_jk = <A_j, X A_k Z^-1>
        HpMatrix M(m, m, prec);
        for (int b = 0; b < nb; ++b) {
            auto& bd = B[b];
            const HpMatrix& Xb = X[b];
            const HpMatrix& Zi = Zinv[b];
            std::vector<HpFloat> g(bd.pattern.size(), HpFloat(prec));
            for (std::size_t kk = 0; kk < bd.cons.size(); ++kk) {
                for (auto& x : g) x.set_zero();
                for (auto& e : bd.ent[kk]) {
                    for (std::size_t pi = 0; pi < bd.pattern.size(); ++pi) {
                        auto [a, c] = bd.pattern[pi];
                        HpFloat t = Xb(a, e.i) * Zi(e.l, c);
                        if (e.i != e.l) t.add_mul(Xb(a, e.l), Zi(e.i, c));
                        g[pi].add_mul(e.v, t);
                    }
                }
                int k = bd.cons[kk];
                for (std::size_t jj = kk; jj < bd.cons.size(); ++jj) {
                    HpFloat s(prec);
                    for (auto& f : bd.ent[jj]) {
                        const HpFloat& gqp = g[bd.pattern_index[static_cast<std::size_t>(f.l) * bd.n + f.i]];
                        if (f.i == f.l) s.add_mul(f.v, gqp);
                        else {
                            HpFloat w = gqp + g[bd.pattern_index[static_cast<std::size_t>(f.i) * bd.n + f.l]];
                            s.add_mul(f.v, w);
                        }
                    }
                    int j = bd.cons[jj];
                    M(j, k) += s;
                    if (j != k) M(k, j) += s;
                }
            }
        }
        HpMatrix LM;
        if (!cholesky(M, LM)) {
            // tiny diagonal shift for numerically dependent constraints
            HpFloat shift = M.max_abs() * pow2(-prec / 2, prec);
            for (int j = 0; j < m; ++j) M(j, j) += shift;
            if (!cholesky(M, LM)) throw PrecisionExhausted("Schur complement is not positive definite");
        }

        std::vector<HpMatrix> T1(nb);
        for (int b = 0; b < nb; ++b) T1[b] = X[b] * Rd[b] * Zinv[b];
        std::vector<HpFloat> AT1 = A_of(T1);
        std::vector<HpFloat> AZi = A_of(Zinv);

        auto direction = [&](const std::vector<HpFloat>& rhs, const HpFloat& sigma_mu,
                             const std::vector<HpMatrix>* corr, std::vector<HpMatrix>& dX, std::vector<HpFloat>& dy,
                             std::vector<HpMatrix>& dZ) {
            dy = rhs;
            cholesky_solve(LM, dy);
            auto Atdy = At_of(dy);
            dX.resize(nb);
            dZ.resize(nb);
            for (int b = 0; b < nb; ++b) {
                dZ[b] = Rd[b] - Atdy[b];
                HpMatrix W = X[b] * dZ[b] * Zinv[b];
                if (corr) W = W + (*corr)[b];
                HpMatrix D = Zinv[b];
                D *= sigma_mu;
                D = D - X[b] - sym(W);
                dX[b] = std::move(D);
            }
            // refine against the primal equations A(dX) = rp
            for (int pass = 0; pass < 2; ++pass) {
                std::vector<HpFloat> e = A_of(dX);
                for (int j = 0; j < m; ++j) e[j] = rp[j] - e[j];
                cholesky_solve(LM, e);
                auto Ate = At_of(e);
                for (int j = 0; j < m; ++j) dy[j] += e[j];
                for (int b = 0; b < nb; ++b) {
                    dZ[b] = dZ[b] - Ate[b];
                    dX[b] = dX[b] + sym(X[b] * Ate[b] * Zinv[b]);
                }
            }
        };
        auto steps = [&](const std::vector<HpMatrix>& dX, const std::vector<HpMatrix>& dZ) {
            double ap = 1e300, ad = 1e300;
            for (int b = 0; b < nb; ++b) {
                ap = std::min(ap, max_step(LX[b], dX[b]));
                ad = std::min(ad, max_step(LZ[b], dZ[b]));
            }
            return std::pair{ap, ad};
        };

        // predictor
        std::vector<HpFloat> rhs(m, HpFloat(prec));
        for (int j = 0; j < m; ++j) rhs[j] = bvec[j] + AT1[j];
        std::vector<HpMatrix> dXa, dZa;
        std::vector<HpFloat> dya;
        direction(rhs, HpFloat(prec), nullptr, dXa, dya, dZa);
        auto [apa, ada] = steps(dXa, dZa);
        apa = std::min(1.0, apa);
        ada = std::min(1.0, ada);
        HpFloat gap_aff(prec);
        for (int b = 0; b < nb; ++b) {
            HpMatrix Xn = dXa[b];
            Xn *= HpFloat(apa, prec);
            Xn = Xn + X[b];
            HpMatrix Zn = dZa[b];
            Zn *= HpFloat(ada, prec);
            Zn = Zn + Z[b];
            gap_aff += frob_dot(Xn, Zn, prec);
        }
        HpFloat ratio = gap_aff / gap;
        double r = std::max(0.0, std::min(1.0, ratio.to_double()));
        double sigma = std::max(r * r * r, 0.0);
        if (prel > HpFloat(1e-4, prec) || dres > HpFloat(1e-4, prec)) sigma = std::max(sigma, 0.1 * (1 - std::min(apa, ada)));
        HpFloat sigma_mu = mu * HpFloat(sigma, prec);

        // corrector
        std::vector<HpMatrix> corr(nb);
        for (int b = 0; b < nb; ++b) corr[b] = dXa[b] * dZa[b] * Zinv[b];
        std::vector<HpFloat> Acorr = A_of(corr);
        for (int j = 0; j < m; ++j) rhs[j] = bvec[j] - sigma_mu * AZi[j] + AT1[j] + Acorr[j];
        std::vector<HpMatrix> dX, dZ;
        std::vector<HpFloat> dy;
        direction(rhs, sigma_mu, &corr, dX, dy, dZ);
        auto [ap, ad] = steps(dX, dZ);
        double gamma = opt.step_fraction;
        ap = std::min(1.0, gamma * ap);
        ad = std::min(1.0, gamma * ad);

        // take the step, backing off if the high precision factorization fails
        for (int tries = 0;; ++tries) {
            std::vector<HpMatrix> Xn(nb), Zn(nb), LXn(nb), LZn(nb), Zin(nb);
            bool ok = true;
            for (int b = 0; b < nb && ok; ++b) {
                Xn[b] = dX[b];
                Xn[b] *= HpFloat(ap, prec);
                Xn[b] = Xn[b] + X[b];
                Zn[b] = dZ[b];
                Zn[b] *= HpFloat(ad, prec);
                Zn[b] = Zn[b] + Z[b];
                ok = cholesky(Xn[b], LXn[b]) && inverse_spd(Zn[b], Zin[b], LZn[b]);
            }
            if (ok) {
                X = std::move(Xn);
                Z = std::move(Zn);
                LX = std::move(LXn);
                LZ = std::move(LZn);
                Zinv = std::move(Zin);
                for (int j = 0; j < m; ++j) y[j].add_mul(HpFloat(ad, prec), dy[j]);
                break;
            }
            if (tries > 60) throw PrecisionExhausted("cannot keep iterates positive definite");
            ap *= 0.5;
            ad *= 0.5;
        }
        if (std::min(ap, ad) < 1e-8) {
            if (++small_steps > 8) {
                // rounding floor reached; accept if already near the target
                if (prel <= res_tol && dres <= res_tol && mu <= pow2(-prec / 2, prec)) {
                    out.status = "stalled";
                    break;
                }
                throw PrecisionExhausted("step lengths collapsed at mu = " + mu.to_string(6));
            }
        } else {
            small_steps = 0;
        }
        auto t1 = std::chrono::steady_clock::now();
        char buf[160];
        std::snprintf(buf, sizeof buf, "     steps %.3f %.3f sigma %.2e  (%.2fs)", ap, ad, sigma,
                      std::chrono::duration<double>(t1 - t0).count());
        log(buf);
    }
    out.X.precision_bits = prec;
    out.X.blocks = X;
    out.Z.precision_bits = prec;
    out.Z.blocks = Z;
    out.y = y;
    return out;
}

// Feasibility solve returning the relative interior point reached by the path.
inline NumericSolution solve_feasible_hp(const SdpProblem& p, long precision_bits, const HpFloat& tolerance,
                                         SolverOptions opt = {}) {
    if (p.has_objective()) {
        for (auto& e : p.objective)
            if (!is_zero(e.value)) throw std::invalid_argument("solve_feasible_hp: problem has an objective");
    }
    opt.precision_bits = precision_bits;
    auto res = solve_sdp_hp(p, opt);
    HpFloat r = max_residual(p, res.X);
    if (r > tolerance) throw PrecisionExhausted("linear residual " + r.to_string(6) + " above tolerance");
    return res.X;
}

} // namespace packsdp
