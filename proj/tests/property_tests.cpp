#include <gtest/gtest.h>
#include <packsdp/certificates.hpp>
#include <packsdp/packing.hpp>
#include <packsdp/rounding.hpp>
#include <packsdp/slackness.hpp>
#include <packsdp/solver.hpp>

#include <random>

using namespace packsdp;
using RM = ExactMatrix<Rational>;
using SM = ExactMatrix<Scalar>;

namespace {

using Rng = std::mt19937_64;

long uniform(Rng& g, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(g); }

Rational random_rational(Rng& g, long num = 20, long den = 12) {
    Rational r(uniform(g, -num, num), uniform(g, 1, den));
    r.canonicalize();
    return r;
}

Scalar sq(long a, long b = 1) {
    Rational r(a, b);
    r.canonicalize();
    return Scalar(r);
}

HpMatrix to_hp(const SM& M, long prec) {
    HpMatrix H(M.rows(), M.cols(), prec);
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j) H(i, j) = approx_value(M(i, j), prec);
    return H;
}

SM mul(const SM& A, const SM& B) {
    SM C(A.rows(), B.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int k = 0; k < A.cols(); ++k) {
            if (is_zero(A(i, k))) continue;
            for (int j = 0; j < B.cols(); ++j) C(i, j) += A(i, k) * B(k, j);
        }
    return C;
}

// symmetric matrix as constraint entries (value at (i,j) counts twice off the diagonal)
std::vector<SdpEntry> entries_of(const SM& A) {
    std::vector<SdpEntry> e;
    for (int i = 0; i < A.rows(); ++i)
        for (int j = i; j < A.cols(); ++j)
            if (!is_zero(A(i, j))) e.push_back({0, i, j, A(i, j)});
    return e;
}

Scalar frob(const SM& A, const SM& B) {
    Scalar s(0);
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) s += A(i, j) * B(i, j);
    return s;
}

struct Planted {
    SdpProblem p;
    SM X0;
    Scalar value;
    int kernel_dim = 0;
};

// X0 = B G B^T with B spanning K^perp, slack Z = K K^T, so X0 is optimal with kernel span(K).
Planted planted_instance(Rng& g, int n, int k, bool with_objective) {
    int r = n - k;
    SM K;
    while (true) {
        K = SM(n, k);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < k; ++j) K(i, j) = Scalar(uniform(g, -3, 3));
        RM Kr(n, k);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < k; ++j) Kr(i, j) = K(i, j).a();
        if (rref(Kr).rank == k) break;
    }
    RM Kt(k, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) Kt(j, i) = K(i, j).a();
    auto basis = nullspace(Kt);
    SM B(n, r);
    for (int c = 0; c < r; ++c)
        for (int i = 0; i < n; ++i) B(i, c) = Scalar(basis[c][i]);
    SM L(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j <= i; ++j) L(i, j) = Scalar(i == j ? uniform(g, 1, 3) : uniform(g, -2, 2));
    SM G = mul(L, L.transpose());
    SM X0 = mul(mul(B, G), B.transpose());
    SM Z = mul(K, K.transpose());

    Planted pl;
    pl.X0 = X0;
    pl.kernel_dim = k;
    SdpProblem& p = pl.p;
    p.blocks = {n};
    p.block_names = {"X"};
    int m = std::min<int>(static_cast<int>(uniform(g, 1, 4)), r * (r + 1) / 2);
    SM C = Z;
    for (int c = 0; c < m; ++c) {
        SM A = SM::identity(n);
        if (c > 0) {
            A = SM(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j)
                    if (uniform(g, 0, 2) == 0) A(i, j) = A(j, i) = Scalar(uniform(g, -3, 3));
        }
        Scalar y(uniform(g, -2, 2));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) C(i, j) += y * A(i, j);
        p.constraints.push_back({entries_of(A), frob(A, X0), "c" + std::to_string(c)});
    }
    if (with_objective) {
        p.objective = entries_of(C);
        p.objective_offset = Scalar(0);
        pl.value = frob(C, X0);
    }
    return pl;
}

SM snap_noise(const SM& X0, Rng& g, long prec, NumericSolution& out) {
    HpMatrix H = to_hp(X0, prec);
    HpFloat eps("1e-35", prec);
    for (int i = 0; i < X0.rows(); ++i)
        for (int j = 0; j <= i; ++j) {
            HpFloat e = eps * HpFloat(static_cast<double>(uniform(g, -1000, 1000)) / 1000.0, prec);
            H(i, j) += e;
            if (i != j) H(j, i) = H(i, j);
        }
    out = NumericSolution{{H}, prec};
    return X0;
}

}  // namespace

// ---------------------------------------------------------------- fields

TEST(FieldProperties, AxiomsOnRandomSamples) {
    Rng g(1);
    for (int it = 0; it < 300; ++it) {
        long ell = std::vector<long>{1, 2, 5}[it % 3];
        auto rnd = [&] { return QuadraticNumber(random_rational(g), random_rational(g), ell == 1 ? 2 : ell); };
        QuadraticNumber x = rnd(), y = rnd(), z = rnd();
        if (ell == 1) {
            x = QuadraticNumber(x.a());
            y = QuadraticNumber(y.a());
            z = QuadraticNumber(z.a());
        }
        EXPECT_EQ((x + y) + z, x + (y + z));
        EXPECT_EQ(x * (y + z), x * y + x * z);
        EXPECT_EQ((x * y) * z, x * (y * z));
        EXPECT_EQ(x * x.conjugate(), QuadraticNumber(x.a() * x.a() - x.b() * x.b() * x.ell()));
        if (!x.is_zero()) EXPECT_EQ((y / x) * x, y);
    }
}

TEST(FieldProperties, RationalRoundTripThroughFloats) {
    Rng g(2);
    for (int it = 0; it < 300; ++it) {
        Integer den = Integer(uniform(g, 1, 1L << 40)) * Integer(uniform(g, 1, 1L << 40));
        Rational r(Integer(uniform(g, -(1L << 50), 1L << 50)), den);
        r.canonicalize();
        EXPECT_EQ(best_rational_approx(approx_value(r, 256), Integer(1) << 100), r);
    }
}

// ---------------------------------------------------------------- (a) planted kernels

TEST(PlantedKernels, SolverThenRoundingRecoversKernels) {
    Rng g(6);
    const long prec = 512;
    int recovered = 0, total = 0;
    for (int it = 0; it < 50; ++it) {
        int k = 1 + it % 10;
        int r = it >= 46 ? 30 - k : static_cast<int>(uniform(g, 1, 6));
        int n = k + r;
        Planted pl = planted_instance(g, n, k, true);
        SolverOptions o;
        o.precision_bits = prec;
        auto s = solve_sdp_hp(pl.p, o);
        auto pinned = to_feasibility(pl.p, pl.value);
        RoundingConfig cfg;
        cfg.precision_bits = prec;
        ++total;
        try {
            auto rr = round_solution(pinned, s.X, cfg);
            bool ok = rr.certificate.ok() && rr.certificate.kernel_dims() == std::vector<int>{k} &&
                      rr.kernels.size() == 1 && static_cast<int>(rr.kernels[0].vectors.size()) == k;
            for (auto& v : rr.kernels[0].vectors) {
                auto Xv = rr.X.blocks[0] * v;
                for (auto& x : Xv) ok = ok && is_zero(x);
            }
            // the planted optimum stays feasible after adding the kernel rows
            ExactSolution X0{{pl.X0}, 1};
            ok = ok && is_zero(residuals(rr.augmented, X0).max_abs);
            ok = ok && verify(pinned, rr.X).ok();
            if (ok) ++recovered;
            else ADD_FAILURE() << "instance " << it << " n=" << n << " k=" << k;
        } catch (const std::exception& e) {
            ADD_FAILURE() << "instance " << it << " n=" << n << " k=" << k << ": " << e.what();
        }
    }
    EXPECT_EQ(recovered, total);
    RecordProperty("recovered", recovered);
}

TEST(PlantedKernels, NoisyPointRoundsToPlantedMatrix) {
    Rng g(7);
    for (int it = 0; it < 20; ++it) {
        int k = 1 + it % 10;
        int n = k + static_cast<int>(uniform(g, 1, 5));
        Planted pl = planted_instance(g, n, k, false);
        NumericSolution X;
        snap_noise(pl.X0, g, 256, X);
        RoundingConfig cfg;
        cfg.precision_bits = 256;
        auto rr = round_solution(pl.p, X, cfg);
        EXPECT_EQ(rr.X.blocks[0], pl.X0) << it;
        EXPECT_TRUE(rr.certificate.ok()) << it;
        EXPECT_EQ(rr.certificate.kernel_dims(), std::vector<int>{k}) << it;
    }
}

TEST(PlantedKernels, KernelDimensionStableUnderPrecision) {
    Rng g(8);
    for (int it = 0; it < 20; ++it) {
        int k = 1 + it % 6;
        int n = k + static_cast<int>(uniform(g, 1, 5));
        Planted pl = planted_instance(g, n, k, false);
        for (long prec : {256L, 512L}) {
            HpMatrix H = to_hp(pl.X0, prec);
            auto nk = numerical_kernel(H, H.norm_inf() * pow2(-prec / 2, prec));
            EXPECT_EQ(nk.dim(), k) << it << " at " << prec;
            HpFloat thr = H.norm_inf() * pow2(-prec / 2, prec);
            for (int c = 0; c < nk.dim(); ++c)
                for (int i = 0; i < n; ++i) {
                    HpFloat s(prec);
                    for (int j = 0; j < n; ++j) s += H(i, j) * nk.basis(j, c);
                    EXPECT_TRUE(abs(s) <= thr * HpFloat(static_cast<long>(n), prec));
                }
        }
    }
}

// ---------------------------------------------------------------- (b) exact PSD test vs eigensolver

TEST(PsdAgreement, FiveHundredRandomMatrices) {
    Rng g(3);
    const long prec = 256;
    int compared = 0, psd_count = 0;
    for (int it = 0; it < 520 && compared < 500; ++it) {
        int n = static_cast<int>(uniform(g, 1, 7));
        RM M(n, n);
        int kind = it % 3;
        if (kind == 0) {
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) M(i, j) = M(j, i) = random_rational(g, 6, 4);
        } else {
            int r = static_cast<int>(uniform(g, 1, n));
            RM B(n, r);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < r; ++j) B(i, j) = random_rational(g, 4, 3);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Rational s = 0;
                    for (int l = 0; l < r; ++l) s += B(i, l) * B(j, l);
                    M(i, j) = s;
                }
            if (kind == 2) {
                Rational shift(uniform(g, -3, 3), uniform(g, 1, 64));
                shift.canonicalize();
                for (int i = 0; i < n; ++i) M(i, i) += shift;
            }
        }
        HpMatrix H(n, n, prec);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) H(i, j) = HpFloat(M(i, j), prec);
        auto eig = sym_eigen(H);
        HpFloat zero_tol = pow2(-prec / 2, prec);
        bool ambiguous = false;
        bool numeric_psd = true;
        for (auto& l : eig.values) {
            HpFloat a = abs(l);
            if (a > zero_tol && a < pow2(-64, prec)) ambiguous = true;
            if (l.sign() < 0 && a > zero_tol) numeric_psd = false;
        }
        if (ambiguous) continue;
        ++compared;
        bool exact = is_psd_exact(M);
        if (exact) ++psd_count;
        EXPECT_EQ(exact, numeric_psd) << "matrix " << it;
        // characteristic polynomial nearly vanishes at every numerical eigenvalue
        auto f = charpoly(M);
        double nrm = H.norm_inf().to_double();
        HpFloat bound = pow2(-prec / 2, prec) * HpFloat(std::pow(1.0 + nrm, n), prec);
        for (auto& l : eig.values) {
            HpFloat v(prec);
            for (int i = f.degree(); i >= 0; --i) v = v * l + HpFloat(f.coeff(i), prec);
            EXPECT_TRUE(abs(v) <= bound);
        }
    }
    EXPECT_EQ(compared, 500);
    EXPECT_GT(psd_count, 100);
    EXPECT_LT(psd_count, 400);
}

// ---------------------------------------------------------------- (c) Sturm counts

TEST(SturmAgreement, TwoHundredRandomPolynomials) {
    Rng g(4);
    using RP = UPoly<Rational>;
    for (int it = 0; it < 200; ++it) {
        int nroots = static_cast<int>(uniform(g, 0, 8));
        std::set<long> grid;
        while (static_cast<int>(grid.size()) < nroots) grid.insert(uniform(g, -40, 40));
        RP p(Rational(uniform(g, 1, 9), uniform(g, 1, 5)) * (uniform(g, 0, 1) ? 1 : -1));
        std::vector<Rational> roots;
        for (long x : grid) {
            Rational r(x, 8);  // roots at least 1/8 apart
            r.canonicalize();
            roots.push_back(r);
            p = p * RP(std::vector<Rational>{-r, 1});
        }
        int quadratics = static_cast<int>(uniform(g, 0, (12 - nroots) / 2));
        for (int q = 0; q < quadratics; ++q) {
            Rational c(uniform(g, 1, 20), uniform(g, 1, 4));
            Rational b(uniform(g, -3, 3), 4);
            b.canonicalize();
            c.canonicalize();
            p = p * RP(std::vector<Rational>{b * b + c, -2 * b, 1});  // (t-b)^2 + c, no real roots
        }
        ASSERT_LE(p.degree(), 12);
        Rational lo(2 * uniform(g, -45, 40) + 1, 16), hi = lo + Rational(2 * uniform(g, 1, 50), 16);
        lo.canonicalize();
        hi.canonicalize();
        int expected = 0;
        for (auto& r : roots)
            if (lo < r && r <= hi) ++expected;
        int got = count_roots(sturm_chain(p), lo, hi);
        EXPECT_EQ(got, expected) << "poly " << it;
        // brute-force sign scan; samples sit at odd sixteenths, never on a root, one root per step at most
        int changes = 0;
        int prev = sgn(p(lo));
        for (Rational x = lo + Rational(1, 8); x <= hi; x += Rational(1, 8)) {
            int s = sgn(p(x));
            if (s != prev) ++changes;
            prev = s;
        }
        EXPECT_EQ(changes, expected) << "poly " << it;
        std::vector<Rational> inside;
        for (auto& r : roots)
            if (lo < r && r <= hi) inside.push_back(r);
        EXPECT_TRUE(confirm_root_set(p, lo, hi, inside));
        if (!inside.empty()) {
            inside.pop_back();
            EXPECT_FALSE(confirm_root_set(p, lo, hi, inside));
        }
    }
}

// ---------------------------------------------------------------- (d) integer relations

TEST(LindepRecovery, HundredPlantedRelations) {
    Rng g(5);
    const long prec = 256;
    int found = 0;
    for (int it = 0; it < 100; ++it) {
        int m = 2 + it % 4;
        std::vector<Integer> c(m);
        for (auto& x : c) x = Integer(uniform(g, -(1L << 20), 1L << 20));
        if (c[m - 1] == 0) c[m - 1] = 1;
        std::vector<HpFloat> v;
        HpFloat acc(prec);
        for (int i = 0; i < m - 1; ++i) {
            mpz_class bits(uniform(g, 1, (1L << 62)));
            HpFloat x = HpFloat(bits, prec) * pow2(-62, prec) + HpFloat(uniform(g, 1, 4), prec);
            // fill the low bits too
            x += HpFloat(mpz_class(uniform(g, 1, 1L << 62)), prec) * pow2(-124, prec);
            x += HpFloat(mpz_class(uniform(g, 1, 1L << 62)), prec) * pow2(-186, prec);
            x += HpFloat(mpz_class(uniform(g, 1, 1L << 62)), prec) * pow2(-248, prec);
            acc += x * HpFloat(c[i], prec);
            v.push_back(x);
        }
        v.push_back(-acc / HpFloat(c[m - 1], prec));
        try {
            auto rel = lindep(v, Integer(1) << 20);
            // proportional to the planted coefficients
            bool prop = true;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) prop = prop && rel.coefficients[i] * c[j] == rel.coefficients[j] * c[i];
            if (prop) ++found;
            else ADD_FAILURE() << "relation " << it << " not proportional";
            HpFloat s(prec);
            for (int i = 0; i < m; ++i) s += v[i] * HpFloat(rel.coefficients[i], prec);
            EXPECT_TRUE(abs(abs(s) - rel.residual) <= pow2(-prec + 40, prec));
        } catch (const NotFound& e) {
            ADD_FAILURE() << "relation " << it << " (dim " << m << "): " << e.what();
        }
    }
    EXPECT_EQ(found, 100);
}

TEST(LllProperties, DeterminantPreserved) {
    Rng g(9);
    for (int it = 0; it < 40; ++it) {
        int n = static_cast<int>(uniform(g, 2, 6));
        IntMatrix B(n, std::vector<Integer>(n));
        RM Br(n, n);
        do {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    B[i][j] = Integer(uniform(g, -1000, 1000));
                    Br(i, j) = Rational(B[i][j]);
                }
        } while (rref(Br).rank < n);
        auto det = [](const IntMatrix& X) {
            int n = static_cast<int>(X.size());
            RM M(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) M(i, j) = Rational(X[i][j]);
            // det via charpoly constant term
            auto f = charpoly(M);
            Rational d = f.coeff(0);
            return n % 2 ? Rational(-d) : d;
        };
        auto R = lll_reduce(B);
        EXPECT_EQ(abs(det(R)), abs(det(B)));
    }
}

// ---------------------------------------------------------------- (e) Gegenbauer family

TEST(GegenbauerFamily, NormalizationAndOrthogonality) {
    for (int n = 2; n <= 12; ++n) {
        // normalized moments of (1-t^2)^((n-3)/2): m_{2j} = prod_{i<j} (2i+1)/(2i+n)
        std::vector<Rational> mom(13, Rational(0));
        Rational m = 1;
        for (int j = 0; 2 * j <= 12; ++j) {
            mom[2 * j] = m;
            m *= Rational(2 * j + 1, 2 * j + n);
            m.canonicalize();
        }
        std::vector<UPoly<Rational>> P;
        for (int k = 0; k <= 6; ++k) {
            P.push_back(gegenbauer(n, k));
            EXPECT_EQ(P.back()(Rational(1)), Rational(1));
            EXPECT_EQ(P.back().degree(), k);
        }
        for (int j = 0; j <= 6; ++j)
            for (int k = 0; k <= 6; ++k) {
                auto prod = P[j] * P[k];
                Rational integral = 0;
                for (int e = 0; e <= prod.degree(); ++e) integral += prod.coeff(e) * mom[e];
                if (j == k) EXPECT_GT(integral, 0);
                else EXPECT_EQ(integral, 0) << "n=" << n << " j=" << j << " k=" << k;
            }
    }
}

TEST(GegenbauerFamily, ZonalMatricesPositiveOnPointSets) {
    // rational points on S^{n-1} by inverse stereographic projection
    Rng g(10);
    for (int it = 0; it < 12; ++it) {
        int n = 3 + it % 3;
        int d = 3;
        std::vector<std::vector<Rational>> pts;
        for (int a = 0; a < 6; ++a) {
            std::vector<Rational> y(n - 1);
            Rational s = 0;
            for (auto& x : y) {
                x = random_rational(g, 5, 3);
                s += x * x;
            }
            std::vector<Rational> p(n);
            for (int i = 0; i < n - 1; ++i) p[i] = 2 * y[i] / (s + 1);
            p[n - 1] = (s - 1) / (s + 1);
            pts.push_back(p);
        }
        std::vector<Rational> e(n, 0);
        e[0] = 1;
        auto dot = [](const std::vector<Rational>& a, const std::vector<Rational>& b) {
            Rational s = 0;
            for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
            return s;
        };
        for (int k = 0; k <= d; ++k) {
            auto Z = zonal_matrix('Y', n, k, d);
            SM S(Z.size(), Z.size());
            for (auto& x : pts)
                for (auto& y : pts) {
                    Scalar u(dot(x, e)), v(dot(y, e)), t(dot(x, y));
                    for (int i = 0; i < Z.size(); ++i)
                        for (int j = 0; j < Z.size(); ++j) S(i, j) += Z.entries[i][j](u, v, t);
                }
            EXPECT_TRUE(is_psd_exact(S)) << "n=" << n << " k=" << k;
        }
    }
}

// ---------------------------------------------------------------- (f) sign conditions of exact solutions

namespace {

// sample exact points of the ball region and check F <= -1 there and F(u,u,u^2) <= M-1 on [0, rho].
// the region may shrink to u = v = rho, t = -rho^2; -1 means no samples were found
int check_ball_signs(const SPoly& F, const Scalar& M, const Scalar& rho, const Scalar& r2, Rng& g, int samples) {
    int bad = 0, done = 0;
    Scalar one(1), two(2);
    auto coord = [&] { return uniform(g, 0, 1) ? rho : rho * sq(uniform(g, 0, 64), 64); };
    for (long attempts = 0; done < samples; ++attempts) {
        if (attempts > 100L * samples) return -1;
        Scalar u = coord(), v = coord();
        Scalar uv = u * v;
        Scalar hi = (u * u + v * v - Scalar(4) * r2) / two;
        if (uv < hi) hi = uv;
        if (hi < -uv) continue;
        Scalar t = -uv + (hi + uv) * sq(uniform(g, 0, 64), 64);
        ++done;
        if (F(u, v, t) > -one) ++bad;
        Scalar w = rho * sq(uniform(g, 0, 64), 64);
        if (F(w, w, w * w) > M - one) ++bad;
    }
    return bad;
}

}  // namespace

TEST(SignConditions, BallClosedForms) {
    Rng g(11);
    for (const char* w : {"i", "ii", "iii", "iv"})
        for (int n : {5, 8, 13}) {
            auto c = closed_form_ball_certificate(w, n);
            SPoly F = closed_form_kernel(c);
            EXPECT_EQ(check_ball_signs(F, c.M, c.rho, c.r_squared, g, 1000), 0) << w << " n=" << n;
        }
}

TEST(SignConditions, BallProgramSolutions) {
    Rng g(12);
    for (const char* w : {"i", "ii", "iii"}) {
        auto c = closed_form_ball_certificate(w, 4);
        auto p = generate_ball_program_scaled(4, c.rho, c.r_squared, 1);
        auto X = closed_form_solution(c, p);
        ASSERT_TRUE(verify(to_feasibility(p, c.M), X).ok());
        SPoly F = kernel_polynomial(p, X);
        EXPECT_EQ(check_ball_signs(F, c.M, c.rho, c.r_squared, g, 1000), 0) << w;
    }
}

TEST(SignConditions, PetersenThreePoint) {
    Rng g(13);
    auto p = generate_threept_program(4, sq(1, 6), 4);
    SolverOptions o;
    o.precision_bits = 256;
    auto s = solve_sdp_hp(p, o);
    RoundingConfig cfg;
    cfg.precision_bits = 256;
    auto rr = round_with_retries(to_feasibility(p, sq(10)), s.X, cfg);
    ASSERT_TRUE(rr.certificate.ok());
    auto F = f_blocks(p, rr.X);
    auto a = a_coefficients(p, rr.X);
    SPoly f = kernel_polynomial('S', 4, F);
    UPoly<Scalar> edge(Scalar(1));
    for (std::size_t k = 0; k < a.size(); ++k) edge += to_scalar(gegenbauer(4, static_cast<int>(k))) * a[k];
    edge += diagonal_cap(f) * Scalar(3);
    int bad = 0, done = 0;
    while (done < 1000) {
        auto pick = [&] { return sq(uniform(g, -96, 16), 96); };
        Scalar u = pick(), v = pick(), t = pick();
        if (exact_sign(gram_det(u, v, t)) < 0) continue;
        ++done;
        if (f(u, v, t) > Scalar(0)) ++bad;
        if (edge(u) > Scalar(0)) ++bad;
    }
    EXPECT_EQ(bad, 0);
    // realized triples of the Petersen code sit on the zero set
    for (Scalar u : {sq(-2, 3), sq(1, 6)})
        for (Scalar v : {sq(-2, 3), sq(1, 6)})
            for (Scalar t : {sq(-2, 3), sq(1, 6)})
                if (exact_sign(gram_det(u, v, t)) >= 0) EXPECT_LE(f(u, v, t), Scalar(0));
    EXPECT_TRUE(is_zero(edge(sq(-2, 3))));
    EXPECT_TRUE(is_zero(edge(sq(1, 6))));
}

// ---------------------------------------------------------------- file formats

TEST(FormatProperties, JsonPreservesEverything) {
    Rng g(14);
    for (int it = 0; it < 30; ++it) {
        int n = static_cast<int>(uniform(g, 1, 5));
        SdpProblem p;
        p.blocks = {n, 1};
        p.ell = 5;
        for (int c = 0; c < 4; ++c) {
            SdpConstraint con;
            for (int e = 0; e < 3; ++e) {
                int i = static_cast<int>(uniform(g, 0, n - 1)), j = static_cast<int>(uniform(g, i, n - 1));
                con.entries.push_back({0, i, j, QuadraticNumber(random_rational(g), random_rational(g), 5)});
            }
            con.rhs = QuadraticNumber(random_rational(g), random_rational(g), 5);
            p.constraints.push_back(con);
        }
        json j = problem_to_json(p);
        auto q = problem_from_json(json::parse(j.dump()));
        ASSERT_EQ(q.num_constraints(), p.num_constraints());
        for (int c = 0; c < p.num_constraints(); ++c) {
            ASSERT_EQ(q.constraints[c].entries.size(), p.constraints[c].entries.size());
            for (std::size_t e = 0; e < p.constraints[c].entries.size(); ++e) {
                auto &a = p.constraints[c].entries[e], &b = q.constraints[c].entries[e];
                EXPECT_TRUE(a.block == b.block && a.i == b.i && a.j == b.j && a.value == b.value);
            }
            EXPECT_EQ(q.constraints[c].rhs, p.constraints[c].rhs);
        }
    }
}
