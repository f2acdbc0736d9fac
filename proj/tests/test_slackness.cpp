#include <gtest/gtest.h>
#include <packsdp/certificates.hpp>
#include <packsdp/rounding.hpp>
#include <packsdp/slackness.hpp>
#include <packsdp/solver.hpp>

#include <set>

using namespace packsdp;

namespace {
Scalar q(long a, long b = 1) { return Scalar(Rational(a, b)); }

std::vector<ExactMatrix<Scalar>> zero_blocks(int d) {
    std::vector<ExactMatrix<Scalar>> F;
    for (int k = 0; k <= d; ++k) F.emplace_back(d - k + 1, d - k + 1);
    return F;
}

int orbit_size(const TripleCount& c) {
    std::set<std::string> s;
    std::array<std::string, 3> x{exact_str(c.u), exact_str(c.v), exact_str(c.t)};
    std::sort(x.begin(), x.end());
    do s.insert(x[0] + "," + x[1] + "," + x[2]);
    while (std::next_permutation(x.begin(), x.end()));
    return static_cast<int>(s.size());
}
}  // namespace

TEST(DiagonalRoots, BallCaseOneTouchesAtOne) {
    for (int n : {2, 5}) {
        auto c = closed_form_ball_certificate("i", n);
        auto roots = ball_diagonal_roots(c.F, n, c.M, c.rho);
        ASSERT_EQ(roots.size(), 1u);
        EXPECT_EQ(roots[0], q(1));
    }
}

TEST(DiagonalRoots, ConstantSlackHasNone) {
    auto F = zero_blocks(1);
    F[0](0, 0) = q(181);  // F(u,u,1) = 181 = M - 2
    EXPECT_TRUE(cap_diagonal_roots(F, 8, q(183), q(0)).empty());
}

TEST(PairRoots, DegenerateSliceOutsideRegion) {
    auto r = cap_pair_roots(zero_blocks(1), 8, {q(1)}, q(1, 2));
    ASSERT_EQ(r.size(), 1u);
    EXPECT_TRUE(r[0].second.empty());
}

TEST(PairRoots, LinearInT) {
    // F = 2/5 (1-u)(1-v) + t, so F + 1 = 0 at t = -1 - 2/5 (1-u0)(1-v0)
    auto c = closed_form_ball_certificate("i", 3);
    auto r = ball_pair_roots(c.F, 3, {q(2)}, q(1));
    ASSERT_EQ(r.size(), 1u);
    ASSERT_EQ(r[0].second.size(), 1u);
    EXPECT_EQ(r[0].second[0], q(-7, 5));
}

TEST(InnerProducts, ZeroSolutionHasNoRoots) {
    EXPECT_TRUE(threept_inner_products({q(0), q(0), q(0)}, zero_blocks(2), 4, q(1, 6)).empty());
}

TEST(TripleDistribution, SinglePointCode) {
    auto d = triple_distribution({q(0), q(0)}, {}, 4, {}, 1);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].u, q(1));
    EXPECT_EQ(d[0].v, q(1));
    EXPECT_EQ(d[0].t, q(1));
    EXPECT_EQ(d[0].alpha, q(1));
}

TEST(Analyze, PetersenDistribution) {
    auto p = generate_threept_program(4, q(1, 6), 4);
    SolverOptions o;
    o.precision_bits = 256;
    auto s = solve_sdp_hp(p, o);
    EXPECT_NEAR(s.primal_objective.to_double(), 10.0, 1e-20);
    auto pinned = to_feasibility(p, q(10));
    RoundingConfig cfg;
    cfg.precision_bits = 256;
    auto r = round_with_retries(pinned, s.X, cfg);
    ASSERT_TRUE(r.certificate.ok());

    auto rep = analyze_solution(p, r.X, q(10));
    EXPECT_EQ(rep.inner_products, (std::vector<Scalar>{q(-2, 3), q(1, 6)}));
    std::map<std::string, Scalar> alpha;
    Scalar total(0), diag(0);
    for (auto& c : rep.triple_distribution) {
        alpha[exact_str(c.u) + "," + exact_str(c.v) + "," + exact_str(c.t)] = c.alpha;
        total += c.alpha * Scalar(orbit_size(c));
        if (c.u == c.v && c.t == q(1)) diag += c.alpha;
    }
    EXPECT_EQ(alpha["1/6,1/6,1"], q(6));
    EXPECT_EQ(alpha["-2/3,-2/3,1"], q(3));
    EXPECT_EQ(alpha["1/6,1/6,1/6"], q(18));
    EXPECT_EQ(alpha["-2/3,1/6,1/6"], q(12));
    EXPECT_EQ(alpha["-2/3,-2/3,1/6"], q(6));
    EXPECT_EQ(alpha["1,1,1"], q(1));
    EXPECT_EQ(diag, q(10));
    EXPECT_EQ(total, q(100));

    // sum over pairs of P_k(x.y) vanishes wherever a_k > 0
    auto a = a_coefficients(p, r.X);
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!(a[k] > q(0))) continue;
        auto Pk = to_scalar(gegenbauer(4, static_cast<int>(k)));
        Scalar s2(0);
        for (auto& c : rep.triple_distribution)
            if (c.u == c.v && c.t == q(1)) s2 += c.alpha * Pk(c.u);
        EXPECT_TRUE(is_zero(s2)) << k;
    }
    json j = slackness_report_to_json(rep);
    EXPECT_EQ(j["inner_products"], json::array({"-2/3", "1/6"}));
}
