#pragma once

#include "packing.hpp"
#include "realroots.hpp"
#include "rounding.hpp"

#include <optional>
#include <string>
#include <vector>

namespace packsdp {

struct WeightedSquare {
    Scalar weight;
    SPoly root;
};

// multiplier * sum weight * root^2; block names the Gram block the squares belong to
struct SosGroup {
    SPoly multiplier;
    std::vector<WeightedSquare> squares;
    std::string block;
};

struct ClosedFormBall {
    std::string ball_case;
    int n = 0;
    int d = 1;
    Scalar M, rho, r_squared;
    std::vector<ExactMatrix<Scalar>> F;
    std::optional<SPoly> F_expected;
    std::vector<SosGroup> diagonal;  // (M-1) - F(u,u,u^2)
    std::vector<SosGroup> triple;    // -1 - F(u,v,t)
    bool program_format = true;
};

struct IdentityCheck {
    bool ok = false;
    std::string first_difference;
};

inline IdentityCheck verify_sos_identity(const SPoly& lhs, const std::vector<SosGroup>& groups) {
    IdentityCheck r;
    SPoly rhs;
    for (auto& g : groups)
        for (auto& s : g.squares) {
            if (s.weight < Scalar(0)) {
                r.first_difference = "negative weight " + exact_str(s.weight) + " in " + g.block;
                return r;
            }
            rhs += g.multiplier * s.root * s.root * s.weight;
        }
    SPoly diff = lhs - rhs;
    if (!diff.is_zero()) {
        auto& [e, c] = *diff.terms().begin();
        r.first_difference = mono_str(e) + ": lhs " + exact_str(lhs.coeff(e)) + " rhs " + exact_str(rhs.coeff(e));
        return r;
    }
    r.ok = true;
    return r;
}

namespace detail {
inline Scalar q(long a, long b = 1) { return Scalar(Rational(a, b)); }
inline SPoly cst(const Scalar& c) { return SPoly(c); }

inline ExactMatrix<Scalar> sym2(const Scalar& a, const Scalar& b, const Scalar& c) { return {{a, b}, {b, c}}; }

// squares for the cases whose certificate uses only the constant q2 and q5 slots
inline void ball_triple_common(ClosedFormBall& c, const Scalar& w1, const SPoly& root1, const Scalar& w2,
                               const Scalar& w_box, const Scalar& w_omega) {
    SPoly u = SPoly::u(), v = SPoly::v(), t = SPoly::t(), R(c.rho);
    SPoly one(Scalar(1));
    c.triple.push_back({one, {{w1, root1}}, "tri.q1.X1"});
    c.triple.push_back({one, {{w2, v - u}}, "tri.q1.X2"});
    c.triple.push_back({u * (R - u) + v * (R - v), {{w_box, one}}, "tri.q2.X1"});
    c.triple.push_back({u * u + v * v - t * Scalar(2) - SPoly(c.r_squared * Scalar(4)), {{w_omega, one}}, "tri.q5.X1"});
}
} // namespace detail

inline ClosedFormBall closed_form_ball_certificate(const std::string& which, int n) {
    using detail::q;
    if (n < 2) throw std::invalid_argument("closed form: need n >= 2");
    SPoly u = SPoly::u(), v = SPoly::v(), t = SPoly::t(), one(Scalar(1));
    SPoly s = u + v;
    ClosedFormBall c;
    c.ball_case = which;
    c.n = n;
    if (which == "i") {
        c.M = q(2);
        c.rho = q(1);
        c.r_squared = q(1);
        c.F = {detail::sym2(q(2, 5), q(-2, 5), q(2, 5)), ExactMatrix<Scalar>{{q(1)}}};
        c.F_expected = (one - u) * (one - v) * q(2, 5) + t;
        c.diagonal.push_back({one, {{q(3, 5), one - u}}, "diag.q0.Q"});
        c.diagonal.push_back({u * (one - u), {{q(2), one}}, "diag.q1.Q"});
        detail::ball_triple_common(c, q(3, 5), one - s * q(1, 2), q(7, 20), q(1), q(1, 2));
    } else if (which == "ii") {
        c.M = q(3);
        c.rho = q(4, 3);
        c.r_squared = q(4, 3);
        c.F = {detail::sym2(q(64, 81), q(-16, 27), q(4, 9)), ExactMatrix<Scalar>{{q(9, 8)}}};
        SPoly R(c.rho);
        c.diagonal.push_back({one, {{q(2), SPoly(q(7, 9)) - u * q(7, 12)}}, "diag.q0.Q"});
        c.diagonal.push_back({u * (R - u), {{q(9, 4), one}}, "diag.q1.Q"});
        detail::ball_triple_common(c, q(2), SPoly(q(7, 9)) - s * q(7, 24), q(113, 288), q(9, 8), q(9, 16));
    } else if (which == "iii") {
        Scalar rho = q(2 * n, n + 1);
        c.M = q(n + 1);
        c.rho = rho;
        c.r_squared = rho;
        c.F = {detail::sym2(rho, q(-1), q(n + 1, 2 * n)), ExactMatrix<Scalar>{{q((n + 1) * (n + 1), 4 * n)}}};
        Scalar a2 = q(static_cast<long>(n) * (n - 1), n + 1);
        SPoly R(rho);
        c.diagonal.push_back({one, {{a2, one - u * q(n + 1, 2 * n)}}, "diag.q0.Q"});
        c.diagonal.push_back({u * (R - u), {{q((n + 1) * (n + 1), 2 * n), one}}, "diag.q1.Q"});
        detail::ball_triple_common(c, a2, one - s * q(n + 1, 4 * n), q(n * n + 4 * n + 3, 16 * n),
                                   q((n + 1) * (n + 1), 4 * n), q((n + 1) * (n + 1), 8 * n));
    } else if (which == "iv") {
        if (n < 5) throw CaseUnsupported("case iv closed form needs n >= 5; use the rounding pipeline");
        Scalar N = q(n), m5 = q(n - 5), h = q(n - 5, 2 * 192);
        c.d = 2;
        c.M = q(2 * n);
        c.rho = q(2);
        c.r_squared = q(2);
        c.program_format = false;
        ExactMatrix<Scalar> F0(3, 3);
        c.F = {F0, detail::sym2(N, q(-n, 4), q(n, 16)), ExactMatrix<Scalar>{{q(n - 1, 16)}}};
        c.F_expected = t * N - t * s * (N * q(1, 4)) + u * v * t * (N * q(1, 16)) + t * t * (N * q(1, 16)) -
                       u * u * v * v * q(1, 16);
        SPoly uv = u * v, tu = t * u, tv = t * v, tt = t * t, w = u - v;
        std::vector<WeightedSquare> s1 = {
            {q(1, 14), tt * q(35, 144) - tu * q(151, 432) - tv * q(125, 432) + t * q(9, 4)},
            {q(25, 238), tt * q(25, 144) + tu * q(31, 432) + tv * q(119, 432)},
            {q(145, 238), tt * q(1, 16) + tu * q(1, 8)},
            {q(1, 21), tu * q(5, 16) + tv * q(25, 16) + uv * q(7, 4) - t * q(15, 4) - u * q(7, 2)},
            // the printed (n-5)/2 bracket is 192 times too large
            {h * q(5, 192), tt * q(3) - tu * q(2) + tv * q(8)},
            {h * q(1, 48), tt * q(3) - tu * q(8) - tv * q(10) + t * q(48)},
            {h * q(21, 64), tt + tu * q(2)},
            {h * q(1, 4), tu + tv * q(5) + uv * q(8) - t * q(12) - u * q(16)},
        };
        std::vector<WeightedSquare> s2 = {
            {q(1, 7982), t * q(65, 8) + u * q(307, 12)},
            {q(2095, 117888), t},
            {q(1, 858), u * q(63, 8) - v * q(65, 16)},
            {q(1, 22), u * q(5, 24) - v * q(25, 16) + SPoly(q(11, 2))},
            {m5 * q(1, 3110), t * q(15, 8) + u * q(311, 36)},
            {m5 * q(1461, 622), t * q(1, 24)},
            {m5 * q(1, 10), u * q(19, 72) - v * q(5, 16)},
            {m5 * q(3, 2), u * q(1, 72) - v * q(5, 48) + SPoly(q(1, 2))},
        };
        std::vector<WeightedSquare> s3 = {
            {q(7, 51), t * q(15, 16) + u * q(17, 16)},
            {q(1, 2), t * q(1, 8) + u * q(5, 16) - v * q(5, 12)},
            {q(5, 2), u * q(1, 16) + v * q(1, 12) - SPoly(q(1, 2))},
            {m5 * q(30, 430), t * q(7, 16) + u * q(43, 48)},
            {m5 * q(43, 430), t * q(1, 8) + u * q(5, 16) - v * q(5, 12)},
            {m5 * q(1837, 384 * 430), t},
            {m5 * q(215, 430), u * q(1, 16) + v * q(1, 12) - SPoly(q(1, 2))},
            {q(23, 51), t * q(1, 16)},
        };
        std::vector<WeightedSquare> s4 = {
            {m5 * q(1, 2), t * q(1, 16)},
            {m5 * q(1, 2), u * q(13, 96) + v * q(11, 96) - SPoly(q(1, 2))},
            {m5 * q(23, 2), w * q(1, 96)},
            {q(5, 512), t},
            {q(1), u * q(53, 288) + v * q(55, 288) - SPoly(q(3, 4))},
            {q(215), w * q(1, 288)},
        };
        std::vector<WeightedSquare> s5 = {
            {N, t * q(1, 16) - u * q(1, 24) - v * q(1, 12) + SPoly(q(1, 2))},
            {N, t * q(1, 16) + u * q(1, 8)},
            {N * q(1, 72), w},
        };
        SPoly two(q(2)), four(q(4));
        c.triple.push_back({one, s1, "q1"});
        c.triple.push_back({u * (two - u), s2, "q2"});
        c.triple.push_back({v * (two - v), s3, "q3"});
        c.triple.push_back({(t + four) * (four - t), s4, "q4"});
        c.triple.push_back({u * u + v * v - t * Scalar(2) - SPoly(q(8)), s5, "q5"});
    } else {
        throw std::invalid_argument("unknown ball case '" + which + "' (expected i, ii, iii, iv)");
    }
    return c;
}

inline SPoly closed_form_kernel(const ClosedFormBall& c) { return kernel_polynomial('Z', c.n, c.F); }

namespace detail {
// coordinates of root in the generators gen_i; throws when root is outside their span
inline std::vector<Scalar> coordinates(const SPoly& root, const std::vector<SPoly>& gen) {
    std::map<Mono3, int> rows;
    for (auto* p : {&root}) for (auto& [e, c] : p->terms()) rows.emplace(e, 0);
    for (auto& g : gen) for (auto& [e, c] : g.terms()) rows.emplace(e, 0);
    int k = 0;
    for (auto& [e, i] : rows) i = k++;
    int m = static_cast<int>(gen.size());
    ExactMatrix<Scalar> A(k, m + 1);
    for (int j = 0; j < m; ++j)
        for (auto& [e, c] : gen[j].terms()) A(rows[e], j) = c;
    for (auto& [e, c] : root.terms()) A(rows[e], m) = c;
    auto R = rref(A);
    std::vector<Scalar> x(m, Scalar(0));
    for (int i = 0; i < R.rank; ++i) {
        if (R.pivot_columns[i] == m) throw std::logic_error("square root not in the span of the block basis");
        x[R.pivot_columns[i]] = R.echelon(i, m);
    }
    return x;
}
} // namespace detail

// Exact feasible point of the generated ball program at degree c.d built from the SOS data.
inline ExactSolution closed_form_solution(const ClosedFormBall& c, const SdpProblem& p) {
    if (!c.program_format) throw CaseUnsupported("case " + c.ball_case + " is not in the program's multiplier format");
    auto plan = detail::ball_plan(c.rho, c.r_squared, c.d);
    ExactSolution X;
    X.ell = p.ell;
    for (int n : p.blocks) X.blocks.emplace_back(n, n);
    for (int k = 0; k < static_cast<int>(c.F.size()); ++k) X.blocks[block_index(p, "F" + std::to_string(k))] = c.F[k];
    std::map<std::string, const GramPart*> parts;
    for (auto* pl : {&plan.diag, &plan.triple})
        for (auto& s : pl->slots)
            for (auto& part : s.parts) parts[pl->name + "." + s.name + "." + part.name] = &part;
    for (auto* groups : {&c.diagonal, &c.triple})
        for (auto& g : *groups) {
            auto it = parts.find(g.block);
            if (it == parts.end()) throw std::logic_error("no block " + g.block + " at degree " + std::to_string(c.d));
            const GramPart& part = *it->second;
            std::vector<SPoly> gen = part.basis.monomials;
            if (part.name == "X2")
                for (auto& m : gen) m = (SPoly::u() - SPoly::v()) * m;
            auto& B = X.blocks[block_index(p, g.block)];
            for (auto& sq : g.squares) {
                auto x = detail::coordinates(sq.root, gen);
                for (int i = 0; i < B.rows(); ++i)
                    for (int j = 0; j < B.cols(); ++j) B(i, j) += sq.weight * x[i] * x[j];
            }
        }
    return X;
}

struct BallCertification {
    std::string ball_case;
    int n = 0;
    Scalar M;
    std::string method;
    bool kernel_matches = true;
    IdentityCheck diagonal, triple;
    bool f_psd = false;
    bool diagonal_bound = false;
    std::optional<Certificate> program;
    bool ok() const {
        bool base = kernel_matches && triple.ok && f_psd;
        if (program) return base && diagonal.ok && program->ok();
        return base && diagonal_bound;
    }
};

inline BallCertification certify_ball(const std::string& which, int n) {
    auto c = closed_form_ball_certificate(which, n);
    BallCertification r;
    r.ball_case = which;
    r.n = n;
    r.M = c.M;
    SPoly F = closed_form_kernel(c);
    if (c.F_expected) {
        r.kernel_matches = (F - *c.F_expected).is_zero();
    }
    r.f_psd = true;
    for (auto& B : c.F) r.f_psd = r.f_psd && is_psd_exact(B);
    r.triple = verify_sos_identity(-F - SPoly(Scalar(1)), c.triple);
    UPoly<Scalar> f = diagonal_ball(F) - UPoly<Scalar>(c.M - Scalar(1));
    if (c.program_format) {
        r.method = "program";
        r.diagonal = verify_sos_identity(-in_u(f), c.diagonal);
        SdpProblem p = to_feasibility(generate_ball_program_scaled(n, c.rho, c.r_squared, c.d), c.M);
        r.program = verify(p, closed_form_solution(c, p));
        r.diagonal_bound = r.diagonal.ok;
    } else {
        // f(rho) = 0 and f = (u - rho) g with g > 0 on [0, rho]
        r.method = "identity";
        r.diagonal.ok = true;
        UPoly<Scalar> lin(std::vector<Scalar>{-c.rho, Scalar(1)});
        if (is_zero(f(c.rho))) {
            UPoly<Scalar> g = f / lin;
            r.diagonal_bound = g(Scalar(0)) > Scalar(0) && count_roots(sturm_chain(g), Scalar(0), c.rho) == 0;
        } else {
            r.diagonal_bound = false;
            r.diagonal.first_difference = "f(rho) != 0";
        }
    }
    return r;
}

inline json ball_certification_to_json(const BallCertification& r) {
    json j;
    j["case"] = r.ball_case;
    j["n"] = r.n;
    j["M"] = exact_str(r.M);
    j["method"] = r.method;
    j["ok"] = r.ok();
    j["kernel_matches"] = r.kernel_matches;
    j["F_psd"] = r.f_psd;
    j["triple_identity"] = r.triple.ok;
    if (!r.triple.ok) j["triple_mismatch"] = r.triple.first_difference;
    j["diagonal_identity"] = r.diagonal.ok;
    if (!r.diagonal.ok) j["diagonal_mismatch"] = r.diagonal.first_difference;
    j["diagonal_bound"] = r.diagonal_bound;
    if (r.program) j["certificate"] = certificate_to_json(*r.program);
    return j;
}

} // namespace packsdp
