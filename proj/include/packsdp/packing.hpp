#pragma once

#include "exact_linalg.hpp"
#include "polynomial.hpp"
#include "sdp.hpp"

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace packsdp {

using SPoly = Poly3<Scalar>;

// Gegenbauer polynomial P_k^n, normalized P_k^n(1) = 1.
inline UPoly<Rational> gegenbauer(int n, int k) {
    if (n < 2) throw std::invalid_argument("gegenbauer: n must be >= 2");
    if (k < 0) throw std::invalid_argument("gegenbauer: k must be >= 0");
    UPoly<Rational> p0(Rational(1));
    if (k == 0) return p0;
    UPoly<Rational> p1 = UPoly<Rational>::x();
    for (int j = 2; j <= k; ++j) {
        UPoly<Rational> p2 = (UPoly<Rational>::x() * p1 * Rational(2 * j + n - 4) - p0 * Rational(j - 1)) *
                             Rational(1, j + n - 3);
        p0 = std::move(p1);
        p1 = std::move(p2);
    }
    return p1;
}

inline UPoly<Scalar> to_scalar(const UPoly<Rational>& p) {
    std::vector<Scalar> c;
    for (auto& x : p.coeffs()) c.emplace_back(x);
    return UPoly<Scalar>(c);
}

// univariate polynomial in u as a Poly3
inline SPoly in_u(const UPoly<Scalar>& p) {
    SPoly r;
    for (int i = 0; i <= p.degree(); ++i) r.add_term({i, 0, 0}, p.coeff(i));
    return r;
}

inline UPoly<Scalar> diagonal_cap(const SPoly& F) {
    return F.restrict(UPoly<Scalar>::x(), UPoly<Scalar>::x(), UPoly<Scalar>(Scalar(1)));
}

inline UPoly<Scalar> diagonal_ball(const SPoly& F) {
    return F.restrict(UPoly<Scalar>::x(), UPoly<Scalar>::x(), UPoly<Scalar>::monomial(2));
}

// ---------------------------------------------------------------- zonal matrices

struct ZonalMatrix {
    char kind = 'Z';
    int n = 0, k = 0, d = 0;
    std::vector<std::vector<SPoly>> entries;
    int size() const { return static_cast<int>(entries.size()); }
};

namespace detail {
inline SPoly monomial_uv(int i, int j) { return SPoly::mono({i, j, 0}); }

inline SPoly zonal_core(char kind, int n, int k) {
    SPoly u = SPoly::u(), v = SPoly::v(), t = SPoly::t();
    SPoly core;
    if (kind == 'Z') {
        auto c = gegenbauer(n, k);
        SPoly uv = u * v;
        for (int j = 0; j <= k; ++j)
            if (c.coeff(j) != 0) core += pow(t, j) * pow(uv, k - j) * Scalar(c.coeff(j));
    } else {
        auto c = gegenbauer(n - 1, k);
        SPoly w = t - u * v;
        SPoly q = (SPoly(Scalar(1)) - u * u) * (SPoly(Scalar(1)) - v * v);
        for (int j = 0; j <= k; ++j) {
            if (c.coeff(j) == 0) continue;
            if ((k - j) % 2) throw std::logic_error("gegenbauer parity");
            core += pow(w, j) * pow(q, (k - j) / 2) * Scalar(c.coeff(j));
        }
    }
    return core;
}

inline const std::vector<std::array<int, 3>>& s3_perms() {
    static const std::vector<std::array<int, 3>> p{{0, 1, 2}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}, {1, 2, 0}, {2, 0, 1}};
    return p;
}
} // namespace detail

// kind 'Y' and 'Z' give the u<->v symmetrized matrices, 'S' the full S3 average of Y.
inline ZonalMatrix zonal_matrix(char kind, int n, int k, int d) {
    if (k < 0 || k > d) throw std::invalid_argument("zonal_matrix: need 0 <= k <= d");
    if (kind != 'Y' && kind != 'Z' && kind != 'S') throw std::invalid_argument("zonal_matrix: kind must be Y, Z or S");
    if (kind != 'Z' && n < 3) throw std::invalid_argument("zonal_matrix: Y and S need n >= 3");
    ZonalMatrix z;
    z.kind = kind;
    z.n = n;
    z.k = k;
    z.d = d;
    int s = d - k + 1;
    SPoly core = detail::zonal_core(kind == 'Z' ? 'Z' : 'Y', n, k);
    z.entries.assign(s, std::vector<SPoly>(s));
    Scalar half(Rational(1, 2));
    for (int i = 0; i < s; ++i)
        for (int j = i; j < s; ++j) {
            SPoly e = (detail::monomial_uv(i, j) + detail::monomial_uv(j, i)) * core * half;
            if (kind == 'S') {
                SPoly acc;
                for (auto& p : detail::s3_perms()) acc += e.permuted(p);
                e = acc * Scalar(Rational(1, 6));
            }
            z.entries[i][j] = e;
            z.entries[j][i] = std::move(e);
        }
    return z;
}

inline SPoly pair_with(const ExactMatrix<Scalar>& F, const ZonalMatrix& Z) {
    SPoly r;
    for (int i = 0; i < Z.size(); ++i)
        for (int j = 0; j < Z.size(); ++j)
            if (!is_zero(F(i, j))) r += Z.entries[i][j] * F(i, j);
    return r;
}

// F = sum_k <F_k, zonal_k>
inline SPoly kernel_polynomial(char kind, int n, const std::vector<ExactMatrix<Scalar>>& Fk) {
    int d = static_cast<int>(Fk.size()) - 1;
    SPoly r;
    for (int k = 0; k <= d; ++k) r += pair_with(Fk[k], zonal_matrix(kind, n, k, d));
    return r;
}

// ---------------------------------------------------------------- invariant bases

struct SosBasis {
    std::string variant;  // univariate | cap-symmetric | S3-invariant | plain
    int delta = 0;
    std::vector<SPoly> monomials;
    std::vector<std::string> labels;
    int size() const { return static_cast<int>(monomials.size()); }
};

namespace detail {
// exponent triples (a,b,c) with w0*a + w1*b + w2*c <= delta, by weighted degree then lex descending
inline std::vector<std::array<int, 3>> weighted_exponents(int delta, std::array<int, 3> w) {
    std::vector<std::array<int, 3>> out;
    if (delta < 0) return out;
    for (int deg = 0; deg <= delta; ++deg) {
        std::vector<std::array<int, 3>> level;
        for (int a = 0; a * w[0] <= deg; ++a)
            for (int b = 0; a * w[0] + b * w[1] <= deg; ++b) {
                int rest = deg - a * w[0] - b * w[1];
                if (rest % w[2]) continue;
                level.push_back({a, b, rest / w[2]});
            }
        std::sort(level.begin(), level.end(), std::greater<>());
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

inline std::string power_label(const std::array<int, 3>& e, const std::array<const char*, 3>& names) {
    std::string s;
    for (int i = 0; i < 3; ++i) {
        if (e[i] == 0) continue;
        if (!s.empty()) s += "*";
        s += names[i];
        if (e[i] > 1) s += "^" + std::to_string(e[i]);
    }
    return s.empty() ? "1" : s;
}

inline SosBasis generator_basis(const std::string& variant, int delta, std::array<int, 3> w,
                                const std::array<SPoly, 3>& gens, const std::array<const char*, 3>& names) {
    SosBasis b;
    b.variant = variant;
    b.delta = delta;
    for (auto& e : weighted_exponents(delta, w)) {
        b.monomials.push_back(pow(gens[0], e[0]) * pow(gens[1], e[1]) * pow(gens[2], e[2]));
        b.labels.push_back(power_label(e, names));
    }
    return b;
}
} // namespace detail

inline SosBasis univariate_basis(int delta) {
    SosBasis b;
    b.variant = "univariate";
    b.delta = delta;
    for (int i = 0; i <= delta; ++i) {
        b.monomials.push_back(SPoly::mono({i, 0, 0}));
        b.labels.push_back(i == 0 ? "1" : (i == 1 ? "u" : "u^" + std::to_string(i)));
    }
    return b;
}

// basis of R[u+v, uv, t] up to total degree delta in (u,v,t)
inline SosBasis uv_symmetric_basis(int delta) {
    SPoly u = SPoly::u(), v = SPoly::v();
    return detail::generator_basis("cap-symmetric", delta, {1, 2, 1}, {u + v, u * v, SPoly::t()}, {"s", "p", "t"});
}

inline std::array<SPoly, 3> elementary_symmetric() {
    SPoly u = SPoly::u(), v = SPoly::v(), t = SPoly::t();
    return {u + v + t, u * v + u * t + v * t, u * v * t};
}

// basis of R[theta1, theta2, theta3] up to total degree delta in (u,v,t)
inline SosBasis s3_basis(int delta) {
    return detail::generator_basis("S3-invariant", delta, {1, 2, 3}, elementary_symmetric(), {"e1", "e2", "e3"});
}

inline SosBasis plain_basis(int delta) {
    return detail::generator_basis("plain", delta, {1, 1, 1}, {SPoly::u(), SPoly::v(), SPoly::t()}, {"u", "v", "t"});
}

inline SPoly pi2_polynomial() {
    auto [e1, e2, e3] = elementary_symmetric();
    return e1 * e1 * e2 * e2 - e2 * e2 * e2 * Scalar(4) - e1 * e1 * e1 * e3 * Scalar(4) + e1 * e2 * e3 * Scalar(18) -
           e3 * e3 * Scalar(27);
}

inline std::vector<std::vector<SPoly>> pi3_matrix() {
    auto [e1, e2, e3] = elementary_symmetric();
    SPoly off = e3 * Scalar(9) - e1 * e2;
    return {{e1 * e1 * Scalar(2) - e2 * Scalar(6), off}, {off, e2 * e2 * Scalar(2) - e1 * e3 * Scalar(6)}};
}

// ---------------------------------------------------------------- program assembly

// One PSD block of an SOS certificate: entry (i*m+a, j*m+b) is multiplier*factor*b_i*b_j*pi[a][b].
struct GramPart {
    std::string name;
    SPoly factor;
    SosBasis basis;
    std::vector<std::vector<SPoly>> pi;  // empty means [[1]]
    int kron() const { return pi.empty() ? 1 : static_cast<int>(pi.size()); }
    int size() const { return basis.size() * kron(); }
};

struct SosSlot {
    std::string name;
    SPoly multiplier;
    int delta = 0;
    std::vector<GramPart> parts;
};

// polynomial identity  sum(blocks) + constant = 0, one row per monomial orbit
struct IdentityPlan {
    std::string name;
    int symmetry = 0;  // 0 all monomials, 1 univariate, 2 u<->v orbits, 3 S3 orbits
    std::vector<SosSlot> slots;
};

inline std::vector<GramPart> sos_parts(const std::string& variant, int delta) {
    std::vector<GramPart> parts;
    if (variant == "univariate") {
        parts.push_back({"Q", SPoly(Scalar(1)), univariate_basis(delta), {}});
    } else if (variant == "cap-symmetric") {
        SPoly w = SPoly::u() - SPoly::v();
        parts.push_back({"X1", SPoly(Scalar(1)), uv_symmetric_basis(delta), {}});
        parts.push_back({"X2", w * w, uv_symmetric_basis(delta - 1), {}});
    } else if (variant == "S3-invariant") {
        parts.push_back({"P1", SPoly(Scalar(1)), s3_basis(delta), {}});
        parts.push_back({"P2", pi2_polynomial(), s3_basis(delta - 3), {}});
        parts.push_back({"P3", SPoly(Scalar(1)), s3_basis(delta - 2), pi3_matrix()});
    } else {
        parts.push_back({"Q", SPoly(Scalar(1)), plain_basis(delta), {}});
    }
    std::vector<GramPart> keep;
    for (auto& p : parts)
        if (p.basis.size() > 0) keep.push_back(std::move(p));
    return keep;
}

// shifted degree delta = d - floor(deg g / 2); slots with delta < 0 are left out
inline void add_slot(IdentityPlan& plan, const std::string& name, const SPoly& g, int d, const std::string& variant) {
    int delta = d - g.degree() / 2;
    if (delta < 0) return;
    SosSlot s;
    s.name = name;
    s.multiplier = g;
    s.delta = delta;
    s.parts = sos_parts(variant, delta);
    if (!s.parts.empty()) plan.slots.push_back(std::move(s));
}

struct ProgramOptions {
    bool symmetric = true;
    bool drop_dependent_rows = true;
    int sos_degree = 0;  // SOS degree bound; 0 means d
};

namespace detail {

inline bool canonical_monomial(const Mono3& e, int symmetry) {
    switch (symmetry) {
    case 1: return e[1] == 0 && e[2] == 0;
    case 2: return e[0] <= e[1];
    case 3: return e[0] <= e[1] && e[1] <= e[2];
    default: return true;
    }
}

class ProgramBuilder {
public:
    SdpProblem p;

    int add_block(const std::string& name, int size) {
        p.blocks.push_back(size);
        p.block_names.push_back(name);
        return static_cast<int>(p.blocks.size()) - 1;
    }

    int identity(const std::string& name, int symmetry) {
        ids_.push_back({name, symmetry, {}, {}});
        return static_cast<int>(ids_.size()) - 1;
    }

    // adds poly as the coefficient of X_block(i,j) in identity id
    void add(int id, int block, int i, int j, const SPoly& poly) {
        auto& I = ids_[id];
        for (auto& [e, c] : poly.terms())
            if (canonical_monomial(e, I.symmetry)) I.rows[e].push_back({block, std::min(i, j), std::max(i, j), c});
    }

    void add_constant(int id, const SPoly& poly) {
        auto& I = ids_[id];
        for (auto& [e, c] : poly.terms())
            if (canonical_monomial(e, I.symmetry)) I.constant[e] += c;
    }

    void add_slot_blocks(int id, const std::string& prefix, const SosSlot& slot) {
        for (auto& part : slot.parts) {
            int b = add_block(prefix + "." + slot.name + "." + part.name, part.size());
            SPoly mf = slot.multiplier * part.factor;
            int m = part.kron();
            int nb = part.basis.size();
            for (int i = 0; i < nb; ++i) {
                SPoly gi = mf * part.basis.monomials[i];
                for (int j = i; j < nb; ++j) {
                    SPoly gij = gi * part.basis.monomials[j];
                    for (int a = 0; a < m; ++a)
                        for (int c = 0; c < m; ++c) {
                            int I = i * m + a, J = j * m + c;
                            if (I > J) continue;
                            if (i == j && a > c) continue;
                            SPoly e = part.pi.empty() ? gij : gij * part.pi[a][c];
                            add(id, b, I, J, e);
                        }
                }
            }
        }
    }

    // removes the row of monomial e of identity id and returns its entries and constant
    std::pair<std::vector<SdpEntry>, Scalar> take_row(int id, const Mono3& e) {
        auto& I = ids_[id];
        std::vector<SdpEntry> ent;
        auto it = I.rows.find(e);
        if (it != I.rows.end()) {
            ent = std::move(it->second);
            I.rows.erase(it);
        }
        Scalar c(0);
        auto jt = I.constant.find(e);
        if (jt != I.constant.end()) {
            c = jt->second;
            I.constant.erase(jt);
        }
        return {merge(std::move(ent)), c};
    }

    SdpProblem finish(bool drop_dependent) {
        std::vector<int> offset(p.blocks.size() + 1, 0);
        for (std::size_t b = 0; b < p.blocks.size(); ++b)
            offset[b + 1] = offset[b] + p.blocks[b] * (p.blocks[b] + 1) / 2;
        auto var = [&](const SdpEntry& e) {
            int n = p.blocks[e.block];
            return offset[e.block] + e.i * n - e.i * (e.i - 1) / 2 + (e.j - e.i);
        };
        SparseEchelon<Scalar> ech(offset.back(), true);
        long dropped = 0;
        for (auto& I : ids_) {
            std::map<Mono3, bool> keys;
            for (auto& [e, r] : I.rows) keys[e] = true;
            for (auto& [e, c] : I.constant) keys[e] = true;
            for (auto& [e, unused] : keys) {
                SdpConstraint con;
                auto it = I.rows.find(e);
                if (it != I.rows.end()) con.entries = merge(std::move(it->second));
                auto jt = I.constant.find(e);
                con.rhs = jt == I.constant.end() ? Scalar(0) : -jt->second;
                con.label = I.name + ":" + mono_str(e);
                if (con.entries.empty()) {
                    if (!is_zero(con.rhs)) throw Inconsistent("identity " + con.label + " has no variables");
                    continue;
                }
                if (drop_dependent) {
                    SparseRow<Scalar> row;
                    for (auto& en : con.entries) row.emplace_back(var(en), en.i == en.j ? en.value : en.value * Scalar(2));
                    if (!ech.add_row(row, con.rhs)) {
                        ++dropped;
                        continue;
                    }
                }
                p.constraints.push_back(std::move(con));
            }
        }
        p.metadata["dropped_dependent_rows"] = dropped;
        return std::move(p);
    }

    static std::vector<SdpEntry> merge(std::vector<SdpEntry> ent) {
        std::map<std::array<int, 3>, Scalar> acc;
        for (auto& e : ent) acc[{e.block, e.i, e.j}] += e.value;
        std::vector<SdpEntry> out;
        for (auto& [k, v] : acc)
            if (!is_zero(v)) out.push_back({k[0], k[1], k[2], v});
        return out;
    }

private:
    struct Id {
        std::string name;
        int symmetry;
        std::map<Mono3, std::vector<SdpEntry>> rows;
        std::map<Mono3, Scalar> constant;
    };
    std::vector<Id> ids_;
};

inline json basis_labels(const std::vector<IdentityPlan>& plans) {
    json j = json::object();
    for (auto& pl : plans)
        for (auto& s : pl.slots)
            for (auto& part : s.parts) j[pl.name + "." + s.name + "." + part.name] = part.basis.labels;
    return j;
}

inline long plan_variables(const std::vector<int>& fixed_sizes, const std::vector<IdentityPlan>& plans) {
    long v = 0;
    for (int s : fixed_sizes) v += static_cast<long>(s) * (s + 1) / 2;
    for (auto& pl : plans)
        for (auto& s : pl.slots)
            for (auto& part : s.parts) v += static_cast<long>(part.size()) * (part.size() + 1) / 2;
    return v;
}

inline int sos_degree(int d, const ProgramOptions& opt) {
    if (opt.sos_degree != 0 && opt.sos_degree < d) throw DegreeTooSmall("sos_degree below d");
    return opt.sos_degree > 0 ? opt.sos_degree : d;
}

inline void check_degree(int d) {
    if (d < 1) throw DegreeTooSmall("degree d=" + std::to_string(d) + " leaves a multiplier with negative degree");
}

inline std::vector<int> f_sizes(int d) {
    std::vector<int> s;
    for (int k = 0; k <= d; ++k) s.push_back(d - k + 1);
    return s;
}

struct CapPlan {
    IdentityPlan diag, triple;
};

inline CapPlan cap_plan(const Scalar& cos_theta, const Scalar& cos_phi, int d, bool symmetric) {
    check_degree(d);
    SPoly u = SPoly::u(), v = SPoly::v(), t = SPoly::t(), one(Scalar(1));
    CapPlan cp;
    cp.diag = {"diag", 1, {}};
    add_slot(cp.diag, "q0", one, d, "univariate");
    add_slot(cp.diag, "q1", (u - SPoly(cos_phi)) * (one - u), d, "univariate");
    cp.triple = {"tri", symmetric ? 2 : 0, {}};
    std::string var = symmetric ? "cap-symmetric" : "plain";
    SPoly gu = (u - SPoly(cos_phi)) * (one - u), gv = (v - SPoly(cos_phi)) * (one - v);
    add_slot(cp.triple, "q1", one, d, var);
    add_slot(cp.triple, "q2", gu + gv, d, var);
    add_slot(cp.triple, "q3", gu * gv, d, var);
    add_slot(cp.triple, "q4", (t + one) * (SPoly(cos_theta) - t), d, var);
    add_slot(cp.triple, "q5", one + u * v * t * Scalar(2) - u * u - v * v - t * t, d, var);
    return cp;
}

inline CapPlan ball_plan(const Scalar& rho, const Scalar& r_squared, int d) {
    check_degree(d);
    SPoly u = SPoly::u(), v = SPoly::v(), t = SPoly::t(), one(Scalar(1)), R(rho);
    CapPlan cp;
    cp.diag = {"diag", 1, {}};
    add_slot(cp.diag, "q0", one, d, "univariate");
    add_slot(cp.diag, "q1", u * (R - u), d, "univariate");
    cp.triple = {"tri", 2, {}};
    add_slot(cp.triple, "q1", one, d, "cap-symmetric");
    add_slot(cp.triple, "q2", u * (R - u) + v * (R - v), d, "cap-symmetric");
    add_slot(cp.triple, "q3", u * (R - u) * v * (R - v), d, "cap-symmetric");
    add_slot(cp.triple, "q4", (t + u * v) * (u * v - t), d, "cap-symmetric");
    add_slot(cp.triple, "q5", u * u + v * v - t * Scalar(2) - SPoly(r_squared * Scalar(4)), d, "cap-symmetric");
    return cp;
}

inline long field_of(std::initializer_list<Scalar> xs) {
    long ell = 1;
    for (auto& x : xs)
        if (!x.is_rational()) {
            if (ell != 1 && ell != x.ell()) throw FieldMismatch("parameters from different quadratic fields");
            ell = x.ell();
        }
    return ell;
}

// diag identity: F(diag) - M + 1 + SOS = 0 with M eliminated through its constant row
inline SdpProblem build_two_point(const std::string& kind, int n, int d, const CapPlan& cp, char zonal,
                                  const std::function<UPoly<Scalar>(const SPoly&)>& diagonal, long ell,
                                  const ProgramOptions& opt) {
    ProgramBuilder B;
    std::vector<ZonalMatrix> Z;
    int diag = B.identity("diag", 1);
    int tri = B.identity("tri", cp.triple.symmetry);
    json fblocks = json::array();
    for (int k = 0; k <= d; ++k) {
        Z.push_back(zonal_matrix(zonal, n, k, d));
        int b = B.add_block("F" + std::to_string(k), d - k + 1);
        fblocks.push_back(b);
        for (int i = 0; i < Z[k].size(); ++i)
            for (int j = i; j < Z[k].size(); ++j) {
                B.add(diag, b, i, j, in_u(diagonal(Z[k].entries[i][j])));
                B.add(tri, b, i, j, Z[k].entries[i][j]);
            }
    }
    for (auto& s : cp.diag.slots) B.add_slot_blocks(diag, "diag", s);
    for (auto& s : cp.triple.slots) B.add_slot_blocks(tri, "tri", s);
    B.add_constant(tri, SPoly(Scalar(1)));
    auto [obj, c0] = B.take_row(diag, {0, 0, 0});
    B.p.objective = obj;
    B.p.objective_offset = Scalar(1);
    B.p.ell = ell;
    SdpProblem p = B.finish(opt.drop_dependent_rows);
    p.metadata["kind"] = kind;
    p.metadata["n"] = n;
    p.metadata["d"] = d;
    p.metadata["zonal"] = std::string(1, zonal);
    p.metadata["F_blocks"] = fblocks;
    p.metadata["symmetric"] = cp.triple.symmetry != 0;
    p.metadata["multiplier_degrees"] = "delta = d - floor(deg g / 2)";
    json deg = json::object();
    for (auto* pl : {&cp.diag, &cp.triple})
        for (auto& s : pl->slots) deg[pl->name + "." + s.name] = s.delta;
    p.metadata["sos_degrees"] = deg;
    p.metadata["basis"] = basis_labels({cp.diag, cp.triple});
    p.metadata["free_variables"] = p.num_variables() + 1;
    return p;
}

} // namespace detail

inline SdpProblem generate_cap_program(int n, const Scalar& cos_theta, const Scalar& cos_phi, int d,
                                       const ProgramOptions& opt = {}) {
    if (!(cos_theta > Scalar(-1) && cos_theta < Scalar(1))) throw std::invalid_argument("cap: need -1 < cos_theta < 1");
    if (!(cos_phi >= Scalar(-1) && cos_phi < Scalar(1))) throw std::invalid_argument("cap: need -1 <= cos_phi < 1");
    auto cp = detail::cap_plan(cos_theta, cos_phi, d, opt.symmetric);
    auto p = detail::build_two_point("cap", n, d, cp, 'Y', diagonal_cap, detail::field_of({cos_theta, cos_phi}), opt);
    p.metadata["cos_theta"] = exact_str(cos_theta);
    p.metadata["cos_phi"] = exact_str(cos_phi);
    return p;
}

// free scalar variables (block upper triangles plus M) without assembling the program
inline long cap_variable_count(int n, int d, bool symmetric) {
    (void)n;
    auto cp = detail::cap_plan(Scalar(Rational(1, 2)), Scalar(0), d, symmetric);
    return detail::plan_variables(detail::f_sizes(d), {cp.diag, cp.triple}) + 1;
}

// Ball of radius R - r scaled so that centers live in [0, rho] and the packing condition is |x-y|^2 >= 4 r^2.
inline SdpProblem generate_ball_program_scaled(int n, const Scalar& rho, const Scalar& r_squared, int d,
                                               const ProgramOptions& opt = {}) {
    if (!(rho > Scalar(0)) || !(r_squared > Scalar(0))) throw std::invalid_argument("ball: need rho > 0 and r^2 > 0");
    auto cp = detail::ball_plan(rho, r_squared, d);
    auto p = detail::build_two_point("ball", n, d, cp, 'Z', diagonal_ball, detail::field_of({rho, r_squared}), opt);
    p.metadata["rho"] = exact_str(rho);
    p.metadata["r_squared"] = exact_str(r_squared);
    return p;
}

inline SdpProblem generate_ball_program(int n, const Scalar& r, const Scalar& R, int d, const ProgramOptions& opt = {}) {
    if (!(r > Scalar(0) && r < R)) throw std::invalid_argument("ball: need 0 < r < R");
    auto p = generate_ball_program_scaled(n, R - r, r * r, d, opt);
    p.metadata["r"] = exact_str(r);
    p.metadata["R"] = exact_str(R);
    return p;
}

inline SdpProblem generate_threept_program(int n, const Scalar& cos_theta, int d, const ProgramOptions& opt = {}) {
    if (!(cos_theta > Scalar(-1) && cos_theta < Scalar(1))) throw std::invalid_argument("threept: need -1 < cos_theta < 1");
    if (n < 3) throw std::invalid_argument("threept: need n >= 3");
    detail::check_degree(d);
    int sd = detail::sos_degree(d, opt);
    SPoly u = SPoly::u(), v = SPoly::v(), t = SPoly::t(), one(Scalar(1)), ct(cos_theta);
    auto pp = [&](const SPoly& x) { return (x + one) * (ct - x); };
    IdentityPlan edge{"edge", 1, {}};
    add_slot(edge, "q0", one, sd, "univariate");
    add_slot(edge, "q1", pp(u), sd, "univariate");
    IdentityPlan delta{"delta", 3, {}};
    add_slot(delta, "q0", one, sd, "S3-invariant");
    add_slot(delta, "s1", pp(u) + pp(v) + pp(t), sd, "S3-invariant");
    add_slot(delta, "s2", pp(u) * pp(v) + pp(u) * pp(t) + pp(v) * pp(t), sd, "S3-invariant");
    add_slot(delta, "s3", pp(u) * pp(v) * pp(t), sd, "S3-invariant");
    add_slot(delta, "s4", one + u * v * t * Scalar(2) - u * u - v * v - t * t, sd, "S3-invariant");

    detail::ProgramBuilder B;
    int eid = B.identity("edge", 1);
    int did = B.identity("delta", 3);
    json fblocks = json::array(), ablocks = json::array();
    std::vector<SdpEntry> objective;
    for (int k = 0; k <= d; ++k) {
        auto Z = zonal_matrix('S', n, k, d);
        int b = B.add_block("F" + std::to_string(k), d - k + 1);
        fblocks.push_back(b);
        for (int i = 0; i < Z.size(); ++i)
            for (int j = i; j < Z.size(); ++j) {
                const SPoly& e = Z.entries[i][j];
                B.add(eid, b, i, j, in_u(diagonal_cap(e)) * Scalar(3));
                B.add(did, b, i, j, e);
                Scalar at1 = e(Scalar(1), Scalar(1), Scalar(1));
                if (!is_zero(at1)) objective.push_back({b, i, j, at1});
            }
    }
    for (int k = 0; k <= d; ++k) {
        int b = B.add_block("a" + std::to_string(k), 1);
        ablocks.push_back(b);
        B.add(eid, b, 0, 0, in_u(to_scalar(gegenbauer(n, k))));
        objective.push_back({b, 0, 0, Scalar(1)});
    }
    for (auto& s : edge.slots) B.add_slot_blocks(eid, "edge", s);
    for (auto& s : delta.slots) B.add_slot_blocks(did, "delta", s);
    B.add_constant(eid, one);
    B.p.objective = objective;
    B.p.objective_offset = Scalar(1);
    B.p.ell = detail::field_of({cos_theta});
    SdpProblem p = B.finish(opt.drop_dependent_rows);
    p.metadata["kind"] = "threept";
    p.metadata["n"] = n;
    p.metadata["d"] = d;
    p.metadata["zonal"] = "S";
    p.metadata["cos_theta"] = exact_str(cos_theta);
    p.metadata["F_blocks"] = fblocks;
    p.metadata["a_blocks"] = ablocks;
    p.metadata["multiplier_degrees"] = "delta = d - floor(deg g / 2)";
    json deg = json::object();
    for (auto* pl : {&edge, &delta})
        for (auto& s : pl->slots) deg[pl->name + "." + s.name] = s.delta;
    p.metadata["sos_degrees"] = deg;
    p.metadata["basis"] = detail::basis_labels({edge, delta});
    p.metadata["free_variables"] = p.num_variables() + 1;
    return p;
}

// ---------------------------------------------------------------- reading solutions back

inline int block_index(const SdpProblem& p, const std::string& name) {
    for (std::size_t i = 0; i < p.block_names.size(); ++i)
        if (p.block_names[i] == name) return static_cast<int>(i);
    throw NotFound("no block named " + name);
}

inline std::vector<ExactMatrix<Scalar>> f_blocks(const SdpProblem& p, const ExactSolution& X) {
    std::vector<ExactMatrix<Scalar>> F;
    for (auto& b : p.metadata.at("F_blocks")) F.push_back(X.blocks.at(b.get<int>()));
    return F;
}

inline std::vector<Scalar> a_coefficients(const SdpProblem& p, const ExactSolution& X) {
    std::vector<Scalar> a;
    if (!p.metadata.contains("a_blocks")) return a;
    for (auto& b : p.metadata.at("a_blocks")) a.push_back(X.blocks.at(b.get<int>())(0, 0));
    return a;
}

inline SPoly kernel_polynomial(const SdpProblem& p, const ExactSolution& X) {
    std::string z = p.metadata.at("zonal").get<std::string>();
    return kernel_polynomial(z[0], p.metadata.at("n").get<int>(), f_blocks(p, X));
}

} // namespace packsdp
