#pragma once

#include "exact_linalg.hpp"
#include "fields.hpp"
#include "hp_numeric.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace packsdp {

using Scalar = QuadraticNumber;
using json = nlohmann::ordered_json;

// Entry of a symmetric block matrix; i <= j and the value sits at (i,j) and (j,i).
struct SdpEntry {
    int block = 0, i = 0, j = 0;
    Scalar value;
};

struct SdpConstraint {
    std::vector<SdpEntry> entries;
    Scalar rhs;
    std::string label;
};

// minimize <C, X> + offset subject to <A_j, X> = b_j, X block diagonal and PSD
struct SdpProblem {
    std::vector<int> blocks;
    std::vector<SdpEntry> objective;
    Scalar objective_offset;
    std::vector<SdpConstraint> constraints;
    long ell = 1;
    json metadata = json::object();
    std::vector<std::string> block_names;

    int num_blocks() const { return static_cast<int>(blocks.size()); }
    int num_constraints() const { return static_cast<int>(constraints.size()); }
    // scalar degrees of freedom in the upper triangles of all blocks
    long num_variables() const {
        long s = 0;
        for (int n : blocks) s += static_cast<long>(n) * (n + 1) / 2;
        return s;
    }
    bool has_objective() const { return !objective.empty(); }
};

struct NumericSolution {
    std::vector<HpMatrix> blocks;
    long precision_bits = HpFloat::default_precision;
};

struct ExactSolution {
    std::vector<ExactMatrix<Scalar>> blocks;
    long ell = 1;
};

inline Scalar entry_contribution(const SdpEntry& e, const ExactMatrix<Scalar>& X) {
    if (e.i == e.j) return e.value * X(e.i, e.i);
    return e.value * X(e.i, e.j) * Scalar(2);
}

inline Scalar trace_product(const std::vector<SdpEntry>& entries, const ExactSolution& X) {
    Scalar s(0);
    for (auto& e : entries) s += entry_contribution(e, X.blocks[e.block]);
    return s;
}

inline HpFloat trace_product(const std::vector<SdpEntry>& entries, const NumericSolution& X) {
    HpFloat s(X.precision_bits);
    for (auto& e : entries) {
        HpFloat v = approx_value(e.value, X.precision_bits);
        const HpFloat& x = X.blocks[e.block](e.i, e.j);
        if (e.i != e.j) v *= 2L;
        s.add_mul(v, x);
    }
    return s;
}

// Pins the objective: adds sum tr(C_i X_i) = value - offset and drops the objective.
inline SdpProblem to_feasibility(const SdpProblem& p, const Scalar& objective_value) {
    SdpProblem q = p;
    SdpConstraint c;
    c.entries = p.objective;
    c.rhs = objective_value - p.objective_offset;
    c.label = "objective";
    q.constraints.push_back(std::move(c));
    q.objective.clear();
    q.objective_offset = Scalar(0);
    q.metadata["pinned_value"] = exact_str(objective_value);
    return q;
}

struct ResidualReport {
    Scalar max_abs;
    std::vector<Scalar> per_constraint;
};

inline ResidualReport residuals(const SdpProblem& p, const ExactSolution& X) {
    ResidualReport r;
    r.max_abs = Scalar(0);
    for (auto& c : p.constraints) {
        Scalar v = trace_product(c.entries, X) - c.rhs;
        Scalar a = exact_sign(v) < 0 ? -v : v;
        if (a > r.max_abs) r.max_abs = a;
        r.per_constraint.push_back(std::move(v));
    }
    return r;
}

inline HpFloat max_residual(const SdpProblem& p, const NumericSolution& X) {
    HpFloat worst(X.precision_bits);
    for (auto& c : p.constraints) {
        HpFloat v = abs(trace_product(c.entries, X) - approx_value(c.rhs, X.precision_bits));
        if (v > worst) worst = v;
    }
    return worst;
}

inline NumericSolution to_numeric(const ExactSolution& X, long prec) {
    NumericSolution s;
    s.precision_bits = prec;
    for (auto& B : X.blocks) {
        HpMatrix M(B.rows(), B.cols(), prec);
        for (int i = 0; i < B.rows(); ++i)
            for (int j = 0; j < B.cols(); ++j) M(i, j) = approx_value(B(i, j), prec);
        s.blocks.push_back(std::move(M));
    }
    return s;
}

// ---------------------------------------------------------------- JSON

inline json entry_to_json(const SdpEntry& e) { return json::array({e.block, e.i, e.j, exact_str(e.value)}); }

inline SdpEntry entry_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) throw ParseError("entry must be [block, i, j, value]");
    SdpEntry e;
    e.block = j[0].get<int>();
    e.i = j[1].get<int>();
    e.j = j[2].get<int>();
    if (e.i > e.j) std::swap(e.i, e.j);
    e.value = parse_quadratic(j[3].get<std::string>());
    return e;
}

inline json problem_to_json(const SdpProblem& p) {
    json j;
    j["format"] = "packsdp-problem";
    j["field_ell"] = p.ell;
    j["blocks"] = p.blocks;
    if (!p.block_names.empty()) j["block_names"] = p.block_names;
    json obj;
    obj["offset"] = exact_str(p.objective_offset);
    obj["entries"] = json::array();
    for (auto& e : p.objective) obj["entries"].push_back(entry_to_json(e));
    j["objective"] = obj;
    json cons = json::array();
    for (auto& c : p.constraints) {
        json cj;
        if (!c.label.empty()) cj["label"] = c.label;
        cj["rhs"] = exact_str(c.rhs);
        cj["entries"] = json::array();
        for (auto& e : c.entries) cj["entries"].push_back(entry_to_json(e));
        cons.push_back(cj);
    }
    j["constraints"] = cons;
    j["metadata"] = p.metadata;
    return j;
}

inline SdpProblem problem_from_json(const json& j) {
    SdpProblem p;
    try {
        p.ell = j.value("field_ell", 1L);
        p.blocks = j.at("blocks").get<std::vector<int>>();
        if (j.contains("block_names")) p.block_names = j["block_names"].get<std::vector<std::string>>();
        if (j.contains("objective")) {
            const auto& o = j["objective"];
            p.objective_offset = parse_quadratic(o.value("offset", std::string("0")));
            for (auto& e : o.at("entries")) p.objective.push_back(entry_from_json(e));
        }
        for (auto& cj : j.at("constraints")) {
            SdpConstraint c;
            c.label = cj.value("label", std::string());
            c.rhs = parse_quadratic(cj.at("rhs").get<std::string>());
            for (auto& e : cj.at("entries")) c.entries.push_back(entry_from_json(e));
            p.constraints.push_back(std::move(c));
        }
        if (j.contains("metadata")) p.metadata = j["metadata"];
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("problem JSON: ") + ex.what());
    }
    for (auto& c : p.constraints)
        for (auto& e : c.entries)
            if (e.block < 0 || e.block >= p.num_blocks() || e.j >= p.blocks[e.block])
                throw ParseError("entry outside block structure");
    return p;
}

inline json solution_to_json(const NumericSolution& s) {
    json j;
    j["kind"] = "numerical";
    j["precision_bits"] = s.precision_bits;
    j["blocks"] = json::array();
    j["entries"] = json::array();
    int digits = static_cast<int>(s.precision_bits * 0.30103) + 3;
    for (auto& B : s.blocks) {
        j["blocks"].push_back(B.rows());
        json e = json::array();
        for (int i = 0; i < B.rows(); ++i)
            for (int k = 0; k <= i; ++k) e.push_back(B(i, k).to_string(digits));
        j["entries"].push_back(e);
    }
    return j;
}

inline json solution_to_json(const ExactSolution& s) {
    json j;
    j["kind"] = "exact";
    j["field_ell"] = s.ell;
    j["blocks"] = json::array();
    j["entries"] = json::array();
    for (auto& B : s.blocks) {
        j["blocks"].push_back(B.rows());
        json e = json::array();
        for (int i = 0; i < B.rows(); ++i)
            for (int k = 0; k <= i; ++k) e.push_back(exact_str(B(i, k)));
        j["entries"].push_back(e);
    }
    return j;
}

inline NumericSolution numeric_solution_from_json(const json& j, long prec = 0) {
    NumericSolution s;
    try {
        s.precision_bits = prec > 0 ? prec : j.value("precision_bits", static_cast<long>(HpFloat::default_precision));
        auto sizes = j.at("blocks").get<std::vector<int>>();
        const auto& ent = j.at("entries");
        if (ent.size() != sizes.size()) throw ParseError("solution: blocks/entries length mismatch");
        for (std::size_t b = 0; b < sizes.size(); ++b) {
            int n = sizes[b];
            if (static_cast<int>(ent[b].size()) != n * (n + 1) / 2) throw ParseError("solution: wrong entry count");
            HpMatrix M(n, n, s.precision_bits);
            std::size_t idx = 0;
            for (int i = 0; i < n; ++i)
                for (int k = 0; k <= i; ++k) {
                    const auto& v = ent[b][idx++];
                    HpFloat x = v.is_string() ? HpFloat(v.get<std::string>(), s.precision_bits)
                                              : HpFloat(v.get<double>(), s.precision_bits);
                    if (!x.is_finite()) throw ParseError("solution: entry is not a finite number");
                    M(i, k) = x;
                    M(k, i) = x;
                }
            s.blocks.push_back(std::move(M));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("solution JSON: ") + ex.what());
    }
    return s;
}

inline ExactSolution exact_solution_from_json(const json& j) {
    ExactSolution s;
    try {
        s.ell = j.value("field_ell", 1L);
        auto sizes = j.at("blocks").get<std::vector<int>>();
        const auto& ent = j.at("entries");
        if (ent.size() != sizes.size()) throw ParseError("solution: blocks/entries length mismatch");
        for (std::size_t b = 0; b < sizes.size(); ++b) {
            int n = sizes[b];
            if (static_cast<int>(ent[b].size()) != n * (n + 1) / 2) throw ParseError("solution: wrong entry count");
            ExactMatrix<Scalar> M(n, n);
            std::size_t idx = 0;
            for (int i = 0; i < n; ++i)
                for (int k = 0; k <= i; ++k) {
                    Scalar x = parse_quadratic(ent[b][idx++].get<std::string>());
                    M(i, k) = x;
                    M(k, i) = x;
                }
            s.blocks.push_back(std::move(M));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("solution JSON: ") + ex.what());
    }
    return s;
}

// ---------------------------------------------------------------- SDPA sparse format

// Writes min <C,X> s.t. <A_j,X> = b_j as the SDPA dual form (F0 = -C, F_j = A_j, c = b).
inline std::string write_sdpa(const SdpProblem& p, int digits = 40) {
    auto dec = [&](const Scalar& x) {
        if (!x.is_rational()) throw LossyField("entry " + x.str() + " is not rational");
        if (x.a().get_den() == 1) return x.a().get_str();
        return HpFloat(x.a(), static_cast<long>(digits * 3.33) + 16).to_string(digits);
    };
    std::ostringstream os;
    os << "\"packsdp problem\"\n";
    os << p.num_constraints() << "\n" << p.num_blocks() << "\n";
    for (std::size_t b = 0; b < p.blocks.size(); ++b) os << (b ? " " : "") << p.blocks[b];
    os << "\n";
    for (int j = 0; j < p.num_constraints(); ++j) os << (j ? " " : "") << dec(p.constraints[j].rhs);
    os << "\n";
    for (auto& e : p.objective)
        if (!is_zero(e.value)) os << 0 << " " << e.block + 1 << " " << e.i + 1 << " " << e.j + 1 << " " << dec(-e.value) << "\n";
    for (int j = 0; j < p.num_constraints(); ++j)
        for (auto& e : p.constraints[j].entries)
            if (!is_zero(e.value))
                os << j + 1 << " " << e.block + 1 << " " << e.i + 1 << " " << e.j + 1 << " " << dec(e.value) << "\n";
    return os.str();
}

inline SdpProblem read_sdpa(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    std::vector<std::string> tokens;
    std::vector<int> token_line;
    while (std::getline(is, line)) {
        ++lineno;
        auto c = line.find_first_of("\"*");
        if (c != std::string::npos) line = line.substr(0, c);
        for (char& ch : line)
            if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
        std::istringstream ls(line);
        std::string t;
        while (ls >> t) {
            tokens.push_back(t);
            token_line.push_back(lineno);
        }
    }
    std::size_t pos = 0;
    auto next = [&]() -> const std::string& {
        if (pos >= tokens.size()) throw ParseError("unexpected end of SDPA input at line " + std::to_string(lineno));
        return tokens[pos++];
    };
    auto next_int = [&]() {
        const std::string& t = next();
        try {
            return std::stoi(t);
        } catch (...) {
            throw ParseError("expected integer '" + t + "' at line " + std::to_string(token_line[pos - 1]));
        }
    };
    auto next_val = [&]() {
        const std::string& t = next();
        try {
            return Scalar(parse_rational(t));
        } catch (const ParseError&) {
            // exponent notation
            try {
                HpFloat f(t, 256);
                if (!f.is_finite()) throw 0;
                return Scalar(f.to_rational());
            } catch (...) {
                throw ParseError("bad number '" + t + "' at line " + std::to_string(token_line[pos - 1]));
            }
        }
    };
    SdpProblem p;
    int m = next_int();
    int nb = next_int();
    if (m < 0 || nb <= 0) throw ParseError("bad SDPA header");
    for (int b = 0; b < nb; ++b) {
        int s = next_int();
        p.blocks.push_back(s < 0 ? -s : s);
    }
    p.constraints.resize(m);
    for (int j = 0; j < m; ++j) p.constraints[j].rhs = next_val();
    while (pos < tokens.size()) {
        int k = next_int(), b = next_int(), i = next_int(), jj = next_int();
        Scalar v = next_val();
        if (b < 1 || b > nb || i < 1 || jj < 1 || i > p.blocks[b - 1] || jj > p.blocks[b - 1] || k < 0 || k > m)
            throw ParseError("index out of range at line " + std::to_string(token_line[pos - 1]));
        SdpEntry e{b - 1, std::min(i, jj) - 1, std::max(i, jj) - 1, v};
        if (k == 0) {
            e.value = -e.value;
            p.objective.push_back(e);
        } else {
            p.constraints[k - 1].entries.push_back(e);
        }
    }
    return p;
}

// Primal matrix of an SDPA result file (the "yMat" section, since problems are written in dual form).
inline NumericSolution read_sdpa_result(const std::string& text, const std::vector<int>& blocks, long prec) {
    auto at = text.find("yMat");
    if (at == std::string::npos) throw ParseError("SDPA result: no yMat section");
    std::size_t pos = text.find('{', at);
    if (pos == std::string::npos) throw ParseError("SDPA result: yMat has no body");
    ++pos;
    auto skip = [&] {
        while (pos < text.size() && (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == ',')) ++pos;
    };
    auto expect = [&](char c) {
        skip();
        if (pos >= text.size() || text[pos] != c)
            throw ParseError(std::string("SDPA result: expected '") + c + "' at offset " + std::to_string(pos));
        ++pos;
    };
    auto number = [&] {
        skip();
        std::size_t end = pos;
        while (end < text.size() && (std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '.' ||
                                     text[end] == '-' || text[end] == '+'))
            ++end;
        if (end == pos) throw ParseError("SDPA result: expected a number at offset " + std::to_string(pos));
        HpFloat x(text.substr(pos, end - pos), prec);
        if (!x.is_finite()) throw ParseError("SDPA result: bad number '" + text.substr(pos, end - pos) + "'");
        pos = end;
        return x;
    };
    NumericSolution s;
    s.precision_bits = prec;
    for (int n : blocks) {
        HpMatrix M(n, n, prec);
        expect('{');
        skip();
        if (pos < text.size() && text[pos] == '{') {
            for (int i = 0; i < n; ++i) {
                expect('{');
                for (int k = 0; k < n; ++k) M(i, k) = number();
                expect('}');
            }
        } else {
            for (int i = 0; i < n; ++i) M(i, i) = number();
        }
        expect('}');
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < i; ++k) {
                HpFloat a = (M(i, k) + M(k, i)) / 2L;
                M(i, k) = a;
                M(k, i) = a;
            }
        s.blocks.push_back(std::move(M));
    }
    return s;
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

} // namespace packsdp
