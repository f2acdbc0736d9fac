#pragma once

#include "certificates.hpp"
#include "packing.hpp"
#include "rounding.hpp"
#include "sdp.hpp"
#include "slackness.hpp"
#include "solver.hpp"

#include <chrono>
#include <cstdint>
#include <ctime>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

namespace packsdp {

inline constexpr const char* tool_version = "0.3.0";

inline std::string fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

struct GeneratorConfig {
    std::string problem;
    int n = 0, d = 0;
    std::optional<Scalar> cos_theta, cos_phi, r, R, rho, r_squared, pin_value;
    long field_ell = 1;
    int sos_degree = 0;
    bool symmetric = true;
};

inline GeneratorConfig config_from_json(const json& j) {
    GeneratorConfig c;
    auto need = [&](const char* k) -> const json& {
        if (!j.contains(k)) throw std::invalid_argument(std::string("config: missing '") + k + "'");
        return j.at(k);
    };
    auto scalar = [&](const char* k) -> std::optional<Scalar> {
        if (!j.contains(k)) return std::nullopt;
        const json& v = j.at(k);
        if (v.is_number_integer()) return Scalar(Rational(v.get<long>()));
        if (!v.is_string()) throw std::invalid_argument(std::string("config: '") + k + "' must be an exact string");
        try {
            return parse_quadratic(v.get<std::string>());
        } catch (const Error& e) {
            throw std::invalid_argument(std::string("config: '") + k + "': " + e.what());
        }
    };
    try {
        c.problem = need("problem").get<std::string>();
        c.n = need("n").get<int>();
        c.d = need("d").get<int>();
        c.field_ell = j.value("field_ell", 1L);
        c.sos_degree = j.value("sos_degree", 0);
        c.symmetric = j.value("symmetric", true);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    c.cos_theta = scalar("cos_theta");
    c.cos_phi = scalar("cos_phi");
    c.r = scalar("r");
    c.R = scalar("R");
    c.rho = scalar("rho");
    c.r_squared = scalar("r_squared");
    c.pin_value = scalar("pin_value");
    if (c.problem != "cap" && c.problem != "threept" && c.problem != "ball")
        throw std::invalid_argument("config: problem must be cap, threept or ball");
    if (c.n < 2) throw std::invalid_argument("config: n must be at least 2");
    if (c.field_ell < 1) throw std::invalid_argument("config: field_ell must be positive");
    if (c.problem != "ball" && !c.cos_theta) throw std::invalid_argument("config: missing 'cos_theta'");
    if (c.problem == "cap" && !c.cos_phi) throw std::invalid_argument("config: missing 'cos_phi'");
    if (c.problem == "ball" && !(c.r && c.R) && !(c.rho && c.r_squared))
        throw std::invalid_argument("config: ball needs r and R, or rho and r_squared");
    return c;
}

inline SdpProblem generate_from_config(const GeneratorConfig& c) {
    ProgramOptions opt;
    opt.symmetric = c.symmetric;
    opt.sos_degree = c.sos_degree;
    SdpProblem p;
    if (c.problem == "cap")
        p = generate_cap_program(c.n, *c.cos_theta, *c.cos_phi, c.d, opt);
    else if (c.problem == "threept")
        p = generate_threept_program(c.n, *c.cos_theta, c.d, opt);
    else if (c.r && c.R)
        p = generate_ball_program(c.n, *c.r, *c.R, c.d, opt);
    else
        p = generate_ball_program_scaled(c.n, *c.rho, *c.r_squared, c.d, opt);
    if (c.field_ell != 1) {
        if (p.ell != 1 && p.ell != c.field_ell)
            throw FieldMismatch("data lives in Q[sqrt(" + std::to_string(p.ell) + ")], config asks for field_ell " +
                                std::to_string(c.field_ell));
        p.ell = c.field_ell;
    }
    p.metadata["field_ell"] = p.ell;
    if (c.pin_value) p.metadata["pin_value"] = exact_str(*c.pin_value);
    return p;
}

// ---------------------------------------------------------------- manifest

struct RunManifest {
    std::string command;
    json parameters = json::object();
    json inputs = json::object();  // path -> hash
    json precision = json::object();
    json outcome = json::object();
    json outputs = json::array();
    std::string started, finished;

    // covers everything that determines the outputs; timestamps are left out
    std::string hash() const {
        json j;
        j["command"] = command;
        j["parameters"] = parameters;
        j["inputs"] = inputs;
        j["version"] = tool_version;
        j["precision"] = precision;
        return fnv1a64(j.dump());
    }

    json to_json() const {
        json j;
        j["manifest_hash"] = hash();
        j["tool"] = "packsdp";
        j["version"] = tool_version;
        j["command"] = command;
        j["parameters"] = parameters;
        j["inputs"] = inputs;
        j["precision"] = precision;
        j["outcome"] = outcome;
        j["outputs"] = outputs;
        j["timestamps"] = {{"started", started}, {"finished", finished}};
        return j;
    }
};

inline std::string utc_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

// ---------------------------------------------------------------- commands

struct CommandOptions {
    std::string config, problem, solution, out, manifest, certificate, report, sdpa, pin, tolerance;
    std::string format = "auto";
    std::string max_den = "2^64";
    std::string ball_case;
    long precision = 512;
    long field_ell = 0;  // 0: take it from the problem
    int n = 0;
    int threads = 1;
};

inline json read_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(what + ": " + e.what());
    }
}

namespace detail {

inline Integer parse_bound(const std::string& s) {
    auto caret = s.find('^');
    try {
        if (caret == std::string::npos) return Integer(s);
        Integer base(s.substr(0, caret));
        unsigned long e = std::stoul(s.substr(caret + 1));
        Integer r;
        mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
        return r;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad bound '" + s + "' (use an integer or b^e)");
    }
}

class Runner {
public:
    Runner(std::string cmd, const CommandOptions& o) : o_(o) {
        m_.command = std::move(cmd);
        m_.started = utc_now();
    }

    void param(const std::string& k, const json& v) { m_.parameters[k] = v; }
    void input(const std::string& path, const std::string& content) { m_.inputs[path] = fnv1a64(content); }
    void precision(const std::string& k, const json& v) { m_.precision[k] = v; }

    std::string read(const std::string& path) {
        if (path.empty()) throw std::invalid_argument(m_.command + ": missing input path");
        std::string s = read_file(path);
        input(path, s);
        return s;
    }

    void write(const std::string& path, json j) {
        if (path.empty()) return;
        j["manifest_hash"] = m_.hash();
        write_file(path, j.dump(1) + "\n");
        m_.outputs.push_back(path);
    }

    void write_text(const std::string& path, const std::string& text) {
        if (path.empty()) return;
        write_file(path, text);
        m_.outputs.push_back(path);
    }

    int finish(bool ok, json details = json::object()) {
        m_.finished = utc_now();
        m_.outcome = std::move(details);
        m_.outcome["ok"] = ok;
        std::string path = o_.manifest;
        if (path.empty()) path = (o_.out.empty() ? std::string("packsdp") : o_.out) + ".manifest.json";
        write_file(path, m_.to_json().dump(1) + "\n");
        return ok ? 0 : 1;
    }

    RunManifest& manifest() { return m_; }

private:
    const CommandOptions& o_;
    RunManifest m_;
};

inline Scalar pin_value(const CommandOptions& o, const SdpProblem& p) {
    if (!o.pin.empty()) return parse_quadratic(o.pin);
    if (p.metadata.contains("pin_value")) return parse_quadratic(p.metadata.at("pin_value").get<std::string>());
    if (p.metadata.contains("pinned_value")) return parse_quadratic(p.metadata.at("pinned_value").get<std::string>());
    throw std::invalid_argument("no pin value: pass --pin or set pin_value in the config");
}

inline SolverOptions solver_options(const CommandOptions& o, long prec, std::ostream& log) {
    SolverOptions so;
    so.precision_bits = prec;
    if (!o.tolerance.empty()) {
        HpFloat tol(o.tolerance, 64);
        if (!tol.is_finite() || tol.sign() <= 0 || !(tol < HpFloat(1L, 64)))
            throw std::invalid_argument("tolerance must be a number in (0, 1)");
        so.residual_exponent = -log2(tol).to_double() / static_cast<double>(prec);
    }
    so.log = [&log](const std::string& s) { log << s << "\n"; };
    return so;
}

inline SdpProblem load_problem(Runner& R, const std::string& path) {
    return problem_from_json(read_json_text(R.read(path), path));
}

} // namespace detail

inline int command_generate(const CommandOptions& o, std::ostream& log) {
    detail::Runner R("generate", o);
    json cfgj = read_json_text(R.read(o.config), o.config);
    R.param("config", cfgj);
    auto cfg = config_from_json(cfgj);
    SdpProblem p = generate_from_config(cfg);
    if (o.out.empty()) throw std::invalid_argument("generate: --out is required");
    R.write(o.out, problem_to_json(p));
    if (!o.sdpa.empty()) R.write_text(o.sdpa, write_sdpa(p));
    log << "blocks " << p.num_blocks() << " constraints " << p.num_constraints() << " free variables "
        << p.metadata.at("free_variables") << "\n";
    return R.finish(true, {{"blocks", p.blocks}, {"constraints", p.num_constraints()},
                           {"free_variables", p.metadata.at("free_variables")}});
}

inline int command_solve(const CommandOptions& o, std::ostream& log) {
    detail::Runner R("solve", o);
    SdpProblem p = detail::load_problem(R, o.problem);
    R.precision("bits", o.precision);
    R.param("tolerance", o.tolerance);
    R.param("threads", o.threads);
    auto res = solve_sdp_hp(p, detail::solver_options(o, o.precision, log));
    json j = solution_to_json(res.X);
    j["status"] = res.status;
    j["primal_objective"] = res.primal_objective.to_string(40);
    j["dual_objective"] = res.dual_objective.to_string(40);
    R.write(o.out, j);
    log << res.status << " objective " << res.primal_objective.to_string(30) << " after " << res.iterations
        << " iterations\n";
    return R.finish(true, {{"status", res.status},
                           {"iterations", res.iterations},
                           {"primal_objective", res.primal_objective.to_string(40)}});
}

inline int command_import(const CommandOptions& o, std::ostream& log) {
    detail::Runner R("import", o);
    SdpProblem p = detail::load_problem(R, o.problem);
    std::string text = R.read(o.solution);
    R.precision("bits", o.precision);
    std::string fmt = o.format;
    if (fmt == "auto") fmt = text.find("yMat") != std::string::npos ? "sdpa" : "json";
    NumericSolution X = fmt == "sdpa" ? read_sdpa_result(text, p.blocks, o.precision)
                                      : numeric_solution_from_json(read_json_text(text, o.solution), o.precision);
    if (static_cast<int>(X.blocks.size()) != p.num_blocks()) throw ParseError("import: block count does not match problem");
    for (int b = 0; b < p.num_blocks(); ++b)
        if (X.blocks[b].rows() != p.blocks[b]) throw ParseError("import: block " + std::to_string(b) + " has the wrong size");
    HpFloat res = max_residual(p, X);
    R.write(o.out, solution_to_json(X));
    log << "imported " << X.blocks.size() << " blocks, max residual " << res.to_string(6) << "\n";
    return R.finish(true, {{"format", fmt}, {"max_residual", res.to_string(6)}});
}

inline int command_round(const CommandOptions& o, std::ostream& log) {
    detail::Runner R("round", o);
    SdpProblem p = detail::load_problem(R, o.problem);
    NumericSolution X = numeric_solution_from_json(read_json_text(R.read(o.solution), o.solution), o.precision);
    Scalar M = detail::pin_value(o, p);
    SdpProblem q = to_feasibility(p, M);
    RoundingConfig cfg;
    cfg.precision_bits = o.precision;
    cfg.max_denominator = detail::parse_bound(o.max_den);
    cfg.field_ell = o.field_ell > 0 ? o.field_ell : p.ell;
    R.param("pin", exact_str(M));
    R.param("max_den", o.max_den);
    R.param("field_ell", cfg.field_ell);
    R.precision("bits", o.precision);
    auto resolve = [&](long prec) {
        auto res = solve_sdp_hp(p, detail::solver_options(o, prec, log));
        return res.X;
    };
    auto rr = round_with_retries(q, X, cfg, resolve, {}, [&](const std::string& s) { log << s << "\n"; });
    R.write(o.out, solution_to_json(rr.X));
    R.write(o.certificate, certificate_to_json(rr.certificate));
    bool ok = rr.certificate.ok();
    log << (ok ? "certified" : "certificate FAILED") << " (attempts " << rr.attempts << ")\n";
    return R.finish(ok, {{"attempts", rr.attempts}, {"linear_ok", rr.certificate.linear_ok}, {"pin", exact_str(M)}});
}

inline int command_verify(const CommandOptions& o, std::ostream& log) {
    detail::Runner R("verify", o);
    SdpProblem p = detail::load_problem(R, o.problem);
    ExactSolution X = exact_solution_from_json(read_json_text(R.read(o.solution), o.solution));
    bool pinned = !o.pin.empty() || p.metadata.contains("pin_value");
    SdpProblem q = pinned ? to_feasibility(p, detail::pin_value(o, p)) : p;
    Certificate c = verify(q, X);
    std::string out = !o.certificate.empty() ? o.certificate : o.out;
    R.write(out, certificate_to_json(c));
    for (auto& b : c.blocks)
        if (!b.psd_ok) log << "block " << b.name << " is not PSD\n";
    log << "linear_ok " << c.linear_ok << " max_residual " << exact_str(c.max_residual) << "\n";
    return R.finish(c.ok(), {{"linear_ok", c.linear_ok}, {"max_residual", exact_str(c.max_residual)}});
}

inline int command_analyze(const CommandOptions& o, std::ostream& log) {
    detail::Runner R("analyze", o);
    SdpProblem p = detail::load_problem(R, o.problem);
    ExactSolution X = exact_solution_from_json(read_json_text(R.read(o.solution), o.solution));
    Scalar M = detail::pin_value(o, p);
    Certificate c = verify(to_feasibility(p, M), X);
    if (!c.ok()) {
        log << "solution does not verify at M = " << exact_str(M) << "\n";
        return R.finish(false, {{"reason", "solution does not verify"}});
    }
    auto rep = analyze_solution(p, X, M);
    json j = slackness_report_to_json(rep);
    std::string out = !o.report.empty() ? o.report : o.out;
    R.write(out, j);
    log << j.dump() << "\n";
    return R.finish(true, {{"pin", exact_str(M)}});
}

inline int command_certify_ball(const CommandOptions& o, std::ostream& log) {
    detail::Runner R("certify-ball", o);
    R.param("case", o.ball_case);
    R.param("n", o.n);
    auto r = certify_ball(o.ball_case, o.n);
    json j = ball_certification_to_json(r);
    std::string out = !o.certificate.empty() ? o.certificate : o.out;
    R.write(out, j);
    log << "case " << o.ball_case << " n=" << o.n << " M=" << exact_str(r.M) << (r.ok() ? " certified" : " FAILED")
        << "\n";
    return R.finish(r.ok(), {{"M", exact_str(r.M)}, {"method", r.method}});
}

// exit codes: 0 certified success, 1 check failed, 2 bad input, 3 numerical or pipeline error
inline int run_command(const std::string& cmd, const CommandOptions& o, std::ostream& log) {
    try {
        if (cmd == "generate") return command_generate(o, log);
        if (cmd == "solve") return command_solve(o, log);
        if (cmd == "import") return command_import(o, log);
        if (cmd == "round") return command_round(o, log);
        if (cmd == "verify") return command_verify(o, log);
        if (cmd == "analyze") return command_analyze(o, log);
        if (cmd == "certify-ball") return command_certify_ball(o, log);
        log << "error: unknown command " << cmd << "\n";
        return 2;
    } catch (const ParseError& e) {
        log << "error [" << cmd << "]: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        log << "error [" << cmd << "]: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        log << "error [" << cmd << "]: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        log << "error [" << cmd << "]: " << e.what() << "\n";
        return 3;
    }
}

} // namespace packsdp
