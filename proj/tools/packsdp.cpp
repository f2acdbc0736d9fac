#include <packsdp/cli.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"packsdp: exact SDP bounds for packing problems"};
    app.require_subcommand(1);
    packsdp::CommandOptions o;

    auto common = [&](CLI::App* c) {
        c->add_option("--manifest", o.manifest, "run manifest path (default <out>.manifest.json)");
        c->add_option("--threads", o.threads, "worker threads (the solver currently runs on one)");
    };
    auto precision = [&](CLI::App* c) { c->add_option("--precision", o.precision, "working precision in bits"); };

    auto* gen = app.add_subcommand("generate", "build a problem from a JSON config");
    gen->add_option("--config", o.config, "generator config")->required();
    gen->add_option("--out", o.out, "problem JSON")->required();
    gen->add_option("--sdpa", o.sdpa, "also write SDPA sparse format");
    common(gen);

    auto* solve = app.add_subcommand("solve", "solve a problem numerically");
    solve->add_option("--problem", o.problem)->required();
    solve->add_option("--out", o.out, "numerical solution JSON")->required();
    solve->add_option("--tolerance", o.tolerance, "residual tolerance (default 2^(-precision/2))");
    precision(solve);
    common(solve);

    auto* imp = app.add_subcommand("import", "import an external solver result");
    imp->add_option("--problem", o.problem)->required();
    imp->add_option("--solution", o.solution, "SDPA result file or JSON companion")->required();
    imp->add_option("--format", o.format)->check(CLI::IsMember({"auto", "sdpa", "json"}));
    imp->add_option("--out", o.out)->required();
    precision(imp);
    common(imp);

    auto* rnd = app.add_subcommand("round", "round a numerical solution to an exact certified one");
    rnd->add_option("--problem", o.problem)->required();
    rnd->add_option("--solution", o.solution)->required();
    rnd->add_option("--pin", o.pin, "objective value to certify (default: pin_value from the config)");
    rnd->add_option("--field-ell", o.field_ell, "round over Q[sqrt(l)]; 1 means Q");
    rnd->add_option("--max-den", o.max_den, "denominator bound, integer or b^e");
    rnd->add_option("--tolerance", o.tolerance, "solver tolerance for re-solves");
    rnd->add_option("--out", o.out, "exact solution JSON")->required();
    rnd->add_option("--certificate", o.certificate, "certificate JSON");
    precision(rnd);
    common(rnd);

    auto* ver = app.add_subcommand("verify", "check an exact solution");
    ver->add_option("--problem", o.problem)->required();
    ver->add_option("--solution", o.solution)->required();
    ver->add_option("--pin", o.pin);
    ver->add_option("--certificate,--out", o.certificate, "certificate JSON");
    common(ver);

    auto* ana = app.add_subcommand("analyze", "complementary slackness analysis of an exact solution");
    ana->add_option("--problem", o.problem)->required();
    ana->add_option("--solution", o.solution)->required();
    ana->add_option("--pin", o.pin);
    ana->add_option("--report,--out", o.report, "report JSON");
    common(ana);

    auto* cb = app.add_subcommand("certify-ball", "check a closed-form ball certificate");
    cb->add_option("--case", o.ball_case)->required()->check(CLI::IsMember({"i", "ii", "iii", "iv"}));
    cb->add_option("--n", o.n)->required()->check(CLI::Range(2, 1000));
    cb->add_option("--certificate,--out", o.certificate, "certificate JSON");
    common(cb);

    CLI11_PARSE(app, argc, argv);
    std::string cmd = app.get_subcommands().front()->get_name();
    if (o.out.empty()) o.out = !o.certificate.empty() ? o.certificate : o.report;
    return packsdp::run_command(cmd, o, std::cerr);
}
