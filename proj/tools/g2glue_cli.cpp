// Batch driver: every verification suite and scan behind one executable.
//
// Exit codes: 0 all checks pass, 1 at least one named check failed,
// 2 unusable input (bad flags, bad config, bad link-algebra file).

#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "g2glue/io.hpp"
#include "g2glue/runner.hpp"

namespace {

using namespace g2glue;

struct Options {
    std::string out_dir = ".";
    std::string config_path;
    std::string link = "s3xs3";
    std::uint64_t seed = 42;
    double slope_tol = 0.05;

    GlueParams glue;
    double feas_mu = 1.0, feas_nu_prime = -4.0, feas_delta = 0.2;
    double d1 = 1.0, d2 = 1.0, d3 = 1.0;
    RegionConstants constants;

    Parity parity = Parity::even;
    double rate_from = -3.5, rate_to = -2.5;
};

void apply_config(Options& opt) {
    if (opt.config_path.empty()) return;
    const Config cfg = Config::parse_file(opt.config_path);
    cfg.validate({
        {"", {}},
        {"run", {"seed", "out", "link", "slope_tol"}},
        {"glue", {"mu", "nu", "nu_prime", "delta", "epsilon", "R", "gamma", "kappa"}},
        {"feasibility", {"mu", "nu_prime", "delta"}},
        {"joyce", {"D1", "D2", "D3"}},
        {"constants", {"inner", "overlap", "outer"}},
    });
    opt.seed = static_cast<std::uint64_t>(cfg.get_int("run", "seed", static_cast<long>(opt.seed)));
    opt.out_dir = cfg.get_string("run", "out", opt.out_dir);
    opt.link = cfg.get_string("run", "link", opt.link);
    opt.slope_tol = cfg.get_double("run", "slope_tol", opt.slope_tol);
    GlueParams& p = opt.glue;
    p.mu = cfg.get_double("glue", "mu", p.mu);
    p.nu = cfg.get_double("glue", "nu", p.nu);
    p.nu_prime = cfg.get_double("glue", "nu_prime", p.nu_prime);
    p.delta = cfg.get_double("glue", "delta", p.delta);
    p.epsilon = cfg.get_double("glue", "epsilon", p.epsilon);
    p.R = cfg.get_double("glue", "R", p.R);
    p.gamma = cfg.get_double("glue", "gamma", p.gamma);
    p.kappa = cfg.get_double("glue", "kappa", p.kappa);
    opt.feas_mu = cfg.get_double("feasibility", "mu", opt.feas_mu);
    opt.feas_nu_prime = cfg.get_double("feasibility", "nu_prime", opt.feas_nu_prime);
    opt.feas_delta = cfg.get_double("feasibility", "delta", opt.feas_delta);
    opt.d1 = cfg.get_double("joyce", "D1", opt.d1);
    opt.d2 = cfg.get_double("joyce", "D2", opt.d2);
    opt.d3 = cfg.get_double("joyce", "D3", opt.d3);
    opt.constants.inner = cfg.get_double("constants", "inner", opt.constants.inner);
    opt.constants.overlap = cfg.get_double("constants", "overlap", opt.constants.overlap);
    opt.constants.outer = cfg.get_double("constants", "outer", opt.constants.outer);
}

LinkAlgebra resolve_link(const std::string& name) {
    if (name == "s3xs3" || name == "abelian6") return link_preset(name);
    return load_link_algebra(name);
}

int report(const std::vector<SuiteReport>& reports, const std::string& out_dir) {
    int failures = 0;
    for (const SuiteReport& rep : reports) {
        for (const auto& [stem, table] : rep.tables)
            emit_csv(out_dir + "/" + stem + ".csv", table);
        for (const CheckResult& c : rep.checks) {
            std::printf("%s: %s: %s%s%s\n", rep.suite.c_str(), c.name.c_str(),
                        c.pass ? "PASS" : "FAIL", c.detail.empty() ? "" : " — ",
                        c.detail.c_str());
            if (!c.pass) ++failures;
        }
    }
    if (failures) std::printf("%d check(s) FAILED\n", failures);
    return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verification suites for conical G2 gluing computations"};
    app.require_subcommand(0, 1);
    app.fallthrough();  // allow --out/--config/--seed after a subcommand name

    Options opt;
    opt.glue.R = 1.01;  // keep the default s-window admissible (s R' < s^gamma)
    bool run_all = false;

    app.add_option("--out", opt.out_dir, "Directory for CSV artifacts");
    app.add_option("--config", opt.config_path, "key = value config file with [section] headers");
    app.add_option("--seed", opt.seed, "Seed for randomized property checks");
    app.add_flag("--all", run_all, "Run every suite");

    auto* vp = app.add_subcommand("verify-pointwise", "Pointwise G2 algebra suite");
    auto* vl = app.add_subcommand("verify-link", "Nearly Kahler solve and spectrum");
    auto* vc = app.add_subcommand("verify-cone", "Cone structure, exactness, and convention lock");
    auto* ra = app.add_subcommand("rates", "Critical-rate scans, excluded ranges, log chains");
    auto* gs = app.add_subcommand("glue-scan", "Torsion norm scan and exponent fits");
    auto* fe = app.add_subcommand("feasibility", "(gamma,kappa) region table");
    auto* jg = app.add_subcommand("joyce-gate", "Existence-theorem hypothesis gate");

    for (auto* sub : {vl, vc, ra})
        sub->add_option("--link", opt.link, "Link preset name (s3xs3, abelian6) or file path");

    std::string parity_name = "even";
    ra->add_option("--parity", parity_name, "Pencil parity: even or odd")
        ->check(CLI::IsMember({"even", "odd"}));
    ra->add_option("--from", opt.rate_from, "Scan window lower end");
    ra->add_option("--to", opt.rate_to, "Scan window upper end");

    for (auto* sub : {gs, jg}) {
        sub->add_option("--mu", opt.glue.mu, "Singularity rate mu");
        sub->add_option("--nu", opt.glue.nu, "AC rate nu");
        sub->add_option("--nu-prime", opt.glue.nu_prime, "Residual rate nu'");
        sub->add_option("--delta", opt.glue.delta, "delta");
        sub->add_option("--epsilon", opt.glue.epsilon, "Outer-region boundary");
        sub->add_option("--R", opt.glue.R, "Inner-region radius parameter");
        sub->add_option("--gamma", opt.glue.gamma, "Neck exponent gamma");
        sub->add_option("--kappa", opt.glue.kappa, "Torsion-decay exponent kappa");
    }
    gs->add_option("--slope-tol", opt.slope_tol, "Slope agreement tolerance");
    fe->add_option("--mu", opt.feas_mu, "Minimum singularity rate");
    fe->add_option("--nu-prime", opt.feas_nu_prime, "Residual rate nu'");
    fe->add_option("--delta", opt.feas_delta, "delta");
    jg->add_option("--d1", opt.d1, "Torsion constant D1");
    jg->add_option("--d2", opt.d2, "Injectivity constant D2");
    jg->add_option("--d3", opt.d3, "Curvature constant D3");

    try {
        app.parse(argc, argv);
        apply_config(opt);
        opt.parity = parity_name == "odd" ? Parity::odd : Parity::even;

        std::vector<SuiteReport> reports;
        const bool any_sub = app.get_subcommands().size() > 0;
        if (!any_sub && !run_all) {
            std::cerr << app.help();
            return 2;
        }
        if (run_all || vp->parsed()) reports.push_back(suite_pointwise(opt.seed));
        if (run_all || vl->parsed() || vc->parsed() || ra->parsed()) {
            const LinkAlgebra alg = resolve_link(opt.link);
            if (run_all || vl->parsed()) reports.push_back(suite_link(alg));
            if (run_all || vc->parsed()) reports.push_back(suite_cone(alg));
            if (run_all || ra->parsed()) {
                reports.push_back(suite_rates_scan(alg, opt.parity, opt.rate_from, opt.rate_to));
                reports.push_back(suite_rates_full(alg));
            }
        }
        if (run_all || gs->parsed()) reports.push_back(suite_glue_scan(opt.glue, opt.slope_tol));
        if (run_all || fe->parsed())
            reports.push_back(suite_feasibility(opt.feas_mu, opt.feas_nu_prime, opt.feas_delta));
        if (run_all || jg->parsed())
            reports.push_back(suite_joyce(opt.glue, opt.d1, opt.d2, opt.d3, opt.constants));
        return report(reports, opt.out_dir);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigParse& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoFailure& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "check failure: " << e.what() << "\n";
        return 1;
    }
}
