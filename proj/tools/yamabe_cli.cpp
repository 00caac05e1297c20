// yamabe: command-line laboratory for singular Emden-Fowler reductions.
//
// solve  - integrate w'' + q(r) w' = +-f(w) with a singular start and report
// verify - run a named verification suite (regimes, pohozaev, energy,
//          hypotheses, geometry, tables)
// shoot  - double shooting for k-nodal solutions of the compact problem
// glue   - assemble an entire profile from compact and hyperbolic pieces

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "yamabe/report.hpp"
#include "yamabe/verify.hpp"

namespace {

using namespace yamabe;
using report::json;

json error_json(const std::string& msg, int code) {
    json j;
    j["error"] = msg;
    j["exit_code"] = code;
    return j;
}

coefficients::CoefficientFamily parse_family(const std::string& s) {
    auto fail = [&]() -> coefficients::CoefficientFamily {
        throw CLI::ValidationError(
            "--family", "expected power:THETA | sinh:ALPHA,BETA,plus|minus | sin:ALPHA,BETA");
    };
    auto split = [](std::string str, char sep) {
        std::vector<std::string> out;
        std::size_t pos;
        while ((pos = str.find(sep)) != std::string::npos) {
            out.push_back(str.substr(0, pos));
            str.erase(0, pos + 1);
        }
        out.push_back(str);
        return out;
    };
    const auto colon = s.find(':');
    if (colon == std::string::npos) return fail();
    const std::string kind = s.substr(0, colon);
    const auto args = split(s.substr(colon + 1), ',');
    try {
        if (kind == "power" && args.size() == 1)
            return coefficients::CoefficientFamily(
                coefficients::PowerLaw{std::stod(args[0])});
        if (kind == "sinh" && args.size() == 3)
            return coefficients::CoefficientFamily(coefficients::SinhRatio{
                std::stod(args[0]), std::stod(args[1]),
                args[2] == "minus" ? coefficients::SinhBranch::minus
                                   : coefficients::SinhBranch::plus});
        if (kind == "sin" && args.size() == 2)
            return coefficients::CoefficientFamily(
                coefficients::SinRatio{std::stod(args[0]), std::stod(args[1])});
    } catch (const std::invalid_argument& e) {
        throw CLI::ValidationError("--family", e.what());
    }
    return fail();
}

coefficients::Nonlinearity parse_nonlinearity(const std::string& s) {
    auto fail = [&]() -> coefficients::Nonlinearity {
        throw CLI::ValidationError("--f",
                                   "expected power:LAMBDA,P | power-linear:LAMBDA,P | "
                                   "power-diff:LAMBDA,DELTA,P,S");
    };
    const auto colon = s.find(':');
    if (colon == std::string::npos) return fail();
    const std::string kind = s.substr(0, colon);
    std::vector<double> a;
    {
        std::string rest = s.substr(colon + 1);
        std::size_t pos;
        try {
            while ((pos = rest.find(',')) != std::string::npos) {
                a.push_back(std::stod(rest.substr(0, pos)));
                rest.erase(0, pos + 1);
            }
            a.push_back(std::stod(rest));
        } catch (...) {
            return fail();
        }
    }
    try {
        if (kind == "power" && a.size() == 2)
            return coefficients::Nonlinearity(coefficients::PurePower{a[0], a[1]});
        if (kind == "power-linear" && a.size() == 2)
            return coefficients::Nonlinearity(coefficients::PowerMinusLinear{a[0], a[1]});
        if (kind == "power-diff" && a.size() == 4)
            return coefficients::Nonlinearity(
                coefficients::PowerDifference{a[0], a[1], a[2], a[3]});
    } catch (const std::invalid_argument& e) {
        throw CLI::ValidationError("--f", e.what());
    }
    return fail();
}

std::string out_path(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

struct CommonOpts {
    std::string out = ".";
    double tol = 1e-10;
    unsigned jobs = 0;
    std::uint64_t seed = Rng::default_seed;
};

int cmd_solve(const std::string& family_s, const std::string& f_s,
              const std::string& sign_s, double a, double rmax, bool svg,
              const CommonOpts& common) {
    auto family = parse_family(family_s);
    auto nl = parse_nonlinearity(f_s);
    if (sign_s != "plus" && sign_s != "minus")
        throw CLI::ValidationError("--sign", "expected plus or minus");
    const auto sign = sign_s == "plus" ? singular_ivp::Sign::plus
                                       : singular_ivp::Sign::minus;

    json config;
    config["command"] = "solve";
    config["family"] = family_s;
    config["f"] = f_s;
    config["sign"] = sign_s;
    config["a"] = a;
    config["rmax"] = rmax;
    config["tol"] = common.tol;
    config["out"] = common.out;
    config["svg"] = svg;
    config["seed"] = common.seed;
    config["jobs"] = common.jobs;

    singular_ivp::SingularIVP prob{family, nl, sign, a, rmax};
    singular_ivp::Settings st;
    st.rtol = common.tol;
    st.atol = common.tol * 1e-2;
    singular_ivp::Trajectory traj = singular_ivp::integrate(prob, st);

    json j = report::base_report(config);
    j["termination"] = report::termination_json(traj.termination);
    j["events"] = report::events_json(traj.events);
    j["zero_count"] = traj.zero_count();
    j["stats"] = {{"accepted", traj.stats.accepted},
                  {"rejected", traj.stats.rejected},
                  {"rhs_evals", traj.stats.rhs_evals},
                  {"min_step", traj.stats.min_step},
                  {"max_step", traj.stats.max_step}};
    auto en = diagnostics::energy(traj, nl, sign);
    j["energy"] = {{"non_increasing", en.non_increasing},
                   {"drift_per_unit_r", en.drift_per_unit_r},
                   {"max_deviation", en.max_deviation}};

    // classification and Pohozaev apply to the power-law / pure-power runs
    auto* pl = std::get_if<coefficients::PowerLaw>(&family.variant());
    auto* pp = std::get_if<coefficients::PurePower>(&nl.variant());
    if (pl && pp && sign == singular_ivp::Sign::minus) {
        auto rep = diagnostics::classify(traj, pl->theta, pp->Lambda, pp->p, a);
        j["classification"] = report::qualitative_json(rep);
        if (pp->Lambda > 0.0 &&
            traj.termination.kind == singular_ivp::TerminationKind::ReachedEnd)
            j["pohozaev_residual"] =
                diagnostics::pohozaev_residual(traj, pl->theta, pp->Lambda, pp->p);
    }

    report::write_text_file(out_path(common.out, "trajectory.csv"),
                            report::trajectory_csv(traj.nodes));
    report::write_text_file(out_path(common.out, "report.json"), j.dump(2) + "\n");
    if (svg)
        report::write_text_file(out_path(common.out, "solution.svg"),
                                report::trajectory_svg(traj, "w(r)"));
    std::cout << j.dump(2) << std::endl;
    return 0;
}

int cmd_verify(const std::string& suite, const CommonOpts& common) {
    verify::SuiteResult res = verify::run_suite(suite, common.jobs, common.seed);
    json config;
    config["command"] = "verify";
    config["suite"] = suite;
    config["seed"] = common.seed;
    config["jobs"] = common.jobs;
    config["out"] = common.out;
    json j = report::base_report(config);
    j.update(verify::suite_json(res));
    report::write_text_file(out_path(common.out, "verify_" + suite + ".json"),
                            j.dump(2) + "\n");
    std::cout << j.dump(2) << std::endl;
    return res.pass() ? 0 : 1;
}

shooting::CompactProblem make_problem(int ell, int m, int n1, int n2, double p,
                                      double lambda) {
    shooting::CompactProblem cp;
    cp.ell = ell;
    cp.m = m;
    cp.n1 = n1;
    cp.n2 = n2;
    cp.p = p;
    cp.lambda = lambda;
    cp.validate();
    return cp;
}

int cmd_shoot(int ell, int m, int n1, int n2, double p, double lambda, int k,
              double dmax, const CommonOpts& common) {
    auto cp = make_problem(ell, m, n1, n2, p, lambda);
    shooting::ShootOptions opt;
    opt.d_max = dmax;
    opt.jobs = common.jobs;
    opt.ode.rtol = common.tol;
    opt.ode.atol = common.tol * 1e-2;
    shooting::CompactSolution sol = shooting::shoot_k_nodal(cp, k, opt);

    json config;
    config["command"] = "shoot";
    config["ell"] = ell;
    config["m"] = m;
    config["n1"] = n1;
    config["n2"] = n2;
    config["p"] = p;
    config["lambda"] = lambda;
    config["k"] = k;
    config["dmax"] = dmax;
    config["tol"] = common.tol;
    config["out"] = common.out;
    config["seed"] = common.seed;
    config["jobs"] = common.jobs;
    json j = report::base_report(config);
    j.update(report::compact_solution_json(sol));
    if (auto l1 = cp.lambda_one()) j["lambda_one"] = *l1;
    report::write_text_file(out_path(common.out, "shoot.json"), j.dump(2) + "\n");
    if (!sol.assembled.nodes.empty())
        report::write_text_file(out_path(common.out, "compact.csv"),
                                report::trajectory_csv(sol.assembled.nodes));
    std::cout << j.dump(2) << std::endl;
    return 0;
}

int cmd_glue(int ell, int m, int n1, int n2, double p, double lambda, int k,
             double dmax, const std::string& image_s, const CommonOpts& common) {
    auto cp = make_problem(ell, m, n1, n2, p, lambda);
    shooting::ShootOptions opt;
    opt.d_max = dmax;
    opt.jobs = common.jobs;
    opt.ode.rtol = common.tol;
    opt.ode.atol = common.tol * 1e-2;
    shooting::CompactSolution mid =
        k == 0 ? shooting::constant_compact_solution(cp, 1.0)
               : shooting::shoot_k_nodal(cp, k, opt);
    json config;
    config["command"] = "glue";
    config["ell"] = ell;
    config["m"] = m;
    config["n1"] = n1;
    config["n2"] = n2;
    config["p"] = p;
    config["lambda"] = lambda;
    config["k"] = k;
    config["dmax"] = dmax;
    config["image"] = image_s;
    config["tol"] = common.tol;
    config["out"] = common.out;
    config["seed"] = common.seed;
    config["jobs"] = common.jobs;

    if (!mid.found) {
        json j = report::base_report(config);
        j.update(report::compact_solution_json(mid));
        j["glued"] = nullptr;
        report::write_text_file(out_path(common.out, "glue.json"), j.dump(2) + "\n");
        std::cout << j.dump(2) << std::endl;
        return 0;
    }

    shooting::ImageType image = image_s == "P1"   ? shooting::ImageType::P1
                                : image_s == "P3" ? shooting::ImageType::P3
                                                  : shooting::ImageType::P2;
    shooting::GlueOptions gopt;
    gopt.ode = opt.ode;
    shooting::GluedSolution glued = shooting::glue_entire(cp, mid, image, gopt);

    json j = report::base_report(config);
    j.update(report::glued_solution_json(glued));
    report::write_text_file(out_path(common.out, "glue.json"), j.dump(2) + "\n");
    report::write_text_file(
        out_path(common.out, "glue.svg"),
        report::profile_svg(glued.profile, "v(t) [" + glued.case_tag + "]"));
    std::cout << j.dump(2) << std::endl;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"yamabe: a numerical laboratory for singular Emden-Fowler equations, "
                 "double shooting and isoparametric level-set geometry"};
    app.require_subcommand(1);
    app.set_config("--config", "", "configuration file (key = value in [sections])");

    CommonOpts common;
    app.add_option("--out", common.out, "output directory")->capture_default_str();
    app.add_option("--tol", common.tol, "integrator relative tolerance")
        ->capture_default_str();
    app.add_option("--jobs", common.jobs,
                   "worker threads for sweeps (0 = hardware concurrency)");
    app.add_option("--seed", common.seed, "seed for randomized sampling")
        ->capture_default_str();

    // solve
    auto* solve = app.add_subcommand("solve", "integrate a singular IVP");
    std::string family_s, f_s, sign_s = "minus";
    double a = 0.0, rmax = 50.0;
    bool svg = false;
    solve->add_option("--family", family_s, "coefficient family, e.g. power:2")
        ->required();
    solve->add_option("--f", f_s, "nonlinearity, e.g. power:1,5")->required();
    solve->add_option("--sign", sign_s, "plus or minus")->capture_default_str();
    solve->add_option("--a", a, "initial value w(0)")->required();
    solve->add_option("--rmax", rmax, "integration horizon")->capture_default_str();
    solve->add_flag("--svg", svg, "also write solution.svg");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
    std::string suite;
    verify_cmd
        ->add_option("suite", suite,
                     "one of: regimes, pohozaev, energy, hypotheses, geometry, tables")
        ->required()
        ->check(CLI::IsMember(
            {"regimes", "pohozaev", "energy", "hypotheses", "geometry", "tables"}));

    // shoot / glue
    int ell = 1, m = 4, n1 = 0, n2 = 0, k = 1;
    double p = 2.0, lambda = 40.0, dmax = 100.0;
    std::string image_s = "P2";
    auto add_compact_opts = [&](CLI::App* c) {
        c->add_option("--ell", ell)->capture_default_str();
        c->add_option("--m", m)->capture_default_str();
        c->add_option("--n1", n1)->capture_default_str();
        c->add_option("--n2", n2)->capture_default_str();
        c->add_option("--p", p)->capture_default_str();
        c->add_option("--lambda", lambda)->capture_default_str();
        c->add_option("--k", k, "target number of zeroes")->capture_default_str();
        c->add_option("--dmax", dmax, "scan range upper end")->capture_default_str();
    };
    auto* shoot = app.add_subcommand("shoot", "double shooting for k-nodal solutions");
    add_compact_opts(shoot);
    auto* glue = app.add_subcommand("glue", "glue compact and hyperbolic pieces");
    add_compact_opts(glue);
    glue->add_option("--image", image_s, "image type: P1, P2 or P3")
        ->check(CLI::IsMember({"P1", "P2", "P3"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << error_json(e.what(), 2).dump(2) << std::endl;
        return 2;
    }

    try {
        if (solve->parsed()) return cmd_solve(family_s, f_s, sign_s, a, rmax, svg, common);
        if (verify_cmd->parsed()) return cmd_verify(suite, common);
        if (shoot->parsed())
            return cmd_shoot(ell, m, n1, n2, p, lambda, k, dmax, common);
        if (glue->parsed())
            return cmd_glue(ell, m, n1, n2, p, lambda, k, dmax, image_s, common);
    } catch (const CLI::ParseError& e) {
        std::cerr << error_json(e.what(), 2).dump(2) << std::endl;
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << error_json(e.what(), 2).dump(2) << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << error_json(e.what(), 1).dump(2) << std::endl;
        return 1;
    }
    return 2;
}
