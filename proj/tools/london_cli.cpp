// london_cli: solves, accuracy tables, conditioning sweeps and verification
// reports for the London problem on the unit sphere.
//
// Exit codes: 0 success, 1 invalid input, 2 numerical failure (including a
// verification check that does not hold).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "london/london.hpp"

using namespace london;
using nlohmann::ordered_json;

namespace {

struct RunConfig {
    std::string command;
    double lambda = 1.0;
    double sigma_m = 0.0;
    double sigma_l = 0.0;
    int n_max = 40;
    std::string out = "london_out";
    std::uint64_t seed = 1;

    // accuracy
    std::vector<double> lambdas;
    std::vector<int> nmax_list;
    int targets = 10;
    double r_interior = 0.5;
    double r_exterior = 1.5;
    std::vector<double> x_o{0.0, 0.0, 2.0};
    std::vector<double> x_i{0.3, 0.0, 0.0};
    std::vector<double> v_o_re{1.0, 0.0, 0.0};
    std::vector<double> v_o_im{0.0, 1.0, 0.0};

    // condition-sweep
    double sigma_lo = -5.0, sigma_hi = 5.0;
    int sigma_points = 21;
    int n_cap = 0;
    double tail_tol = 0.01;

    // biot-savart-check / verify
    std::vector<double> charge{0.4, 0.2, 1.9};
    int bs_radial = 6;
    int bs_angular = 0; // 0: n_max
    int bs_levels = 2;
};

vec3 to_vec(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

ReferenceSources sources(const RunConfig& rc, double lambda)
{
    ReferenceSources s;
    s.x_o = to_vec(rc.x_o);
    s.x_i = to_vec(rc.x_i);
    for (int a = 0; a < 3; ++a)
        s.v_o(a) = cplx(rc.v_o_re[a], rc.v_o_im[a]);
    s.lambda_L = lambda;
    return s;
}

LondonConfig solver_config(const RunConfig& rc, double lambda, int n_max)
{
    LondonConfig c;
    c.lambda_L = lambda;
    c.sigma_m = rc.sigma_m;
    c.sigma_l = rc.sigma_l;
    c.n_max = n_max;
    return c;
}

void validate(RunConfig& rc)
{
    if (rc.lambdas.empty())
        rc.lambdas = {rc.lambda};
    if (rc.nmax_list.empty())
        rc.nmax_list = {rc.n_max};
    for (double l : rc.lambdas)
        check_lambda(l);
    for (int n : rc.nmax_list)
        if (n < 1)
            throw std::invalid_argument("nmax must be at least 1");
    solver_config(rc, rc.lambda, rc.n_max).validate();
    if (rc.n_max < 1)
        throw std::invalid_argument("nmax must be at least 1");
    if (rc.targets < 1)
        throw std::invalid_argument("targets must be at least 1");
    if (!(rc.r_interior > 0.0 && rc.r_interior < 1.0 - 1e-3))
        throw std::invalid_argument("r-interior must lie in (0, 0.999)");
    if (!(rc.r_exterior > 1.0 + 1e-3))
        throw std::invalid_argument("r-exterior must exceed 1.001");
    sources(rc, rc.lambda).validate();
    SigmaGrid{rc.sigma_lo, rc.sigma_hi, rc.sigma_points}.validate();
    if (rc.n_cap < 0)
        throw std::invalid_argument("n-cap must be nonnegative");
    if (!(rc.tail_tol > 0.0 && rc.tail_tol < 1.0))
        throw std::invalid_argument("tail-tol must lie in (0, 1)");
    if (!(to_vec(rc.charge).norm() > 1.0 + 1e-3))
        throw std::invalid_argument("charge must lie outside the unit sphere");
    if (rc.bs_radial < 1 || rc.bs_angular < 0 || rc.bs_levels < 2)
        throw std::invalid_argument("need bs-radial >= 1, bs-angular >= 0, bs-levels >= 2");
}

ordered_json config_json(const RunConfig& rc)
{
    ordered_json j;
    j["command"] = rc.command;
    j["lambda"] = rc.lambda;
    j["sigma_m"] = rc.sigma_m;
    j["sigma_l"] = rc.sigma_l;
    j["nmax"] = rc.n_max;
    j["seed"] = rc.seed;
    j["out"] = rc.out;
    if (rc.command == "accuracy" || rc.command == "solve") {
        j["lambdas"] = rc.lambdas;
        j["nmax_list"] = rc.nmax_list;
        j["targets"] = rc.targets;
        j["r_interior"] = rc.r_interior;
        j["r_exterior"] = rc.r_exterior;
        j["x_o"] = rc.x_o;
        j["x_i"] = rc.x_i;
        j["v_o_re"] = rc.v_o_re;
        j["v_o_im"] = rc.v_o_im;
    }
    if (rc.command == "condition-sweep") {
        j["sigma_lo"] = rc.sigma_lo;
        j["sigma_hi"] = rc.sigma_hi;
        j["sigma_points"] = rc.sigma_points;
        j["n_cap"] = rc.n_cap;
        j["tail_tol"] = rc.tail_tol;
    }
    if (rc.command == "biot-savart-check" || rc.command == "verify") {
        j["charge"] = rc.charge;
        j["bs_radial"] = rc.bs_radial;
        j["bs_angular"] = rc.bs_angular;
        j["bs_levels"] = rc.bs_levels;
    }
    return j;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::invalid_argument("cannot open output file " + path);
    return f;
}

void write_json(const std::string& path, const ordered_json& j)
{
    auto f = open_out(path);
    f << j.dump(2) << "\n";
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_fields(const std::string& path, const FieldEvaluation& f, bool with_j)
{
    auto o = open_out(path);
    o << "x,y,z,Bx,By,Bz" << (with_j ? ",Jx,Jy,Jz" : "") << "\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        const vec3& p = f.targets[i];
        o << num(p.x()) << ',' << num(p.y()) << ',' << num(p.z());
        for (int a = 0; a < 3; ++a)
            o << ',' << num(f.b[i](a).real());
        if (with_j)
            for (int a = 0; a < 3; ++a)
                o << ',' << num(f.j[i](a).real());
        o << "\n";
    }
}

ordered_json checks_json(const std::vector<CheckResult>& checks)
{
    ordered_json a = ordered_json::array();
    for (const auto& c : checks)
        a.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    return a;
}

int cmd_solve(const RunConfig& rc)
{
    const LondonConfig c = solver_config(rc, rc.lambda, rc.n_max);
    const ReferenceSources src = sources(rc, rc.lambda);
    const SphereGrid g = SphereGrid::for_degree(rc.n_max, default_data_pad(rc.n_max));
    const ProjectedRhs rhs = project_rhs(reference_boundary_data(src, g), rc.n_max);
    const DebyeSolution s = solve_scattering(c, rhs);

    {
        auto o = open_out(rc.out + ".densities.csv");
        o << "n,m";
        for (const char* name : {"rho_minus", "rho_plus", "mu_minus", "q_minus", "q_plus", "r_minus"})
            o << ',' << name << "_re," << name << "_im";
        o << "\n";
        for (int n = 0; n <= rc.n_max; ++n)
            for (int m = -n; m <= n; ++m) {
                o << n << ',' << m;
                for (int u = 0; u < 6; ++u)
                    o << ',' << num(s.density(u)(n, m).real()) << ',' << num(s.density(u)(n, m).imag());
                o << "\n";
            }
    }
    write_fields(rc.out + ".interior.csv",
                 eval_fields(s, random_targets(rc.targets, rc.r_interior, rc.seed), Side::Interior), true);
    write_fields(rc.out + ".exterior.csv",
                 eval_fields(s, random_targets(rc.targets, rc.r_exterior, rc.seed + 1), Side::Exterior), false);

    ordered_json rep;
    rep["config"] = config_json(rc);
    rep["density_norm_M"] = s.density_norm();
    rep["q_plus_total"] = s.q_plus_total().real();
    rep["max_mode_residual"] = s.max_residual;
    rep["data_tail_fraction"] = rhs.tail_fraction;
    rep["warnings"] = s.warnings;
    write_json(rc.out + ".json", rep);
    for (const auto& w : s.warnings)
        std::cerr << "warning: " << w << "\n";
    std::cout << "M = " << num(s.density_norm()) << "\n";
    return 0;
}

int cmd_accuracy(const RunConfig& rc)
{
    auto o = open_out(rc.out + ".csv");
    o << "lambda_L,n_max,eps1,eps2,M,wall_time_s\n";
    for (double lam : rc.lambdas)
        for (int n : rc.nmax_list) {
            AccuracyOptions opt;
            opt.n_targets = rc.targets;
            opt.r_interior = rc.r_interior;
            opt.r_exterior = rc.r_exterior;
            opt.seed = rc.seed;
            const AccuracyResult r = run_accuracy(sources(rc, lam), solver_config(rc, lam, n), opt);
            o << num(lam) << ',' << n << ',' << num(r.eps1) << ',' << num(r.eps2) << ',' << num(r.M) << ','
              << num(r.wall_time_s) << "\n";
            std::printf("lambda=%g n_max=%d eps1=%.3e eps2=%.3e M=%.4e (%.2fs)\n", lam, n, r.eps1, r.eps2, r.M,
                        r.wall_time_s);
            for (const auto& w : r.warnings)
                std::cerr << "warning: " << w << "\n";
        }
    return 0;
}

int cmd_condition_sweep(const RunConfig& rc)
{
    ConditionOptions opt;
    opt.n_cap = rc.n_cap;
    opt.tail_tolerance = rc.tail_tol;
    const SigmaGrid g{rc.sigma_lo, rc.sigma_hi, rc.sigma_points};
    const ConditionSweepResult s = sweep(rc.lambda, g, g, opt);
    auto o = open_out(rc.out + ".csv");
    o << "sigma_l,sigma_m,kappa,n_at_smin,n_at_smax,j_at_smin,j_at_smax,n_cap,finite\n";
    for (const auto& p : s.points) {
        const auto& r = p.result;
        o << num(p.sigma_l) << ',' << num(p.sigma_m) << ',' << num(r.kappa) << ',' << r.n_at_smin << ','
          << r.n_at_smax << ',' << r.j_at_smin << ',' << r.j_at_smax << ',' << r.n_cap << ','
          << (r.finite ? 1 : 0) << "\n";
    }
    const auto& best = s.minimum();
    std::printf("lambda=%g: min kappa %.6g at (sigma_l, sigma_m) = (%g, %g) over %zu points\n", rc.lambda,
                best.result.kappa, best.sigma_l, best.sigma_m, s.points.size());
    for (const auto& p : s.points)
        if (!p.result.finite)
            std::cerr << "warning: kappa not finite at (" << p.sigma_l << ", " << p.sigma_m << ")\n";
    return 0;
}

std::vector<vec3> shell_targets(std::uint64_t seed)
{
    std::vector<vec3> t;
    for (double r : {1.5, 2.0, 3.0})
        for (const vec3& p : random_targets(4, r, seed))
            t.push_back(p);
    return t;
}

ordered_json biot_savart_json(const BiotSavartStudy& st)
{
    ordered_json j;
    j["levels"] = ordered_json::array();
    for (const auto& l : st.levels)
        j["levels"].push_back({{"n_radial", l.n_radial}, {"angular_degree", l.angular_degree}, {"error", l.error}});
    j["ratios"] = st.ratios();
    return j;
}

void require_volume_lambda(double lambda)
{
    if (lambda < 0.2)
        throw std::invalid_argument("volume checks need lambda >= 0.2 (the current layer is not resolved below)");
}

int cmd_biot_savart(const RunConfig& rc)
{
    require_volume_lambda(rc.lambda);
    const DebyeSolution s = solve_external_charge(solver_config(rc, rc.lambda, rc.n_max), to_vec(rc.charge));
    const BiotSavartStudy st = biot_savart_study(s, shell_targets(rc.seed), rc.bs_radial,
                                                 rc.bs_angular > 0 ? rc.bs_angular : rc.n_max, rc.bs_levels);
    const std::vector<CheckResult> checks{check_below("finest relative error", st.finest_error(), 1e-3),
                                          {"first refinement ratio", st.ratios()[0], 4.0, st.ratios()[0] >= 4.0}};
    ordered_json rep;
    rep["config"] = config_json(rc);
    rep["study"] = biot_savart_json(st);
    rep["checks"] = checks_json(checks);
    bool ok = true;
    for (const auto& c : checks)
        ok = ok && c.pass;
    rep["all_pass"] = ok;
    write_json(rc.out + ".json", rep);
    for (const auto& l : st.levels)
        std::printf("radial=%d angular=%d error=%.3e\n", l.n_radial, l.angular_degree, l.error);
    return ok ? 0 : 2;
}

int cmd_verify(const RunConfig& rc)
{
    const LondonConfig c = solver_config(rc, rc.lambda, rc.n_max);
    const SphereGrid g = SphereGrid::for_degree(rc.n_max, default_data_pad(rc.n_max));
    const BoundaryData data = external_charge_data(to_vec(rc.charge), g);
    const DebyeSolution s = solve_scattering(c, project_rhs(data, rc.n_max));
    std::vector<CheckResult> checks = solution_checks(s, data, rc.seed);
    std::vector<std::string> notes;

    const int la = std::max(rc.n_max, rc.bs_angular);
    const EnergyBalance e = energy_identity(s, VolumeQuadrature::interior(std::max(32, rc.n_max), la),
                                            VolumeQuadrature::exterior(24, la));
    checks.push_back(check_below("energy: volume vs boundary flux (relative)", e.relative_residual(), 1e-6));

    if (rc.lambda >= 0.2) {
        const BiotSavartStudy st = biot_savart_study(s, shell_targets(rc.seed), rc.bs_radial,
                                                     rc.bs_angular > 0 ? rc.bs_angular : rc.n_max, rc.bs_levels);
        checks.push_back(check_below("Biot-Savart vs B+ (relative)", st.finest_error(), 1e-3));
        checks.push_back({"Biot-Savart refinement ratio", st.ratios()[0], 4.0, st.ratios()[0] >= 4.0});
        const std::vector<vec3> in = random_targets(3, 0.4, rc.seed + 2);
        const RepresentationResult rp =
            representation_from_data(s, in, VolumeQuadrature::interior(32, std::max(32, rc.n_max)), 2 * rc.n_max);
        const FieldEvaluation f = eval_fields_series(s, in, Side::Interior);
        std::vector<cvec3> b_minus;
        for (const auto& b : f.b)
            b_minus.push_back(rc.lambda * b);
        checks.push_back(check_below("volume + boundary representation of B- (relative)",
                                     max_relative_error(rp.total, b_minus), 1e-3));
    } else {
        notes.push_back("volume checks skipped: lambda < 0.2");
    }

    bool ok = true;
    for (const auto& ch : checks)
        ok = ok && ch.pass;
    ordered_json rep;
    rep["config"] = config_json(rc);
    rep["checks"] = checks_json(checks);
    rep["notes"] = notes;
    rep["all_pass"] = ok;
    write_json(rc.out + ".json", rep);
    for (const auto& ch : checks)
        std::printf("%-52s %.3e  (tol %.1e)  %s\n", ch.name.c_str(), ch.value, ch.tolerance,
                    ch.pass ? "pass" : "FAIL");
    return ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv)
{
    RunConfig rc;
    CLI::App app{"London equations on the unit sphere: solve, accuracy, condition-sweep, biot-savart-check, verify"};
    app.set_config("--config", "", "key = value file; command-line flags override it");
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--lambda", rc.lambda, "London penetration depth");
    app.add_option("--sigma-m", rc.sigma_m, "coupling parameter sigma_m");
    app.add_option("--sigma-l", rc.sigma_l, "coupling parameter sigma_l");
    app.add_option("--nmax", rc.n_max, "truncation degree");
    app.add_option("--out", rc.out, "output path prefix");
    app.add_option("--seed", rc.seed, "seed for random target directions");
    app.add_option("--lambdas", rc.lambdas, "accuracy: list of lambda values")->delimiter(',');
    app.add_option("--nmax-list", rc.nmax_list, "accuracy: list of n_max values")->delimiter(',');
    app.add_option("--targets", rc.targets, "targets per side");
    app.add_option("--r-interior", rc.r_interior, "radius of interior targets");
    app.add_option("--r-exterior", rc.r_exterior, "radius of exterior targets");
    app.add_option("--x-o", rc.x_o, "exterior Yukawa source of the reference solution")->expected(3)->delimiter(',');
    app.add_option("--x-i", rc.x_i, "interior charge of the reference solution")->expected(3)->delimiter(',');
    app.add_option("--v-o-re", rc.v_o_re, "real part of the source polarization")->expected(3)->delimiter(',');
    app.add_option("--v-o-im", rc.v_o_im, "imaginary part of the source polarization")->expected(3)->delimiter(',');
    app.add_option("--sigma-lo", rc.sigma_lo, "condition-sweep: lower end of both sigma axes");
    app.add_option("--sigma-hi", rc.sigma_hi, "condition-sweep: upper end of both sigma axes");
    app.add_option("--sigma-points", rc.sigma_points, "condition-sweep: points per axis");
    app.add_option("--n-cap", rc.n_cap, "condition-sweep: fixed truncation degree (0 = automatic)");
    app.add_option("--tail-tol", rc.tail_tol, "condition-sweep: tolerance on |s - 1| for truncation");
    app.add_option("--charge", rc.charge, "external unit charge driving the verification problem")
        ->expected(3)
        ->delimiter(',');
    app.add_option("--bs-radial", rc.bs_radial, "Biot-Savart: radial nodes at the coarsest level");
    app.add_option("--bs-angular", rc.bs_angular, "Biot-Savart: angular degree at the coarsest level (0 = nmax)");
    app.add_option("--bs-levels", rc.bs_levels, "Biot-Savart: refinement levels (orders doubled each level)");

    for (const char* name : {"solve", "accuracy", "condition-sweep", "biot-savart-check", "verify"})
        app.add_subcommand(name)->callback([&rc, name] { rc.command = name; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        validate(rc);
        write_json(rc.out + ".config.json", config_json(rc));
        if (rc.command == "solve")
            return cmd_solve(rc);
        if (rc.command == "accuracy")
            return cmd_accuracy(rc);
        if (rc.command == "condition-sweep")
            return cmd_condition_sweep(rc);
        if (rc.command == "biot-savart-check")
            return cmd_biot_savart(rc);
        return cmd_verify(rc);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const singular_mode_error& e) {
        std::cerr << "numerical failure at degree " << e.degree() << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}
