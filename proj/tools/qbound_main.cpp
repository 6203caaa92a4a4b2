// Command-line front end: every computation in the library as a reproducible
// run emitting CSV (plot-ready) files.
//
// Exit codes: 0 success, 1 a numerical-failure report was written,
// 2 argument/validation error.

#include "qbound/closed_form.hpp"
#include "qbound/control.hpp"
#include "qbound/csv.hpp"
#include "qbound/hjb.hpp"
#include "qbound/mc.hpp"
#include "qbound/resolvent.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
namespace cf = qbound::closed_form;
namespace rv = qbound::resolvent;
namespace hj = qbound::hjb;
namespace mc = qbound::mc;
namespace ct = qbound::control;

struct JsonDefaults {
    json j = json::object();

    // Flags win on conflict: only options the user did not pass are filled in.
    template <class T>
    void apply(CLI::App* cmd, const std::string& flag, T& var) const {
        const std::string key = flag.substr(flag.find_first_not_of('-'));
        if (!j.contains(key)) return;
        auto* opt = cmd->get_option_no_throw(flag);
        if (opt && opt->count() > 0) return;
        var = j.at(key).get<T>();
    }
};

JsonDefaults load_json_config(const std::string& path) {
    JsonDefaults d;
    if (path.empty()) return d;
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--json-config", "cannot open " + path);
    in >> d.j;
    return d;
}

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    return dir + "/" + name;
}

void stamp(qbound::csv::Writer& w, const std::string& cmd,
           const std::vector<std::pair<std::string, std::string>>& params) {
    w.comment(std::string("qbound ") + qbound::csv::artifact_version);
    w.comment("subcommand: " + cmd);
    std::string line = "params:";
    for (const auto& [k, v] : params) line += " " + k + "=" + v;
    w.comment(line);
}

int run_density(double beta, double t, double x0, double zmax, int nz,
                const std::string& out_dir) {
    const double dz = zmax / nz;
    qbound::csv::Writer w(join_path(out_dir, "density.csv"));
    stamp(w, "density",
          {{"beta", qbound::csv::num(beta)},
           {"t", qbound::csv::num(t)},
           {"x0", qbound::csv::num(x0)},
           {"zmax", qbound::csv::num(zmax)},
           {"nz", std::to_string(nz)}});
    w.raw("z,q");
    for (int i = 0; i < nz; ++i) {
        const double z = (i + 0.5) * dz;  // cell centers, so sum*dz ~ mass
        w.row({z, cf::reflected_drift_density(beta, t, x0, z).value});
    }
    return 0;
}

int run_bounds(double kappa, double t, double x0, double ymax, int ny,
               const std::string& out_dir) {
    qbound::csv::Writer w(join_path(out_dir, "bounds.csv"));
    stamp(w, "bounds",
          {{"kappa", qbound::csv::num(kappa)},
           {"t", qbound::csv::num(t)},
           {"x0", qbound::csv::num(x0)},
           {"ymax", qbound::csv::num(ymax)},
           {"ny", std::to_string(ny)}});
    w.raw("y,lower,upper");
    for (int i = 0; i <= ny; ++i) {
        const double y = ymax * i / ny;
        const auto b = cf::optimal_bounds(kappa, t, x0, y);
        w.row({y, b.lower.value, b.upper.value});
    }
    return 0;
}

int run_hjb(double beta, double y, double T, double h, double x_max, double t0,
            double store_dt, const std::string& out_dir) {
    if (x_max <= 0.0) x_max = hj::default_x_max(beta, y, T);
    auto grid = hj::Grid1D::with_cfl(beta, x_max, h, T, t0);
    hj::SolveOptions opts;
    if (store_dt > 0.0) opts.store_dt = store_dt;
    auto sol = hj::solve_hjb(beta, y, grid, opts);

    std::vector<std::string> hdr = {
        std::string("qbound ") + qbound::csv::artifact_version,
        "subcommand: hjb",
        "params: beta=" + qbound::csv::num(beta) + " y=" + qbound::csv::num(y) +
            " T=" + qbound::csv::num(T) + " h=" + qbound::csv::num(h) +
            " x_max=" + qbound::csv::num(x_max) + " t0=" + qbound::csv::num(t0),
        "dirichlet_leakage=" + qbound::csv::num(sol.dirichlet_leakage)};
    hj::write_fields_csv(sol, join_path(out_dir, "hjb_field.csv"), hdr);
    auto fb = hj::extract_free_boundary(sol);
    hj::write_free_boundary_csv(fb, join_path(out_dir, "hjb_free_boundary.csv"),
                                hdr);
    std::printf("hjb: %zu slices stored, mass(t0)=%.6f mass(T)=%.6f\n",
                sol.w.times.size(), sol.mass.front(), sol.mass.back());
    if (fb.no_interior_curve)
        std::printf("free boundary: no interior nodal curve (y=0)\n");
    else if (fb.tau_beyond_horizon)
        std::printf("free boundary: tau beyond horizon T=%.6g\n", T);
    else
        std::printf("free boundary: tau=%.6g\n", fb.tau);
    return 0;
}

int run_resolvent_coeffs(double beta, double lambda, double y,
                         const std::string& out_dir) {
    auto c = rv::resolvent_coefficients(beta, lambda, y);
    qbound::csv::Writer w(join_path(out_dir, "resolvent_coeffs.csv"));
    stamp(w, "resolvent coeffs",
          {{"beta", qbound::csv::num(beta)},
           {"lambda", qbound::csv::num(lambda)},
           {"y", qbound::csv::num(y)}});
    w.raw("beta_bar,c1,c2,c3,neumann_residual,knot_residual");
    const double neu = -(c.beta + c.beta_bar) * c.c1 - (c.beta - c.beta_bar) * c.c2;
    const double knot = rv::resolvent_value(c, std::min(c.y, 1e300)) -
                        c.c3 * std::exp((c.beta - c.beta_bar) * c.y);
    w.row({c.beta_bar, c.c1, c.c2, c.c3, neu, knot});
    std::printf("C1=%.12g C2=%.12g C3=%.12g beta_bar=%.12g\n", c.c1, c.c2, c.c3,
                c.beta_bar);
    return 0;
}

int run_resolvent_invert(double beta, double y, double t, double x, int terms,
                         const std::string& method, const std::string& out_dir) {
    rv::InversionConfig cfg;
    cfg.terms = terms;
    if (method == "gaver-stehfest")
        cfg.method = rv::InversionMethod::gaver_stehfest;
    auto r = rv::reflected_bangbang_density(beta, y, t, x, cfg);
    qbound::csv::Writer w(join_path(out_dir, "resolvent_invert.csv"));
    stamp(w, "resolvent invert",
          {{"beta", qbound::csv::num(beta)},
           {"y", qbound::csv::num(y)},
           {"t", qbound::csv::num(t)},
           {"x", qbound::csv::num(x)},
           {"terms", std::to_string(r.terms)},
           {"method", method}});
    w.raw("q,err_estimate,closed_form_y0,abs_diff_vs_closed_form");
    double closed = std::nan("");
    double diff = std::nan("");
    if (y == 0.0 && beta >= 0.0) {
        closed = cf::q_kappa_explicit(beta, t, x, 0.0).value;
        diff = std::abs(r.value - closed);
    }
    w.row({r.value, r.err_estimate, closed, diff});
    std::printf("q(t=%.6g, x=%.6g, y=%.6g) = %.10g  (err est %.3g)\n", t, x, y,
                r.value, r.err_estimate);
    if (!std::isnan(closed))
        std::printf("closed form at y=0:      %.10g  (|diff| %.3g)\n", closed,
                    diff);
    return r.converged ? 0 : 1;
}

int run_resolvent_density(double beta, double y, double t, double xmax, int nx,
                          const std::string& out_dir) {
    qbound::csv::Writer w(join_path(out_dir, "resolvent_density.csv"));
    stamp(w, "resolvent density",
          {{"beta", qbound::csv::num(beta)},
           {"y", qbound::csv::num(y)},
           {"t", qbound::csv::num(t)},
           {"xmax", qbound::csv::num(xmax)},
           {"nx", std::to_string(nx)}});
    w.raw("x,q,err_estimate");
    bool ok = true;
    for (int i = 0; i <= nx; ++i) {
        const double x = xmax * i / nx;
        auto r = rv::reflected_bangbang_density(beta, y, t, x);
        ok = ok && r.converged;
        w.row({x, r.value, r.err_estimate});
    }
    return ok ? 0 : 1;
}

int run_verify_bounds(double kappa, double y, double x0, double T, double n_d,
                      std::uint64_t seed, double dt, const std::string& out_dir) {
    const std::size_t n = (std::size_t)n_d;
    std::vector<mc::DriftField> drifts = {
        mc::DriftField::constant(0.0),
        mc::DriftField::from_function(
            [kappa](double t, double x) { return 1.2 * kappa * std::sin(2.0 * x + 0.5 * t); },
            kappa, "clamped_sine"),
        mc::DriftField::constant(-kappa),
    };
    std::optional<std::pair<double, double>> explicit_bounds;
    std::string bound_source = "closed-form";
    if (y > 0.0) {
        // Tighter HJB-solver envelopes for an interior target.
        auto grid_up = hj::Grid1D::with_cfl(kappa, hj::default_x_max(kappa, y, T),
                                            0.02, T, 1e-4);
        auto up = hj::solve_hjb(kappa, y, grid_up);
        auto lo = hj::solve_hjb(-kappa, y, grid_up);
        const double pad = 5e-3;  // discretization padding on the envelopes
        explicit_bounds = {{lo.w_at(T, x0) - pad, up.w_at(T, x0) + pad}};
        bound_source = "hjb";
    }
    auto rep = mc::verify_bounds(kappa, drifts, x0, T, y, n, {dt, seed}, {},
                                 explicit_bounds);
    qbound::csv::Writer w(join_path(out_dir, "verify_bounds.csv"));
    stamp(w, "verify bounds",
          {{"kappa", qbound::csv::num(kappa)},
           {"y", qbound::csv::num(y)},
           {"x0", qbound::csv::num(x0)},
           {"T", qbound::csv::num(T)},
           {"n", std::to_string(n)},
           {"dt", qbound::csv::num(dt)},
           {"seed", std::to_string(seed)},
           {"bounds", bound_source}});
    w.raw("drift,estimate,std_error,lower,upper,clamp_violations,verdict");
    for (const auto& r : rep.rows) {
        std::string line = r.drift + "," + qbound::csv::num(r.estimate) + "," +
                           qbound::csv::num(r.std_error) + "," +
                           qbound::csv::num(r.lower) + "," +
                           qbound::csv::num(r.upper) + "," +
                           std::to_string(r.clamp_violations) + "," +
                           (r.pass ? "PASS" : "FAIL");
        w.raw(line);
        std::printf("%s  %s: estimate=%.6g se=%.3g in [%.6g, %.6g]\n",
                    r.pass ? "PASS" : "FAIL", r.drift.c_str(), r.estimate,
                    r.std_error, r.lower, r.upper);
    }
    return rep.all_pass ? 0 : 1;
}

int run_verify_representation(double b, double c, double x0, double T, double y,
                              double n_d, std::uint64_t seed, double dt,
                              const std::string& out_dir) {
    const std::size_t n = (std::size_t)n_d;
    auto rep = mc::verify_representation(mc::DriftField::constant(b),
                                         mc::DriftField::constant(c), x0, T, y,
                                         n, {dt, seed});
    qbound::csv::Writer w(join_path(out_dir, "verify_representation.csv"));
    stamp(w, "verify representation",
          {{"b", qbound::csv::num(b)},
           {"c", qbound::csv::num(c)},
           {"x0", qbound::csv::num(x0)},
           {"T", qbound::csv::num(T)},
           {"y", qbound::csv::num(y)},
           {"n", std::to_string(n)},
           {"dt", qbound::csv::num(dt)},
           {"seed", std::to_string(seed)}});
    w.raw("lhs,lhs_se,rhs,rhs_se,diff,combined_se,verdict");
    w.raw(qbound::csv::num(rep.lhs) + "," + qbound::csv::num(rep.lhs_se) + "," +
          qbound::csv::num(rep.rhs) + "," + qbound::csv::num(rep.rhs_se) + "," +
          qbound::csv::num(rep.diff) + "," + qbound::csv::num(rep.combined_se) +
          "," + (rep.pass ? "PASS" : "FAIL"));
    std::printf("%s  lhs=%.6g rhs=%.6g diff=%.3g (3se=%.3g)\n",
                rep.pass ? "PASS" : "FAIL", rep.lhs, rep.rhs, rep.diff,
                3.0 * rep.combined_se);
    return rep.pass ? 0 : 1;
}

ct::ControlProblem make_problem(const std::string& fkind, double kappa,
                                double lambda) {
    ct::ControlProblem p;
    p.kappa = kappa;
    p.lambda = lambda;
    if (fkind == "linear") {
        p.cost = [](double x) { return x; };
        p.growth_degree = 1;
    } else if (fkind == "quadratic") {
        p.cost = [](double x) { return x * x; };
        p.growth_degree = 2;
    } else if (fkind == "const") {
        p.cost = [](double) { return 1.0; };
        p.growth_degree = 0;
    } else {
        throw CLI::ValidationError("--f", "unknown cost kind: " + fkind);
    }
    return p;
}

int run_control_value(const std::string& fkind, double kappa, double lambda,
                      double x_max, int nx, const std::string& out_dir) {
    auto prob = make_problem(fkind, kappa, lambda);
    auto vf = ct::solve_value_ode(prob, {x_max, nx});
    qbound::csv::Writer w(join_path(out_dir, "control_value.csv"));
    stamp(w, "control value",
          {{"f", fkind},
           {"kappa", qbound::csv::num(kappa)},
           {"lambda", qbound::csv::num(lambda)},
           {"x_max", qbound::csv::num(x_max)},
           {"nx", std::to_string(nx)}});
    const bool has_closed = fkind == "linear" || fkind == "quadratic";
    w.raw(has_closed ? "x,v,vp,v_closed" : "x,v,vp");
    const auto kind =
        fkind == "linear" ? ct::CostKind::linear : ct::CostKind::quadratic;
    for (std::size_t i = 0; i < vf.x.size(); ++i) {
        if (has_closed)
            w.row({vf.x[i], vf.v[i], vf.vp[i],
                   ct::value_closed_form(kind, kappa, lambda, vf.x[i])});
        else
            w.row({vf.x[i], vf.v[i], vf.vp[i]});
    }
    std::printf("v(0)=%.10g residual=%.3g newton_iters=%d%s\n", vf.v.front(),
                vf.residual_inf, vf.newton_iterations,
                vf.converged ? "" : "  [NOT CONVERGED]");
    return vf.converged ? 0 : 1;
}

int run_control_validate(const std::string& fkind, double kappa, double lambda,
                         double x0, double n_d, std::uint64_t seed, double dt,
                         const std::string& out_dir) {
    auto prob = make_problem(fkind, kappa, lambda);
    auto vf = ct::solve_value_ode(prob);
    std::vector<mc::DriftField> comp = {mc::DriftField::constant(0.0),
                                        mc::DriftField::constant(kappa)};
    ct::ValidationParams params;
    params.n_paths = (std::size_t)n_d;
    params.seed = seed;
    params.dt = dt;
    auto rep = ct::validate_optimality(prob, vf, x0, comp, params);
    qbound::csv::Writer w(join_path(out_dir, "control_validate.csv"));
    stamp(w, "control validate",
          {{"f", fkind},
           {"kappa", qbound::csv::num(kappa)},
           {"lambda", qbound::csv::num(lambda)},
           {"x0", qbound::csv::num(x0)},
           {"n", std::to_string(params.n_paths)},
           {"dt", qbound::csv::num(dt)},
           {"seed", std::to_string(seed)},
           {"horizon", qbound::csv::num(rep.horizon)},
           {"truncation_budget", qbound::csv::num(rep.truncation_budget)}});
    w.raw("drift,cost,std_error,verdict");
    bool ok = rep.optimal_matches && rep.all_dominate;
    w.raw(rep.optimal.name + "," + qbound::csv::num(rep.optimal.cost_estimate) +
          "," + qbound::csv::num(rep.optimal.std_error) + "," +
          (rep.optimal_matches ? "PASS" : "FAIL"));
    std::printf("%s  J(u*)=%.6g vs v(x0)=%.6g (se %.3g, budget %.3g)\n",
                rep.optimal_matches ? "PASS" : "FAIL",
                rep.optimal.cost_estimate, rep.value_at_x0,
                rep.optimal.std_error, rep.truncation_budget);
    for (const auto& r : rep.competitors) {
        w.raw(r.name + "," + qbound::csv::num(r.cost_estimate) + "," +
              qbound::csv::num(r.std_error) + "," +
              (r.dominates_value ? "PASS" : "FAIL"));
        std::printf("%s  J(%s)=%.6g >= v(x0)-3se\n",
                    r.dominates_value ? "PASS" : "FAIL", r.name.c_str(),
                    r.cost_estimate);
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qbound: transition-density bounds and optimal control for "
                 "reflecting diffusions on the half-line"};
    app.require_subcommand(1);

    std::string json_path, out_dir = ".";
    app.add_option("--json-config", json_path,
                   "JSON file supplying defaults; explicit flags win");
    app.add_option("--out", out_dir, "output directory");

    // density
    auto* cmd_density = app.add_subcommand("density", "reflected drift density over z");
    double d_beta = 0.0, d_t = 1.0, d_x0 = 0.5, d_zmax = 5.0;
    int d_nz = 200;
    cmd_density->add_option("--beta", d_beta, "signed drift toward +inf")->required();
    cmd_density->add_option("--t", d_t, "elapsed time")->required();
    cmd_density->add_option("--x0", d_x0, "start point")->required();
    cmd_density->add_option("--zmax", d_zmax, "grid upper end");
    cmd_density->add_option("--nz", d_nz, "grid cells");

    // bounds
    auto* cmd_bounds = app.add_subcommand("bounds", "optimal density envelopes over y");
    double b_kappa = 1.0, b_t = 1.0, b_x0 = 0.5, b_ymax = 5.0;
    int b_ny = 100;
    cmd_bounds->add_option("--kappa", b_kappa, "drift bound")->required();
    cmd_bounds->add_option("--t", b_t, "elapsed time")->required();
    cmd_bounds->add_option("--x0", b_x0, "start point")->required();
    cmd_bounds->add_option("--ymax", b_ymax, "target grid upper end");
    cmd_bounds->add_option("--ny", b_ny, "target grid cells");

    // hjb
    auto* cmd_hjb = app.add_subcommand("hjb", "HJB solve, fields + free boundary");
    double h_beta = 1.0, h_y = 1.0, h_T = 1.0, h_h = 0.02, h_xmax = 0.0,
           h_t0 = 1e-2, h_store = 0.0;
    cmd_hjb->add_option("--beta", h_beta, "drift magnitude (signed)")->required();
    cmd_hjb->add_option("--y", h_y, "delta center")->required();
    cmd_hjb->add_option("--T", h_T, "horizon")->required();
    cmd_hjb->add_option("--h", h_h, "space step");
    cmd_hjb->add_option("--xmax", h_xmax, "truncation point (0 = auto)");
    cmd_hjb->add_option("--t0", h_t0, "initialization offset");
    cmd_hjb->add_option("--store-dt", h_store, "stored slice spacing (0 = auto)");

    // resolvent
    auto* cmd_res = app.add_subcommand("resolvent", "Laplace-domain solution");
    cmd_res->require_subcommand(1);
    auto* res_coeffs = cmd_res->add_subcommand("coeffs", "C1,C2,C3 and identities");
    double rc_beta = 1.0, rc_lambda = 1.0, rc_y = 1.0;
    res_coeffs->add_option("--beta", rc_beta)->required();
    res_coeffs->add_option("--lambda", rc_lambda)->required();
    res_coeffs->add_option("--y", rc_y)->required();
    auto* res_invert = cmd_res->add_subcommand("invert", "q(t,x,y) by inversion");
    double ri_beta = 1.0, ri_y = 0.0, ri_t = 1.0, ri_x = 0.5;
    int ri_terms = 18;
    std::string ri_method = "euler";
    res_invert->add_option("--beta", ri_beta)->required();
    res_invert->add_option("--y", ri_y)->required();
    res_invert->add_option("--t", ri_t)->required();
    res_invert->add_option("--x", ri_x)->required();
    res_invert->add_option("--terms", ri_terms, "inversion term count");
    res_invert->add_option("--method", ri_method)
        ->check(CLI::IsMember({"euler", "gaver-stehfest"}));
    auto* res_density = cmd_res->add_subcommand("density", "q(t,x,y) over x grid");
    double rd_beta = 1.0, rd_y = 1.0, rd_t = 1.0, rd_xmax = 5.0;
    int rd_nx = 100;
    res_density->add_option("--beta", rd_beta)->required();
    res_density->add_option("--y", rd_y)->required();
    res_density->add_option("--t", rd_t)->required();
    res_density->add_option("--xmax", rd_xmax);
    res_density->add_option("--nx", rd_nx);

    // verify
    auto* cmd_verify = app.add_subcommand("verify", "Monte Carlo verification");
    cmd_verify->require_subcommand(1);
    auto* ver_bounds = cmd_verify->add_subcommand("bounds", "comparison-theorem check");
    double vb_kappa = 1.0, vb_y = 0.0, vb_x0 = 0.5, vb_T = 1.0, vb_n = 1e6,
           vb_dt = 1e-3;
    std::uint64_t vb_seed = 7;
    ver_bounds->add_option("--kappa", vb_kappa)->required();
    ver_bounds->add_option("--y", vb_y);
    ver_bounds->add_option("--x0", vb_x0);
    ver_bounds->add_option("--T", vb_T);
    ver_bounds->add_option("--n", vb_n, "path count (scientific ok)");
    ver_bounds->add_option("--seed", vb_seed);
    ver_bounds->add_option("--dt", vb_dt);
    auto* ver_rep = cmd_verify->add_subcommand("representation",
                                               "density perturbation identity");
    double vr_b = -1.0, vr_c = 1.0, vr_x0 = 0.5, vr_T = 1.0, vr_y = 0.0,
           vr_n = 2e5, vr_dt = 1e-3;
    std::uint64_t vr_seed = 11;
    ver_rep->add_option("--b", vr_b, "constant base drift");
    ver_rep->add_option("--c", vr_c, "constant perturbation");
    ver_rep->add_option("--x0", vr_x0);
    ver_rep->add_option("--T", vr_T);
    ver_rep->add_option("--y", vr_y);
    ver_rep->add_option("--n", vr_n);
    ver_rep->add_option("--seed", vr_seed);
    ver_rep->add_option("--dt", vr_dt);

    // control
    auto* cmd_control = app.add_subcommand("control", "discounted control problem");
    cmd_control->require_subcommand(1);
    auto* ctl_value = cmd_control->add_subcommand("value", "value function CSV");
    std::string cv_f = "linear";
    double cv_kappa = 1.0, cv_lambda = 1.0, cv_xmax = 15.0;
    int cv_nx = 3001;
    ctl_value->add_option("--f", cv_f, "cost kind: linear|quadratic|const")->required();
    ctl_value->add_option("--kappa", cv_kappa)->required();
    ctl_value->add_option("--lambda", cv_lambda)->required();
    ctl_value->add_option("--xmax", cv_xmax);
    ctl_value->add_option("--nx", cv_nx);
    auto* ctl_val = cmd_control->add_subcommand("validate", "MC optimality check");
    std::string cd_f = "linear";
    double cd_kappa = 1.0, cd_lambda = 1.0, cd_x0 = 0.5, cd_n = 1e5,
           cd_dt = 1e-3;
    std::uint64_t cd_seed = 2024;
    ctl_val->add_option("--f", cd_f)->required();
    ctl_val->add_option("--kappa", cd_kappa)->required();
    ctl_val->add_option("--lambda", cd_lambda)->required();
    ctl_val->add_option("--x0", cd_x0);
    ctl_val->add_option("--n", cd_n);
    ctl_val->add_option("--seed", cd_seed);
    ctl_val->add_option("--dt", cd_dt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const auto jd = load_json_config(json_path);
        jd.apply(&app, "--out", out_dir);

        if (cmd_density->parsed()) {
            jd.apply(cmd_density, "--beta", d_beta);
            jd.apply(cmd_density, "--t", d_t);
            jd.apply(cmd_density, "--x0", d_x0);
            jd.apply(cmd_density, "--zmax", d_zmax);
            jd.apply(cmd_density, "--nz", d_nz);
            return run_density(d_beta, d_t, d_x0, d_zmax, d_nz, out_dir);
        }
        if (cmd_bounds->parsed()) {
            jd.apply(cmd_bounds, "--kappa", b_kappa);
            jd.apply(cmd_bounds, "--t", b_t);
            jd.apply(cmd_bounds, "--x0", b_x0);
            jd.apply(cmd_bounds, "--ymax", b_ymax);
            jd.apply(cmd_bounds, "--ny", b_ny);
            return run_bounds(b_kappa, b_t, b_x0, b_ymax, b_ny, out_dir);
        }
        if (cmd_hjb->parsed()) {
            jd.apply(cmd_hjb, "--h", h_h);
            jd.apply(cmd_hjb, "--xmax", h_xmax);
            jd.apply(cmd_hjb, "--t0", h_t0);
            jd.apply(cmd_hjb, "--store-dt", h_store);
            return run_hjb(h_beta, h_y, h_T, h_h, h_xmax, h_t0, h_store, out_dir);
        }
        if (cmd_res->parsed()) {
            if (res_coeffs->parsed())
                return run_resolvent_coeffs(rc_beta, rc_lambda, rc_y, out_dir);
            if (res_invert->parsed())
                return run_resolvent_invert(ri_beta, ri_y, ri_t, ri_x, ri_terms,
                                            ri_method, out_dir);
            return run_resolvent_density(rd_beta, rd_y, rd_t, rd_xmax, rd_nx,
                                         out_dir);
        }
        if (cmd_verify->parsed()) {
            if (ver_bounds->parsed())
                return run_verify_bounds(vb_kappa, vb_y, vb_x0, vb_T, vb_n,
                                         vb_seed, vb_dt, out_dir);
            return run_verify_representation(vr_b, vr_c, vr_x0, vr_T, vr_y,
                                             vr_n, vr_seed, vr_dt, out_dir);
        }
        if (cmd_control->parsed()) {
            if (ctl_value->parsed())
                return run_control_value(cv_f, cv_kappa, cv_lambda, cv_xmax,
                                         cv_nx, out_dir);
            return run_control_validate(cd_f, cd_kappa, cd_lambda, cd_x0, cd_n,
                                        cd_seed, cd_dt, out_dir);
        }
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
