#include "qbound/control.hpp"

#include "qbound/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace qbound::control {

double value_closed_form(CostKind kind, double kappa, double lambda,
                         double x) {
    if (!(lambda > 0.0)) throw std::domain_error("lambda must be positive");
    if (x < 0.0 || kappa < 0.0)
        throw std::domain_error("value_closed_form needs x, kappa >= 0");
    const double g = std::sqrt(kappa * kappa + 2.0 * lambda);
    const double e = std::exp((kappa - g) * x);
    if (kind == CostKind::linear)
        return e / (lambda * (g - kappa)) + x / lambda -
               kappa / (lambda * lambda);
    return 2.0 * kappa * e / (lambda * lambda * (kappa - g)) +
           x * x / lambda - 2.0 * kappa * x / (lambda * lambda) +
           (2.0 * kappa * kappa + lambda) / (lambda * lambda * lambda);
}

namespace {

double interp(const std::vector<double>& xs, const std::vector<double>& vs,
              double xq) {
    const double h = xs[1] - xs[0];
    double r = std::clamp((xq - xs.front()) / h, 0.0, (double)(xs.size() - 1));
    const std::size_t j = std::min((std::size_t)r, xs.size() - 2);
    const double b = r - (double)j;
    return (1.0 - b) * vs[j] + b * vs[j + 1];
}

// Thomas solve of a tridiagonal system; diag/rhs are overwritten.
void solve_tridiag(std::vector<double>& lower, std::vector<double>& diag,
                   std::vector<double>& upper, std::vector<double>& rhs,
                   std::vector<double>& out) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    out[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        out[i] = (rhs[i] - upper[i] * out[i + 1]) / diag[i];
}

}  // namespace

double ValueFunction::value_at(double xq) const { return interp(x, v, xq); }
double ValueFunction::derivative_at(double xq) const {
    return interp(x, vp, xq);
}

ValueFunction solve_value_ode(const ControlProblem& problem,
                              const OdeGrid& grid) {
    if (!(problem.lambda > 0.0))
        throw std::domain_error("lambda must be positive");
    if (!problem.cost) throw std::invalid_argument("cost evaluator missing");
    const int n = grid.n;
    if (n < 5) throw std::invalid_argument("ode grid too coarse");
    const double h = grid.x_max / (n - 1);
    const double kap = problem.kappa, lam = problem.lambda;
    const auto& f = problem.cost;

    std::vector<double> xs(n), fv(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = i * h;
        fv[i] = f(xs[i]);
    }

    // Far-field slope from the polynomial asymptote v ~ f/lambda - kappa f'/lambda^2 + ...
    const double fp = (f(grid.x_max) - f(grid.x_max - h)) / h;
    const double fpp =
        (f(grid.x_max) - 2.0 * f(grid.x_max - h) + f(grid.x_max - 2.0 * h)) /
        (h * h);
    const double vp_far = fp / lam - kap * fpp / (lam * lam);

    // Initial guess: the particular asymptote.
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = fv[i] / lam;

    std::vector<double> lower(n), diag(n), upper(n), rhs(n), step(n), vtrial(n);
    const double deadband = 1e-12;
    const double ih2 = 1.0 / (h * h);
    const double i2h = 1.0 / (2.0 * h);

    auto residual = [&](const std::vector<double>& u, std::vector<double>& r) {
        r[0] = (u[1] - u[0]) * ih2 + fv[0] - lam * u[0];  // mirror ghost, |v'|=0
        for (int i = 1; i + 1 < n; ++i) {
            const double d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * ih2;
            const double d1 = (u[i + 1] - u[i - 1]) * i2h;
            r[i] = 0.5 * d2 + fv[i] - kap * std::abs(d1) - lam * u[i];
        }
        // Far field: ghost node u_n = u_{n-2} + 2 h vp_far pins the centered
        // derivative to the polynomial asymptote; the ODE row stays tridiagonal.
        r[n - 1] = (u[n - 2] - u[n - 1]) * ih2 + vp_far / h + fv[n - 1] -
                   kap * std::abs(vp_far) - lam * u[n - 1];
    };

    auto norm_inf = [&](const std::vector<double>& r) {
        double m = 0.0;
        for (double e : r) m = std::max(m, std::abs(e));
        return m;
    };

    ValueFunction out;
    out.x = xs;
    std::vector<double> res(n);
    residual(v, res);
    double rn = norm_inf(res);
    const int max_iter = 60;
    int iter = 0;
    for (; iter < max_iter && rn > 1e-12; ++iter) {
        // Jacobian of the residual with |v'| linearized at the current sign.
        lower[0] = 0.0;
        diag[0] = -ih2 - lam;
        upper[0] = ih2;
        for (int i = 1; i + 1 < n; ++i) {
            const double d1 = (v[i + 1] - v[i - 1]) * i2h;
            const double s = std::abs(d1) > deadband ? (d1 > 0 ? 1.0 : -1.0) : 0.0;
            lower[i] = 0.5 * ih2 + kap * s * i2h;
            diag[i] = -ih2 - lam;
            upper[i] = 0.5 * ih2 - kap * s * i2h;
        }
        lower[n - 1] = ih2;
        diag[n - 1] = -ih2 - lam;
        upper[n - 1] = 0.0;

        for (int i = 0; i < n; ++i) rhs[i] = -res[i];
        auto lo = lower, di = diag, up = upper, rh = rhs;
        solve_tridiag(lo, di, up, rh, step);

        // Damped update: halve until the residual norm does not increase.
        double alpha = 1.0;
        double rn_new = rn;
        for (int ls = 0; ls < 30; ++ls) {
            for (int i = 0; i < n; ++i) vtrial[i] = v[i] + alpha * step[i];
            residual(vtrial, res);
            rn_new = norm_inf(res);
            if (rn_new <= rn * (1.0 - 1e-4 * alpha) || rn_new < 1e-12) break;
            alpha *= 0.5;
        }
        v = vtrial;
        rn = rn_new;
    }
    residual(v, res);
    out.v = v;
    out.vp.resize(n);
    out.vp[0] = 0.0;
    for (int i = 1; i + 1 < n; ++i) out.vp[i] = (v[i + 1] - v[i - 1]) * i2h;
    out.vp[n - 1] = (v[n - 1] - v[n - 2]) / h;
    double scale = 1.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(fv[i]));
    double rint = 0.0;
    for (int i = 1; i + 1 < n; ++i) rint = std::max(rint, std::abs(res[i]));
    out.residual_inf = rint / scale;
    out.neumann_residual = std::abs((v[1] - v[0]) / h);
    out.newton_iterations = iter;
    out.converged = rn <= 1e-9 * scale;
    return out;
}

mc::DriftField optimal_feedback(const ValueFunction& v, double kappa) {
    auto xs = v.x;
    auto vp = v.vp;
    const double deadband = 1e-10;
    return mc::DriftField::from_function(
        [xs, vp, kappa, deadband](double, double x) {
            const double d = interp(xs, vp, x);
            if (std::abs(d) <= deadband) return 0.0;
            return d > 0.0 ? -kappa : kappa;
        },
        kappa, "optimal_feedback(kappa=" + std::to_string(kappa) + ")");
}

namespace {

// Discounted running cost per path, trapezoid in time.
struct CostAccumulator {
    const std::function<double(double)>* f;
    double lambda;
    double dt;
    double run = 0.0;
    double prev = 0.0;
    bool first = true;

    void add(double t, double x) {
        const double val = std::exp(-lambda * t) * (*f)(x);
        if (first) {
            prev = val;
            first = false;
            return;
        }
        run += 0.5 * (prev + val) * dt;
        prev = val;
    }
};

}  // namespace

OptimalityReport validate_optimality(const ControlProblem& problem,
                                     const ValueFunction& v, double x0,
                                     const std::vector<mc::DriftField>& competitors,
                                     const ValidationParams& params) {
    OptimalityReport rep;
    rep.value_at_x0 = v.value_at(x0);
    const double lam = problem.lambda;

    // Truncation horizon: discounted polynomial tail below a tenth of the
    // anticipated standard error.
    const double se_target = 1e-3;
    double T = params.horizon;
    if (T <= 0.0) {
        T = 10.0;
        for (int it = 0; it < 4; ++it) {
            const double xbar = x0 + problem.kappa * T + 3.0 * std::sqrt(T);
            const double tail = problem.growth_scale *
                                (1.0 + std::pow(xbar, problem.growth_degree)) *
                                std::exp(-lam * T) / lam;
            if (tail < se_target / 10.0) break;
            T += std::log(10.0 * tail * lam / se_target + 2.0) / lam + 2.0;
        }
    }
    const double xbar = x0 + problem.kappa * T + 3.0 * std::sqrt(T);
    rep.truncation_budget = problem.growth_scale *
                            (1.0 + std::pow(xbar, problem.growth_degree)) *
                            std::exp(-lam * T) / lam;
    rep.horizon = T;

    auto estimate_cost = [&](const mc::DriftField& u,
                             std::uint64_t seed) -> std::pair<double, double> {
        const std::size_t n = params.n_paths;
        const long nsteps = (long)std::llround(T / params.dt);
        std::vector<double> costs(n);
        const unsigned workers = mc::worker_count();
        const std::size_t block = 8192;
        const std::size_t nblocks = (n + block - 1) / block;
        auto run = [&](unsigned wid) {
            for (std::size_t bidx = wid; bidx < nblocks; bidx += workers) {
                std::seed_seq seq{seed, (std::uint64_t)bidx,
                                  (std::uint64_t)0x6a09e667f3bcc909ULL};
                std::mt19937_64 rng(seq);
                std::normal_distribution<double> normal(0.0, 1.0);
                const double sq = std::sqrt(params.dt);
                const std::size_t first = bidx * block;
                const std::size_t count = std::min(block, n - first);
                for (std::size_t p = 0; p < count; ++p) {
                    double y = x0;
                    CostAccumulator acc{&problem.cost, lam, params.dt};
                    for (long k = 0; k < nsteps; ++k) {
                        const double t = (double)k * params.dt;
                        const double ay = std::abs(y);
                        acc.add(t, ay);
                        const double s = (y > 0.0) - (y < 0.0);
                        y += u(t, ay) * s * params.dt + sq * normal(rng);
                    }
                    acc.add(T, std::abs(y));
                    costs[first + p] = acc.run;
                }
            }
        };
        if (workers <= 1) {
            run(0);
        } else {
            std::vector<std::thread> pool;
            for (unsigned wdi = 0; wdi < workers; ++wdi)
                pool.emplace_back(run, wdi);
            for (auto& th : pool) th.join();
        }
        double m = 0.0;
        for (double cst : costs) m += cst;
        m /= (double)n;
        double s2 = 0.0;
        for (double cst : costs) s2 += (cst - m) * (cst - m);
        s2 /= (double)(n - 1);
        return {m, std::sqrt(s2 / (double)n)};
    };

    auto u_star = optimal_feedback(v, problem.kappa);
    auto [j_star, se_star] = estimate_cost(u_star, params.seed);
    rep.optimal = {u_star.name, j_star, se_star, true};
    rep.optimal_matches = std::abs(j_star - rep.value_at_x0) <=
                          3.0 * se_star + rep.truncation_budget;

    std::uint64_t seed = params.seed + 1;
    for (const auto& u : competitors) {
        if (u.kappa > problem.kappa * (1.0 + 1e-12))
            throw std::invalid_argument("validate_optimality: competitor '" +
                                        u.name + "' exceeds the control bound");
        auto [j, se] = estimate_cost(u, seed++);
        const bool dom = j >= rep.value_at_x0 - 3.0 * se - rep.truncation_budget;
        rep.competitors.push_back({u.name, j, se, dom});
        rep.all_dominate = rep.all_dominate && dom;
    }
    return rep;
}

closed_form::DensityValue optimal_process_density(double kappa, double t,
                                                  double x, double z) {
    return closed_form::q_kappa_explicit(kappa, t, x, z);
}

}  // namespace qbound::control
