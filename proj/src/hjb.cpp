#include "qbound/hjb.hpp"

#include "qbound/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qbound::hjb {

bool Grid1D::satisfies_cfl(double beta, double safety) const {
    const double hh = h();
    return dt <= safety * hh * hh / (1.0 + std::abs(beta) * hh) * (1.0 + 1e-12);
}

Grid1D Grid1D::with_cfl(double beta, double x_max, double h, double t_final,
                        double t0, double safety) {
    Grid1D g;
    g.x_max = x_max;
    g.nx = (int)std::lround(x_max / h) + 1;
    g.t_final = t_final;
    g.t0 = t0;
    const double hh = g.h();
    const double dt_max = safety * hh * hh / (1.0 + std::abs(beta) * hh);
    const long nsteps = (long)std::ceil((t_final - t0) / dt_max);
    g.dt = (t_final - t0) / (double)nsteps;
    return g;
}

double default_x_max(double beta, double y, double t_final) {
    const double front = y + std::abs(beta) * t_final + 6.0 * std::sqrt(t_final);
    return std::max(10.0, front + 4.0);
}

std::vector<double> neumann_kernel_cell_averages(int nx, double h, double y,
                                                 double t0) {
    const double s = std::sqrt(t0);
    auto cdf = [&](double u) { return 0.5 * std::erfc(-u / (s * 1.4142135623730951)); };
    auto mass = [&](double a, double b) {
        return (cdf(b - y) - cdf(a - y)) + (cdf(b + y) - cdf(a + y));
    };
    std::vector<double> w(nx);
    w[0] = mass(0.0, 0.5 * h) / (0.5 * h);
    for (int i = 1; i + 1 < nx; ++i) {
        const double xi = i * h;
        w[i] = mass(xi - 0.5 * h, xi + 0.5 * h) / h;
    }
    w[nx - 1] = 0.0;
    return w;
}

double DensityField::interpolate(double t, double x) const {
    const auto& ts = times;
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t hi = (it == ts.end()) ? ts.size() - 1 : (std::size_t)(it - ts.begin());
    if (hi == 0) hi = 1;
    const std::size_t lo = hi - 1;
    double a = (ts[hi] == ts[lo]) ? 0.0 : (t - ts[lo]) / (ts[hi] - ts[lo]);
    a = std::clamp(a, 0.0, 1.0);

    const double h = xs[1] - xs[0];
    double r = (x - xs.front()) / h;
    r = std::clamp(r, 0.0, (double)(xs.size() - 1));
    std::size_t j = std::min((std::size_t)r, xs.size() - 2);
    const double b = r - (double)j;

    auto bil = [&](std::size_t ti) {
        return (1.0 - b) * at(ti, j) + b * at(ti, j + 1);
    };
    return (1.0 - a) * bil(lo) + a * bil(hi);
}

namespace {

void validate(double beta, double y, const Grid1D& g, double safety) {
    if (g.nx < 3 || !(g.x_max > 0.0) || !(g.dt > 0.0) || !(g.t0 > 0.0) ||
        !(g.t_final > g.t0))
        throw std::invalid_argument("hjb grid: malformed parameters");
    if (!g.satisfies_cfl(beta, safety))
        throw std::invalid_argument("hjb grid: CFL condition violated");
    if (!(y >= 0.0) || y >= g.x_max)
        throw std::invalid_argument("hjb: need 0 <= y < x_max");
}

double trapezoid_mass(const std::vector<double>& w, double h) {
    double s = 0.5 * (w.front() + w.back());
    for (std::size_t i = 1; i + 1 < w.size(); ++i) s += w[i];
    return s * h;
}

struct Marcher {
    double beta;
    double h;
    double dt;
    double nu;       // compensated diffusion coefficient
    double epsilon;  // 0 = Godunov |w_x|, > 0 = smoothed flux

    // One explicit step; scratch receives the update.
    void step(const std::vector<double>& w, std::vector<double>& out) const {
        const int n = (int)w.size();
        const double ih = 1.0 / h;
        const double ih2 = 1.0 / (h * h);
        for (int i = 0; i < n - 1; ++i) {
            const double wl = (i == 0) ? w[1] : w[i - 1];  // Neumann mirror ghost
            const double diff = nu * (w[i + 1] - 2.0 * w[i] + wl) * ih2;
            const double dp = (w[i + 1] - w[i]) * ih;
            const double dm = (w[i] - wl) * ih;
            double ham;
            if (epsilon == 0.0) {
                // One-sided difference selected by the sign realizing the
                // max (beta > 0) / min (beta < 0).
                if (beta >= 0.0)
                    ham = beta * std::max({dp, -dm, 0.0});
                else
                    ham = -beta * std::min({dp, -dm, 0.0});
            } else {
                const double g = (beta >= 0.0) ? std::max({dp, -dm, 0.0})
                                               : -std::min({dp, -dm, 0.0});
                ham = beta * std::sqrt(g * g + epsilon * epsilon);
            }
            out[i] = w[i] + dt * (diff + ham);
        }
        out[n - 1] = 0.0;  // truncation boundary
    }
};

HjbSolution solve_impl(double beta, double y, const Grid1D& grid,
                       const SolveOptions& opts, double epsilon) {
    validate(beta, y, grid, opts.cfl_safety);
    const double h = grid.h();
    const long nsteps = (long)std::llround((grid.t_final - grid.t0) / grid.dt);
    if (nsteps < 1 || std::abs(grid.t0 + nsteps * grid.dt - grid.t_final) >
                          1e-9 * std::max(1.0, grid.t_final))
        throw std::invalid_argument("hjb grid: dt does not divide the horizon");

    double store_dt = opts.store_dt;
    if (store_dt <= 0.0)
        store_dt = (grid.t_final - grid.t0) / std::max(1, opts.target_slices);
    const long stride = std::max(1L, (long)std::llround(store_dt / grid.dt));

    HjbSolution sol;
    sol.beta = beta;
    sol.y = y;
    sol.epsilon = epsilon;
    sol.grid = grid;
    sol.w.xs.resize(grid.nx);
    for (int i = 0; i < grid.nx; ++i) sol.w.xs[i] = i * h;
    sol.wx.xs = sol.w.xs;

    std::vector<double> w = neumann_kernel_cell_averages(grid.nx, h, y, grid.t0);
    std::vector<double> scratch(w.size());

    // Compensation of the upwind Hamiltonian's +|beta| h/2 w_xx truncation
    // term; clamped so the diffusion weight stays positive on coarse grids.
    const double nu = 0.5 - std::min(std::abs(beta) * h * 0.5, 0.25);
    Marcher m{beta, h, grid.dt, nu, epsilon};

    auto store = [&](double t, const std::vector<double>& slice) {
        sol.w.times.push_back(t);
        sol.w.values.insert(sol.w.values.end(), slice.begin(), slice.end());
        sol.wx.times.push_back(t);
        const int n = (int)slice.size();
        for (int i = 0; i < n; ++i) {
            double d;
            if (i == 0)
                d = 0.0;  // Neumann
            else if (i == n - 1)
                d = (slice[i] - slice[i - 1]) / h;
            else
                d = (slice[i + 1] - slice[i - 1]) / (2.0 * h);
            sol.wx.values.push_back(d);
        }
        sol.mass.push_back(trapezoid_mass(slice, h));
    };

    store(grid.t0, w);
    double leakage = 0.0;
    for (long k = 0; k < nsteps; ++k) {
        m.step(w, scratch);
        // Diffusive outflow absorbed by the pinned Dirichlet node.
        leakage += grid.dt * nu * w[w.size() - 2] / h;
        w.swap(scratch);
        if ((k + 1) % stride == 0 || k + 1 == nsteps)
            store(grid.t0 + (double)(k + 1) * grid.dt, w);
    }
    sol.dirichlet_leakage = leakage;
    return sol;
}

}  // namespace

HjbSolution solve_hjb(double beta, double y, const Grid1D& grid,
                      const SolveOptions& opts) {
    return solve_impl(beta, y, grid, opts, 0.0);
}

HjbSolution solve_hjb_regularized(double beta, double y, const Grid1D& grid,
                                  double epsilon, const SolveOptions& opts) {
    if (epsilon <= 0.0) epsilon = grid.h();
    return solve_impl(beta, y, grid, opts, epsilon);
}

FreeBoundaryCurve extract_free_boundary(const HjbSolution& sol,
                                        int skip_cells) {
    FreeBoundaryCurve fb;
    if (sol.y == 0.0) {
        fb.no_interior_curve = true;
        fb.tau = sol.grid.t0;
        return fb;
    }
    const auto& xs = sol.wx.xs;
    const std::size_t n = xs.size();
    double last_time_with_root = -1.0;
    bool any_root = false;
    for (std::size_t ti = 0; ti < sol.wx.times.size(); ++ti) {
        const double* wx = sol.wx.row(ti);
        std::vector<double> roots;
        int last_sign = 0;
        std::size_t last_i = 0;
        for (std::size_t i = (std::size_t)skip_cells; i + 1 < n; ++i) {
            const double v = wx[i];
            if (v == 0.0) continue;  // flat / underflowed region carries no sign
            const int s = v > 0.0 ? 1 : -1;
            if (last_sign != 0 && s != last_sign) {
                const double x0 = xs[last_i], x1 = xs[i];
                const double v0 = wx[last_i], v1 = wx[i];
                roots.push_back(x0 - v0 * (x1 - x0) / (v1 - v0));
            }
            last_sign = s;
            last_i = i;
        }
        if (!roots.empty()) {
            any_root = true;
            last_time_with_root = sol.wx.times[ti];
            if (roots.size() > 1) {
                fb.has_multi_root = true;
                ++fb.multi_root_slices;
            }
            fb.samples.push_back({sol.wx.times[ti], std::move(roots)});
        }
    }
    if (!any_root) {
        fb.tau = sol.grid.t0;
        return fb;
    }
    if (last_time_with_root >= sol.w.times.back()) {
        fb.tau_beyond_horizon = true;
        fb.tau = sol.grid.t_final;
        return fb;
    }
    // first stored time strictly after the last slice carrying a root
    for (double t : sol.wx.times) {
        if (t > last_time_with_root) {
            fb.tau = t;
            break;
        }
    }
    return fb;
}

double DriftTable::operator()(double t, double x) const {
    const double ts = horizon - t;  // solver time
    // nearest stored slice / node
    const auto& tt = times;
    std::size_t ti = 0;
    {
        auto it = std::lower_bound(tt.begin(), tt.end(), ts);
        if (it == tt.end())
            ti = tt.size() - 1;
        else if (it == tt.begin())
            ti = 0;
        else {
            const std::size_t hi = (std::size_t)(it - tt.begin());
            ti = (tt[hi] - ts < ts - tt[hi - 1]) ? hi : hi - 1;
        }
    }
    const double h = xs[1] - xs[0];
    const long j = std::clamp((long)std::lround(x / h), 0L, (long)xs.size() - 1);
    return beta * sign_wx[ti * xs.size() + (std::size_t)j];
}

DriftTable optimal_drift_field(const HjbSolution& sol) {
    DriftTable d;
    d.times = sol.wx.times;
    d.xs = sol.wx.xs;
    d.beta = sol.beta;
    d.kappa = std::abs(sol.beta);
    d.horizon = sol.grid.t_final;
    d.sign_wx.resize(sol.wx.values.size());
    for (std::size_t i = 0; i < sol.wx.values.size(); ++i)
        d.sign_wx[i] = sgn(sol.wx.values[i]);
    return d;
}

namespace {

void write_lines(std::FILE* fp, const std::vector<std::string>& lines) {
    for (const auto& l : lines) std::fprintf(fp, "# %s\n", l.c_str());
}

struct FileCloser {
    std::FILE* fp;
    ~FileCloser() {
        if (fp) std::fclose(fp);
    }
};

std::FILE* open_or_throw(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("cannot open output file: " + path);
    return fp;
}

}  // namespace

void write_fields_csv(const HjbSolution& sol, const std::string& path,
                      const std::vector<std::string>& header_lines) {
    std::FILE* fp = open_or_throw(path);
    FileCloser guard{fp};
    write_lines(fp, header_lines);
    std::fprintf(fp, "t,x,w,wx\n");
    for (std::size_t ti = 0; ti < sol.w.times.size(); ++ti)
        for (std::size_t j = 0; j < sol.w.xs.size(); ++j)
            std::fprintf(fp, "%.12g,%.12g,%.12g,%.12g\n", sol.w.times[ti],
                         sol.w.xs[j], sol.w.at(ti, j), sol.wx.at(ti, j));
}

void write_free_boundary_csv(const FreeBoundaryCurve& fb,
                             const std::string& path,
                             const std::vector<std::string>& header_lines) {
    std::FILE* fp = open_or_throw(path);
    FileCloser guard{fp};
    write_lines(fp, header_lines);
    if (fb.no_interior_curve) {
        std::fprintf(fp, "# no interior nodal curve (y = 0)\n");
    } else if (fb.tau_beyond_horizon) {
        std::fprintf(fp, "# tau = beyond horizon\n");
    } else {
        std::fprintf(fp, "# tau = %.12g\n", fb.tau);
    }
    if (fb.has_multi_root)
        std::fprintf(fp, "# warning: %zu slices carried multiple interior roots\n",
                     fb.multi_root_slices);
    std::fprintf(fp, "t,s\n");
    for (const auto& s : fb.samples)
        for (double r : s.roots) std::fprintf(fp, "%.12g,%.12g\n", s.t, r);
}

}  // namespace qbound::hjb
