#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qbound/closed_form.hpp"
#include "qbound/hjb.hpp"

#include <cmath>

using namespace qbound;
using namespace qbound::hjb;
namespace cf = qbound::closed_form;

TEST_CASE("grid construction and CFL guard") {
    auto g = Grid1D::with_cfl(1.0, 10.0, 0.02, 1.0);
    CHECK(g.satisfies_cfl(1.0));
    CHECK(g.h() == doctest::Approx(0.02));
    Grid1D bad = g;
    bad.dt = g.dt * 4.0;
    CHECK_THROWS_AS(solve_hjb(1.0, 0.5, bad), std::invalid_argument);
    CHECK_THROWS_AS(solve_hjb(1.0, 20.0, g), std::invalid_argument);  // y >= x_max
}

TEST_CASE("initial slice is reproduced bit-for-bit") {
    auto g = Grid1D::with_cfl(0.5, 8.0, 0.05, 0.2, 1e-2);
    auto sol = solve_hjb(0.5, 0.8, g);
    auto init = neumann_kernel_cell_averages(g.nx, g.h(), 0.8, g.t0);
    REQUIRE(sol.w.times.front() == g.t0);
    for (int i = 0; i < g.nx; ++i) {
        CHECK(sol.w.at(0, (std::size_t)i) == init[(std::size_t)i]);
    }
}

TEST_CASE("beta = 0: linear heat equation with Neumann wall") {
    auto g = Grid1D::with_cfl(0.0, 10.0, 0.02, 1.0, 1e-2);
    auto sol = solve_hjb(0.0, 0.8, g);
    double linf = 0.0;
    for (int i = 0; i < g.nx / 2; ++i) {
        const double x = i * g.h();
        const double ref = cf::reflected_drift_density(0.0, 1.0, x, 0.8).value;
        linf = std::max(linf, std::abs(sol.w.at(sol.w.times.size() - 1, (std::size_t)i) - ref));
    }
    CHECK(linf <= 1e-3);

    // discrete mass is conserved up to the recorded Dirichlet leakage
    const double defect = sol.mass.back() - sol.mass.front();
    CHECK(std::abs(defect + sol.dirichlet_leakage) < 1e-12);
    CHECK(sol.dirichlet_leakage < 1e-6 * (g.t_final - g.t0));
}

TEST_CASE("beta = 1, y = 0: closed-form oracle at moderate resolution") {
    auto g = Grid1D::with_cfl(1.0, 10.0, 0.02, 1.0, (0.02 * 0.02) / 100.0);
    auto sol = solve_hjb(1.0, 0.0, g);
    double linf = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double x = i * g.h();
        const double ref = cf::q_kappa_explicit(1.0, 1.0, x, 0.0).value;
        linf = std::max(linf, std::abs(sol.w_at(1.0, x) - ref));
    }
    CHECK(linf <= 2e-3);

    // positivity and mass growth for the maximizing sign
    for (double v : sol.w.values) CHECK(v >= 0.0);
    CHECK(sol.mass.back() > sol.mass.front());
}

TEST_CASE("regularized flux cross-check stays close to the Godunov march") {
    auto g = Grid1D::with_cfl(1.0, 10.0, 0.02, 0.5, 1e-2);
    auto godunov = solve_hjb(1.0, 1.0, g);
    auto smooth = solve_hjb_regularized(1.0, 1.0, g);  // eps = h
    CHECK(smooth.epsilon == doctest::Approx(g.h()));
    double dmax = 0.0;
    const std::size_t last = godunov.w.times.size() - 1;
    for (int i = 0; i < g.nx; ++i)
        dmax = std::max(dmax, std::abs(godunov.w.at(last, (std::size_t)i) -
                                       smooth.w.at(last, (std::size_t)i)));
    // eps-smoothing adds mass at rate ~ beta * eps per unit time
    CHECK(dmax < 10.0 * g.h());
    CHECK(dmax > 0.0);
}

TEST_CASE("comparison ordering against the zero-drift solution") {
    auto g = Grid1D::with_cfl(1.0, 12.0, 0.02, 1.0, 4e-6);
    auto up = solve_hjb(1.0, 1.0, g);
    auto lo = solve_hjb(-1.0, 1.0, g);
    const std::size_t last = up.w.times.size() - 1;
    for (int i = 0; i < g.nx; ++i) {
        const double x = i * g.h();
        const double mid = cf::reflected_drift_density(0.0, 1.0, x, 1.0).value;
        CHECK(up.w.at(last, (std::size_t)i) >= mid - 1e-3);
        CHECK(lo.w.at(last, (std::size_t)i) <= mid + 1e-3);
    }
}

TEST_CASE("free boundary: y = 0 reports no interior curve") {
    auto g = Grid1D::with_cfl(1.0, 10.0, 0.05, 0.5, 1e-2);
    auto sol = solve_hjb(1.0, 0.0, g);
    auto fb = extract_free_boundary(sol);
    CHECK(fb.no_interior_curve);
    CHECK(fb.samples.empty());
}

TEST_CASE("free boundary: beta = 1, y = 1 extinction") {
    auto g = Grid1D::with_cfl(1.0, default_x_max(1.0, 1.0, 3.0), 0.02, 3.0, 1e-2);
    SolveOptions opts;
    opts.store_dt = 0.02;
    auto sol = solve_hjb(1.0, 1.0, g, opts);
    auto fb = extract_free_boundary(sol);
    REQUIRE(!fb.samples.empty());
    CHECK(!fb.tau_beyond_horizon);
    CHECK(!fb.has_multi_root);
    // one root per slice, first root lands on the delta center
    CHECK(fb.samples.front().roots.size() == 1);
    CHECK(std::abs(fb.samples.front().roots[0] - 1.0) <= 2.0 * g.h());
    CHECK(fb.tau > 0.5);
    CHECK(fb.tau < 2.0);
    // beyond tau the derivative is strictly negative in the interior bulk
    const auto& wx = sol.wx;
    for (std::size_t ti = 0; ti < wx.times.size(); ++ti) {
        if (wx.times[ti] <= fb.tau) continue;
        for (std::size_t i = 2; i < wx.xs.size() - 1; ++i) {
            if (wx.at(ti, i) != 0.0) CHECK(wx.at(ti, i) < 0.0);
        }
    }
}

TEST_CASE("free boundary: beta = 0 nodal point sits at the kernel argmax") {
    const double y = 1.0, T = 0.5;
    auto g = Grid1D::with_cfl(0.0, 10.0, 0.02, T, 1e-2);
    SolveOptions opts;
    opts.store_dt = T;  // just the last slice
    auto sol = solve_hjb(0.0, y, g, opts);
    auto fb = extract_free_boundary(sol);
    REQUIRE(!fb.samples.empty());
    const auto& last = fb.samples.back();
    REQUIRE(last.roots.size() == 1);
    auto deriv = [&](double x) {
        auto f = [&](double xx) {
            return cf::reflected_drift_density(0.0, last.t, xx, y).value;
        };
        return oracles::central_diff(f, x, 1e-6);
    };
    const double argmax = oracles::bisect(deriv, 0.3, 2.0, 1e-11);
    CHECK(std::abs(last.roots[0] - argmax) <= 2.0 * g.h());
}

TEST_CASE("optimal drift field sign structure") {
    // y = 0: constant drift toward the wall
    auto g0 = Grid1D::with_cfl(1.0, 10.0, 0.02, 1.0, 1e-2);
    auto s0 = solve_hjb(1.0, 0.0, g0);
    auto d0 = optimal_drift_field(s0);
    CHECK(d0.kappa == 1.0);
    for (double x : {0.5, 1.0, 3.0, 6.0}) {
        CHECK(d0(0.5, x) == -1.0);
    }

    // y = 1, t near the horizon: +1 below the nodal point, -1 above it
    auto g1 = Grid1D::with_cfl(1.0, default_x_max(1.0, 1.0, 3.0), 0.02, 3.0, 1e-2);
    auto s1 = solve_hjb(1.0, 1.0, g1);
    auto fb = extract_free_boundary(s1);
    auto d1 = optimal_drift_field(s1);
    const double t_near = g1.t_final - g1.t0;  // solver time ~ t0
    CHECK(d1(t_near, 0.5) == 1.0);
    CHECK(d1(t_near, 1.5) == -1.0);
    // T - t beyond extinction: the nodal point is gone and the drift points
    // at the wall everywhere
    REQUIRE(!fb.tau_beyond_horizon);
    const double t_late = g1.t_final - (fb.tau + 0.5);
    for (double x : {0.5, 1.0, 2.0, 4.0}) {
        CHECK(d1(t_late, x) == -1.0);
    }
}
