#pragma once

// Explicit finite-difference solver for the nonlinear equation
//     w_t = 1/2 w_xx + beta |w_x|   on [0, x_max],
// Neumann at 0 (mirror ghost), homogeneous Dirichlet at the truncation point,
// delta-at-y initial data realized as the Neumann heat kernel at a small
// offset time t0 (cell-averaged, so sub-cell offsets degrade gracefully to a
// mass-correct discrete delta).
//
// w(t, x) equals the extremal transition density q_{b}(T - t, x; T, y) of the
// reflecting diffusion whose drift is the feedback beta * sgn(w_x); beta = +kappa
// produces the upper envelope, beta = -kappa the lower one.

#include <optional>
#include <string>
#include <vector>

namespace qbound::hjb {

struct Grid1D {
    double x_max;    // domain truncation, > 0
    int nx;          // space points, >= 3
    double dt;       // time step, > 0
    double t_final;  // horizon, > t0
    double t0;       // initialization offset, > 0

    double h() const { return x_max / (nx - 1); }

    /// CFL bound for the explicit scheme: dt <= safety * h^2 / (1 + |beta| h)
    /// with safety <= 0.5 keeps the update monotone.
    bool satisfies_cfl(double beta, double safety = 0.5) const;

    /// Build a grid with dt chosen from the CFL bound (and rounded so the
    /// march lands exactly on t_final).
    static Grid1D with_cfl(double beta, double x_max, double h, double t_final,
                           double t0 = 1e-2, double safety = 0.5);
};

/// Domain truncation heuristic: the support spreads at speed |beta| plus
/// diffusion, so the wall must outrun the front over the whole horizon.
double default_x_max(double beta, double y, double t_final);

/// Cell averages of the Neumann heat kernel h(t0, x-y) + h(t0, x+y) on the
/// solver grid (node 0 owns [0, h/2], the last node is the pinned Dirichlet
/// zero).  This is the exact initial slice used by solve_hjb; averaging keeps
/// the discrete mass exact even when sqrt(t0) is below the cell size.
std::vector<double> neumann_kernel_cell_averages(int nx, double h, double y,
                                                 double t0);

struct DensityField {
    std::vector<double> times;   // stored slice times (ascending)
    std::vector<double> xs;      // grid nodes
    std::vector<double> values;  // row-major [time][x]

    double at(std::size_t ti, std::size_t xi) const {
        return values[ti * xs.size() + xi];
    }
    const double* row(std::size_t ti) const {
        return values.data() + ti * xs.size();
    }
    /// Bilinear interpolation; clamps to the stored range.
    double interpolate(double t, double x) const;
};

struct SolveOptions {
    double cfl_safety = 0.5;
    int target_slices = 400;  // stored-slice budget (memory control)
    double store_dt = 0.0;    // explicit slice spacing; 0 = from target_slices
};

struct HjbSolution {
    DensityField w;   // w(t, x) >= 0
    DensityField wx;  // centered space derivative per stored slice
    double beta = 0.0;
    double y = 0.0;
    double epsilon = 0.0;  // regularization used (0 = Godunov scheme)
    Grid1D grid{};
    std::vector<double> mass;      // trapezoid mass per stored slice
    double dirichlet_leakage = 0.0;  // accumulated diffusive outflow at x_max

    double w_at(double t, double x) const { return w.interpolate(t, x); }
    double wx_at(double t, double x) const { return wx.interpolate(t, x); }
};

/// March the Godunov-upwind scheme from t0 to t_final.  The |w_x| term uses
/// the one-sided difference that realizes the max (beta > 0) or min (beta < 0),
/// and the diffusion stencil compensates the upwind term's leading
/// +|beta| h/2 w_xx truncation error so the scheme stays second order in
/// smooth regions while remaining monotone under the CFL bound.
HjbSolution solve_hjb(double beta, double y, const Grid1D& grid,
                      const SolveOptions& opts = {});

/// Variant marching the smoothed flux beta * sqrt(w_x^2 + eps^2) instead of
/// beta |w_x|; eps <= 0 selects the default eps = h.  Cross-check only.
HjbSolution solve_hjb_regularized(double beta, double y, const Grid1D& grid,
                                  double epsilon = 0.0,
                                  const SolveOptions& opts = {});

struct FreeBoundarySample {
    double t;
    std::vector<double> roots;  // interior zeros of w_x (usually one)
};

struct FreeBoundaryCurve {
    std::vector<FreeBoundarySample> samples;  // slices with at least one root
    double tau = 0.0;             // first stored time with no interior root
    bool tau_beyond_horizon = false;
    bool no_interior_curve = false;  // y == 0 case
    bool has_multi_root = false;     // some slice carried > 1 interior root
    std::size_t multi_root_slices = 0;
};

/// Scan stored w_x slices for interior sign changes (the Neumann-forced zero
/// at x = 0 is excluded by skipping the first two cells); each root is placed
/// by linear interpolation.  tau is the first stored time from which no
/// interior sign change occurs through the horizon.
FreeBoundaryCurve extract_free_boundary(const HjbSolution& sol,
                                        int skip_cells = 2);

struct DriftTable {
    std::vector<double> times;   // process times (t = t_final - solver time)
    std::vector<double> xs;
    std::vector<double> sign_wx;  // row-major [time][x], values in {-1, 0, +1}
    double beta = 0.0;
    double kappa = 0.0;  // declared bound |beta|
    double horizon = 0.0;

    /// Feedback drift beta * sgn(w_x(T - t, x)) with sign(0) = 0.
    double operator()(double t, double x) const;
};

/// Tabulate the optimal feedback drift field from a finished solution.
DriftTable optimal_drift_field(const HjbSolution& sol);

/// CSV export: w/wx fields (columns t,x,w,wx) and free boundary (t,s with tau
/// in the header).  `header_lines` are emitted verbatim before the data.
void write_fields_csv(const HjbSolution& sol, const std::string& path,
                      const std::vector<std::string>& header_lines = {});
void write_free_boundary_csv(const FreeBoundaryCurve& fb,
                             const std::string& path,
                             const std::vector<std::string>& header_lines = {});

}  // namespace qbound::hjb
