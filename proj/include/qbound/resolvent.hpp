#pragma once

// Laplace-domain solution for the reflecting bang-bang process
//     dX = -beta sgn(X - y) dt + dB + dL        on [0, inf),
// i.e. attraction of magnitude beta toward the center y (the drift convention
// of this module matches that equation; it is the mirror of the closed_form
// convention).  V_y(x) is the Laplace transform in time of the transition
// density q(t, x, y) with target point equal to the center; the time density
// is recovered by numerical inversion.

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace qbound::hjb {
struct HjbSolution;
}

namespace qbound::resolvent {

struct ResolventCoefficients {
    double beta;
    double lambda;
    double y;
    double beta_bar;  // sqrt(beta^2 + 2 lambda) > |beta|
    double c1, c2, c3;
};

/// Solve the two-branch ODE coefficients for V_y.  lambda must be positive.
ResolventCoefficients resolvent_coefficients(double beta, double lambda,
                                             double y);

/// Evaluate V_y(x) from a coefficient set.  Both branches agree at x = y.
double resolvent_value(const ResolventCoefficients& coeffs, double x);

/// Same evaluation for complex lambda with positive real part; used by the
/// contour-sampling inversion method.
std::complex<double> resolvent_value_complex(double beta,
                                             std::complex<double> lambda,
                                             double y, double x);

enum class InversionMethod {
    euler,           // Euler-summation contour method (complex lambda, Re > 0)
    gaver_stehfest,  // samples only real positive lambda; ~1e-6 floor in doubles
};

struct InversionConfig {
    InversionMethod method = InversionMethod::euler;
    int terms = 18;      // Euler M / Gaver-Stehfest N (even)
    double tol = 1e-6;   // requested absolute accuracy
};

struct InversionResult {
    double value;
    double err_estimate;  // difference of successive truncation levels
    int terms;
    bool converged;       // err_estimate <= tol
};

using LaplaceFn = std::function<std::complex<double>(std::complex<double>)>;

/// Numerically invert a Laplace transform at time t > 0.  The evaluator is
/// called with real lambda for gaver_stehfest and complex lambda (fixed
/// positive real part) for euler; it must be safe for concurrent calls.
InversionResult invert_laplace(const LaplaceFn& f, double t,
                               const InversionConfig& cfg = {});

/// q(t, x, y) of the reflecting bang-bang process via transform inversion.
InversionResult reflected_bangbang_density(double beta, double y, double t,
                                           double x,
                                           const InversionConfig& cfg = {});

struct SuboptimalityRow {
    double x;
    double hjb_density;       // optimal q_{b+}(0, x; t, y) from the HJB solve
    double bangbang_density;  // reflecting bang-bang q(t, x, y)
    double gap;               // hjb - bangbang
};

struct SuboptimalityReport {
    std::vector<SuboptimalityRow> rows;
    double combined_tolerance;  // declared hjb tolerance + inversion estimate
    double max_gap;
    double max_abs_gap;
    bool strictly_suboptimal_somewhere;  // max_gap > 5 * combined_tolerance
    bool agrees_within_tolerance;        // max_abs_gap < combined_tolerance
};

/// Compare the reflecting bang-bang density against the HJB-optimal density
/// w(t, x) on a grid of start points.  `sol` must be solved with the same
/// beta (attraction magnitude) and center y, horizon >= t.
SuboptimalityReport bangbang_suboptimality_check(double beta, double y,
                                                 double t,
                                                 const std::vector<double>& xs,
                                                 const qbound::hjb::HjbSolution& sol,
                                                 double hjb_tolerance,
                                                 const InversionConfig& cfg = {});

}  // namespace qbound::resolvent
