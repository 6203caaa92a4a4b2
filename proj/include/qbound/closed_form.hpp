#pragma once

// Exact transition densities for drifted and bang-bang diffusions on the line
// and their reflections on [0, inf).
//
// Sign convention used throughout this module: beta is the signed drift
// pointing toward +inf.  The centered bang-bang process is
//     dY = beta * sgn(Y - center) dt + dB,
// so beta > 0 repels from the center and beta < 0 attracts.  The reflected
// process with constant drift beta on [0, inf) is the fold X = |Y| of the
// centered (center = 0) bang-bang process, and kappa-named parameters are
// attraction magnitudes toward 0 (drift -kappa).

namespace qbound::closed_form {

struct HeatKernelQuery {
    double t;  // elapsed time, > 0
    double x;
    double z;
};

struct BangBangParams {
    double beta = 0.0;    // signed drift toward +inf
    double center = 0.0;  // attraction/repulsion point
};

struct DensityValue {
    double value;  // probability density, >= 0
};

struct DensityBounds {
    DensityValue lower;
    DensityValue upper;
};

/// Free-space heat kernel (2 pi t)^{-1/2} exp(-(x-z)^2 / 2t).
DensityValue heat_kernel(double t, double x, double z);
inline DensityValue heat_kernel(const HeatKernelQuery& q) {
    return heat_kernel(q.t, q.x, q.z);
}

/// Transition density of the centered bang-bang diffusion
/// dY = beta sgn(Y - center) dt + dB, from x to z in elapsed time t.
/// Centers other than 0 are handled by translating both endpoints.
DensityValue bang_bang_density(const BangBangParams& p, double x, double t,
                               double z);

/// Transition density of the reflected diffusion dX = beta dt + dB + dL on
/// [0, inf): the fold of the centered bang-bang kernel, q = p(x,t,z) + p(x,t,-z).
DensityValue reflected_drift_density(double beta, double t, double x, double z);

/// Explicit density of the reflected diffusion with drift -kappa toward 0
/// (two Gaussian images plus a 2 kappa e^{-2 kappa z} tail term).
/// Identical to reflected_drift_density(-kappa, ...) through different algebra.
DensityValue q_kappa_explicit(double kappa, double t, double x, double z);

/// Optimal lower/upper envelopes for the density at y of any reflected
/// diffusion on [0, inf) whose drift is bounded by kappa.  Assembled from the
/// attracting (upper) and repelling (lower) bang-bang kernels centered at +-y,
/// evaluated at their centers via the Gaussian tail-integral form.
DensityBounds optimal_bounds(double kappa, double t, double x, double y);

/// d/dx of reflected_drift_density(beta, t, x, y); t is the remaining time.
/// For y > 0 this changes sign at an interior point, for y = 0 it is <= 0.
double grad_reflected_drift_density(double beta, double t, double x, double y);

}  // namespace qbound::closed_form
