#pragma once

// Scaled complementary error function and Gaussian tail helpers.
//
// Every kernel in this library subtracts near-equal Gaussian masses, so the
// tail integrals are routed through erfcx(x) = exp(x^2) * erfc(x) whenever the
// naive product would cancel or overflow.

#include <cmath>

namespace qbound {

inline constexpr double inv_sqrt_2pi = 0.3989422804014326779399461;
inline constexpr double sqrt_2pi = 2.5066282746310005024157653;

/// exp(x^2) * erfc(x), accurate over the whole real line.
double erfcx(double x);

/// sgn with sgn(0) = 0.
inline double sgn(double v) { return (v > 0.0) - (v < 0.0); }

/// Upper tail mass of N(0,t): integral over (a, inf) of the N(0,t) density.
inline double gauss_tail(double a, double t) {
    return 0.5 * std::erfc(a / std::sqrt(2.0 * t));
}

/// One-dimensional Gaussian density with variance t.
inline double gauss_pdf(double u, double t) {
    return inv_sqrt_2pi / std::sqrt(t) * std::exp(-u * u / (2.0 * t));
}

}  // namespace qbound
