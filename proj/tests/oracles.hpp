#pragma once

// Independent oracles shared by the unit and acceptance suites.  Everything
// here goes through generic numerics (adaptive quadrature, finite
// differences, bisection) rather than the library's closed forms, so the
// checks stay two-sided.

#include "qbound/quadrature.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracles {

// Integral of a density over [0, inf), split at a few scale points so the
// adaptive rule sees the peaks.
template <class F>
double halfline_mass(F&& f, double scale, double tol = 1e-11) {
    const double cut = std::max(1.0, scale);
    double total = qbound::integrate(f, 0.0, cut, tol).value;
    total += qbound::integrate(f, cut, 8.0 * cut + 40.0, tol).value;
    total += qbound::integrate_halfline(f, 8.0 * cut + 40.0, tol).value;
    return total;
}

template <class F>
double line_mass(F&& f, double scale, double tol = 1e-11) {
    auto neg = [&](double z) { return f(-z); };
    return halfline_mass(f, scale, tol) + halfline_mass(neg, scale, tol);
}

// Central finite difference.
template <class F>
double central_diff(F&& f, double x, double step = 1e-5) {
    return (f(x + step) - f(x - step)) / (2.0 * step);
}

// Bisection root of a continuous function with a sign change on [a, b].
template <class F>
double bisect(F&& f, double a, double b, double tol = 1e-12) {
    double fa = f(a), fb = f(b);
    if (!(fa * fb < 0.0)) throw std::runtime_error("bisect: no sign change");
    for (int i = 0; i < 200 && b - a > tol; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fa * fm <= 0.0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

// The elapsed-time display of the reflected density toward target 0,
//   q_beta(t, x; 0) = 2/sqrt(2 pi t) * int_{x/sqrt t}^inf z e^{-(z + beta sqrt t)^2 / 2} dz,
// evaluated by quadrature.
inline double q_to_zero_integral(double beta, double t, double x) {
    const double st = std::sqrt(t);
    auto f = [&](double z) {
        const double u = z + beta * st;
        return z * std::exp(-0.5 * u * u);
    };
    const double lo = x / st;
    return 2.0 / std::sqrt(2.0 * M_PI * t) *
           qbound::integrate(f, lo, lo + 60.0, 1e-13).value;
}

// Two-sample Kolmogorov-Smirnov 1% critical value.
inline double ks_critical_1pct(std::size_t n, std::size_t m) {
    return 1.62762 * std::sqrt((double)(n + m) / ((double)n * (double)m));
}

}  // namespace oracles
