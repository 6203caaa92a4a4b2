#include "qbound/closed_form.hpp"

#include "qbound/special.hpp"

#include <cmath>
#include <stdexcept>

namespace qbound::closed_form {

namespace {

void require_time(double t) {
    if (!(t > 0.0)) throw std::domain_error("elapsed time must be positive");
}

// beta * e^{2 beta |z|} * tail mass of N(0,t) beyond a, with the cancellation
// between the exponential prefactor and the shrinking tail resolved through
// erfcx.  Here a = |x| + |z| + beta t, and the combined exponent satisfies
//   2 beta |z| - a^2/(2t) = -(|x|+|z|-beta t)^2/(2t) - 2 beta |x|,
// which is a sum of non-positive terms whenever beta >= 0.
double tail_term(double beta, double t, double ax, double az) {
    const double a = ax + az + beta * t;
    const double u = a / std::sqrt(2.0 * t);
    if (u >= 0.0) {
        const double d = ax + az - beta * t;
        const double expo = -d * d / (2.0 * t) - 2.0 * beta * ax;
        return 0.5 * beta * erfcx(u) * std::exp(expo);
    }
    // a < 0 forces beta < 0, so e^{2 beta |z|} <= 1 and erfc(u) in (1,2):
    // the direct product is well conditioned.
    return 0.5 * beta * std::exp(2.0 * beta * az) * std::erfc(u);
}

// Centered bang-bang kernel of dY = beta sgn(Y) dt + dB.
double bang_bang_centered(double beta, double x, double t, double z) {
    const double ax = std::abs(x), az = std::abs(z);
    const double quad =
        (x - z) * (x - z) - 2.0 * beta * t * (az - ax) + beta * beta * t * t;
    const double g = inv_sqrt_2pi / std::sqrt(t) * std::exp(-quad / (2.0 * t));
    return g - tail_term(beta, t, ax, az);
}

// Value of the bang-bang kernel with attraction magnitude beta toward its
// center, evaluated AT the center, distance d = |x - center| away:
//   (2 pi t)^{-1/2} e^{-(d - beta t)^2/(2t)} + beta * tail(N(0,t) > d - beta t).
double bang_bang_at_center(double beta, double t, double d) {
    const double a = d - beta * t;
    const double u = a / std::sqrt(2.0 * t);
    const double inv = inv_sqrt_2pi / std::sqrt(t);
    if (beta < 0.0 && u > 0.0) {
        // Repelling case: the Gaussian spike and the negative tail nearly
        // cancel; factor out e^{-u^2} and evaluate the bracket with erfcx.
        const double bracket = inv + 0.5 * beta * erfcx(u);
        const double v = std::exp(-u * u) * bracket;
        return v > 0.0 ? v : 0.0;
    }
    return inv * std::exp(-u * u) + 0.5 * beta * std::erfc(u);
}

}  // namespace

DensityValue heat_kernel(double t, double x, double z) {
    require_time(t);
    return {gauss_pdf(x - z, t)};
}

DensityValue bang_bang_density(const BangBangParams& p, double x, double t,
                               double z) {
    require_time(t);
    return {bang_bang_centered(p.beta, x - p.center, t, z - p.center)};
}

DensityValue reflected_drift_density(double beta, double t, double x,
                                     double z) {
    require_time(t);
    if (x < 0.0 || z < 0.0)
        throw std::domain_error("reflected density needs x, z >= 0");
    const double v =
        bang_bang_centered(beta, x, t, z) + bang_bang_centered(beta, x, t, -z);
    return {v > 0.0 ? v : 0.0};
}

DensityValue q_kappa_explicit(double kappa, double t, double x, double z) {
    require_time(t);
    if (x < 0.0 || z < 0.0 || kappa < 0.0)
        throw std::domain_error("q_kappa needs x, z, kappa >= 0");
    const double s2t = std::sqrt(2.0 * t);
    const double inv = inv_sqrt_2pi / std::sqrt(t);
    const double g1 = inv * std::exp(-(x - z - kappa * t) * (x - z - kappa * t) /
                                     (2.0 * t));
    // e^{-(x+z+kt)^2/(2t) + 2kx} = e^{-(x+z-kt)^2/(2t) - 2kz}: evaluate in the
    // form whose exponent is a sum of non-positive terms.
    const double d = x + z - kappa * t;
    const double g2 = inv * std::exp(-d * d / (2.0 * t) - 2.0 * kappa * z);
    const double u = d / s2t;
    double tail;
    if (u >= 0.0) {
        tail = kappa * erfcx(u) * std::exp(-u * u - 2.0 * kappa * z);
    } else {
        tail = kappa * std::exp(-2.0 * kappa * z) * std::erfc(u);
    }
    return {g1 + g2 + tail};
}

DensityBounds optimal_bounds(double kappa, double t, double x, double y) {
    require_time(t);
    if (x < 0.0 || y < 0.0 || kappa < 0.0)
        throw std::domain_error("optimal_bounds needs x, y, kappa >= 0");
    const double d_same = std::abs(x - y);
    const double d_mirror = x + y;  // distance from x to the image center -y
    const double up = bang_bang_at_center(kappa, t, d_same) +
                      bang_bang_at_center(kappa, t, d_mirror);
    const double lo = bang_bang_at_center(-kappa, t, d_same) +
                      bang_bang_at_center(-kappa, t, d_mirror);
    return {{lo}, {up}};
}

double grad_reflected_drift_density(double beta, double t, double x, double y) {
    require_time(t);
    if (x < 0.0 || y < 0.0)
        throw std::domain_error("gradient needs x, y >= 0");
    const double a = x - y + beta * t;
    const double pref = std::exp(-a * a / (2.0 * t)) / (sqrt_2pi * t * std::sqrt(t));
    const double mirror = std::exp(-2.0 * x * y / t) * (x + y - beta * t);
    return -pref * (a + mirror);
}

}  // namespace qbound::closed_form
