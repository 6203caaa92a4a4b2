#pragma once

// Adaptive quadrature used by the normalization / transform oracles.
// Backed by Boost.Math Gauss-Kronrod; semi-infinite ranges are allowed
// (Boost maps them internally).

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <limits>

namespace qbound {

struct QuadResult {
    double value;
    double error_estimate;
};

template <class F>
QuadResult integrate(F&& f, double a, double b, double tol = 1e-10,
                     unsigned max_depth = 15) {
    double err = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        std::forward<F>(f), a, b, max_depth, tol, &err);
    return {v, err};
}

template <class F>
QuadResult integrate_halfline(F&& f, double a, double tol = 1e-10) {
    return integrate(std::forward<F>(f), a,
                     std::numeric_limits<double>::infinity(), tol);
}

}  // namespace qbound
