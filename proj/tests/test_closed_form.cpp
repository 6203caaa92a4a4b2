#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qbound/closed_form.hpp"

#include <cmath>
#include <random>

using namespace qbound;
using namespace qbound::closed_form;

TEST_CASE("heat kernel values and symmetry") {
    CHECK(heat_kernel(1.0, 0.0, 0.0).value == doctest::Approx(0.3989422804).epsilon(1e-9));
    CHECK(heat_kernel(2.0, 1.0, 1.0).value == doctest::Approx(0.2820947918).epsilon(1e-9));
    CHECK(heat_kernel(0.5, 0.0, 1.0).value == heat_kernel(0.5, 1.0, 0.0).value);
    CHECK_THROWS_AS(heat_kernel(0.0, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(heat_kernel(-1.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("bang-bang kernel: zero drift reduces to the Gaussian") {
    BangBangParams p{0.0, 0.0};
    CHECK(bang_bang_density(p, 0.7, 1.0, -0.2).value ==
          doctest::Approx(heat_kernel(1.0, 0.7, -0.2).value).epsilon(1e-14));
}

TEST_CASE("bang-bang kernel: mirror symmetry through the center") {
    BangBangParams p{1.0, 0.0};
    CHECK(bang_bang_density(p, 0.5, 1.0, 1.5).value ==
          doctest::Approx(bang_bang_density(p, -0.5, 1.0, -1.5).value)
              .epsilon(1e-14));
    // center translation: shifting everything leaves the value unchanged
    BangBangParams ps{1.0, 2.0};
    CHECK(bang_bang_density(ps, 2.5, 1.0, 3.5).value ==
          doctest::Approx(bang_bang_density(p, 0.5, 1.0, 1.5).value)
              .epsilon(1e-14));
}

TEST_CASE("bang-bang kernel value at the origin (reference)") {
    // dip of the repelling kernel started at its own center
    BangBangParams p{1.0, 0.0};
    CHECK(bang_bang_density(p, 0.0, 1.0, 0.0).value ==
          doctest::Approx(0.0833154705876863).epsilon(1e-12));
}

TEST_CASE("bang-bang kernel normalizes over the line") {
    for (double beta : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        for (double t : {0.1, 1.0}) {
            BangBangParams p{beta, 0.0};
            auto f = [&](double z) { return bang_bang_density(p, 0.7, t, z).value; };
            const double scale = 1.0 + std::abs(beta) * t + 3.0 * std::sqrt(t);
            CHECK(oracles::line_mass(f, scale) == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("reflected density: zero drift folds the heat kernel") {
    const double v = reflected_drift_density(0.0, 1.0, 0.3, 0.8).value;
    const double ref =
        heat_kernel(1.0, 0.3, 0.8).value + heat_kernel(1.0, 0.3, -0.8).value;
    CHECK(v == doctest::Approx(ref).epsilon(1e-14));
    CHECK_THROWS_AS(reflected_drift_density(1.0, 1.0, -0.1, 0.5), std::domain_error);
}

TEST_CASE("reflected density normalizes on the half-line") {
    auto f = [](double z) { return reflected_drift_density(-1.0, 1.0, 0.5, z).value; };
    CHECK(oracles::halfline_mass(f, 3.0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("reflected density at the wall matches the tail-integral display") {
    const double q = reflected_drift_density(-1.0, 1.0, 0.5, 0.0).value;
    CHECK(q == doctest::Approx(oracles::q_to_zero_integral(-1.0, 1.0, 0.5))
                   .epsilon(1e-10));
    // and a second parameter point
    const double q2 = reflected_drift_density(2.0, 0.5, 1.2, 0.0).value;
    CHECK(q2 == doctest::Approx(oracles::q_to_zero_integral(2.0, 0.5, 1.2))
                    .epsilon(1e-10));
}

TEST_CASE("q_kappa: kappa = 0 collapses to the reflected heat kernel") {
    const double v = q_kappa_explicit(0.0, 1.0, 0.4, 0.9).value;
    CHECK(v == doctest::Approx(reflected_drift_density(0.0, 1.0, 0.4, 0.9).value)
                   .epsilon(1e-14));
}

TEST_CASE("q_kappa normalizes and equals the folded bang-bang kernel") {
    auto f = [](double z) { return q_kappa_explicit(1.0, 1.0, 0.5, z).value; };
    CHECK(oracles::halfline_mass(f, 3.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(q_kappa_explicit(1.0, 1.0, 0.5, 0.2).value ==
          doctest::Approx(reflected_drift_density(-1.0, 1.0, 0.5, 0.2).value)
              .epsilon(1e-12));
}

TEST_CASE("optimal bounds: degenerate at kappa = 0, closed forms at y = 0") {
    const auto b0 = optimal_bounds(0.0, 1.0, 0.3, 0.8);
    const double ref = reflected_drift_density(0.0, 1.0, 0.3, 0.8).value;
    CHECK(b0.lower.value == doctest::Approx(ref).epsilon(1e-13));
    CHECK(b0.upper.value == doctest::Approx(ref).epsilon(1e-13));

    const auto b1 = optimal_bounds(1.0, 1.0, 0.5, 0.0);
    CHECK(b1.upper.value ==
          doctest::Approx(q_kappa_explicit(1.0, 1.0, 0.5, 0.0).value)
              .epsilon(1e-11));
    CHECK(b1.lower.value ==
          doctest::Approx(reflected_drift_density(1.0, 1.0, 0.5, 0.0).value)
              .epsilon(1e-11));
}

TEST_CASE("optimal bounds: ordering and the zero-drift competitor") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ux(0.0, 4.0), uy(0.0, 4.0),
        ut(0.05, 5.0), uk(0.0, 2.5);
    for (int i = 0; i < 300; ++i) {
        const double k = uk(rng), t = ut(rng), x = ux(rng), y = uy(rng);
        const auto b = optimal_bounds(k, t, x, y);
        CHECK(b.lower.value <= b.upper.value + 1e-14);
        const double mid = reflected_drift_density(0.0, t, x, y).value;
        CHECK(b.lower.value <= mid * (1.0 + 1e-10) + 1e-14);
        CHECK(mid <= b.upper.value * (1.0 + 1e-10) + 1e-14);
    }
}

TEST_CASE("gradient: sign at the wall target and finite-difference agreement") {
    for (double x : {0.1, 0.5, 2.0}) {
        CHECK(grad_reflected_drift_density(-1.0, 1.0, x, 0.0) <= 0.0);
    }
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.05, 3.0), uy(0.0, 3.0),
        ut(0.1, 4.0), ub(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const double beta = ub(rng), t = ut(rng), x = ux(rng), y = uy(rng);
        auto q = [&](double xx) {
            return reflected_drift_density(beta, t, xx, y).value;
        };
        const double fd = oracles::central_diff(q, x, 1e-5);
        const double an = grad_reflected_drift_density(beta, t, x, y);
        const double scale = std::max({1.0, std::abs(an)});
        CHECK(std::abs(an - fd) <= 1e-6 * scale);
    }
}

TEST_CASE("gradient: interior sign change located by bisection") {
    const double beta = 1.0, t = 0.5, y = 1.0;
    auto g = [&](double x) { return grad_reflected_drift_density(beta, t, x, y); };
    CHECK(g(1e-6) * g(4.0) < 0.0);
    const double root = oracles::bisect(g, 1e-6, 4.0);
    auto q = [&](double x) { return reflected_drift_density(beta, t, x, y).value; };
    auto fd = [&](double x) { return oracles::central_diff(q, x, 1e-6); };
    const double root_fd = oracles::bisect(fd, 1e-6, 4.0, 1e-10);
    CHECK(std::abs(root - root_fd) < 1e-6);
}

TEST_CASE("normalization sweep over the parameter lattice") {
    for (double beta : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        for (double t : {0.1, 1.0, 5.0}) {
            for (double x : {0.0, 0.5, 3.0}) {
                auto f = [&](double z) {
                    return reflected_drift_density(beta, t, x, z).value;
                };
                const double scale = x + std::abs(beta) * t + 3.0 * std::sqrt(t);
                CHECK(oracles::halfline_mass(f, scale) ==
                      doctest::Approx(1.0).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("Chapman-Kolmogorov on a 3x3x3 lattice") {
    for (double beta : {-1.0, 0.0, 1.0}) {
        for (double s : {0.2, 0.5, 1.0}) {
            for (double x : {0.0, 0.7, 2.0}) {
                const double t = 0.8, z = 1.1;
                auto f = [&](double w) {
                    return reflected_drift_density(beta, s, x, w).value *
                           reflected_drift_density(beta, t, w, z).value;
                };
                const double conv = oracles::halfline_mass(f, 4.0);
                const double direct =
                    reflected_drift_density(beta, s + t, x, z).value;
                CHECK(conv == doctest::Approx(direct).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("positivity and detailed balance") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> ux(0.0, 4.0), ut(0.05, 5.0),
        ub(-2.0, 2.0);
    for (int i = 0; i < 400; ++i) {
        const double beta = ub(rng), t = ut(rng), x = ux(rng), z = ux(rng);
        const double qxz = reflected_drift_density(beta, t, x, z).value;
        const double qzx = reflected_drift_density(beta, t, z, x).value;
        CHECK(qxz > 0.0);
        const double lhs = std::exp(2.0 * beta * x) * qxz;
        const double rhs = std::exp(2.0 * beta * z) * qzx;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}
