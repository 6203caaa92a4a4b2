#include "qbound/resolvent.hpp"

#include "qbound/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qbound::resolvent {

namespace {

double clamped_exp(double a) { return std::exp(std::min(a, 700.0)); }

// (beta_bar - beta) and (beta_bar + beta) without cancellation: whichever
// difference is small is rewritten as 2*lambda over the large one.
struct BetaBarParts {
    double bar, minus, plus;
};

BetaBarParts beta_bar_parts(double beta, double lambda) {
    const double bar = std::sqrt(beta * beta + 2.0 * lambda);
    if (beta >= 0.0) {
        const double plus = bar + beta;
        return {bar, 2.0 * lambda / plus, plus};
    }
    const double minus = bar - beta;
    return {bar, minus, 2.0 * lambda / minus};
}

}  // namespace

ResolventCoefficients resolvent_coefficients(double beta, double lambda,
                                             double y) {
    if (!(lambda > 0.0)) throw std::domain_error("lambda must be positive");
    if (y < 0.0) throw std::domain_error("center y must be >= 0");
    const auto [bar, bm, bp] = beta_bar_parts(beta, lambda);
    const double em = clamped_exp(bm * y);         // e^{-(beta-bar) y}
    const double ep = clamped_exp(-bp * y);        // e^{-(beta+bar) y}
    const double d1 = bp * em - beta * ep;
    const double d2 = 2.0 * lambda * em - bm * beta * ep;  // = (bar-beta) d1
    if (!(std::isfinite(d1) && std::isfinite(d2)) || d1 == 0.0 || d2 == 0.0)
        throw std::runtime_error("resolvent coefficients: singular denominator");
    ResolventCoefficients c;
    c.beta = beta;
    c.lambda = lambda;
    c.y = y;
    c.beta_bar = bar;
    c.c1 = 1.0 / d1;
    c.c2 = bp / d2;
    c.c3 = (bm * clamped_exp(-2.0 * beta * y) + bp * em * em) / d2;
    return c;
}

double resolvent_value(const ResolventCoefficients& c, double x) {
    if (x < 0.0) throw std::domain_error("resolvent_value needs x >= 0");
    const auto [bar, bm, bp] = beta_bar_parts(c.beta, c.lambda);
    if (x <= c.y)
        return c.c1 * clamped_exp(-bp * x) + c.c2 * clamped_exp(bm * x);
    return c.c3 * clamped_exp(-bm * x);
}

std::complex<double> resolvent_value_complex(double beta,
                                             std::complex<double> lambda,
                                             double y, double x) {
    using C = std::complex<double>;
    const C bar = std::sqrt(C(beta * beta, 0.0) + 2.0 * lambda);
    const C em = std::exp((bar - beta) * y);
    const C ep = std::exp(-(bar + beta) * y);
    const C d2 = 2.0 * lambda * em - (bar - beta) * beta * ep;
    if (x <= y) {
        const C c1 = (bar - beta) / d2;  // = 1/d1 since d2 = (bar-beta) d1
        const C c2 = (bar + beta) / d2;
        return c1 * std::exp(-(bar + beta) * x) + c2 * std::exp((bar - beta) * x);
    }
    const C c3 = ((bar - beta) * std::exp(-2.0 * beta * y) + (bar + beta) * em * em) / d2;
    return c3 * std::exp(-(bar - beta) * x);
}

namespace {

double invert_euler_once(const LaplaceFn& f, double t, int M) {
    // Euler-summation contour method: lambda_k = (M ln10 / 3 + i pi k) / t,
    // binomially smoothed alternating sum over 2M + 1 samples.
    const int n = 2 * M;
    std::vector<long double> xi(n + 1, 0.0L);
    xi[0] = 0.5L;
    for (int k = 1; k <= M; ++k) xi[k] = 1.0L;
    xi[n] = std::pow(2.0L, (long double)-M);
    long double binom = 1.0L;  // C(M, k) built incrementally
    for (int k = 1; k < M; ++k) {
        binom = binom * (long double)(M - k + 1) / (long double)k;
        xi[n - k] = xi[n - k + 1] + xi[n] * binom;
    }
    constexpr double pi = 3.14159265358979323846;
    const double a = M * std::log(10.0) / 3.0;
    long double sum = 0.0L;
    for (int k = 0; k <= n; ++k) {
        const std::complex<double> lam(a / t, k * pi / t);
        const double re = f(lam).real();
        const long double eta = (k % 2 == 0 ? xi[k] : -xi[k]);
        sum += eta * (long double)re;
    }
    return (double)((long double)(std::exp(a) / t) * sum);
}

double invert_gs_once(const LaplaceFn& f, double t, int N) {
    // Gaver-Stehfest with long double coefficient arithmetic; samples only
    // real lambda = k ln2 / t.
    const int M = N / 2;
    auto fact = [](int m) {
        long double r = 1.0L;
        for (int i = 2; i <= m; ++i) r *= i;
        return r;
    };
    const long double ln2t = std::log(2.0L) / (long double)t;
    long double sum = 0.0L;
    for (int k = 1; k <= N; ++k) {
        long double vk = 0.0L;
        for (int j = (k + 1) / 2; j <= std::min(k, M); ++j) {
            long double term = std::pow((long double)j, M) * fact(2 * j) /
                               (fact(M - j) * fact(j) * fact(j - 1) *
                                fact(k - j) * fact(2 * j - k));
            vk += term;
        }
        if ((M + k) % 2 != 0) vk = -vk;
        const double lam = (double)(k * ln2t);
        sum += vk * (long double)f(std::complex<double>(lam, 0.0)).real();
    }
    return (double)(ln2t * sum);
}

double invert_once(const LaplaceFn& f, double t, InversionMethod m, int terms) {
    if (m == InversionMethod::euler) return invert_euler_once(f, t, terms);
    return invert_gs_once(f, t, terms);
}

}  // namespace

InversionResult invert_laplace(const LaplaceFn& f, double t,
                               const InversionConfig& cfg) {
    if (!(t > 0.0)) throw std::domain_error("inversion time must be positive");
    int terms = std::max(cfg.terms, 4);
    if (cfg.method == InversionMethod::gaver_stehfest && terms % 2 != 0)
        ++terms;
    const double v = invert_once(f, t, cfg.method, terms);
    const double v_lo = invert_once(f, t, cfg.method, terms - 2);
    const double err = std::abs(v - v_lo);
    return {v, err, terms, err <= cfg.tol};
}

InversionResult reflected_bangbang_density(double beta, double y, double t,
                                           double x,
                                           const InversionConfig& cfg) {
    if (x < 0.0 || y < 0.0)
        throw std::domain_error("reflected_bangbang_density needs x, y >= 0");
    auto fn = [beta, y, x](std::complex<double> lam) {
        return resolvent_value_complex(beta, lam, y, x);
    };
    return invert_laplace(fn, t, cfg);
}

SuboptimalityReport bangbang_suboptimality_check(
    double beta, double y, double t, const std::vector<double>& xs,
    const qbound::hjb::HjbSolution& sol, double hjb_tolerance,
    const InversionConfig& cfg) {
    if (!(y >= 0.0)) throw std::domain_error("y must be >= 0");
    SuboptimalityReport rep;
    double inv_err = 0.0;
    for (double x : xs) {
        const auto inv = reflected_bangbang_density(beta, y, t, x, cfg);
        inv_err = std::max(inv_err, inv.err_estimate);
        const double wq = sol.w_at(t, x);
        rep.rows.push_back({x, wq, inv.value, wq - inv.value});
    }
    rep.combined_tolerance = hjb_tolerance + inv_err;
    rep.max_gap = -1e300;
    rep.max_abs_gap = 0.0;
    for (const auto& r : rep.rows) {
        rep.max_gap = std::max(rep.max_gap, r.gap);
        rep.max_abs_gap = std::max(rep.max_abs_gap, std::abs(r.gap));
    }
    rep.strictly_suboptimal_somewhere =
        rep.max_gap > 5.0 * rep.combined_tolerance;
    rep.agrees_within_tolerance = rep.max_abs_gap < rep.combined_tolerance;
    return rep;
}

}  // namespace qbound::resolvent
