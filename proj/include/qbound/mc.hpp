#pragma once

// Monte Carlo engine for reflecting SDEs on [0, inf).
//
// Paths follow the Skorohod construction: the unconstrained diffusion
//     dY = b(t, |Y|) sgn(Y) dt + dB
// is simulated by Euler-Maruyama and folded, X = |Y|.  Local time increments
// come from the folding correction |Y'| - |Y| - sgn(Y) (Y' - Y), and the
// martingale part of X has increments sgn(Y) dB.
//
// Simulation is block-parallel with per-block RNG streams derived from the
// seed, and partial results merge in block order, so estimates are
// bit-identical for a fixed seed regardless of the worker count (threads come
// from QBOUND_THREADS, default hardware concurrency).

#include "qbound/hjb.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qbound::mc {

struct DriftField {
    enum class Kind { constant, bang_bang, hjb_table, user_table };

    Kind kind = Kind::constant;
    double kappa = 0.0;  // declared bound; evaluations are clamped to [-kappa, kappa]
    std::string name;

    /// Clamped drift value b(t, x).
    double operator()(double t, double x) const;

    /// Number of evaluations that hit the clamp since construction.
    long long clamp_violations() const { return violations_->load(); }

    static DriftField constant(double c);
    /// b(t, x) = beta * sgn(x - center): signed drift toward +inf.
    static DriftField bang_bang(double beta, double center);
    /// b(t, x) = -kappa * sgn(x - center): attraction toward the center.
    static DriftField attracting(double kappa, double center);
    static DriftField from_hjb(const hjb::DriftTable& table);
    static DriftField from_function(std::function<double(double, double)> f,
                                    double kappa, std::string name);

  private:
    std::function<double(double, double)> raw_;
    std::shared_ptr<std::atomic<long long>> violations_ =
        std::make_shared<std::atomic<long long>>(0);
};

struct McParams {
    double dt = 1e-3;
    std::uint64_t seed = 1;
};

struct PathBundle {
    std::vector<double> x_terminal;   // X_T >= 0 per path
    std::vector<double> local_time;   // L_T >= 0 per path
    std::vector<double> cdw;          // integral of c dW per path (if c given)
    std::vector<double> c2dt;         // integral of c^2 dt per path (if c given)
    double T = 0.0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::string scheme = "euler-maruyama odd-extension fold";
    bool has_weights = false;

    std::size_t n_paths() const { return x_terminal.size(); }
    /// Cameron-Martin weight exp(int c dW - 1/2 int c^2 dt) for path i.
    double weight(std::size_t i) const;
};

/// Simulate n reflected paths; when a perturbation field c is supplied the
/// bundle also carries the stochastic-integral accumulators of the
/// change-of-measure weight.
PathBundle simulate_reflected(const DriftField& b, double x0, double T,
                              double dt, std::size_t n, std::uint64_t seed,
                              const DriftField* perturbation = nullptr);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::string scheme;
};

struct BandwidthPolicy {
    // Silverman rule h = factor * 0.9 * min(sd, iqr/1.34) * n^{-1/5};
    // a positive fixed_h overrides it (used near kinks of the target density,
    // where the O(h) smoothing bias must be pushed below the noise).
    double factor = 1.0;
    double fixed_h = 0.0;

    double bandwidth(const std::vector<double>& sample) const;
};

/// Boundary-corrected kernel density estimate at z >= 0: Gaussian kernel with
/// its mass below 0 reflected back, K_h(z - X) + K_h(z + X).
McEstimate estimate_density(const PathBundle& bundle, double z,
                            const BandwidthPolicy& policy = {});

/// Histogram density on [lo, hi) with nbins equal cells (for L1 checks).
std::vector<double> histogram_density(const PathBundle& bundle, double lo,
                                      double hi, int nbins);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

struct BoundsRow {
    std::string drift;
    double estimate;
    double std_error;
    double lower;
    double upper;
    long long clamp_violations;
    bool pass;  // estimate in [lower - 3 se, upper + 3 se]
};

struct BoundsReport {
    std::vector<BoundsRow> rows;
    double lower = 0.0, upper = 0.0;
    bool all_pass = true;
};

/// Estimate the density at y for each admissible drift and compare against
/// the optimal closed-form envelopes (Corollary-type bounds, valid for any
/// y >= 0).  Drifts whose declared bound exceeds kappa are rejected.
/// `explicit_bounds`, when given, overrides the closed-form envelopes (used
/// with HJB-solver bounds for y > 0).
BoundsReport verify_bounds(double kappa, const std::vector<DriftField>& drifts,
                           double x0, double T, double y, std::size_t n,
                           const McParams& params = {},
                           const BandwidthPolicy& policy = {},
                           std::optional<std::pair<double, double>>
                               explicit_bounds = std::nullopt);

struct RepresentationReport {
    double lhs;           // density under drift b + c, estimated by MC
    double lhs_se;
    double rhs;           // q_b closed form + Cameron-Martin correction term
    double rhs_se;
    double diff;
    double combined_se;
    bool pass;            // |diff| <= 3 combined se
};

/// Check the density perturbation identity
///   q_{b+c}(0, x0; T, y) = q_b(0, x0; T, y)
///       + int_0^T E[ R_r c(r, X_r) d/dx q_b(r, X_r; T, y) ] dr
/// with X simulated under the constant drift b (the closed-form gradient is
/// only available there; non-constant b is refused).
RepresentationReport verify_representation(const DriftField& b,
                                           const DriftField& c, double x0,
                                           double T, double y, std::size_t n,
                                           const McParams& params = {},
                                           const BandwidthPolicy& policy = {});

/// Sum of two drift fields with the stated combined bound.
DriftField combine(const DriftField& b, const DriftField& c, double kappa,
                   std::string name);

/// Worker count used by the engine (QBOUND_THREADS or hardware concurrency).
unsigned worker_count();

}  // namespace qbound::mc
