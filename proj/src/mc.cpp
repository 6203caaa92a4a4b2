#include "qbound/mc.hpp"

#include "qbound/closed_form.hpp"
#include "qbound/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <thread>

namespace qbound::mc {

namespace {

constexpr std::size_t kBlock = 16384;  // paths per RNG stream

std::mt19937_64 block_rng(std::uint64_t seed, std::uint64_t block) {
    std::seed_seq seq{seed, block, std::uint64_t(0x9e3779b97f4a7c15ULL)};
    return std::mt19937_64(seq);
}

/// Run fn(block_index, first_path, n_paths, rng) over all blocks on the
/// worker pool.  Blocks write to disjoint slots, so the result layout does
/// not depend on the thread count.
template <class Fn>
void for_each_block(std::size_t n, std::uint64_t seed, Fn&& fn) {
    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    const unsigned workers = std::min<std::size_t>(worker_count(), nblocks);
    auto run = [&](unsigned wid) {
        for (std::size_t b = wid; b < nblocks; b += workers) {
            const std::size_t first = b * kBlock;
            const std::size_t count = std::min(kBlock, n - first);
            auto rng = block_rng(seed, b);
            fn(b, first, count, rng);
        }
    };
    if (workers <= 1) {
        run(0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned wdi = 0; wdi < workers; ++wdi) pool.emplace_back(run, wdi);
    for (auto& th : pool) th.join();
}

struct NullObserver {
    static constexpr bool wants_steps = false;
    void on_step(std::size_t, double, double, double, double, double) {}
};

// One Euler-Maruyama path of the odd-extension SDE, folded at the end of each
// step bookkeeping.  The observer sees (path, t_k, X_k, sgn(Y_k), dB, dt)
// before the step is taken.
template <class Obs>
void simulate_block(const DriftField& b, double x0, double T, double dt,
                    std::size_t first, std::size_t count, std::mt19937_64& rng,
                    PathBundle& out, const DriftField* pert, Obs& obs) {
    const long nsteps = (long)std::llround(T / dt);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sq = std::sqrt(dt);
    for (std::size_t p = 0; p < count; ++p) {
        const std::size_t idx = first + p;
        double y = x0;
        double lt = 0.0;
        double cdw = 0.0, c2 = 0.0;
        for (long k = 0; k < nsteps; ++k) {
            const double t = (double)k * dt;
            const double ay = std::abs(y);
            const double s = sgn(y);
            const double db = sq * normal(rng);
            if constexpr (Obs::wants_steps) obs.on_step(idx, t, ay, s, db, dt);
            if (pert) {
                const double c = (*pert)(t, ay);
                cdw += c * s * db;
                c2 += c * c * dt;
            }
            const double ynew = y + b(t, ay) * s * dt + db;
            lt += std::abs(ynew) - ay - s * (ynew - y);
            y = ynew;
        }
        out.x_terminal[idx] = std::abs(y);
        out.local_time[idx] = lt;
        if (pert) {
            out.cdw[idx] = cdw;
            out.c2dt[idx] = c2;
        }
    }
}

McEstimate mean_se(const std::vector<double>& v, std::string scheme) {
    const std::size_t n = v.size();
    double m = 0.0;
    for (double x : v) m += x;
    m /= (double)n;
    double s2 = 0.0;
    for (double x : v) s2 += (x - m) * (x - m);
    s2 /= (double)(n - 1);
    return {m, std::sqrt(s2 / (double)n), n, std::move(scheme)};
}

}  // namespace

unsigned worker_count() {
    if (const char* env = std::getenv("QBOUND_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return (unsigned)v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

double DriftField::operator()(double t, double x) const {
    const double v = raw_(t, x);
    if (v > kappa) {
        violations_->fetch_add(1, std::memory_order_relaxed);
        return kappa;
    }
    if (v < -kappa) {
        violations_->fetch_add(1, std::memory_order_relaxed);
        return -kappa;
    }
    return v;
}

DriftField DriftField::constant(double c) {
    DriftField d;
    d.kind = Kind::constant;
    d.kappa = std::abs(c);
    d.name = "constant(" + std::to_string(c) + ")";
    d.raw_ = [c](double, double) { return c; };
    return d;
}

DriftField DriftField::bang_bang(double beta, double center) {
    DriftField d;
    d.kind = Kind::bang_bang;
    d.kappa = std::abs(beta);
    d.name = "bang_bang(beta=" + std::to_string(beta) +
             ",center=" + std::to_string(center) + ")";
    d.raw_ = [beta, center](double, double x) { return beta * sgn(x - center); };
    return d;
}

DriftField DriftField::attracting(double kappa, double center) {
    auto d = bang_bang(-kappa, center);
    d.name = "attracting(kappa=" + std::to_string(kappa) +
             ",center=" + std::to_string(center) + ")";
    return d;
}

DriftField DriftField::from_hjb(const hjb::DriftTable& table) {
    DriftField d;
    d.kind = Kind::hjb_table;
    d.kappa = table.kappa;
    d.name = "hjb_feedback(beta=" + std::to_string(table.beta) + ")";
    d.raw_ = [table](double t, double x) { return table(t, x); };
    return d;
}

DriftField DriftField::from_function(std::function<double(double, double)> f,
                                     double kappa, std::string name) {
    DriftField d;
    d.kind = Kind::user_table;
    d.kappa = kappa;
    d.name = std::move(name);
    d.raw_ = std::move(f);
    return d;
}

double PathBundle::weight(std::size_t i) const {
    return std::exp(cdw[i] - 0.5 * c2dt[i]);
}

PathBundle simulate_reflected(const DriftField& b, double x0, double T,
                              double dt, std::size_t n, std::uint64_t seed,
                              const DriftField* perturbation) {
    if (!(dt > 0.0) || !(T > 0.0) || dt > T || n < 1)
        throw std::invalid_argument("simulate_reflected: bad step/horizon/count");
    if (x0 < 0.0) throw std::invalid_argument("simulate_reflected: x0 >= 0");
    PathBundle out;
    out.x_terminal.resize(n);
    out.local_time.resize(n);
    out.T = T;
    out.dt = dt;
    out.seed = seed;
    if (perturbation) {
        out.cdw.resize(n);
        out.c2dt.resize(n);
        out.has_weights = true;
    }
    for_each_block(n, seed, [&](std::size_t, std::size_t first,
                                std::size_t count, std::mt19937_64& rng) {
        NullObserver obs;
        simulate_block(b, x0, T, dt, first, count, rng, out, perturbation, obs);
    });
    return out;
}

double BandwidthPolicy::bandwidth(const std::vector<double>& sample) const {
    if (fixed_h > 0.0) return fixed_h;
    std::vector<double> v = sample;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= (double)n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= (double)(n - 1);
    const double iqr = v[(std::size_t)(0.75 * (double)n)] -
                       v[(std::size_t)(0.25 * (double)n)];
    const double scale = std::min(std::sqrt(var), iqr / 1.34);
    return factor * 0.9 * scale * std::pow((double)n, -0.2);
}

McEstimate estimate_density(const PathBundle& bundle, double z,
                            const BandwidthPolicy& policy) {
    if (bundle.n_paths() == 0)
        throw std::invalid_argument("estimate_density: empty bundle");
    if (z < 0.0) throw std::domain_error("estimate_density: z >= 0");
    const double h = policy.bandwidth(bundle.x_terminal);
    std::vector<double> vals(bundle.n_paths());
    const double inv = inv_sqrt_2pi / h;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double x = bundle.x_terminal[i];
        const double u = (z - x) / h;
        const double ur = (z + x) / h;
        vals[i] = inv * (std::exp(-0.5 * u * u) + std::exp(-0.5 * ur * ur));
    }
    auto est = mean_se(vals, bundle.scheme + " + reflected-kernel kde h=" +
                                 std::to_string(h));
    return est;
}

std::vector<double> histogram_density(const PathBundle& bundle, double lo,
                                      double hi, int nbins) {
    std::vector<double> dens(nbins, 0.0);
    const double width = (hi - lo) / nbins;
    for (double x : bundle.x_terminal) {
        if (x < lo || x >= hi) continue;
        ++dens[(std::size_t)((x - lo) / width)];
    }
    const double norm = 1.0 / ((double)bundle.n_paths() * width);
    for (auto& d : dens) d *= norm;
    return dens;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = (double)a.size(), nb = (double)b.size();
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs((double)i / na - (double)j / nb));
    }
    return d;
}

BoundsReport verify_bounds(double kappa, const std::vector<DriftField>& drifts,
                           double x0, double T, double y, std::size_t n,
                           const McParams& params,
                           const BandwidthPolicy& policy,
                           std::optional<std::pair<double, double>>
                               explicit_bounds) {
    BoundsReport rep;
    if (explicit_bounds) {
        rep.lower = explicit_bounds->first;
        rep.upper = explicit_bounds->second;
    } else {
        const auto b = closed_form::optimal_bounds(kappa, T, x0, y);
        rep.lower = b.lower.value;
        rep.upper = b.upper.value;
    }
    std::uint64_t seed = params.seed;
    for (const auto& d : drifts) {
        if (d.kappa > kappa * (1.0 + 1e-12))
            throw std::invalid_argument("verify_bounds: drift '" + d.name +
                                        "' exceeds the stated bound");
        auto bundle = simulate_reflected(d, x0, T, params.dt, n, seed++);
        auto est = estimate_density(bundle, y, policy);
        const bool pass = est.mean >= rep.lower - 3.0 * est.std_error &&
                          est.mean <= rep.upper + 3.0 * est.std_error;
        rep.rows.push_back({d.name, est.mean, est.std_error, rep.lower,
                            rep.upper, d.clamp_violations(), pass});
        rep.all_pass = rep.all_pass && pass;
    }
    return rep;
}

namespace {

// Accumulates the Cameron-Martin correction integral along each path:
//   I_i = sum_k R_k c(t_k, X_k) grad_x q_b(T - t_k, X_k, y) dt
// with R_k the running weight (left endpoint of each step).
struct RepresentationObserver {
    static constexpr bool wants_steps = true;
    double beta;  // constant base drift
    double y;
    double T;
    const DriftField* c;
    std::vector<double>* integral;
    std::vector<double>* logweight;

    void on_step(std::size_t path, double t, double x, double s, double db,
                 double dt) {
        const double r = std::exp((*logweight)[path]);
        const double cv = (*c)(t, x);
        const double grad =
            closed_form::grad_reflected_drift_density(beta, T - t, x, y);
        (*integral)[path] += r * cv * grad * dt;
        (*logweight)[path] += cv * s * db - 0.5 * cv * cv * dt;
    }
};

}  // namespace

DriftField combine(const DriftField& b, const DriftField& c, double kappa,
                   std::string name) {
    DriftField bb = b, cc = c;
    return DriftField::from_function(
        [bb, cc](double t, double x) { return bb(t, x) + cc(t, x); }, kappa,
        std::move(name));
}

RepresentationReport verify_representation(const DriftField& b,
                                           const DriftField& c, double x0,
                                           double T, double y, std::size_t n,
                                           const McParams& params,
                                           const BandwidthPolicy& policy) {
    if (b.kind != DriftField::Kind::constant)
        throw std::invalid_argument(
            "verify_representation: the base drift must be constant (the "
            "closed-form gradient is only available there)");
    const double beta = b(0.0, 1.0);

    // Left side: density under drift b + c.
    auto combined = combine(b, c, b.kappa + c.kappa, "b+c");
    auto lhs_bundle =
        simulate_reflected(combined, x0, T, params.dt, n, params.seed);
    auto lhs = estimate_density(lhs_bundle, y, policy);

    // Right side: q_b closed form plus the weighted-gradient time integral,
    // accumulated while simulating under b.
    PathBundle rhs_bundle;
    rhs_bundle.x_terminal.resize(n);
    rhs_bundle.local_time.resize(n);
    rhs_bundle.T = T;
    rhs_bundle.dt = params.dt;
    rhs_bundle.seed = params.seed + 1;
    std::vector<double> integral(n, 0.0), logw(n, 0.0);
    for_each_block(n, params.seed + 1,
                   [&](std::size_t, std::size_t first, std::size_t count,
                       std::mt19937_64& rng) {
                       RepresentationObserver obs{beta, y, T, &c, &integral,
                                                  &logw};
                       simulate_block(b, x0, T, params.dt, first, count, rng,
                                      rhs_bundle, nullptr, obs);
                   });
    auto corr = mean_se(integral, "cameron-martin correction");
    const double q_b = closed_form::reflected_drift_density(beta, T, x0, y).value;

    RepresentationReport rep;
    rep.lhs = lhs.mean;
    rep.lhs_se = lhs.std_error;
    rep.rhs = q_b + corr.mean;
    rep.rhs_se = corr.std_error;
    rep.diff = rep.lhs - rep.rhs;
    rep.combined_se =
        std::sqrt(rep.lhs_se * rep.lhs_se + rep.rhs_se * rep.rhs_se);
    rep.pass = std::abs(rep.diff) <= 3.0 * rep.combined_se;
    return rep;
}

}  // namespace qbound::mc
