#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "stablab/geometry.hpp"
#include "stablab/kernels.hpp"
#include "stablab/sampler.hpp"

namespace stablab::est {

struct MCEstimate {
    double mean = 0.0;
    double stderror = 0.0;  // sample-std / sqrt(n)
    long n = 0;
    std::uint64_t seed = 0;
};

// Bounded nonnegative exterior test function.
struct BoundaryData {
    std::string name;
    std::function<double(const Vec&)> fn;
    double sup_bound = 1.0;

    double operator()(const Vec& z) const { return fn(z); }

    // indicator of a slab in the vertical coordinate, optionally kept at
    // lateral distance >= lateral_min from a center
    static BoundaryData slab(double lo, double hi, Vec center = {},
                             double radial_min = 0.0);
    // indicator of {r0 < |z-c| < r1} with direction angle to `axis` below
    // `half_angle`
    static BoundaryData annulus_sector(Vec center, double r0, double r1, Vec axis,
                                       double half_angle);
    // w(x) = ((x_d)^+)^{alpha/2}, harmonic for the alpha-stable process in the
    // half-space
    static BoundaryData w_halfspace(double alpha, double sup_hint = 100.0);
    static BoundaryData custom(std::string name, std::function<double(const Vec&)> f,
                               double sup_bound);
};

// Run context: seed discipline plus worker count.  Streams are derived as
// (master_seed, stream_base + block); results do not depend on `workers`.
struct RunCtx {
    std::uint64_t master_seed = 0;
    int workers = 1;
    wos::WosConfig wos_cfg;
};

// Monte-Carlo mean of f at the exact WoS exit point; the mean-value property
// makes this an unbiased evaluation of the harmonic extension of f.
MCEstimate harmonic_eval(const geom::Domain& domain, double alpha,
                         const BoundaryData& f, const Vec& x, long n,
                         const RunCtx& ctx, std::uint64_t stream_base = 0);

// One-ball score-function estimator of the gradient of the harmonic
// extension of f at x, using the ball B(x,r) and the bounded score
// d * w / |w|^2 of the fixed-ball Poisson kernel at its center.
std::vector<MCEstimate> gradient_score_estimate(const geom::Domain& domain,
                                                double alpha, const BoundaryData& f,
                                                const Vec& x, double r, long n,
                                                const RunCtx& ctx,
                                                std::uint64_t stream_base = 0);

// Single-ball mean value E[f(exit of B(x,r))]; unbiased for f(x) whenever f
// is harmonic in a neighbourhood of the closed ball.
MCEstimate ball_mean_eval(const geom::Domain& domain, double alpha,
                          const BoundaryData& f, const Vec& x, double r, long n,
                          const RunCtx& ctx, std::uint64_t stream_base = 0);

// Central-difference gradient of the single-ball mean value with common
// random numbers: both shifted starts reuse the same exit factor/direction.
std::vector<MCEstimate> fd_gradient_estimate(const geom::Domain& domain, double alpha,
                                             const BoundaryData& f, const Vec& x,
                                             double r, double h, long n,
                                             const RunCtx& ctx,
                                             std::uint64_t stream_base = 0);

struct PointResult {
    int index = 0;
    Vec x;
    MCEstimate est;
};

struct ExperimentReport {
    std::string name;
    std::vector<std::pair<std::string, std::string>> params;
    std::vector<PointResult> points;
    double statistic = 0.0;
    double statistic_err = 0.0;
    bool pass = false;
    std::uint64_t seed = 0;
    double runtime_s = 0.0;
    std::vector<std::string> notes;
};

struct HarnackOptions {
    Vec x0;
    double r = 1.0;
    double alpha = 1.0;
    int grid_size = 5;
    long n = 100000;
    bool check_half_radius = true;
    double radius_agreement_tol = 0.2;
};
ExperimentReport harnack_experiment(const HarnackOptions& opt, const RunCtx& ctx);

struct ChainedHarnackOptions {
    Vec x2;
    double r = 1.0;
    double alpha = 1.0;
    int k_max = 3;
    long n = 100000;
};
ExperimentReport chained_harnack_experiment(const ChainedHarnackOptions& opt,
                                            const RunCtx& ctx);

struct BhpOptions {
    double r = 1.0;
    double alpha = 1.0;
    int grid_size = 4;
    long n = 100000;
};
ExperimentReport bhp_experiment(const geom::Domain& domain, const Vec& z0,
                                const BhpOptions& opt, const BoundaryData& f1,
                                const BoundaryData& f2, const RunCtx& ctx);

struct RatioLimitOptions {
    double r = 1.0;
    double alpha = 1.0;
    int levels = 7;
    long n = 200000;
};
ExperimentReport boundary_ratio_limit_experiment(const geom::Domain& domain,
                                                 const Vec& z0,
                                                 const RatioLimitOptions& opt,
                                                 const BoundaryData& f1,
                                                 const BoundaryData& f2,
                                                 const RunCtx& ctx);

struct DecayOptions {
    double r = 1.0;
    double alpha = 1.0;
    int levels = 5;
    long n = 100000;
    double slope_tol = 0.15;
};
ExperimentReport decay_experiment(const geom::Domain& domain, const Vec& z0,
                                  const DecayOptions& opt, const RunCtx& ctx);

struct GradientBoundOptions {
    double alpha = 1.0;
    long n = 100000;
    double ball_fraction = 0.5;  // score ball radius = fraction * delta_lower
    std::vector<Vec> grid;
    double analytic_ratio = -1.0;  // when >= 0, checked within 3 sigma
};
ExperimentReport gradient_bound_experiment(const geom::Domain& domain,
                                           const BoundaryData& f,
                                           const GradientBoundOptions& opt,
                                           const RunCtx& ctx);

struct BarrierOptions {
    double r = 0.25;
    double alpha = 1.0;
    int heights = 10;
    long n = 100000;
};
ExperimentReport barrier_experiment(const geom::Domain& graph_domain, const Vec& z0,
                                    const BarrierOptions& opt, const RunCtx& ctx);

struct BoundaryDecayOptions {
    double r = 1.0;
    double alpha = 1.0;
    int levels = 6;
    long n = 100000;
    double gamma_floor = 0.1;
    double halfspace_tol = 0.1;
    bool expect_halfspace_exponent = false;
};
ExperimentReport boundary_decay_fit(const geom::Domain& domain, const Vec& z0,
                                    const BoundaryDecayOptions& opt,
                                    const BoundaryData& f, const RunCtx& ctx);

}  // namespace stablab::est
