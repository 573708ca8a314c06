#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "stablab/geometry.hpp"
#include "stablab/kernels.hpp"
#include "stablab/rng.hpp"

namespace stablab::wos {

struct WosConfig {
    double gamma = 0.5;      // per-step ball radius = gamma * delta_lower
    int max_steps = 10000;
    bool record_trace = false;
};

struct WosOutcome {
    Vec exit_point;
    int steps = 0;
    std::vector<std::pair<Vec, double>> trace;
};

// Uniform direction on the unit sphere in R^d.
Vec sample_sphere_direction(int d, RngStream& rng);

// Exit-radius factor t = |X_{tau_B}|/r > 1 for a start at the ball center,
// by inversion of the closed-form CDF F(t) = 1 - I_{t^{-2}}(alpha/2, 1-alpha/2).
// The law does not depend on d.
double exit_radius_factor(double alpha, double u);

// Analytic CDF of the factor, used as the test oracle.
double exit_radius_cdf(double alpha, double t);

double sample_exit_radius_center(int d, double alpha, double r, RngStream& rng);

// Exact walk-on-spheres exit sample from D: iterated center-ball exits
// compose to the exact law of X_{tau_D} by the strong Markov property.
WosOutcome wos_exit(const geom::Domain& domain, double alpha, Vec x,
                    const WosConfig& cfg, RngStream& rng);

// Positive strictly stable variable with Laplace transform exp(-lambda^index),
// index in (0,1), by Kanter's representation.
double sample_one_sided_stable(double index, RngStream& rng);

// Increment with characteristic function exp(-t |xi|^alpha) via subordination.
Vec sample_isotropic_stable_increment(int d, double alpha, double t, RngStream& rng);

// Euler-grid simulation of the constant-b mixed process Y + eps^{1/beta} Z;
// returns the first grid position outside D.  Biased by time discretization.
Vec mixed_path_exit(const geom::Domain& domain, const kernels::StableParams& params,
                    double eps, Vec x, double step, long max_path_steps,
                    RngStream& rng);

}  // namespace stablab::wos
