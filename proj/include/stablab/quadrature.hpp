#pragma once

#include <functional>
#include <optional>

#include "stablab/common.hpp"

namespace stablab::quad {

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(const Vec&)>;

struct QuadOptions {
    double rel_tol = 1e-10;
    // declared integrable singularity (x-a)^{-p}, p < 1, at the left endpoint
    double left_exponent = 0.0;
    // when true, b is ignored and the upper limit is +infinity
    bool upper_infinite = false;
    long max_evals = 2'000'000;
};

// Adaptive Gauss-Kronrod (7,15) bisection on (a,b).  Endpoint singularities
// are removed by a power substitution, infinite upper limits by t = 1/u.
double integrate_1d(const Fn1& f, double a, double b, const QuadOptions& opts = {});

// Independent second route for dual-rule cross checks: adaptive Simpson with
// the same transformations.
double integrate_1d_simpson(const Fn1& f, double a, double b,
                            const QuadOptions& opts = {});

struct PolarPole {
    Vec location;
    double exponent;  // f ~ |y - location|^{-exponent} near the pole
};

// Integral of f over the disc B(center, radius) in d = 2 by polar
// decomposition.  If a pole inside the disc is declared, the polar axis is
// placed at the pole so the radial substitution absorbs the singularity.
double integrate_ball_2d(const Fn2& f, const Vec& center, double radius,
                         double tol, const std::optional<PolarPole>& pole = {});

// Integral of f over the exterior {|y - center| > radius} in d = 2.
// inner_left_exponent declares the (s - radius)^{-p} blowup at the circle.
double integrate_exterior_2d(const Fn2& f, const Vec& center, double radius,
                             double tol, double inner_left_exponent = 0.0);

}  // namespace stablab::quad
