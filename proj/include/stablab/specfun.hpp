#pragma once

#include "stablab/common.hpp"

namespace stablab::specfun {

// Lanczos log-Gamma for x > 0, relative accuracy better than 1e-13.
double log_gamma(double x);
double gamma_fn(double x);

// Regularized incomplete beta I_x(a,b) and its inverse in x.
double reg_inc_beta(double a, double b, double x);
double inv_reg_inc_beta(double a, double b, double p);

// A(d,-sigma) = sigma 2^{sigma-1} pi^{-d/2} Gamma((d+sigma)/2) / Gamma(1-sigma/2),
// the constant that makes the jump kernel A(d,-sigma)|z|^{-d-sigma} generate
// the fractional Laplacian of order sigma.
double normalizing_constant(int d, double sigma);

// I(z) = \int_0^z (u+1)^{-d/2} u^{alpha/2-1} du, the incomplete integral in
// the ball Green function.  Evaluated in closed form through the regularized
// incomplete beta: I(z) = B(alpha/2,(d-alpha)/2) * I_{z/(1+z)}(alpha/2,(d-alpha)/2).
double ball_green_integral(double z, int d, double alpha);

// I(inf) = B(alpha/2, (d-alpha)/2).
double ball_green_integral_full(int d, double alpha);

// Parameter block of Gamma-based constants used by the kernels module.
struct Constants {
    int d;
    double alpha;
    double beta;
    double a_alpha;    // A(d,-alpha)
    double a_beta;     // A(d,-beta)
    double c_green;    // Gamma(d/2) / (2^alpha pi^{d/2} Gamma(alpha/2)^2)
    double c_poisson;  // Gamma(d/2) sin(pi alpha/2) / pi^{d/2+1}

    static Constants make(int d, double alpha, double beta);
};

}  // namespace stablab::specfun
