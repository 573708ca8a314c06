#pragma once

#include <functional>
#include <string>

#include "stablab/geometry.hpp"
#include "stablab/specfun.hpp"

namespace stablab::kernels {

using geom::BallDomain;

// Assumption-1 parameter block: d >= 2, 0 < beta < alpha < 2,
// eps0 in [0,1], M1, M2 >= 1.
struct StableParams {
    int d;
    double alpha;
    double beta;
    double eps0 = 0.0;
    double m1 = 1.0;
    double m2 = 1.0;

    StableParams(int d_, double alpha_, double beta_, double eps0_ = 0.0,
                 double m1_ = 1.0, double m2_ = 1.0);

    specfun::Constants constants() const {
        return specfun::Constants::make(d, alpha, beta);
    }
};

// Perturbation coefficient b(x,z) as a tagged family.  Every variant is
// symmetric in z by construction.
struct BFunction {
    enum class Tag { Zero, Constant, TruncatedIndicator, TruncatedWithBase,
                     RadialProduct, SdeCoefficient, Scaled };

    Tag tag = Tag::Zero;
    std::string description = "zero";
    std::function<double(const Vec& x, const Vec& z)> eval;
    double constant_value = 0.0;  // meaningful for Constant

    double operator()(const Vec& x, const Vec& z) const { return eval(x, z); }

    static BFunction zero();
    static BFunction constant(double eps);
    static BFunction truncated_indicator(double c1);
    static BFunction truncated_with_base(const StableParams& p, double c2, double gamma);
    static BFunction radial_product(std::function<double(const Vec&)> phi,
                                    std::function<double(double)> psi);
    static BFunction sde_coefficient(std::function<double(const Vec&)> c_field,
                                     double beta);

    // Grammar: zero | const:<eps> | trunc:<c1> | truncbase:<c2>,<gamma> |
    //          radial:<phi-name>,<psi-name> | sde:<C-name>
    static BFunction parse(const StableParams& p, const std::string& text);
};

struct BValidation {
    double sup_abs_b;
    double min_kernel;    // min of j^b over the sample grid
    bool symmetric;
    bool psi_monotone;    // only meaningful for RadialProduct
    bool pass;
};

// Sampled checks of the standing assumptions on b: |b| <= m1, j^b >= 0 on a
// log-spaced |z| grid, z-symmetry, and psi(r)/r^{d+beta} non-increasing for
// the radial-product family.
BValidation validate_bfunction(const StableParams& p, const BFunction& b);

struct KernelValue {
    double value;
    double stable_part;
    double perturbation_part;
};

// J^b(x,y) = A(d,-alpha)|x-y|^{-d-alpha} + A(d,-beta) b(x,y-x)|x-y|^{-d-beta}
KernelValue jump_kernel(const StableParams& p, const BFunction& b, const Vec& x,
                        const Vec& y);

// Radial reference kernel J^{eps0}(r).
double jump_kernel_reference(const StableParams& p, double r);

struct Assumption1Report {
    double ratio_min;
    double ratio_max;
    bool pass;
};

struct SampleSpec {
    int pairs = 200;
    double r_min = 1e-3;
    double r_max = 1e3;
    std::uint64_t seed = 1;
};

Assumption1Report check_assumption1(const StableParams& p, const BFunction& b,
                                    const SampleSpec& spec);

// Green function of the unperturbed alpha-stable process on R^d (d > alpha).
double green_global(const StableParams& p, const Vec& x, const Vec& y);

// Ball Green function via the incomplete integral I(z),
// z = (r^2-|x|^2)(r^2-|y|^2)/|x-y|^2 in center-relative coordinates.
double green_ball(const BallDomain& ball, double alpha, const Vec& x, const Vec& y);

// Comparison envelope m(x,y) = |x-y|^{alpha-d} (1 ^ delta(x)/|x-y|)^{alpha/2}
// (1 ^ delta(y)/|x-y|)^{alpha/2}; only ratio statistics against it are formed.
double green_ball_envelope(const BallDomain& ball, double alpha, const Vec& x,
                           const Vec& y);

// Riesz's explicit Poisson kernel of the ball.
double poisson_ball(const BallDomain& ball, double alpha, const Vec& x, const Vec& z);

// Gradient of poisson_ball in x with the ball held fixed.
Vec grad_poisson_ball_fixed(const BallDomain& ball, double alpha, const Vec& x,
                            const Vec& z);

// Gradient in x of K_{B(x,r)}(x,z), the kernel of the ball centered at the
// evaluation point; equals -grad_w of the center closed form at w = z-x.
Vec grad_poisson_ball_moving(double r, double alpha, const Vec& x, const Vec& z);

// Quadrature route K_D(x,z) = int_D G_D(x,y) J(y,z) dy for d = 2, b = Zero.
double dynkin_poisson_oracle(const BallDomain& ball, const StableParams& p,
                             const BFunction& b, const Vec& x, const Vec& z,
                             double tol);

// Three-case envelope h_B(x,y) splitting on alpha vs 2 beta.
double h_envelope(const BallDomain& ball, double alpha, double beta, const Vec& x,
                  const Vec& y);

// d * G / (|x-y| ^ delta_D(x)), the gradient envelope for Green functions.
double grad_green_bound(const geom::Domain& domain, const Vec& x, const Vec& y,
                        double green_value);

// b_lambda(x,z) = lambda^{beta-alpha} b(x/lambda, z/lambda)
BFunction scale_b(const BFunction& b, const StableParams& p, double lambda);

struct ScalingReport {
    double max_green_dev;
    double max_poisson_dev;
    double max_jump_dev;
    bool pass;
};

// Exact homogeneity of G_B, K_B and J^b under x -> lambda x (b constant).
ScalingReport scaling_checks(const StableParams& p, double lambda,
                             const SampleSpec& spec, double tol = 1e-12);

}  // namespace stablab::kernels
