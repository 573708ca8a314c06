#include "stablab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stablab/quadrature.hpp"
#include "stablab/rng.hpp"

namespace stablab::kernels {

namespace {

// center-relative coordinate with the cancellation-safe factor
// r^2 - |x'|^2 = (r - |x'|)(r + |x'|)
double ball_gap(const BallDomain& ball, const Vec& x) {
    const double s = dist(x, ball.center);
    return (ball.radius - s) * (ball.radius + s);
}

void require_distinct(const Vec& x, const Vec& y, const char* who) {
    if (dist(x, y) == 0.0)
        throw SingularityError(std::string(who) + ": x == y");
}

}  // namespace

StableParams::StableParams(int d_, double alpha_, double beta_, double eps0_,
                           double m1_, double m2_)
    : d(d_), alpha(alpha_), beta(beta_), eps0(eps0_), m1(m1_), m2(m2_) {
    if (d < 2) throw ParamError("StableParams: d must be >= 2");
    if (!(alpha > 0.0 && alpha < 2.0))
        throw ParamError("StableParams: alpha must lie in (0,2)");
    if (!(beta > 0.0 && beta < alpha))
        throw ParamError("StableParams: beta must lie in (0, alpha)");
    if (!(eps0 >= 0.0 && eps0 <= 1.0))
        throw ParamError("StableParams: eps0 must lie in [0,1]");
    if (m1 < 1.0 || m2 < 1.0) throw ParamError("StableParams: M1, M2 must be >= 1");
}

BFunction BFunction::zero() {
    BFunction b;
    b.tag = Tag::Zero;
    b.description = "zero";
    b.eval = [](const Vec&, const Vec&) { return 0.0; };
    return b;
}

BFunction BFunction::constant(double eps) {
    if (eps < 0.0) throw ParamError("BFunction::constant: eps must be >= 0");
    BFunction b;
    b.tag = Tag::Constant;
    b.constant_value = eps;
    b.description = "const:" + std::to_string(eps);
    b.eval = [eps](const Vec&, const Vec&) { return eps; };
    return b;
}

BFunction BFunction::truncated_indicator(double c1) {
    if (c1 <= 0.0) throw ParamError("truncated_indicator: c1 must be > 0");
    BFunction b;
    b.tag = Tag::TruncatedIndicator;
    b.description = "trunc:" + std::to_string(c1);
    b.eval = [c1](const Vec&, const Vec& z) { return norm(z) <= c1 ? 1.0 : 0.0; };
    return b;
}

BFunction BFunction::truncated_with_base(const StableParams& p, double c2,
                                         double gamma) {
    if (c2 <= 0.0) throw ParamError("truncated_with_base: c2 must be > 0");
    if (!(gamma > 0.0 && gamma < p.beta))
        throw ParamError("truncated_with_base: gamma must lie in (0, beta)");
    const double coeff = specfun::normalizing_constant(p.d, gamma) /
                         specfun::normalizing_constant(p.d, p.beta);
    const double ex = p.beta - gamma;
    BFunction b;
    b.tag = Tag::TruncatedWithBase;
    b.description = "truncbase:" + std::to_string(c2) + "," + std::to_string(gamma);
    b.eval = [c2, coeff, ex](const Vec&, const Vec& z) {
        const double r = norm(z);
        return 1.0 + (r <= c2 ? coeff * std::pow(r, ex) : 0.0);
    };
    return b;
}

BFunction BFunction::radial_product(std::function<double(const Vec&)> phi,
                                    std::function<double(double)> psi) {
    BFunction b;
    b.tag = Tag::RadialProduct;
    b.description = "radial";
    b.eval = [phi = std::move(phi), psi = std::move(psi)](const Vec& x, const Vec& z) {
        return phi(lateral(x)) * psi(norm(z));
    };
    return b;
}

BFunction BFunction::sde_coefficient(std::function<double(const Vec&)> c_field,
                                     double beta) {
    BFunction b;
    b.tag = Tag::SdeCoefficient;
    b.description = "sde";
    b.eval = [c = std::move(c_field), beta](const Vec& x, const Vec&) {
        return std::pow(std::fabs(c(x)), beta);
    };
    return b;
}

BFunction BFunction::parse(const StableParams& p, const std::string& text) {
    if (text == "zero") return zero();
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    std::vector<std::string> args;
    if (colon != std::string::npos) {
        std::stringstream ss(text.substr(colon + 1));
        std::string tok;
        while (std::getline(ss, tok, ',')) args.push_back(tok);
    }
    if (head == "const" && args.size() == 1) return constant(std::stod(args[0]));
    if (head == "trunc" && args.size() == 1)
        return truncated_indicator(std::stod(args[0]));
    if (head == "truncbase" && args.size() == 2)
        return truncated_with_base(p, std::stod(args[0]), std::stod(args[1]));
    if (head == "radial" && args.size() == 2) {
        // named builtins: phi in {one, bump}, psi in {one, invsq-taper}
        std::function<double(const Vec&)> phi;
        if (args[0] == "one")
            phi = [](const Vec&) { return 1.0; };
        else if (args[0] == "bump")
            phi = [](const Vec& t) { return 1.0 / (1.0 + dot(t, t)); };
        else
            throw ParamError("unknown phi name: " + args[0]);
        std::function<double(double)> psi;
        if (args[1] == "one")
            psi = [](double) { return 1.0; };
        else if (args[1] == "taper")
            psi = [](double r) { return 1.0 / (1.0 + r); };
        else
            throw ParamError("unknown psi name: " + args[1]);
        return radial_product(std::move(phi), std::move(psi));
    }
    if (head == "sde" && args.size() == 1) {
        std::function<double(const Vec&)> c;
        if (args[0] == "one")
            c = [](const Vec&) { return 1.0; };
        else if (args[0] == "sin")
            c = [](const Vec& x) { return std::sin(x[0]); };
        else
            throw ParamError("unknown C name: " + args[0]);
        return sde_coefficient(std::move(c), p.beta);
    }
    throw ParamError("unknown b spec: " + text);
}

BValidation validate_bfunction(const StableParams& p, const BFunction& b) {
    const auto c = p.constants();
    RngStream rng(0xb00b5, 3);
    BValidation v{0.0, 1e300, true, true, true};
    const int n_radii = 64;
    double prev_psi_ratio = 1e300;
    for (int i = 0; i < n_radii; ++i) {
        const double r = std::pow(10.0, -4.0 + 8.0 * i / (n_radii - 1.0));
        for (int rep = 0; rep < 4; ++rep) {
            Vec x(p.d), dir(p.d);
            for (auto& t : x) t = 4.0 * rng.uniform() - 2.0;
            for (auto& t : dir) t = rng.normal();
            dir = scaled(dir, r / norm(dir));
            const double bv = b(x, dir);
            Vec neg = scaled(dir, -1.0);
            if (std::fabs(bv - b(x, neg)) > 1e-12 * (1.0 + std::fabs(bv)))
                v.symmetric = false;
            v.sup_abs_b = std::max(v.sup_abs_b, std::fabs(bv));
            const double j = c.a_alpha * std::pow(r, -p.d - p.alpha) +
                             c.a_beta * bv * std::pow(r, -p.d - p.beta);
            v.min_kernel = std::min(v.min_kernel, j);
        }
        if (b.tag == BFunction::Tag::RadialProduct) {
            Vec x0(p.d, 0.3), z(p.d, 0.0);
            z[0] = r;
            const double ratio = b(x0, z) / std::pow(r, p.d + p.beta);
            if (ratio > prev_psi_ratio * (1.0 + 1e-9)) v.psi_monotone = false;
            prev_psi_ratio = ratio;
        }
    }
    v.pass = v.symmetric && v.psi_monotone && v.sup_abs_b <= p.m1 && v.min_kernel >= 0.0;
    return v;
}

KernelValue jump_kernel(const StableParams& p, const BFunction& b, const Vec& x,
                        const Vec& y) {
    require_distinct(x, y, "jump_kernel");
    const auto c = p.constants();
    const double r = dist(x, y);
    KernelValue kv;
    kv.stable_part = c.a_alpha * std::pow(r, -p.d - p.alpha);
    kv.perturbation_part = c.a_beta * b(x, sub(y, x)) * std::pow(r, -p.d - p.beta);
    kv.value = kv.stable_part + kv.perturbation_part;
    if (kv.value < 0.0)
        throw ParamError("jump_kernel: negative total kernel (j^b < 0)");
    return kv;
}

double jump_kernel_reference(const StableParams& p, double r) {
    if (r <= 0.0) throw DomainError("jump_kernel_reference: r must be > 0");
    const auto c = p.constants();
    return c.a_alpha * std::pow(r, -p.d - p.alpha) +
           p.eps0 * c.a_beta * std::pow(r, -p.d - p.beta);
}

Assumption1Report check_assumption1(const StableParams& p, const BFunction& b,
                                    const SampleSpec& spec) {
    RngStream rng(spec.seed, 11);
    Assumption1Report rep{1e300, -1e300, false};
    for (int i = 0; i < spec.pairs; ++i) {
        const double u = i / std::max(1.0, spec.pairs - 1.0);
        const double r = spec.r_min * std::pow(spec.r_max / spec.r_min, u);
        Vec x(p.d), dir(p.d);
        for (auto& t : x) t = 4.0 * rng.uniform() - 2.0;
        for (auto& t : dir) t = rng.normal();
        dir = scaled(dir, r / norm(dir));
        const Vec y = add(x, dir);
        const double ratio = jump_kernel(p, b, x, y).value / jump_kernel_reference(p, r);
        rep.ratio_min = std::min(rep.ratio_min, ratio);
        rep.ratio_max = std::max(rep.ratio_max, ratio);
    }
    rep.pass = rep.ratio_min >= 1.0 / p.m2 - 1e-12 && rep.ratio_max <= p.m2 + 1e-12;
    return rep;
}

double green_global(const StableParams& p, const Vec& x, const Vec& y) {
    require_distinct(x, y, "green_global");
    const auto c = p.constants();
    // transient Green function: the z -> inf limit of the ball formula,
    // c_green * B(alpha/2, (d-alpha)/2) * |x-y|^{alpha-d}
    const double cg = c.c_green * specfun::ball_green_integral_full(p.d, p.alpha);
    return cg * std::pow(dist(x, y), p.alpha - p.d);
}

double green_ball(const BallDomain& ball, double alpha, const Vec& x, const Vec& y) {
    require_distinct(x, y, "green_ball");
    const int d = static_cast<int>(x.size());
    if (dist(x, ball.center) >= ball.radius || dist(y, ball.center) >= ball.radius)
        throw DomainError("green_ball: points must lie inside the ball");
    const auto c = specfun::Constants::make(d, alpha, alpha / 2.0);
    const double rxy = dist(x, y);
    // z = (r^2-|x'|^2)(r^2-|y'|^2) / (r^2 |x-y|^2); the r^-2 factor makes z a
    // dilation invariant, which the exact scaling of G_B requires
    const double z = ball_gap(ball, x) * ball_gap(ball, y) /
                     (ball.radius * ball.radius * rxy * rxy);
    return c.c_green * specfun::ball_green_integral(z, d, alpha) *
           std::pow(rxy, alpha - d);
}

double green_ball_envelope(const BallDomain& ball, double alpha, const Vec& x,
                           const Vec& y) {
    require_distinct(x, y, "green_ball_envelope");
    const int d = static_cast<int>(x.size());
    if (dist(x, ball.center) >= ball.radius || dist(y, ball.center) >= ball.radius)
        throw DomainError("green_ball_envelope: points must lie inside the ball");
    const double rxy = dist(x, y);
    const double dx = ball.radius - dist(x, ball.center);
    const double dy = ball.radius - dist(y, ball.center);
    return std::pow(rxy, alpha - d) *
           std::pow(std::min(1.0, dx / rxy), 0.5 * alpha) *
           std::pow(std::min(1.0, dy / rxy), 0.5 * alpha);
}

double poisson_ball(const BallDomain& ball, double alpha, const Vec& x, const Vec& z) {
    const int d = static_cast<int>(x.size());
    const double sx = dist(x, ball.center);
    const double sz = dist(z, ball.center);
    if (sx >= ball.radius) throw DomainError("poisson_ball: x must lie inside the ball");
    if (sz <= ball.radius)
        throw DomainError("poisson_ball: z must lie outside the closed ball");
    const auto c = specfun::Constants::make(d, alpha, alpha / 2.0);
    const double num = ball_gap(ball, x);                              // r^2 - |x'|^2
    const double den = (sz - ball.radius) * (sz + ball.radius);        // |z'|^2 - r^2
    return c.c_poisson * std::pow(num / den, 0.5 * alpha) *
           std::pow(dist(x, z), -static_cast<double>(d));
}

Vec grad_poisson_ball_fixed(const BallDomain& ball, double alpha, const Vec& x,
                            const Vec& z) {
    const int d = static_cast<int>(x.size());
    const double k = poisson_ball(ball, alpha, x, z);
    const Vec xp = sub(x, ball.center);
    const Vec w = sub(z, x);
    const double gap = ball_gap(ball, x);
    const double w2 = dot(w, w);
    Vec g(d);
    for (int i = 0; i < d; ++i)
        g[i] = k * (-alpha * xp[i] / gap + d * w[i] / w2);
    return g;
}

Vec grad_poisson_ball_moving(double r, double alpha, const Vec& x, const Vec& z) {
    const int d = static_cast<int>(x.size());
    const Vec w = sub(z, x);
    const double s2 = dot(w, w);
    if (s2 <= r * r)
        throw DomainError("grad_poisson_ball_moving: need |z - x| > r");
    const auto c = specfun::Constants::make(d, alpha, alpha / 2.0);
    const double gap = s2 - r * r;
    const double common = c.c_poisson * std::pow(r, alpha) *
                          std::pow(gap, -0.5 * alpha) * std::pow(s2, -0.5 * d);
    Vec g(d);
    for (int i = 0; i < d; ++i)
        g[i] = common * w[i] * (alpha / gap + d / s2);
    return g;
}

double dynkin_poisson_oracle(const BallDomain& ball, const StableParams& p,
                             const BFunction& b, const Vec& x, const Vec& z,
                             double tol) {
    if (p.d != 2) throw NotImplementedError("dynkin_poisson_oracle: d must be 2");
    if (b.tag != BFunction::Tag::Zero)
        throw NotImplementedError(
            "dynkin_poisson_oracle: only b = Zero has an exact ball Green function");
    if (dist(x, ball.center) >= ball.radius)
        throw DomainError("dynkin_poisson_oracle: x must lie inside the ball");
    if (dist(z, ball.center) <= ball.radius)
        throw DomainError("dynkin_poisson_oracle: z must lie outside the ball");
    const auto c = p.constants();
    auto integrand = [&](const Vec& y) {
        const double ryz = dist(y, z);
        return green_ball(ball, p.alpha, x, y) * c.a_alpha *
               std::pow(ryz, -p.d - p.alpha);
    };
    quad::PolarPole pole{x, static_cast<double>(p.d) - p.alpha};
    return quad::integrate_ball_2d(integrand, ball.center, ball.radius, tol, pole);
}

double h_envelope(const BallDomain& ball, double alpha, double beta, const Vec& x,
                  const Vec& y) {
    require_distinct(x, y, "h_envelope");
    const int d = static_cast<int>(x.size());
    if (dist(x, ball.center) >= ball.radius || dist(y, ball.center) >= ball.radius)
        throw DomainError("h_envelope: points must lie inside the ball");
    const double rxy = dist(x, y);
    const double dx = ball.radius - dist(x, ball.center);
    const double dy = ball.radius - dist(y, ball.center);
    if (alpha > 2.0 * beta) {
        return std::pow(rxy, alpha - beta - d) *
               std::pow(std::min(1.0, dy / rxy), 0.5 * alpha);
    }
    if (alpha == 2.0 * beta) {
        return std::pow(rxy, beta - d) * std::pow(std::min(1.0, dy / rxy), beta) *
               std::max(1.0, std::log(rxy / dx));
    }
    return std::pow(rxy, alpha - beta - d) *
           std::pow(std::min(1.0, dy / rxy), 0.5 * alpha) *
           std::pow(std::max(1.0, rxy / dx), beta - 0.5 * alpha);
}

double grad_green_bound(const geom::Domain& domain, const Vec& x, const Vec& y,
                        double green_value) {
    require_distinct(x, y, "grad_green_bound");
    const double delta = domain.dist_to_boundary(x).lower;
    const int d = domain.dim();
    return d * green_value / std::min(dist(x, y), delta);
}

BFunction scale_b(const BFunction& b, const StableParams& p, double lambda) {
    if (lambda <= 0.0) throw DomainError("scale_b: lambda must be > 0");
    if (lambda == 1.0) return b;
    const double factor = std::pow(lambda, p.beta - p.alpha);
    if (b.tag == BFunction::Tag::Zero) return BFunction::zero();
    if (b.tag == BFunction::Tag::Constant)
        return BFunction::constant(factor * b.constant_value);
    BFunction s;
    s.tag = BFunction::Tag::Scaled;
    s.description = "scaled(" + b.description + ")";
    const double inv = 1.0 / lambda;
    s.eval = [base = b.eval, factor, inv](const Vec& x, const Vec& z) {
        return factor * base(scaled(x, inv), scaled(z, inv));
    };
    return s;
}

ScalingReport scaling_checks(const StableParams& p, double lambda,
                             const SampleSpec& spec, double tol) {
    RngStream rng(spec.seed, 29);
    ScalingReport rep{0.0, 0.0, 0.0, false};
    const BFunction b = BFunction::constant(p.eps0);
    const BFunction bl = scale_b(b, p, lambda);
    for (int i = 0; i < spec.pairs; ++i) {
        const double r = 0.5 + rng.uniform();
        BallDomain small{Vec(p.d, 0.0), r};
        BallDomain big{Vec(p.d, 0.0), lambda * r};
        Vec x(p.d), y(p.d), z(p.d);
        // x, y inside, z outside
        do {
            for (auto& t : x) t = r * (2.0 * rng.uniform() - 1.0);
        } while (norm(x) >= 0.95 * r);
        do {
            for (auto& t : y) t = r * (2.0 * rng.uniform() - 1.0);
        } while (norm(y) >= 0.95 * r || dist(x, y) < 1e-3 * r);
        Vec dir(p.d);
        for (auto& t : dir) t = rng.normal();
        z = scaled(dir, (1.1 + rng.uniform()) * r / norm(dir));

        const double g1 = green_ball(small, p.alpha, x, y);
        const double g2 = std::pow(lambda, p.d - p.alpha) *
                          green_ball(big, p.alpha, scaled(x, lambda), scaled(y, lambda));
        rep.max_green_dev = std::max(rep.max_green_dev, std::fabs(g1 - g2) / g1);

        const double k1 = poisson_ball(small, p.alpha, x, z);
        const double k2 = std::pow(lambda, p.d) *
                          poisson_ball(big, p.alpha, scaled(x, lambda), scaled(z, lambda));
        rep.max_poisson_dev = std::max(rep.max_poisson_dev, std::fabs(k1 - k2) / k1);

        const double j1 = jump_kernel(p, bl, scaled(x, lambda), scaled(z, lambda)).value *
                          std::pow(lambda, p.d + p.alpha);
        const double j2 = jump_kernel(p, b, x, z).value;
        rep.max_jump_dev = std::max(rep.max_jump_dev, std::fabs(j1 - j2) / j2);
    }
    rep.pass = rep.max_green_dev < tol && rep.max_poisson_dev < tol &&
               rep.max_jump_dev < tol;
    return rep;
}

}  // namespace stablab::kernels
