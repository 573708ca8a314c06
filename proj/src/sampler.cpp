#include "stablab/sampler.hpp"

#include <cmath>

#include "stablab/specfun.hpp"

namespace stablab::wos {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

Vec sample_sphere_direction(int d, RngStream& rng) {
    Vec v(d);
    double n2;
    do {
        n2 = 0.0;
        for (auto& c : v) {
            c = rng.normal();
            n2 += c * c;
        }
    } while (n2 == 0.0);
    return scaled(v, 1.0 / std::sqrt(n2));
}

double exit_radius_cdf(double alpha, double t) {
    if (t <= 1.0) return 0.0;
    return 1.0 - specfun::reg_inc_beta(0.5 * alpha, 1.0 - 0.5 * alpha, 1.0 / (t * t));
}

double exit_radius_factor(double alpha, double u) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw ParamError("exit_radius_factor: alpha must lie in (0,2)");
    if (alpha == 1.0) {
        // F(t) = (2/pi) arccos(1/t) inverts in closed form
        return 1.0 / std::cos(0.5 * kPi * u);
    }
    const double x = specfun::inv_reg_inc_beta(0.5 * alpha, 1.0 - 0.5 * alpha, 1.0 - u);
    return 1.0 / std::sqrt(x);
}

double sample_exit_radius_center(int d, double alpha, double r, RngStream& rng) {
    if (d < 2) throw ParamError("sample_exit_radius_center: d must be >= 2");
    if (r <= 0.0) throw ParamError("sample_exit_radius_center: r must be > 0");
    return r * exit_radius_factor(alpha, rng.uniform());
}

WosOutcome wos_exit(const geom::Domain& domain, double alpha, Vec x,
                    const WosConfig& cfg, RngStream& rng) {
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0))
        throw ParamError("wos_exit: shrink factor gamma must lie in (0,1)");
    if (!domain.contains(x)) throw DomainError("wos_exit: start point outside domain");
    const int d = domain.dim();
    WosOutcome out;
    for (int step = 0; step < cfg.max_steps; ++step) {
        const double radius = cfg.gamma * domain.dist_to_boundary(x).lower;
        if (cfg.record_trace) out.trace.emplace_back(x, radius);
        const double s = sample_exit_radius_center(d, alpha, radius, rng);
        const Vec dir = sample_sphere_direction(d, rng);
        x = add(x, scaled(dir, s));
        ++out.steps;
        if (!domain.contains(x)) {
            out.exit_point = std::move(x);
            return out;
        }
    }
    throw NonTerminationError("wos_exit: max_steps exceeded");
}

double sample_one_sided_stable(double index, RngStream& rng) {
    if (!(index > 0.0 && index < 1.0))
        throw ParamError("sample_one_sided_stable: index must lie in (0,1)");
    // Kanter: S = (A(U)/E)^{(1-th)/th},
    // A(u) = sin(th u)^{th/(1-th)} sin((1-th) u) / sin(u)^{1/(1-th)}
    const double th = index;
    const double u = kPi * rng.uniform();
    const double e = rng.exponential();
    const double a = std::pow(std::sin(th * u), th / (1.0 - th)) *
                     std::sin((1.0 - th) * u) /
                     std::pow(std::sin(u), 1.0 / (1.0 - th));
    return std::pow(a / e, (1.0 - th) / th);
}

Vec sample_isotropic_stable_increment(int d, double alpha, double t, RngStream& rng) {
    if (t <= 0.0) throw ParamError("sample_isotropic_stable_increment: t must be > 0");
    if (!(alpha > 0.0 && alpha < 2.0))
        throw ParamError("sample_isotropic_stable_increment: alpha must lie in (0,2)");
    const double s = std::pow(t, 2.0 / alpha) * sample_one_sided_stable(0.5 * alpha, rng);
    const double scale = std::sqrt(2.0 * s);
    Vec v(d);
    for (auto& c : v) c = scale * rng.normal();
    return v;
}

Vec mixed_path_exit(const geom::Domain& domain, const kernels::StableParams& params,
                    double eps, Vec x, double step, long max_path_steps,
                    RngStream& rng) {
    if (eps < 0.0) throw ParamError("mixed_path_exit: eps must be >= 0");
    if (step <= 0.0) throw ParamError("mixed_path_exit: step must be > 0");
    if (!domain.contains(x))
        throw DomainError("mixed_path_exit: start point outside domain");
    const int d = domain.dim();
    const double zscale = eps > 0.0 ? std::pow(eps, 1.0 / params.beta) : 0.0;
    for (long k = 0; k < max_path_steps; ++k) {
        Vec inc = sample_isotropic_stable_increment(d, params.alpha, step, rng);
        if (zscale > 0.0) {
            const Vec zinc =
                sample_isotropic_stable_increment(d, params.beta, step, rng);
            inc = add(inc, scaled(zinc, zscale));
        }
        x = add(x, inc);
        if (!domain.contains(x)) return x;
    }
    throw NonTerminationError("mixed_path_exit: path budget exceeded");
}

}  // namespace stablab::wos
