#include "stablab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stablab::quad {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Gauss-Kronrod (7,15) nodes and weights on [-1,1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkResult {
    double integral;
    double error;
};

GkResult gk15(const Fn1& f, double a, double b, long& evals) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double resg = 0.0, resk = 0.0;
    const double fc = f(c);
    evals += 15;
    resg += kWg[3] * fc;
    resk += kWgk[7] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double f1 = f(c - x);
        const double f2 = f(c + x);
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    return {resk * h, std::fabs((resk - resg) * h)};
}

double adaptive_gk(const Fn1& f, double a, double b, double tol_abs, int depth,
                   long& evals, long max_evals, double& partial) {
    const GkResult r = gk15(f, a, b, evals);
    if (r.error <= tol_abs || depth >= 52) {
        partial += r.integral;
        return r.integral;
    }
    if (evals > max_evals)
        throw QuadratureError("integrate_1d: evaluation budget exhausted", partial);
    const double m = 0.5 * (a + b);
    const double left =
        adaptive_gk(f, a, m, 0.5 * tol_abs, depth + 1, evals, max_evals, partial);
    const double right =
        adaptive_gk(f, m, b, 0.5 * tol_abs, depth + 1, evals, max_evals, partial);
    return left + right;
}

double adaptive_simpson_rec(const Fn1& f, double a, double b, double fa,
                            double fm, double fb, double whole, double tol_abs,
                            int depth, long& evals, long max_evals) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    evals += 2;
    if (evals > max_evals)
        throw QuadratureError("integrate_1d_simpson: budget exhausted", whole);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol_abs || depth >= 50)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol_abs,
                                depth + 1, evals, max_evals) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol_abs,
                                depth + 1, evals, max_evals);
}

// Apply the declared-singularity and infinite-limit substitutions, reducing
// to a finite integral with a bounded integrand, then hand off to `core`.
template <typename Core>
double transformed(const Fn1& f, double a, double b, const QuadOptions& opts,
                   Core core) {
    if (opts.upper_infinite) {
        if (opts.left_exponent > 0.0) {
            QuadOptions head = opts;
            head.upper_infinite = false;
            QuadOptions tail = opts;
            tail.left_exponent = 0.0;
            return transformed(f, a, a + 1.0, head, core) +
                   transformed(f, a + 1.0, b, tail, core);
        }
        const double c = a;
        if (c > 0.0) {
            // t = 1/u maps [c, inf) onto (0, 1/c]
            auto g = [&f](double u) { return f(1.0 / u) / (u * u); };
            return core(g, 0.0, 1.0 / c);
        }
        // split at max(c,0)+1 and map the tail
        QuadOptions head = opts;
        head.upper_infinite = false;
        auto g = [&f](double u) { return f(1.0 / u) / (u * u); };
        return transformed(f, c, c + 1.0, head, core) + core(g, 0.0, 1.0 / (c + 1.0));
    }
    if (b < a) throw ParamError("integrate_1d: b < a");
    if (opts.left_exponent > 0.0) {
        if (opts.left_exponent >= 1.0)
            throw ParamError("integrate_1d: endpoint exponent must be < 1");
        const double q = 1.0 / (1.0 - opts.left_exponent);
        auto g = [&f, a, q](double s) {
            if (s == 0.0) return 0.0;
            double x = a + std::pow(s, q);
            // keep the argument strictly right of the singular endpoint even
            // when the shift underflows below one ulp of a
            if (x == a)
                x = std::nextafter(a, std::numeric_limits<double>::infinity());
            return f(x) * q * std::pow(s, q - 1.0);
        };
        const double s_hi = std::pow(b - a, 1.0 / q);
        // The offset a + s^q is quantized to the ulp of a, so for small s the
        // evaluation of f (which typically recomputes x - a internally)
        // carries staircase noise of relative size ulp/s^q; once that exceeds
        // rel_tol the adaptive rule refines forever.  Cut at the s where the
        // noise is a tenth of the tolerance and close the head with a
        // rectangle: when the declared exponent matches the singularity the
        // transformed integrand is L(1 + O(s^q)) there, so the head error is
        // O(L * s_floor^{q+1}), far below rel_tol.
        double s_floor = 0.0;
        if (a != 0.0) {
            const double ulp =
                std::nextafter(std::fabs(a),
                               std::numeric_limits<double>::infinity()) -
                std::fabs(a);
            s_floor = std::pow(10.0 * ulp / std::max(opts.rel_tol, 1e-14),
                               1.0 / q);
            if (!(s_floor < 0.25 * s_hi)) s_floor = 0.0;
        }
        double head = 0.0;
        if (s_floor > 0.0) {
            // g is analytic in eps = s^q, g = L + c eps + ...; fit L and c
            // from two nodes (eps and 2 eps) and integrate the model exactly
            const double s2 = s_floor * std::pow(2.0, 1.0 / q);
            const double g1 = g(s_floor);
            if (s2 < s_hi) {
                const double g2 = g(s2);
                head = s_floor * (2.0 * g1 - g2 + (g2 - g1) / (q + 1.0));
            } else {
                head = s_floor * g1;
            }
        }
        return head + core(g, s_floor, s_hi);
    }
    return core(f, a, b);
}

}  // namespace

double integrate_1d(const Fn1& f, double a, double b, const QuadOptions& opts) {
    long evals = 0;
    auto core = [&](const Fn1& g, double lo, double hi) {
        if (lo == hi) return 0.0;
        // coarse pass to set the absolute tolerance from the magnitude
        long e0 = 0;
        const GkResult coarse = gk15(g, lo, hi, e0);
        const double scale = std::max(std::fabs(coarse.integral), 1e-300);
        const double tol_abs = std::max(opts.rel_tol * scale, 1e-305);
        double partial = 0.0;
        return adaptive_gk(g, lo, hi, tol_abs, 0, evals, opts.max_evals, partial);
    };
    return transformed(f, a, b, opts, core);
}

double integrate_1d_simpson(const Fn1& f, double a, double b,
                            const QuadOptions& opts) {
    long evals = 0;
    auto core = [&](const Fn1& g, double lo, double hi) {
        if (lo == hi) return 0.0;
        const double m = 0.5 * (lo + hi);
        // Simpson evaluates endpoints; nudge inward so transformed
        // integrands stay finite there.
        const double nudge = 1e-12 * (hi - lo);
        const double fa = g(lo + nudge), fm = g(m), fb = g(hi - nudge);
        evals += 3;
        const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        const double scale = std::max(std::fabs(whole), 1e-300);
        return adaptive_simpson_rec(g, lo, hi, fa, fm, fb, whole,
                                    opts.rel_tol * scale, 0, evals,
                                    opts.max_evals);
    };
    return transformed(f, a, b, opts, core);
}

double integrate_ball_2d(const Fn2& f, const Vec& center, double radius,
                         double tol, const std::optional<PolarPole>& pole) {
    if (center.size() != 2)
        throw ParamError("integrate_ball_2d: only d = 2 is supported");
    if (radius <= 0.0) throw ParamError("integrate_ball_2d: radius must be > 0");

    Vec origin = center;
    double pole_exponent = 0.0;
    if (pole) {
        if (dist(pole->location, center) >= radius) {
            // pole outside the region contributes no interior singularity
        } else {
            origin = pole->location;
            pole_exponent = pole->exponent;
        }
    }
    const Vec v = sub(origin, center);
    const double v2 = dot(v, v);

    QuadOptions inner_opts;
    inner_opts.rel_tol = tol / 3.0;
    // radial integrand ~ s^{1-exponent}; singular only if exponent > 1
    if (pole_exponent > 1.0) inner_opts.left_exponent = pole_exponent - 1.0;

    auto outer_fn = [&](double theta) {
        const double cx = std::cos(theta), sx = std::sin(theta);
        // distance from the polar origin to the circle along (cx, sx)
        const double p = v[0] * cx + v[1] * sx;
        const double ell = -p + std::sqrt(std::max(p * p + radius * radius - v2, 0.0));
        auto radial = [&](double s) {
            Vec y{origin[0] + s * cx, origin[1] + s * sx};
            return f(y) * s;
        };
        return integrate_1d(radial, 0.0, ell, inner_opts);
    };
    QuadOptions outer_opts;
    outer_opts.rel_tol = tol / 3.0;
    return integrate_1d(outer_fn, 0.0, 2.0 * kPi, outer_opts);
}

double integrate_exterior_2d(const Fn2& f, const Vec& center, double radius,
                             double tol, double inner_left_exponent) {
    if (center.size() != 2)
        throw ParamError("integrate_exterior_2d: only d = 2 is supported");
    QuadOptions inner_opts;
    inner_opts.rel_tol = tol / 3.0;
    inner_opts.left_exponent = inner_left_exponent;
    inner_opts.upper_infinite = true;
    auto outer_fn = [&](double theta) {
        const double cx = std::cos(theta), sx = std::sin(theta);
        auto radial = [&](double s) {
            Vec y{center[0] + s * cx, center[1] + s * sx};
            return f(y) * s;
        };
        return integrate_1d(radial, radius, 0.0, inner_opts);
    };
    QuadOptions outer_opts;
    outer_opts.rel_tol = tol / 3.0;
    return integrate_1d(outer_fn, 0.0, 2.0 * kPi, outer_opts);
}

}  // namespace stablab::quad
