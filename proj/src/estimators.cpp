#include "stablab/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace stablab::est {

namespace {

constexpr long kBlockSize = 4096;
constexpr std::uint64_t kPointStride = 1 << 16;  // stream slots per MC call

using PathFn = std::function<bool(std::uint64_t path_index, RngStream& rng, double* out)>;

struct Sums {
    std::vector<double> s, s2;
    long n = 0;
    long failures = 0;
};

// Block-wise Monte-Carlo driver.  Block b consumes stream (master, base+b),
// blocks are reduced in index order, so the result is independent of the
// worker count.
std::vector<MCEstimate> run_mc(int k, long n, const RunCtx& ctx,
                               std::uint64_t base, const PathFn& path) {
    const long nblocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<Sums> sums(nblocks);
    const int workers = std::max(1, ctx.workers);
    auto work = [&](int w) {
        std::vector<double> out(k);
        for (long b = w; b < nblocks; b += workers) {
            RngStream rng(ctx.master_seed, base + static_cast<std::uint64_t>(b));
            Sums acc;
            acc.s.assign(k, 0.0);
            acc.s2.assign(k, 0.0);
            const long count = std::min<long>(kBlockSize, n - b * kBlockSize);
            for (long i = 0; i < count; ++i) {
                const std::uint64_t idx = b * kBlockSize + i;
                if (path(idx, rng, out.data())) {
                    ++acc.n;
                    for (int j = 0; j < k; ++j) {
                        acc.s[j] += out[j];
                        acc.s2[j] += out[j] * out[j];
                    }
                } else {
                    ++acc.failures;
                }
            }
            sums[b] = std::move(acc);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    Sums total;
    total.s.assign(k, 0.0);
    total.s2.assign(k, 0.0);
    for (const auto& b : sums) {
        for (int j = 0; j < k; ++j) {
            total.s[j] += b.s[j];
            total.s2[j] += b.s2[j];
        }
        total.n += b.n;
        total.failures += b.failures;
    }
    if (total.failures > 0.001 * n)
        throw NonTerminationError("monte-carlo run: more than 0.1% of paths hit max_steps");
    std::vector<MCEstimate> est(k);
    for (int j = 0; j < k; ++j) {
        const double mean = total.s[j] / total.n;
        double var = 0.0;
        if (total.n > 1)
            var = std::max(0.0, (total.s2[j] - total.n * mean * mean) / (total.n - 1));
        est[j] = {mean, std::sqrt(var / total.n), total.n, ctx.master_seed};
    }
    return est;
}

double rel_err(const MCEstimate& e) {
    return e.mean != 0.0 ? std::fabs(e.stderror / e.mean) : 1e300;
}

// u/v with propagated uncertainty
std::pair<double, double> ratio_with_err(const MCEstimate& u, const MCEstimate& v) {
    const double r = u.mean / v.mean;
    const double re = std::sqrt(rel_err(u) * rel_err(u) + rel_err(v) * rel_err(v));
    return {r, std::fabs(r) * re};
}

void require_positive(const MCEstimate& e, const char* what) {
    if (!(e.mean > 3.0 * e.stderror))
        throw DegenerateEstimateError(std::string(what) +
                                      ": estimate consistent with zero");
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

// least-squares slope of y against x with per-point uncertainty on y
struct SlopeFit {
    double slope;
    double slope_err;
};

SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& sigma_y) {
    const std::size_t m = x.size();
    double xbar = 0.0;
    for (double v : x) xbar += v;
    xbar /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * y[i];
    }
    double var = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double w = (x[i] - xbar) / sxx;
        var += w * w * sigma_y[i] * sigma_y[i];
    }
    return {sxy / sxx, std::sqrt(var)};
}

void sampled_vanishing_check(const BoundaryData& f,
                             const std::function<Vec(RngStream&)>& sample_region,
                             const char* what) {
    RngStream rng(0x5a11d, 1);
    for (int i = 0; i < 512; ++i) {
        const Vec p = sample_region(rng);
        if (f(p) != 0.0)
            throw ParamError(std::string(what) +
                             ": boundary data does not vanish where required");
    }
}

Vec vertical_point(const geom::Domain& graph_domain, const Vec& z0, double height) {
    Vec x = z0;
    x.back() += height;
    return x;
}

}  // namespace

BoundaryData BoundaryData::slab(double lo, double hi, Vec center, double radial_min) {
    BoundaryData b;
    b.name = "slab";
    b.sup_bound = 1.0;
    b.fn = [lo, hi, center = std::move(center), radial_min](const Vec& z) {
        if (z.back() < lo || z.back() > hi) return 0.0;
        if (radial_min > 0.0 && dist(z, center) < radial_min) return 0.0;
        return 1.0;
    };
    return b;
}

BoundaryData BoundaryData::annulus_sector(Vec center, double r0, double r1, Vec axis,
                                          double half_angle) {
    BoundaryData b;
    b.name = "annulus-sector";
    b.sup_bound = 1.0;
    const double an = norm(axis);
    b.fn = [center = std::move(center), r0, r1, axis = std::move(axis), an,
            half_angle](const Vec& z) {
        const Vec w = sub(z, center);
        const double s = norm(w);
        if (s <= r0 || s >= r1) return 0.0;
        const double cosang = dot(w, axis) / (s * an);
        return std::acos(std::clamp(cosang, -1.0, 1.0)) <= half_angle ? 1.0 : 0.0;
    };
    return b;
}

BoundaryData BoundaryData::w_halfspace(double alpha, double sup_hint) {
    BoundaryData b;
    b.name = "w-halfspace";
    b.sup_bound = sup_hint;
    b.fn = [alpha](const Vec& z) {
        return z.back() > 0.0 ? std::pow(z.back(), 0.5 * alpha) : 0.0;
    };
    return b;
}

BoundaryData BoundaryData::custom(std::string name,
                                  std::function<double(const Vec&)> f,
                                  double sup_bound) {
    return BoundaryData{std::move(name), std::move(f), sup_bound};
}

MCEstimate harmonic_eval(const geom::Domain& domain, double alpha,
                         const BoundaryData& f, const Vec& x, long n,
                         const RunCtx& ctx, std::uint64_t stream_base) {
    if (!domain.contains(x)) throw DomainError("harmonic_eval: x outside domain");
    auto path = [&](std::uint64_t, RngStream& rng, double* out) {
        try {
            const wos::WosOutcome o = wos::wos_exit(domain, alpha, x, ctx.wos_cfg, rng);
            out[0] = f(o.exit_point);
            return true;
        } catch (const NonTerminationError&) {
            return false;
        }
    };
    return run_mc(1, n, ctx, stream_base, path)[0];
}

std::vector<MCEstimate> gradient_score_estimate(const geom::Domain& domain,
                                                double alpha, const BoundaryData& f,
                                                const Vec& x, double r, long n,
                                                const RunCtx& ctx,
                                                std::uint64_t stream_base) {
    const int d = domain.dim();
    if (!domain.contains(x))
        throw DomainError("gradient_score_estimate: x outside domain");
    if (r >= domain.dist_to_boundary(x).lower)
        throw DomainError("gradient_score_estimate: ball radius exceeds delta_lower");
    auto path = [&](std::uint64_t, RngStream& rng, double* out) {
        const double t = wos::exit_radius_factor(alpha, rng.uniform());
        const Vec dir = wos::sample_sphere_direction(d, rng);
        const Vec z = add(x, scaled(dir, r * t));
        const double fv = f(z);
        for (int i = 0; i < d; ++i) out[i] = fv * d * dir[i] / (r * t);
        return true;
    };
    return run_mc(d, n, ctx, stream_base, path);
}

MCEstimate ball_mean_eval(const geom::Domain& domain, double alpha,
                          const BoundaryData& f, const Vec& x, double r, long n,
                          const RunCtx& ctx, std::uint64_t stream_base) {
    const int d = domain.dim();
    if (!domain.contains(x)) throw DomainError("ball_mean_eval: x outside domain");
    if (r >= domain.dist_to_boundary(x).lower)
        throw DomainError("ball_mean_eval: ball radius exceeds delta_lower");
    auto path = [&](std::uint64_t, RngStream& rng, double* out) {
        const double t = wos::exit_radius_factor(alpha, rng.uniform());
        const Vec dir = wos::sample_sphere_direction(d, rng);
        out[0] = f(add(x, scaled(dir, r * t)));
        return true;
    };
    return run_mc(1, n, ctx, stream_base, path)[0];
}

std::vector<MCEstimate> fd_gradient_estimate(const geom::Domain& domain, double alpha,
                                             const BoundaryData& f, const Vec& x,
                                             double r, double h, long n,
                                             const RunCtx& ctx,
                                             std::uint64_t stream_base) {
    const int d = domain.dim();
    if (h <= 0.0) throw ParamError("fd_gradient_estimate: h must be > 0");
    if (r + h >= domain.dist_to_boundary(x).lower)
        throw DomainError("fd_gradient_estimate: ball radius exceeds delta_lower");
    auto path = [&](std::uint64_t, RngStream& rng, double* out) {
        const double t = wos::exit_radius_factor(alpha, rng.uniform());
        const Vec dir = wos::sample_sphere_direction(d, rng);
        const Vec jump = scaled(dir, r * t);
        for (int i = 0; i < d; ++i) {
            Vec zp = add(x, jump), zm = zp;
            zp[i] += h;
            zm[i] -= h;
            out[i] = (f(zp) - f(zm)) / (2.0 * h);
        }
        return true;
    };
    return run_mc(d, n, ctx, stream_base, path);
}

ExperimentReport harnack_experiment(const HarnackOptions& opt, const RunCtx& ctx) {
    Timer timer;
    const int d = static_cast<int>(opt.x0.size());
    ExperimentReport rep;
    rep.name = "harnack";
    rep.seed = ctx.master_seed;
    rep.params = {{"alpha", std::to_string(opt.alpha)},
                  {"r", std::to_string(opt.r)},
                  {"n", std::to_string(opt.n)},
                  {"grid", std::to_string(opt.grid_size)}};

    Vec axis(d, 0.0);
    axis[0] = 1.0;
    std::vector<double> ratios, ratio_errs;
    const int n_scales = opt.check_half_radius ? 2 : 1;
    int point_counter = 0;
    for (int si = 0; si < n_scales; ++si) {
        const double scale = opt.r / (si + 1);
        const geom::Domain ball = geom::Domain::ball(opt.x0, scale);
        const BoundaryData f = BoundaryData::annulus_sector(
            opt.x0, 2.0 * scale, 3.0 * scale, axis, 0.4);

        // tensor grid in B(x0, scale/2)
        std::vector<Vec> grid;
        std::vector<double> ticks;
        for (int i = 0; i < opt.grid_size; ++i)
            ticks.push_back(-0.3 + 0.6 * i / std::max(1, opt.grid_size - 1));
        std::vector<int> idx(d, 0);
        while (true) {
            Vec p = opt.x0;
            double r2 = 0.0;
            for (int i = 0; i < d; ++i) {
                const double off = ticks[idx[i]] * scale;
                p[i] += off;
                r2 += off * off;
            }
            if (std::sqrt(r2) < 0.45 * scale) grid.push_back(p);
            int c = 0;
            while (c < d && ++idx[c] == opt.grid_size) idx[c++] = 0;
            if (c == d) break;
        }

        double umin = 1e300, umax = -1e300, emin = 0.0, emax = 0.0;
        for (const auto& p : grid) {
            const MCEstimate e = harmonic_eval(ball, opt.alpha, f, p, opt.n, ctx,
                                               kPointStride * (++point_counter));
            require_positive(e, "harnack_experiment");
            if (rel_err(e) > 0.1)
                rep.notes.push_back("low-precision grid estimate (stderr/mean > 10%)");
            rep.points.push_back({point_counter, p, e});
            if (e.mean < umin) {
                umin = e.mean;
                emin = e.stderror;
            }
            if (e.mean > umax) {
                umax = e.mean;
                emax = e.stderror;
            }
        }
        const MCEstimate top{umax, emax, opt.n, ctx.master_seed};
        const MCEstimate bot{umin, emin, opt.n, ctx.master_seed};
        auto [ratio, err] = ratio_with_err(top, bot);
        ratios.push_back(ratio);
        ratio_errs.push_back(err);
    }
    rep.statistic = ratios[0];
    rep.statistic_err = ratio_errs[0];
    rep.pass = std::isfinite(ratios[0]);
    if (n_scales == 2) {
        const double agree = std::fabs(ratios[0] - ratios[1]) / ratios[0];
        rep.notes.push_back("half-radius ratio " + std::to_string(ratios[1]));
        rep.notes.push_back("radius agreement rel-diff " + std::to_string(agree));
        rep.pass = rep.pass && agree <= opt.radius_agreement_tol;
    }
    rep.runtime_s = timer.seconds();
    return rep;
}

ExperimentReport chained_harnack_experiment(const ChainedHarnackOptions& opt,
                                            const RunCtx& ctx) {
    Timer timer;
    const int d = static_cast<int>(opt.x2.size());
    ExperimentReport rep;
    rep.name = "chained-harnack";
    rep.seed = ctx.master_seed;
    rep.params = {{"alpha", std::to_string(opt.alpha)},
                  {"r", std::to_string(opt.r)},
                  {"k_max", std::to_string(opt.k_max)},
                  {"n", std::to_string(opt.n)}};
    const double big = std::pow(2.0, opt.k_max) * opt.r * 4.0;
    const BoundaryData f = BoundaryData::custom(
        "far-indicator",
        [c = opt.x2, big](const Vec& z) { return dist(z, c) > big ? 1.0 : 0.0; }, 1.0);

    double c_hat = 1.0;
    bool pass = true;
    int point_counter = 0;
    for (int k = 1; k <= opt.k_max; ++k) {
        Vec x1 = opt.x2;
        x1[0] += 0.9 * std::pow(2.0, k) * opt.r;
        const geom::Domain dom = geom::Domain::ball_union(
            {geom::BallDomain{x1, opt.r}, geom::BallDomain{opt.x2, opt.r}});
        const MCEstimate u1 = harmonic_eval(dom, opt.alpha, f, x1, opt.n, ctx,
                                            kPointStride * (++point_counter));
        const MCEstimate u2 = harmonic_eval(dom, opt.alpha, f, opt.x2, opt.n, ctx,
                                            kPointStride * (++point_counter));
        require_positive(u1, "chained_harnack");
        require_positive(u2, "chained_harnack");
        auto [ratio, err] = ratio_with_err(u1, u2);
        rep.points.push_back({2 * k - 1, x1, u1});
        rep.points.push_back({2 * k, opt.x2, u2});
        const double envelope = std::pow(2.0, k * (d + opt.alpha));
        if (k == 1) {
            c_hat = 1.5 * std::max({ratio / envelope, 1.0 / (ratio * envelope), 1.0});
            rep.notes.push_back("c_hat calibrated at k=1: " + std::to_string(c_hat));
            rep.statistic = ratio;
            rep.statistic_err = err;
        } else {
            const bool ok =
                ratio <= c_hat * envelope && ratio >= 1.0 / (c_hat * envelope);
            if (!ok) pass = false;
            rep.notes.push_back("k=" + std::to_string(k) + " ratio " +
                                std::to_string(ratio) +
                                (ok ? " within envelope" : " OUTSIDE envelope"));
        }
    }
    rep.pass = pass;
    rep.runtime_s = timer.seconds();
    return rep;
}

ExperimentReport bhp_experiment(const geom::Domain& domain, const Vec& z0,
                                const BhpOptions& opt, const BoundaryData& f1,
                                const BoundaryData& f2, const RunCtx& ctx) {
    Timer timer;
    const auto* g = domain.graph();
    if (!g) throw ParamError("bhp_experiment: needs a graph domain");
    const int d = g->d;
    ExperimentReport rep;
    rep.name = "bhp";
    rep.seed = ctx.master_seed;
    rep.params = {{"alpha", std::to_string(opt.alpha)},
                  {"r", std::to_string(opt.r)},
                  {"n", std::to_string(opt.n)},
                  {"grid", std::to_string(opt.grid_size)}};

    // boundary data must vanish on B(z0, 2r)
    auto sampler = [&](RngStream& rng) {
        Vec p(d);
        for (auto& c : p) c = 2.0 * opt.r * (2.0 * rng.uniform() - 1.0);
        const double s = norm(p);
        if (s > 0.0)
            p = scaled(p, 2.0 * opt.r * std::pow(rng.uniform(), 1.0 / d) / s);
        return add(z0, p);
    };
    sampled_vanishing_check(f1, sampler, "bhp_experiment f1");
    sampled_vanishing_check(f2, sampler, "bhp_experiment f2");

    const geom::Domain wos_dom = geom::Domain::graph_ball_intersection(
        *g, geom::BallDomain{z0, 2.0 * opt.r});

    std::vector<Vec> grid;
    for (int i = 0; i < opt.grid_size; ++i) {
        const double lat =
            (-0.5 + 1.0 * i / std::max(1, opt.grid_size - 1)) * opt.r;
        for (int j = 0; j < opt.grid_size; ++j) {
            const double height =
                opt.r * (0.08 + 0.6 * j / std::max(1, opt.grid_size - 1));
            Vec p = z0;
            p[0] += lat;
            p[d - 1] = g->graph(lateral(p)) + height;
            if (dist(p, z0) < 0.95 * opt.r && domain.contains(p)) grid.push_back(p);
        }
    }

    double rmin = 1e300, rmax = -1e300, rmin_err = 0.0, rmax_err = 0.0;
    int pc = 0;
    for (const auto& p : grid) {
        // common random numbers for u and v: f1 = f2 gives exact ratio 1
        const std::uint64_t base = kPointStride * (++pc);
        const MCEstimate u = harmonic_eval(wos_dom, opt.alpha, f1, p, opt.n, ctx, base);
        const MCEstimate v = harmonic_eval(wos_dom, opt.alpha, f2, p, opt.n, ctx, base);
        require_positive(v, "bhp_experiment v");
        require_positive(u, "bhp_experiment u");
        auto [ratio, err] = ratio_with_err(u, v);
        rep.points.push_back({2 * pc - 1, p, u});
        rep.points.push_back({2 * pc, p, v});
        if (ratio < rmin) {
            rmin = ratio;
            rmin_err = err;
        }
        if (ratio > rmax) {
            rmax = ratio;
            rmax_err = err;
        }
    }
    const MCEstimate top{rmax, rmax_err, opt.n, ctx.master_seed};
    const MCEstimate bot{rmin, rmin_err, opt.n, ctx.master_seed};
    auto [stat, staterr] = ratio_with_err(top, bot);
    rep.statistic = stat;
    rep.statistic_err = staterr;
    rep.pass = std::isfinite(stat);
    rep.runtime_s = timer.seconds();
    return rep;
}

ExperimentReport boundary_ratio_limit_experiment(const geom::Domain& domain,
                                                 const Vec& z0,
                                                 const RatioLimitOptions& opt,
                                                 const BoundaryData& f1,
                                                 const BoundaryData& f2,
                                                 const RunCtx& ctx) {
    Timer timer;
    const auto* g = domain.graph();
    if (!g) throw ParamError("boundary_ratio_limit: needs a graph domain");
    ExperimentReport rep;
    rep.name = "ratio-limit";
    rep.seed = ctx.master_seed;
    rep.params = {{"alpha", std::to_string(opt.alpha)},
                  {"r", std::to_string(opt.r)},
                  {"levels", std::to_string(opt.levels)},
                  {"n", std::to_string(opt.n)}};

    const geom::Domain wos_dom = geom::Domain::graph_ball_intersection(
        *g, geom::BallDomain{z0, 2.0 * opt.r});

    std::vector<double> ratio(opt.levels), ratio_err(opt.levels);
    for (int k = 1; k <= opt.levels; ++k) {
        const Vec xk = vertical_point(domain, z0, std::pow(2.0, -k) * opt.r);
        const std::uint64_t base = kPointStride * k;  // shared by u and v (CRN)
        const MCEstimate u = harmonic_eval(wos_dom, opt.alpha, f1, xk, opt.n, ctx, base);
        const MCEstimate v = harmonic_eval(wos_dom, opt.alpha, f2, xk, opt.n, ctx, base);
        require_positive(v, "boundary_ratio_limit v");
        require_positive(u, "boundary_ratio_limit u");
        auto [rk, ek] = ratio_with_err(u, v);
        ratio[k - 1] = rk;
        ratio_err[k - 1] = ek;
        rep.points.push_back({k, xk, MCEstimate{rk, ek, opt.n, ctx.master_seed}});
    }

    // oscillation between consecutive dyadic levels
    std::vector<double> osc, osc_err, ks;
    for (int k = 0; k + 1 < opt.levels; ++k) {
        osc.push_back(std::fabs(ratio[k + 1] - ratio[k]));
        osc_err.push_back(std::sqrt(ratio_err[k] * ratio_err[k] +
                                    ratio_err[k + 1] * ratio_err[k + 1]));
        ks.push_back(k + 1.0);
    }
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < osc.size(); ++i) {
        const double allow =
            2.0 * std::sqrt(osc_err[i] * osc_err[i] + osc_err[i + 1] * osc_err[i + 1]);
        if (osc[i + 1] > osc[i] + allow) decreasing = false;
    }
    // Hoelder exponent of the oscillation decay
    std::vector<double> logosc, logerr;
    std::vector<double> kk;
    for (std::size_t i = 0; i < osc.size(); ++i) {
        if (osc[i] > 0.0) {
            logosc.push_back(std::log2(osc[i]));
            logerr.push_back(osc_err[i] / (osc[i] * std::log(2.0)));
            kk.push_back(ks[i]);
        }
    }
    double gamma1 = 0.0, gamma1_err = 0.0;
    if (kk.size() >= 2) {
        const SlopeFit fit = fit_slope(kk, logosc, logerr);
        gamma1 = -fit.slope;
        gamma1_err = fit.slope_err;
    }
    rep.statistic = gamma1;
    rep.statistic_err = gamma1_err;
    rep.notes.push_back(std::string("oscillation ") +
                        (decreasing ? "decreasing within 2 sigma" : "NOT decreasing"));
    rep.pass = decreasing && gamma1 > 0.0;
    rep.runtime_s = timer.seconds();
    return rep;
}

ExperimentReport decay_experiment(const geom::Domain& domain, const Vec& z0,
                                  const DecayOptions& opt, const RunCtx& ctx) {
    Timer timer;
    const auto* g = domain.graph();
    if (!g) throw ParamError("decay_experiment: needs a graph domain");
    ExperimentReport rep;
    rep.name = "decay";
    rep.seed = ctx.master_seed;
    rep.params = {{"alpha", std::to_string(opt.alpha)},
                  {"r", std::to_string(opt.r)},
                  {"levels", std::to_string(opt.levels)},
                  {"n", std::to_string(opt.n)}};

    const BoundaryData f = BoundaryData::custom(
        "beyond-2r",
        [z0, R = 2.0 * opt.r](const Vec& z) { return dist(z, z0) > R ? 1.0 : 0.0; },
        1.0);

    auto level_domain = [&](int k) {
        return geom::Domain::graph_ball_intersection(
            *g, geom::BallDomain{z0, std::pow(2.0, -k) * opt.r});
    };

    // exactly self-similar corkscrew ray: x_k = z0 + 2^{-k} (A_r - z0), so
    // dyadic levels are related by the dilation invariance of the stable process
    const geom::CorkscrewResult cs = geom::kappa_fat_probe(domain, z0, opt.r, 1000);
    const Vec ray = sub(cs.point, z0);
    auto level_point = [&](int k) { return add(z0, scaled(ray, std::pow(2.0, -k))); };

    // fixed reference u(x_1) in the paper's bound u_k(x_k) <= C 2^{-k a} u(x_1)
    int pc = 0;
    const MCEstimate uref = harmonic_eval(level_domain(0), opt.alpha, f,
                                          level_point(1), opt.n, ctx,
                                          kPointStride * (++pc));
    require_positive(uref, "decay_experiment u(x_1)");

    std::vector<double> ys, sig, ks;
    for (int k = 1; k <= opt.levels; ++k) {
        const MCEstimate uk = harmonic_eval(level_domain(k), opt.alpha, f,
                                            level_point(k), opt.n, ctx,
                                            kPointStride * (++pc));
        require_positive(uk, "decay_experiment u_k");
        auto [ratio, err] = ratio_with_err(uk, uref);
        rep.points.push_back(
            {k, level_point(k), MCEstimate{ratio, err, opt.n, ctx.master_seed}});
        ys.push_back(std::log2(ratio));
        sig.push_back(err / (ratio * std::log(2.0)));
        ks.push_back(k);
    }
    const SlopeFit fit = fit_slope(ks, ys, sig);
    rep.statistic = fit.slope;
    rep.statistic_err = fit.slope_err;

    // pointwise monotonicity u_k <= u_{k-1} at the deepest corkscrew point
    const Vec deep = level_point(opt.levels);
    bool monotone = true;
    double prev = 1e300, prev_err = 0.0;
    for (int k = 0; k <= opt.levels; ++k) {
        const MCEstimate uk = harmonic_eval(level_domain(k), opt.alpha, f, deep,
                                            opt.n, ctx, kPointStride * (++pc));
        const double allow =
            2.0 * std::sqrt(uk.stderror * uk.stderror + prev_err * prev_err);
        if (k > 0 && uk.mean > prev + allow) monotone = false;
        prev = uk.mean;
        prev_err = uk.stderror;
    }
    rep.notes.push_back(std::string("pointwise monotonicity ") +
                        (monotone ? "holds within 2 sigma" : "VIOLATED"));
    rep.pass = std::fabs(fit.slope + opt.alpha) <= opt.slope_tol && monotone;
    rep.runtime_s = timer.seconds();
    return rep;
}

ExperimentReport gradient_bound_experiment(const geom::Domain& domain,
                                           const BoundaryData& f,
                                           const GradientBoundOptions& opt,
                                           const RunCtx& ctx) {
    Timer timer;
    const int d = domain.dim();
    ExperimentReport rep;
    rep.name = "gradient";
    rep.seed = ctx.master_seed;
    rep.params = {{"alpha", std::to_string(opt.alpha)},
                  {"n", std::to_string(opt.n)},
                  {"points", std::to_string(opt.grid.size())}};

    double upper_stat = -1e300, upper_err = 0.0;
    double lower_stat = 1e300, lower_err = 0.0;
    bool pass = true;
    int pc = 0;
    for (const auto& x : opt.grid) {
        const double delta = domain.dist_to_boundary(x).lower;
        const double rball = opt.ball_fraction * delta;
        const auto grad = gradient_score_estimate(domain, opt.alpha, f, x, rball,
                                                  opt.n, ctx, kPointStride * (++pc));
        const MCEstimate fx = ball_mean_eval(domain, opt.alpha, f, x, rball, opt.n,
                                             ctx, kPointStride * (++pc));
        require_positive(fx, "gradient_bound_experiment f");
        double g2 = 0.0, gvar = 0.0;
        for (int i = 0; i < d; ++i) {
            g2 += grad[i].mean * grad[i].mean;
            gvar += grad[i].mean * grad[i].mean * grad[i].stderror * grad[i].stderror;
        }
        const double gnorm = std::sqrt(g2);
        const double gnorm_err = gnorm > 0.0 ? std::sqrt(gvar) / gnorm : 0.0;
        const MCEstimate ge{gnorm, gnorm_err, opt.n, ctx.master_seed};
        auto [up, up_err] = ratio_with_err(ge, fx);
        const double upper = up * std::min(1.0, delta);
        const double lower = up * delta;
        rep.points.push_back({pc, x, MCEstimate{upper, up_err * std::min(1.0, delta),
                                                opt.n, ctx.master_seed}});
        if (upper > upper_stat) {
            upper_stat = upper;
            upper_err = up_err * std::min(1.0, delta);
        }
        if (lower < lower_stat) {
            lower_stat = lower;
            lower_err = up_err * delta;
        }
        if (opt.analytic_ratio >= 0.0) {
            // the scale-free ratio delta * |grad u| / u is what the analytic
            // value (alpha/2 on the flat boundary) pins at every height
            const double sigma = up_err * delta;
            if (std::fabs(lower - opt.analytic_ratio) > 3.0 * sigma) pass = false;
        }
    }
    rep.statistic = upper_stat;
    rep.statistic_err = upper_err;
    rep.notes.push_back("lower statistic " + std::to_string(lower_stat) + " +- " +
                        std::to_string(lower_err));
    rep.pass = pass && std::isfinite(upper_stat) && lower_stat > 0.0;
    rep.runtime_s = timer.seconds();
    return rep;
}

ExperimentReport barrier_experiment(const geom::Domain& graph_domain, const Vec& z0,
                                    const BarrierOptions& opt, const RunCtx& ctx) {
    Timer timer;
    const auto* g = graph_domain.graph();
    if (!g) throw ParamError("barrier_experiment: needs a graph domain");
    const int d = g->d;
    ExperimentReport rep;
    rep.name = "barrier";
    rep.seed = ctx.master_seed;
    rep.params = {{"alpha", std::to_string(opt.alpha)},
                  {"r", std::to_string(opt.r)},
                  {"heights", std::to_string(opt.heights)},
                  {"n", std::to_string(opt.n)}};

    const double sf = std::sqrt(1.0 + g->lambda0 * g->lambda0);
    const double box_height = 4.0 * opt.r * sf;
    geom::BoxDomain box;
    box.base = std::make_shared<const geom::LipschitzGraphDomain>(*g);
    box.anchor = z0;
    box.height = box_height;
    box.width = 2.0 * opt.r;
    box.plus = true;
    const geom::Domain box_dom = geom::Domain::box(box);

    // exit lands in the inverted box D^-(z0, inf, 2r)?  half-open convention:
    // rho <= 0 belongs to D^-
    auto in_lower = [&](const Vec& z) {
        Vec zl = lateral(z);
        return z[d - 1] - g->graph(zl) <= 0.0 &&
               dist(zl, lateral(z0)) < 2.0 * opt.r;
    };
    const BoundaryData gbar = BoundaryData::custom(
        "barrier-indicator", [&](const Vec& z) { return in_lower(z) ? 0.0 : 1.0; },
        1.0);

    std::vector<double> heights, gs, gerrs;
    for (int j = 1; j <= opt.heights; ++j) {
        const double t = box_height * j / (opt.heights + 1.0);
        const Vec x = vertical_point(graph_domain, z0, t);
        const MCEstimate e =
            harmonic_eval(box_dom, opt.alpha, gbar, x, opt.n, ctx, kPointStride * j);
        rep.points.push_back({j, x, e});
        heights.push_back(t);
        gs.push_back(e.mean);
        gerrs.push_back(e.stderror);
    }

    bool monotone = true;
    for (std::size_t i = 0; i + 1 < gs.size(); ++i) {
        const double allow = 2.0 * std::sqrt(gerrs[i] * gerrs[i] +
                                             gerrs[i + 1] * gerrs[i + 1]);
        if (gs[i + 1] < gs[i] - allow) monotone = false;
    }

    // centered-difference derivative against g/delta at interior heights
    double min_ratio = 1e300;
    for (std::size_t j = 1; j + 1 < gs.size(); ++j) {
        const double dgdt = (gs[j + 1] - gs[j - 1]) / (heights[j + 1] - heights[j - 1]);
        const Vec x = vertical_point(graph_domain, z0, heights[j]);
        const double delta = graph_domain.dist_to_boundary(x).upper;  // rho
        if (gs[j] > 0.0) min_ratio = std::min(min_ratio, dgdt * delta / gs[j]);
    }
    rep.statistic = min_ratio;
    rep.statistic_err = 0.0;
    rep.notes.push_back(std::string("monotone within 2 sigma: ") +
                        (monotone ? "yes" : "NO"));
    rep.pass = monotone && min_ratio > 0.0;
    rep.runtime_s = timer.seconds();
    return rep;
}

ExperimentReport boundary_decay_fit(const geom::Domain& domain, const Vec& z0,
                                    const BoundaryDecayOptions& opt,
                                    const BoundaryData& f, const RunCtx& ctx) {
    Timer timer;
    const auto* g = domain.graph();
    if (!g) throw ParamError("boundary_decay_fit: needs a graph domain");
    ExperimentReport rep;
    rep.name = "boundary-decay";
    rep.seed = ctx.master_seed;
    rep.params = {{"alpha", std::to_string(opt.alpha)},
                  {"r", std::to_string(opt.r)},
                  {"levels", std::to_string(opt.levels)},
                  {"n", std::to_string(opt.n)}};

    const geom::Domain wos_dom = geom::Domain::graph_ball_intersection(
        *g, geom::BallDomain{z0, opt.r});

    std::vector<double> xs, ys, sig;
    for (int k = 1; k <= opt.levels; ++k) {
        const double height = std::pow(2.0, -k) * opt.r;
        const Vec xk = vertical_point(domain, z0, height);
        const MCEstimate u = harmonic_eval(wos_dom, opt.alpha, f, xk, opt.n, ctx,
                                           kPointStride * k);
        require_positive(u, "boundary_decay_fit");
        rep.points.push_back({k, xk, u});
        xs.push_back(std::log(domain.rho(xk)));
        ys.push_back(std::log(u.mean));
        sig.push_back(rel_err(u));
    }
    const SlopeFit fit = fit_slope(xs, ys, sig);
    rep.statistic = fit.slope;
    rep.statistic_err = fit.slope_err;
    bool pass = fit.slope <= opt.alpha - opt.gamma_floor;
    if (opt.expect_halfspace_exponent)
        pass = pass && std::fabs(fit.slope - 0.5 * opt.alpha) <= opt.halfspace_tol;
    rep.notes.push_back("fitted exponent " + std::to_string(fit.slope) + " +- " +
                        std::to_string(fit.slope_err));
    rep.pass = pass;
    rep.runtime_s = timer.seconds();
    return rep;
}

}  // namespace stablab::est
