// stablab command-line front end: kernel evaluation, identity check suites,
// and the Monte-Carlo experiment registry.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "stablab/estimators.hpp"
#include "stablab/kernels.hpp"
#include "stablab/quadrature.hpp"
#include "stablab/report.hpp"

using namespace stablab;

namespace {

Vec parse_vec(const std::string& s) {
    Vec v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            v.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ParamError("bad coordinate list: " + s);
        }
    }
    if (v.empty()) throw ParamError("empty coordinate list");
    return v;
}

void print_value(double v) { std::cout << report::format_sig(v) << "\n"; }

// ---------------------------------------------------------------- kernel eval

int run_kernel_eval(const std::string& kind, int d, double alpha, double beta,
                    const std::string& btext, double r, const std::string& xs,
                    const std::string& ys, const std::string& zs) {
    const kernels::StableParams p(d, alpha, beta > 0.0 ? beta : alpha / 2.0);
    if (kind == "green-global") {
        print_value(kernels::green_global(p, parse_vec(xs), parse_vec(ys)));
    } else if (kind == "green-ball") {
        const geom::BallDomain ball{Vec(d, 0.0), r};
        print_value(kernels::green_ball(ball, alpha, parse_vec(xs), parse_vec(ys)));
    } else if (kind == "poisson-ball") {
        const geom::BallDomain ball{Vec(d, 0.0), r};
        print_value(kernels::poisson_ball(ball, alpha, parse_vec(xs), parse_vec(zs)));
    } else if (kind == "grad-poisson") {
        const geom::BallDomain ball{Vec(d, 0.0), r};
        const Vec g =
            kernels::grad_poisson_ball_fixed(ball, alpha, parse_vec(xs), parse_vec(zs));
        for (double c : g) std::cout << report::format_sig(c) << " ";
        std::cout << "\n";
    } else if (kind == "jump") {
        const kernels::BFunction b = kernels::BFunction::parse(p, btext);
        print_value(kernels::jump_kernel(p, b, parse_vec(xs), parse_vec(ys)).value);
    } else if (kind == "h-envelope") {
        const geom::BallDomain ball{Vec(d, 0.0), r};
        print_value(
            kernels::h_envelope(ball, alpha, p.beta, parse_vec(xs), parse_vec(ys)));
    } else {
        throw ParamError("unknown kernel kind: " + kind);
    }
    return 0;
}

// --------------------------------------------------------------------- checks

struct CheckRow {
    std::string name;
    double value;
    double bound;
    bool pass;
};

int print_check_table(const std::vector<CheckRow>& rows) {
    bool all = true;
    for (const auto& r : rows) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  value="
                  << report::format_sig(r.value)
                  << "  bound=" << report::format_sig(r.bound) << "\n";
        all = all && r.pass;
    }
    return all ? 0 : 1;
}

int check_poisson_normalization() {
    std::vector<CheckRow> rows;
    const geom::BallDomain ball{{0.0, 0.0}, 1.0};
    for (double alpha : {0.5, 1.0, 1.5}) {
        for (double frac : {0.0, 0.5, 0.9}) {
            const Vec x{frac, 0.0};
            const auto f = [&](const Vec& z) {
                return kernels::poisson_ball(ball, alpha, x, z);
            };
            const double total = quad::integrate_exterior_2d(f, ball.center, 1.0,
                                                             1e-9, 0.5 * alpha);
            std::ostringstream name;
            name << "normalization alpha=" << alpha << " |x|=" << frac;
            rows.push_back({name.str(), std::fabs(total - 1.0), 1e-6,
                            std::fabs(total - 1.0) < 1e-6});
        }
    }
    return print_check_table(rows);
}

int check_dynkin() {
    std::vector<CheckRow> rows;
    const kernels::StableParams p(2, 1.0, 0.5);
    const kernels::BFunction b = kernels::BFunction::zero();
    const geom::BallDomain ball{{0.0, 0.0}, 1.0};
    const std::vector<std::pair<Vec, Vec>> pairs = {
        {{0.0, 0.0}, {1.5, 0.0}},  {{0.0, 0.0}, {4.0, 0.0}},
        {{0.5, 0.0}, {1.2, 0.4}},  {{0.5, 0.0}, {-3.0, 1.0}},
        {{-0.3, 0.4}, {0.0, 2.0}}, {{0.2, -0.6}, {1.05, -0.2}}};
    for (const auto& [x, z] : pairs) {
        const double oracle = kernels::dynkin_poisson_oracle(ball, p, b, x, z, 1e-8);
        const double closed = kernels::poisson_ball(ball, 1.0, x, z);
        const double rel = std::fabs(oracle - closed) / closed;
        std::ostringstream name;
        name << "dynkin x=(" << x[0] << "," << x[1] << ") z=(" << z[0] << "," << z[1]
             << ")";
        rows.push_back({name.str(), rel, 1e-3, rel < 1e-3});
    }
    return print_check_table(rows);
}

int check_scaling() {
    const kernels::StableParams p(2, 1.2, 0.7, 0.3);
    kernels::SampleSpec spec;
    spec.pairs = 100;
    const auto rep = kernels::scaling_checks(p, 1.7, spec);
    std::vector<CheckRow> rows = {
        {"scaling green", rep.max_green_dev, 1e-12, rep.max_green_dev < 1e-12},
        {"scaling poisson", rep.max_poisson_dev, 1e-12, rep.max_poisson_dev < 1e-12},
        {"scaling jump", rep.max_jump_dev, 1e-12, rep.max_jump_dev < 1e-12}};
    return print_check_table(rows);
}

int check_gradient_fd() {
    std::vector<CheckRow> rows;
    RngStream rng(2024, 0);
    double worst_fixed = 0.0, worst_moving = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double alpha = 0.3 + 1.5 * rng.uniform();
        const double r = 0.5 + rng.uniform();
        const geom::BallDomain ball{{0.0, 0.0}, r};
        Vec x{0.0, 0.0};
        do {
            x = {r * (2.0 * rng.uniform() - 1.0), r * (2.0 * rng.uniform() - 1.0)};
        } while (norm(x) > 0.8 * r);
        Vec z;
        do {
            z = {3.0 * r * (2.0 * rng.uniform() - 1.0),
                 3.0 * r * (2.0 * rng.uniform() - 1.0)};
            // the moving-ball kernel recentres B at x, so z must clear B(x,r)
        } while (norm(z) < 1.2 * r || dist(x, z) < 1.2 * r);
        const double h = 1e-6 * r;
        const Vec gf = kernels::grad_poisson_ball_fixed(ball, alpha, x, z);
        const Vec gm = kernels::grad_poisson_ball_moving(r, alpha, x, z);
        for (int c = 0; c < 2; ++c) {
            Vec xp = x, xm = x;
            xp[c] += h;
            xm[c] -= h;
            const double fd_fixed = (kernels::poisson_ball(ball, alpha, xp, z) -
                                     kernels::poisson_ball(ball, alpha, xm, z)) /
                                    (2.0 * h);
            const geom::BallDomain bp{xp, r}, bm{xm, r};
            const double fd_moving = (kernels::poisson_ball(bp, alpha, xp, z) -
                                      kernels::poisson_ball(bm, alpha, xm, z)) /
                                     (2.0 * h);
            worst_fixed =
                std::max(worst_fixed, std::fabs(gf[c] - fd_fixed) /
                                          std::max(1e-300, std::fabs(fd_fixed)));
            worst_moving =
                std::max(worst_moving, std::fabs(gm[c] - fd_moving) /
                                           std::max(1e-300, std::fabs(fd_moving)));
        }
    }
    rows.push_back({"grad fixed vs FD", worst_fixed, 1e-5, worst_fixed < 1e-5});
    rows.push_back({"grad moving vs FD", worst_moving, 1e-5, worst_moving < 1e-5});
    return print_check_table(rows);
}

int check_assumption1(const report::Config& cfg) {
    const int d = static_cast<int>(report::get_int(cfg, "d", 2));
    const double alpha = report::get_num(cfg, "alpha", 1.0);
    const double beta = report::get_num(cfg, "beta", 0.5);
    const double eps0 = report::get_num(cfg, "eps0", 0.0);
    const double m1 = report::get_num(cfg, "m1", 1.0);
    const double m2 = report::get_num(cfg, "m2", 1.0);
    const kernels::StableParams p(d, alpha, beta, eps0, m1, m2);
    const kernels::BFunction b =
        kernels::BFunction::parse(p, report::get_str(cfg, "b", "zero"));
    const auto rep = kernels::check_assumption1(p, b, {});
    std::vector<CheckRow> rows = {
        {"assumption1 ratio_min", rep.ratio_min, 1.0 / m2, rep.pass},
        {"assumption1 ratio_max", rep.ratio_max, m2, rep.pass}};
    return print_check_table(rows);
}

// ---------------------------------------------------------------- experiments

est::RunCtx make_ctx(const report::Config& cfg, std::uint64_t seed, int workers) {
    est::RunCtx ctx;
    ctx.master_seed = seed;
    ctx.workers = workers;
    ctx.wos_cfg.gamma = report::get_num(cfg, "wos.gamma", 0.5);
    ctx.wos_cfg.max_steps =
        static_cast<int>(report::get_int(cfg, "wos.max_steps", 10000));
    return ctx;
}

geom::Domain domain_from_config(const report::Config& cfg, int d) {
    return geom::parse_domain(report::get_str(cfg, "domain", "halfspace(2)"), d);
}

Vec boundary_anchor(const geom::Domain& dom, int d) {
    const auto* g = dom.graph();
    if (!g) throw ParamError("experiment needs a graph domain");
    Vec z0(d, 0.0);
    z0[d - 1] = g->graph(Vec(d - 1, 0.0));
    return z0;
}

est::BoundaryData exterior_shell(const Vec& z0, double r0, double r1,
                                 const geom::Domain& dom, bool upper_only) {
    return est::BoundaryData::custom(
        "exterior-shell",
        [z0, r0, r1, dom, upper_only](const Vec& z) {
            const double s = dist(z, z0);
            if (s <= r0 || (r1 > 0.0 && s >= r1)) return 0.0;
            if (upper_only && dom.rho(z) <= 0.0) return 0.0;
            return 1.0;
        },
        1.0);
}

est::ExperimentReport dispatch_experiment(const std::string& name,
                                          const report::Config& cfg,
                                          const est::RunCtx& ctx) {
    const int d = static_cast<int>(report::get_int(cfg, "d", 2));
    const double alpha = report::get_num(cfg, "alpha", 1.0);
    const double r = report::get_num(cfg, "r", 1.0);
    const long n = report::get_int(cfg, "n", 100000);

    if (name == "harnack") {
        est::HarnackOptions opt;
        opt.x0 = Vec(d, 0.0);
        if (cfg.count("x0")) opt.x0 = parse_vec(cfg.at("x0"));
        opt.r = r;
        opt.alpha = alpha;
        opt.grid_size = static_cast<int>(report::get_int(cfg, "grid", 5));
        opt.n = n;
        return est::harnack_experiment(opt, ctx);
    }
    if (name == "chained-harnack") {
        est::ChainedHarnackOptions opt;
        opt.x2 = Vec(d, 0.0);
        if (cfg.count("x2")) opt.x2 = parse_vec(cfg.at("x2"));
        opt.r = r;
        opt.alpha = alpha;
        opt.k_max = static_cast<int>(report::get_int(cfg, "k_max", 3));
        opt.n = n;
        return est::chained_harnack_experiment(opt, ctx);
    }

    const geom::Domain dom = domain_from_config(cfg, d);
    const Vec z0 = boundary_anchor(dom, d);

    if (name == "bhp" || name == "ratio-limit") {
        const est::BoundaryData f1 = exterior_shell(z0, 2.0 * r, 4.0 * r, dom, true);
        const est::BoundaryData f2 = exterior_shell(z0, 2.0 * r, -1.0, dom, false);
        if (name == "bhp") {
            est::BhpOptions opt;
            opt.r = r;
            opt.alpha = alpha;
            opt.grid_size = static_cast<int>(report::get_int(cfg, "grid", 4));
            opt.n = n;
            return est::bhp_experiment(dom, z0, opt, f1, f2, ctx);
        }
        est::RatioLimitOptions opt;
        opt.r = r;
        opt.alpha = alpha;
        opt.levels = static_cast<int>(report::get_int(cfg, "levels", 7));
        opt.n = n;
        return est::boundary_ratio_limit_experiment(dom, z0, opt, f1, f2, ctx);
    }
    if (name == "decay") {
        est::DecayOptions opt;
        opt.r = r;
        opt.alpha = alpha;
        opt.levels = static_cast<int>(report::get_int(cfg, "levels", 5));
        opt.n = n;
        opt.slope_tol = report::get_num(cfg, "slope_tol", 0.15);
        return est::decay_experiment(dom, z0, opt, ctx);
    }
    if (name == "gradient") {
        est::GradientBoundOptions opt;
        opt.alpha = alpha;
        opt.n = n;
        for (double h : {0.5, 1.0, 2.0}) {
            Vec x = z0;
            x[d - 1] += h;
            opt.grid.push_back(x);
        }
        const bool flat = dom.graph() && dom.graph()->name == "flat";
        if (flat) opt.analytic_ratio = 0.5 * alpha;
        return est::gradient_bound_experiment(
            dom, est::BoundaryData::w_halfspace(alpha), opt, ctx);
    }
    if (name == "barrier") {
        est::BarrierOptions opt;
        opt.r = report::get_num(cfg, "r", 0.25);
        opt.alpha = alpha;
        opt.heights = static_cast<int>(report::get_int(cfg, "heights", 10));
        opt.n = n;
        return est::barrier_experiment(dom, z0, opt, ctx);
    }
    if (name == "boundary-decay") {
        est::BoundaryDecayOptions opt;
        opt.r = r;
        opt.alpha = alpha;
        opt.levels = static_cast<int>(report::get_int(cfg, "levels", 6));
        opt.n = n;
        opt.expect_halfspace_exponent =
            dom.graph() && dom.graph()->name == "flat";
        const est::BoundaryData f = exterior_shell(z0, 1.5 * r, -1.0, dom, true);
        return est::boundary_decay_fit(dom, z0, opt, f, ctx);
    }
    throw ParamError("unknown experiment: " + name);
}

void write_outputs(const est::ExperimentReport& rep, const report::Config& resolved,
                   const std::string& out, const std::string& format) {
    const std::uint64_t h = report::param_hash(resolved);
    if (out.empty()) {
        std::cout << (format == "json" ? report::to_json(rep, h)
                                       : report::to_csv(rep, h));
        return;
    }
    {
        std::ofstream f(out + ".csv");
        f << report::to_csv(rep, h);
    }
    {
        std::ofstream f(out + ".json");
        f << report::to_json(rep, h);
    }
    {
        std::ofstream f(out + ".manifest.json");
        f << report::manifest_json(rep, resolved, h);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stablab: potential-theory laboratory for stable processes"};
    app.require_subcommand(1);

    // kernel eval
    auto* kernel = app.add_subcommand("kernel", "closed-form kernel evaluation");
    auto* keval = kernel->add_subcommand("eval", "print a kernel value");
    std::string kind, xs, ys, zs, btext = "zero";
    int d = 2;
    double alpha = 1.0, beta = 0.0, radius = 1.0;
    keval->add_option("--kind", kind)->required();
    keval->add_option("--d", d);
    keval->add_option("--alpha", alpha);
    keval->add_option("--beta", beta);
    keval->add_option("--b", btext);
    keval->add_option("--r", radius);
    keval->add_option("--x", xs);
    keval->add_option("--y", ys);
    keval->add_option("--z", zs);

    // check
    auto* check = app.add_subcommand("check", "identity check suites");
    std::string check_name, check_config;
    check->add_option("suite", check_name,
                      "poisson-normalization|dynkin|scaling|gradient-fd|assumption1")
        ->required();
    check->add_option("--config", check_config);

    // experiment
    auto* exp = app.add_subcommand("experiment", "Monte-Carlo experiments");
    std::string exp_name, exp_config, exp_out, exp_format = "csv";
    std::uint64_t seed = 0;
    int workers = 1;
    bool seed_given = false;
    exp->add_option("name", exp_name,
                    "harnack|chained-harnack|bhp|ratio-limit|decay|gradient|"
                    "barrier|boundary-decay")
        ->required();
    exp->add_option("--config", exp_config);
    exp->add_option("--seed", seed)->each([&](const std::string&) {
        seed_given = true;
    });
    exp->add_option("--out", exp_out);
    exp->add_option("--format", exp_format)->check(CLI::IsMember({"csv", "json"}));
    exp->add_option("--workers", workers);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (keval->parsed())
            return run_kernel_eval(kind, d, alpha, beta, btext, radius, xs, ys, zs);
        if (check->parsed()) {
            report::Config cfg;
            if (!check_config.empty()) cfg = report::parse_config_file(check_config);
            if (check_name == "poisson-normalization")
                return check_poisson_normalization();
            if (check_name == "dynkin") return check_dynkin();
            if (check_name == "scaling") return check_scaling();
            if (check_name == "gradient-fd") return check_gradient_fd();
            if (check_name == "assumption1") return check_assumption1(cfg);
            throw ParamError("unknown check suite: " + check_name);
        }
        if (exp->parsed()) {
            report::Config cfg;
            if (!exp_config.empty()) cfg = report::parse_config_file(exp_config);
            if (seed_given) cfg["seed"] = std::to_string(seed);
            const std::uint64_t master =
                static_cast<std::uint64_t>(report::get_int(cfg, "seed", 0));
            if (const char* env = std::getenv("STABLAB_WORKERS"); env && workers == 1)
                workers = std::max(1, std::atoi(env));
            cfg["experiment"] = exp_name;
            const est::RunCtx ctx = make_ctx(cfg, master, workers);
            const est::ExperimentReport rep = dispatch_experiment(exp_name, cfg, ctx);
            write_outputs(rep, cfg, exp_out, exp_format);
            return rep.pass ? 0 : 1;
        }
    } catch (const DegenerateEstimateError& e) {
        std::cerr << "degenerate estimate: " << e.what() << "\n";
        return 4;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const ParamError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
