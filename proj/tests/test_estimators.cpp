#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stablab/estimators.hpp"

using namespace stablab;

namespace {

est::RunCtx ctx_with(std::uint64_t seed, int workers = 2) {
    est::RunCtx ctx;
    ctx.master_seed = seed;
    ctx.workers = workers;
    return ctx;
}

const est::BoundaryData kOne =
    est::BoundaryData::custom("one", [](const Vec&) { return 1.0; }, 1.0);

}  // namespace

TEST_CASE("harmonic_eval: constant data is exact") {
    const auto ball = geom::Domain::ball({0.0, 0.0}, 1.0);
    const auto e = est::harmonic_eval(ball, 1.0, kOne, {0.1, 0.2}, 5000, ctx_with(5));
    CHECK(e.mean == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e.stderror == doctest::Approx(0.0));
    CHECK(e.n == 5000);
}

TEST_CASE("mean value of the singular harmonic function w on an inner ball") {
    // w(x) = (x_d^+)^{1/2} is alpha-harmonic in the upper half-plane, so the
    // exit of any ball inside it preserves its mean
    const auto ball = geom::Domain::ball({0.0, 1.0}, 0.9);
    const auto w = est::BoundaryData::w_halfspace(1.0);
    const auto e = est::harmonic_eval(ball, 1.0, w, {0.0, 1.0}, 40000, ctx_with(9));
    CHECK(std::fabs(e.mean - 1.0) < 3.0 * e.stderror);
    CHECK(e.stderror < 0.05);

    const auto hs = geom::Domain::half_space(2);
    const auto b = est::ball_mean_eval(hs, 1.0, w, {0.0, 1.0}, 0.9, 40000, ctx_with(9));
    CHECK(std::fabs(b.mean - 1.0) < 3.0 * b.stderror);
}

TEST_CASE("harmonic_eval: worker count does not change the result") {
    const auto ball = geom::Domain::ball({0.0, 0.0}, 1.0);
    const auto f = est::BoundaryData::custom(
        "right", [](const Vec& z) { return z[0] > 1.0 ? 1.0 : 0.0; }, 1.0);
    const auto e1 = est::harmonic_eval(ball, 1.0, f, {0.3, 0.0}, 20000, ctx_with(3, 1));
    const auto e4 = est::harmonic_eval(ball, 1.0, f, {0.3, 0.0}, 20000, ctx_with(3, 4));
    CHECK(e1.mean == e4.mean);
    CHECK(e1.stderror == e4.stderror);
}

TEST_CASE("harmonic_eval: exact homogeneity in the data") {
    const auto ball = geom::Domain::ball({0.0, 0.0}, 1.0);
    const auto f = est::BoundaryData::custom(
        "band", [](const Vec& z) { return std::fabs(z[1]) < 0.5 ? 1.0 : 0.0; }, 1.0);
    const auto f3 = est::BoundaryData::custom(
        "band3", [](const Vec& z) { return std::fabs(z[1]) < 0.5 ? 3.0 : 0.0; }, 3.0);
    const auto a = est::harmonic_eval(ball, 1.0, f, {0.0, 0.0}, 10000, ctx_with(4));
    const auto b = est::harmonic_eval(ball, 1.0, f3, {0.0, 0.0}, 10000, ctx_with(4));
    CHECK(b.mean == doctest::Approx(3.0 * a.mean).epsilon(1e-13));
}

TEST_CASE("harmonic_eval: additivity under common random numbers") {
    const auto ball = geom::Domain::ball({0.0, 0.0}, 1.0);
    const auto f1 = est::BoundaryData::custom(
        "up", [](const Vec& z) { return z[1] > 0.0 ? 1.0 : 0.0; }, 1.0);
    const auto f2 = est::BoundaryData::custom(
        "right", [](const Vec& z) { return z[0] > 0.0 ? 1.0 : 0.0; }, 1.0);
    const auto f12 = est::BoundaryData::custom(
        "sum", [](const Vec& z) { return (z[1] > 0.0) + (z[0] > 0.0) * 1.0; }, 2.0);
    const Vec x{0.2, -0.1};
    const auto a = est::harmonic_eval(ball, 1.0, f1, x, 8000, ctx_with(21));
    const auto b = est::harmonic_eval(ball, 1.0, f2, x, 8000, ctx_with(21));
    const auto c = est::harmonic_eval(ball, 1.0, f12, x, 8000, ctx_with(21));
    CHECK(c.mean == doctest::Approx(a.mean + b.mean).epsilon(1e-13));
}

TEST_CASE("gradient score: constant data gives zero") {
    const auto ball = geom::Domain::ball({0.0, 0.0}, 1.0);
    const auto g =
        est::gradient_score_estimate(ball, 1.0, kOne, {0.0, 0.0}, 0.4, 20000, ctx_with(2));
    for (const auto& c : g) CHECK(std::fabs(c.mean) < 3.0 * c.stderror + 1e-12);
}

TEST_CASE("gradient score: half-space analytic derivative") {
    const auto hs = geom::Domain::half_space(2);
    const auto w = est::BoundaryData::w_halfspace(1.0);
    const Vec x{0.0, 1.0};
    const auto g = est::gradient_score_estimate(hs, 1.0, w, x, 0.5, 200000, ctx_with(8));
    // d/dx_d (x_d)^{1/2} at x_d = 1 is 1/2
    CHECK(std::fabs(g[1].mean - 0.5) < 3.0 * g[1].stderror);
    CHECK(std::fabs(g[0].mean) < 3.0 * g[0].stderror);
    CHECK_THROWS_AS(
        est::gradient_score_estimate(hs, 1.0, w, x, 1.5, 100, ctx_with(8)),
        DomainError);
}

TEST_CASE("gradient score agrees with CRN finite differences") {
    const auto hs = geom::Domain::half_space(2);
    const auto w = est::BoundaryData::w_halfspace(1.0);
    const Vec x{0.0, 1.0};
    const auto gs = est::gradient_score_estimate(hs, 1.0, w, x, 0.5, 100000, ctx_with(31));
    const auto gf =
        est::fd_gradient_estimate(hs, 1.0, w, x, 0.5, 0.01, 100000, ctx_with(32));
    for (int c = 0; c < 2; ++c) {
        const double sig = std::sqrt(gs[c].stderror * gs[c].stderror +
                                     gf[c].stderror * gf[c].stderror);
        CHECK(std::fabs(gs[c].mean - gf[c].mean) < 3.0 * sig + 0.01);
    }
}

TEST_CASE("harnack experiment: small run passes") {
    est::HarnackOptions opt;
    opt.x0 = {0.0, 0.0};
    opt.r = 1.0;
    opt.alpha = 1.0;
    opt.grid_size = 3;
    opt.n = 20000;
    const auto rep = est::harnack_experiment(opt, ctx_with(12));
    CHECK(rep.pass);
    CHECK(rep.statistic >= 1.0);
    CHECK(rep.statistic < 50.0);
}

TEST_CASE("chained harnack experiment") {
    est::ChainedHarnackOptions opt;
    opt.x2 = {0.0, 0.0};
    opt.r = 0.5;
    opt.alpha = 1.0;
    opt.k_max = 3;
    opt.n = 20000;
    const auto rep = est::chained_harnack_experiment(opt, ctx_with(14));
    CHECK(rep.pass);
}

TEST_CASE("decay experiment: half-space slope near -alpha") {
    const auto g = geom::make_graph(2, "flat", {});
    const auto dom = geom::Domain::lipschitz(g);
    est::DecayOptions opt;
    opt.r = 1.0;
    opt.alpha = 1.0;
    opt.levels = 4;
    opt.n = 30000;
    opt.slope_tol = 0.25;  // loose tolerance at the reduced unit-test budget
    const auto rep = est::decay_experiment(dom, {0.0, 0.0}, opt, ctx_with(18));
    CHECK(rep.pass);
    CHECK(rep.statistic < 0.0);
}

TEST_CASE("bhp experiment: identical data gives ratio 1") {
    const auto g = geom::make_graph(2, "flat", {});
    const auto dom = geom::Domain::lipschitz(g);
    const auto f = est::BoundaryData::custom(
        "shell",
        [](const Vec& z) { return norm(z) > 2.0 && norm(z) < 6.0 ? 1.0 : 0.0; }, 1.0);
    est::BhpOptions opt;
    opt.r = 1.0;
    opt.alpha = 1.0;
    opt.grid_size = 3;
    opt.n = 10000;
    const auto rep = est::bhp_experiment(dom, {0.0, 0.0}, opt, f, f, ctx_with(19));
    CHECK(rep.pass);
    CHECK(rep.statistic == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("boundary decay fit: half-space exponent alpha/2") {
    const auto g = geom::make_graph(2, "flat", {});
    const auto dom = geom::Domain::lipschitz(g);
    const auto f = est::BoundaryData::custom(
        "away",
        [](const Vec& z) { return z[1] > 0.0 && norm(z) > 1.5 ? 1.0 : 0.0; }, 1.0);
    est::BoundaryDecayOptions opt;
    opt.r = 1.0;
    opt.alpha = 1.0;
    opt.levels = 5;
    opt.n = 40000;
    opt.expect_halfspace_exponent = true;
    opt.halfspace_tol = 0.15;  // loose tolerance at the reduced unit-test budget
    const auto rep = est::boundary_decay_fit(dom, {0.0, 0.0}, opt, f, ctx_with(23));
    CHECK(rep.pass);
    CHECK(rep.statistic > 0.0);
    CHECK(rep.statistic < 1.0);
}

TEST_CASE("barrier experiment: monotone in height") {
    const auto g = geom::make_graph(2, "flat", {});
    const auto dom = geom::Domain::lipschitz(g);
    est::BarrierOptions opt;
    opt.r = 0.25;
    opt.alpha = 1.0;
    opt.heights = 6;
    opt.n = 20000;
    const auto rep = est::barrier_experiment(dom, {0.0, 0.0}, opt, ctx_with(27));
    CHECK(rep.pass);
    // the top height estimate should be close to 1
    CHECK(rep.points.back().est.mean > 0.5);
}
