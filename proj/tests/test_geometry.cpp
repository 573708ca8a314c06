#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stablab/geometry.hpp"

using namespace stablab;

TEST_CASE("ball domain: membership and exact distance") {
    const auto b = geom::Domain::ball({1.0, 2.0}, 3.0);
    CHECK(b.dim() == 2);
    CHECK(b.contains({1.0, 2.0}));
    CHECK(b.contains({3.5, 2.0}));
    CHECK_FALSE(b.contains({4.5, 2.0}));
    const auto br = b.dist_to_boundary({2.0, 2.0});
    CHECK(br.lower == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(br.upper == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(b.dist_to_boundary({10.0, 0.0}), DomainError);
    CHECK(b.on_boundary({4.0, 2.0}));
}

TEST_CASE("half space: rho equals distance") {
    const auto h = geom::Domain::half_space(3);
    CHECK(h.contains({5.0, -2.0, 0.1}));
    CHECK_FALSE(h.contains({0.0, 0.0, -0.1}));
    const auto br = h.dist_to_boundary({0.0, 0.0, 0.7});
    CHECK(br.lower == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(br.upper == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(h.rho({1.0, 1.0, -0.3}) == doctest::Approx(-0.3).epsilon(1e-14));
}

TEST_CASE("lipschitz cone: distance bracket") {
    const auto g = geom::make_graph(2, "abs-cone", {0.5});
    CHECK(g.lambda0 == doctest::Approx(0.5).epsilon(1e-14));
    const auto d = geom::Domain::lipschitz(g);
    const Vec x{0.0, 1.0};
    CHECK(d.contains(x));
    const auto br = d.dist_to_boundary(x);
    CHECK(br.upper == doctest::Approx(1.0).epsilon(1e-14));  // rho
    CHECK(br.lower == doctest::Approx(1.0 / std::sqrt(1.25)).epsilon(1e-12));
    // true distance from (0,1) to the graph y=|x|/2 lies inside the bracket
    const double true_dist = 1.0 / std::sqrt(1.25);  // apex cone distance
    CHECK(br.lower <= true_dist + 1e-12);
    CHECK(br.upper >= true_dist - 1e-12);
}

TEST_CASE("sine graph: lambda0 and membership") {
    const auto g = geom::make_graph(2, "sine", {0.3, 4.0});
    CHECK(g.lambda0 ==
          doctest::Approx(2.0 * 3.14159265358979323846 * 0.3 / 4.0).epsilon(1e-12));
    const auto d = geom::Domain::lipschitz(g);
    CHECK(d.contains({1.0, 0.3 * std::sin(2.0 * 3.14159265358979323846 / 4.0) + 0.1}));
    CHECK_FALSE(d.contains({1.0, -1.0}));
}

TEST_CASE("graph-ball intersection") {
    const auto g = geom::make_graph(2, "flat", {});
    const auto d =
        geom::Domain::graph_ball_intersection(g, geom::BallDomain{{0.0, 0.0}, 1.0});
    CHECK(d.contains({0.0, 0.5}));
    CHECK_FALSE(d.contains({0.0, -0.5}));
    CHECK_FALSE(d.contains({0.0, 1.5}));
    const auto br = d.dist_to_boundary({0.0, 0.5});
    CHECK(br.lower == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("ball union distances") {
    const auto d = geom::Domain::ball_union(
        {geom::BallDomain{{0.0, 0.0}, 1.0}, geom::BallDomain{{1.5, 0.0}, 1.0}});
    CHECK(d.contains({0.75, 0.0}));
    CHECK_FALSE(d.contains({0.0, 1.5}));
    const auto br = d.dist_to_boundary({0.75, 0.0});
    // lower bracket is at least the best single-ball clearance
    CHECK(br.lower >= 0.25 - 1e-12);
    CHECK(br.upper >= br.lower);
    // the union reaches from -1 to 2.5 on the axis
    CHECK(d.contains({2.4, 0.0}));
    CHECK(d.contains({-0.9, 0.0}));
}

TEST_CASE("box domain over a graph") {
    const auto g = geom::make_graph(2, "flat", {});
    geom::BoxDomain box;
    box.base = std::make_shared<const geom::LipschitzGraphDomain>(g);
    box.anchor = {0.0, 0.0};
    box.height = 1.0;
    box.width = 0.5;
    box.plus = true;
    const auto d = geom::Domain::box(box);
    CHECK(d.contains({0.0, 0.5}));
    CHECK_FALSE(d.contains({0.0, 1.5}));
    CHECK_FALSE(d.contains({0.6, 0.5}));
    CHECK_FALSE(d.contains({0.0, -0.1}));
}

TEST_CASE("corkscrew probe") {
    const auto g = geom::make_graph(2, "abs-cone", {1.0});
    const auto d = geom::Domain::lipschitz(g);
    const Vec z0{0.0, 0.0};
    const auto cs = geom::kappa_fat_probe(d, z0, 0.5);
    CHECK(cs.kappa > 1e-3);
    CHECK(d.contains(cs.point));
    CHECK(dist(cs.point, z0) < 0.5);
    CHECK(d.dist_to_boundary(cs.point).lower >= 0.5 * cs.kappa * 0.5);
}

TEST_CASE("domain grammar") {
    const auto b = geom::parse_domain("ball(0,0,2)", 2);
    CHECK(b.as_ball() != nullptr);
    CHECK(b.as_ball()->radius == doctest::Approx(2.0));
    const auto h = geom::parse_domain("halfspace(3)", 2);
    CHECK(h.dim() == 3);
    const auto l = geom::parse_domain("lipschitz(abs-cone,0.25)", 2);
    CHECK(l.graph() != nullptr);
    CHECK(l.graph()->lambda0 == doctest::Approx(0.25));
    CHECK_THROWS_AS(geom::parse_domain("pyramid(1)", 2), ParamError);
}

TEST_CASE("quasi distance uses upper ends") {
    const auto b = geom::Domain::ball({0.0, 0.0}, 1.0);
    const Vec x{0.5, 0.0}, y{-0.5, 0.0};
    CHECK(b.quasi_distance(x, y) == doctest::Approx(0.5 + 0.5 + 1.0).epsilon(1e-12));
}
