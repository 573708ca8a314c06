#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "stablab/common.hpp"
#include "stablab/rng.hpp"

namespace stablab::geom {

struct DistBracket {
    double lower;
    double upper;
};

struct BallDomain {
    Vec center;
    double radius;
};

// Region above the graph of a globally Lipschitz function Gamma: R^{d-1} -> R.
// The flat case Gamma = 0 is the half-space.
struct LipschitzGraphDomain {
    int d;
    std::function<double(const Vec&)> graph;
    double lambda0;
    std::string name;
};

// The "box" D^+(anchor, h, r) = {0 < rho(y) < h, |y~ - anchor~| < r}
// over a graph domain, and its inverted counterpart with -h < rho <= 0.
struct BoxDomain {
    std::shared_ptr<const LipschitzGraphDomain> base;
    Vec anchor;
    double height;
    double width;
    bool plus;
};

class Domain {
public:
    struct GraphBallIntersection {
        std::shared_ptr<const LipschitzGraphDomain> graph;
        BallDomain ball;
    };
    struct BallUnion {
        std::vector<BallDomain> balls;
    };

    static Domain ball(Vec center, double radius);
    static Domain half_space(int d);
    static Domain lipschitz(LipschitzGraphDomain g);
    static Domain box(BoxDomain b);
    static Domain graph_ball_intersection(LipschitzGraphDomain g, BallDomain b);
    static Domain ball_union(std::vector<BallDomain> balls);

    int dim() const;
    bool contains(const Vec& x) const;

    // Bracket [lower, upper] containing delta_D(x); exact for balls and
    // half-spaces, [rho/sqrt(1+lambda0^2), rho] for graph domains.
    // Throws DomainError when x is outside D.
    DistBracket dist_to_boundary(const Vec& x) const;

    // Vertical distance x_d - Gamma(x~); defined for every x, sign marks the
    // side.  Only graph-backed variants provide it.
    double rho(const Vec& x) const;

    // r_D(x,y) = delta(x) + delta(y) + |x-y| using upper bracket ends.
    double quasi_distance(const Vec& x, const Vec& y) const;

    bool is_graph_like() const;
    const LipschitzGraphDomain* graph() const;
    const BoxDomain* as_box() const;
    const BallDomain* as_ball() const;

    // Checks that z lies on the boundary (tolerance 1e-9 for balls and
    // half-spaces, the rho bracket for graph domains).
    bool on_boundary(const Vec& z, double tol = 1e-9) const;

    using Variant = std::variant<BallDomain, std::shared_ptr<const LipschitzGraphDomain>,
                                 BoxDomain, GraphBallIntersection, BallUnion>;
    const Variant& raw() const { return v_; }

private:
    explicit Domain(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

struct CorkscrewResult {
    Vec point;
    double kappa;
};

// Corkscrew point A_r(z) for boundary point z at scale r: a point with
// B(A, kappa r) inside D cap B(z, r), verified by rejection sampling.
CorkscrewResult kappa_fat_probe(const Domain& domain, const Vec& z, double r,
                                int verify_samples = 10000);

// Named graph functions for the config grammar:
//   flat | abs-cone(slope) | sine(amplitude, period)
LipschitzGraphDomain make_graph(int d, const std::string& name,
                                const std::vector<double>& args);

// Domain grammar: ball(c1,...,cd,r) | halfspace(d) | lipschitz(name,lambda-args...)
Domain parse_domain(const std::string& text, int default_dim);

}  // namespace stablab::geom
