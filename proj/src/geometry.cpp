#include "stablab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace stablab::geom {

namespace {

double graph_slope_factor(const LipschitzGraphDomain& g) {
    return std::sqrt(1.0 + g.lambda0 * g.lambda0);
}

double rho_of(const LipschitzGraphDomain& g, const Vec& x) {
    return x.back() - g.graph(lateral(x));
}

// Two-point Lipschitz check on random pairs; probabilistic validation at
// construction time.
void validate_lipschitz(const LipschitzGraphDomain& g) {
    RngStream rng(0x11d0'57ab, 7);
    const int k = g.d - 1;
    for (int it = 0; it < 256; ++it) {
        Vec a(k), b(k);
        for (int i = 0; i < k; ++i) {
            a[i] = 20.0 * rng.uniform() - 10.0;
            b[i] = 20.0 * rng.uniform() - 10.0;
        }
        const double lhs = std::fabs(g.graph(a) - g.graph(b));
        const double rhs = g.lambda0 * dist(a, b);
        if (lhs > rhs * (1.0 + 1e-9) + 1e-12)
            throw ParamError("lipschitz graph violates declared constant lambda0");
    }
}

DistBracket box_bracket(const BoxDomain& b, const Vec& x) {
    const double sf = graph_slope_factor(*b.base);
    const double r = rho_of(*b.base, x);
    const double t = b.plus ? r : -r;
    const double lat = b.width - dist(lateral(x), lateral(b.anchor));
    const double m = std::min({t, b.height - t, lat});
    return {std::min({t / sf, (b.height - t) / sf, lat}), m};
}

Vec unit_or(const Vec& v, int d) {
    const double n = norm(v);
    if (n == 0.0) {
        Vec e(d, 0.0);
        e[0] = 1.0;
        return e;
    }
    return scaled(v, 1.0 / n);
}

}  // namespace

Domain Domain::ball(Vec center, double radius) {
    if (radius <= 0.0) throw ParamError("ball: radius must be > 0");
    return Domain(BallDomain{std::move(center), radius});
}

Domain Domain::half_space(int d) {
    LipschitzGraphDomain g;
    g.d = d;
    g.graph = [](const Vec&) { return 0.0; };
    g.lambda0 = 0.0;
    g.name = "flat";
    return Domain(std::make_shared<const LipschitzGraphDomain>(std::move(g)));
}

Domain Domain::lipschitz(LipschitzGraphDomain g) {
    if (g.d < 2) throw ParamError("lipschitz: d must be >= 2");
    if (g.lambda0 < 0.0) throw ParamError("lipschitz: lambda0 must be >= 0");
    validate_lipschitz(g);
    return Domain(std::make_shared<const LipschitzGraphDomain>(std::move(g)));
}

Domain Domain::box(BoxDomain b) {
    if (b.height <= 0.0 || b.width <= 0.0)
        throw ParamError("box: height and width must be > 0");
    return Domain(std::move(b));
}

Domain Domain::graph_ball_intersection(LipschitzGraphDomain g, BallDomain b) {
    validate_lipschitz(g);
    GraphBallIntersection gi;
    gi.graph = std::make_shared<const LipschitzGraphDomain>(std::move(g));
    gi.ball = std::move(b);
    return Domain(std::move(gi));
}

Domain Domain::ball_union(std::vector<BallDomain> balls) {
    if (balls.empty()) throw ParamError("ball_union: need at least one ball");
    return Domain(BallUnion{std::move(balls)});
}

int Domain::dim() const {
    if (auto* b = std::get_if<BallDomain>(&v_)) return static_cast<int>(b->center.size());
    if (auto* g = std::get_if<std::shared_ptr<const LipschitzGraphDomain>>(&v_))
        return (*g)->d;
    if (auto* bx = std::get_if<BoxDomain>(&v_)) return bx->base->d;
    if (auto* gi = std::get_if<GraphBallIntersection>(&v_)) return gi->graph->d;
    return static_cast<int>(std::get<BallUnion>(v_).balls.front().center.size());
}

bool Domain::contains(const Vec& x) const {
    if (auto* b = std::get_if<BallDomain>(&v_)) return dist(x, b->center) < b->radius;
    if (auto* g = std::get_if<std::shared_ptr<const LipschitzGraphDomain>>(&v_))
        return rho_of(**g, x) > 0.0;
    if (auto* bx = std::get_if<BoxDomain>(&v_)) {
        const double r = rho_of(*bx->base, x);
        const bool lat = dist(lateral(x), lateral(bx->anchor)) < bx->width;
        if (bx->plus) return r > 0.0 && r < bx->height && lat;
        return r > -bx->height && r <= 0.0 && lat;
    }
    if (auto* gi = std::get_if<GraphBallIntersection>(&v_))
        return rho_of(*gi->graph, x) > 0.0 &&
               dist(x, gi->ball.center) < gi->ball.radius;
    for (const auto& b : std::get<BallUnion>(v_).balls)
        if (dist(x, b.center) < b.radius) return true;
    return false;
}

DistBracket Domain::dist_to_boundary(const Vec& x) const {
    if (!contains(x)) throw DomainError("dist_to_boundary: point outside domain");
    if (auto* b = std::get_if<BallDomain>(&v_)) {
        const double d0 = b->radius - dist(x, b->center);
        return {d0, d0};
    }
    if (auto* g = std::get_if<std::shared_ptr<const LipschitzGraphDomain>>(&v_)) {
        const double r = rho_of(**g, x);
        return {r / graph_slope_factor(**g), r};
    }
    if (auto* bx = std::get_if<BoxDomain>(&v_)) return box_bracket(*bx, x);
    if (auto* gi = std::get_if<GraphBallIntersection>(&v_)) {
        const double r = rho_of(*gi->graph, x);
        const double db = gi->ball.radius - dist(x, gi->ball.center);
        return {std::min(r / graph_slope_factor(*gi->graph), db), std::min(r, db)};
    }
    const auto& balls = std::get<BallUnion>(v_).balls;
    double lower = 0.0;
    for (const auto& b : balls)
        lower = std::max(lower, b.radius - dist(x, b.center));
    // upper bound: nearest sphere point that is not swallowed by another ball
    double upper = 1e300;
    for (const auto& b : balls) {
        const Vec u = unit_or(sub(x, b.center), dim());
        const Vec p = add(b.center, scaled(u, b.radius));
        bool interior = false;
        for (const auto& o : balls)
            if (dist(p, o.center) < o.radius * (1.0 - 1e-12)) interior = true;
        if (!interior) upper = std::min(upper, dist(x, p));
    }
    for (const auto& b : balls)
        upper = std::min(upper, dist(x, b.center) + b.radius);
    return {lower, upper};
}

double Domain::rho(const Vec& x) const {
    if (const auto* g = graph()) return rho_of(*g, x);
    throw DomainError("rho: domain has no graph structure");
}

double Domain::quasi_distance(const Vec& x, const Vec& y) const {
    return dist_to_boundary(x).upper + dist_to_boundary(y).upper + dist(x, y);
}

bool Domain::is_graph_like() const { return graph() != nullptr; }

const LipschitzGraphDomain* Domain::graph() const {
    if (auto* g = std::get_if<std::shared_ptr<const LipschitzGraphDomain>>(&v_))
        return g->get();
    if (auto* bx = std::get_if<BoxDomain>(&v_)) return bx->base.get();
    if (auto* gi = std::get_if<GraphBallIntersection>(&v_)) return gi->graph.get();
    return nullptr;
}

const BoxDomain* Domain::as_box() const { return std::get_if<BoxDomain>(&v_); }
const BallDomain* Domain::as_ball() const { return std::get_if<BallDomain>(&v_); }

bool Domain::on_boundary(const Vec& z, double tol) const {
    if (auto* b = std::get_if<BallDomain>(&v_))
        return std::fabs(dist(z, b->center) - b->radius) <= tol * std::max(1.0, b->radius);
    if (const auto* g = graph()) return std::fabs(rho_of(*g, z)) <= tol;
    throw NotImplementedError("on_boundary: unsupported domain variant");
}

CorkscrewResult kappa_fat_probe(const Domain& domain, const Vec& z, double r,
                                int verify_samples) {
    if (!(r > 0.0 && r <= 1.0)) throw ParamError("kappa_fat_probe: r must be in (0,1]");
    if (!domain.on_boundary(z))
        throw DomainError("kappa_fat_probe: anchor is not a boundary point");

    const int d = domain.dim();
    Vec inward(d, 0.0);
    if (const auto* b = domain.as_ball()) {
        inward = unit_or(sub(b->center, z), d);
    } else {
        inward[d - 1] = 1.0;  // graph domains: straight up
    }

    CorkscrewResult best{z, 0.0};
    for (double frac : {0.5, 0.25, 0.125, 0.0625}) {
        const Vec a = add(z, scaled(inward, frac * r));
        if (!domain.contains(a)) continue;
        const double depth = domain.dist_to_boundary(a).lower;
        const double kappa = std::min(depth, r - dist(a, z)) / r;
        if (kappa > best.kappa) best = {a, kappa};
    }
    if (best.kappa < 1e-3)
        throw FatnessError("kappa_fat_probe: no corkscrew above kappa_min");

    // rejection check: samples from B(A, kappa r) stay inside D cap B(z,r)
    RngStream rng(0xfa7'5e7, 0);
    const double rad = best.kappa * r * (1.0 - 1e-12);
    for (int it = 0; it < verify_samples; ++it) {
        Vec dir(d);
        for (auto& c : dir) c = rng.normal();
        dir = unit_or(dir, d);
        const double s = rad * std::pow(rng.uniform(), 1.0 / d);
        const Vec p = add(best.point, scaled(dir, s));
        if (!domain.contains(p) || dist(p, z) >= r)
            throw FatnessError("kappa_fat_probe: verification sample escaped");
    }
    return best;
}

LipschitzGraphDomain make_graph(int d, const std::string& name,
                                const std::vector<double>& args) {
    LipschitzGraphDomain g;
    g.d = d;
    g.name = name;
    if (name == "flat") {
        g.graph = [](const Vec&) { return 0.0; };
        g.lambda0 = 0.0;
    } else if (name == "abs-cone") {
        if (args.size() != 1) throw ParamError("abs-cone needs a slope argument");
        const double slope = args[0];
        g.graph = [slope](const Vec& t) { return slope * norm(t); };
        g.lambda0 = slope;
    } else if (name == "sine") {
        if (args.size() != 2) throw ParamError("sine needs amplitude and period");
        const double amp = args[0], period = args[1];
        const double w = 2.0 * 3.14159265358979323846 / period;
        g.graph = [amp, w](const Vec& t) { return amp * std::sin(w * t[0]); };
        g.lambda0 = amp * w;
    } else {
        throw ParamError("unknown graph function: " + name);
    }
    return g;
}

Domain parse_domain(const std::string& text, int default_dim) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    std::string head = text.substr(0, open == std::string::npos ? text.size() : open);
    std::vector<std::string> args;
    if (open != std::string::npos) {
        if (close == std::string::npos || close < open)
            throw ParamError("domain grammar: unbalanced parentheses in " + text);
        std::stringstream ss(text.substr(open + 1, close - open - 1));
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) args.push_back(tok);
    }
    if (head == "ball") {
        if (args.size() < 3)
            throw ParamError("ball(c1,...,cd,r) needs at least 3 numbers");
        Vec c;
        for (std::size_t i = 0; i + 1 < args.size(); ++i)
            c.push_back(std::stod(args[i]));
        return Domain::ball(c, std::stod(args.back()));
    }
    if (head == "halfspace") {
        const int d = args.empty() ? default_dim : std::stoi(args[0]);
        return Domain::half_space(d);
    }
    if (head == "lipschitz") {
        if (args.empty()) throw ParamError("lipschitz(name, args...)");
        std::vector<double> nums;
        for (std::size_t i = 1; i < args.size(); ++i)
            nums.push_back(std::stod(args[i]));
        return Domain::lipschitz(make_graph(default_dim, args[0], nums));
    }
    throw ParamError("unknown domain spec: " + text);
}

}  // namespace stablab::geom
