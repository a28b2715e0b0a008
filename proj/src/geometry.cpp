#include "hpmean/geometry.hpp"

#include <cmath>
#include <string>

#include "hpmean/errors.hpp"
#include "hpmean/random.hpp"

namespace hpmean {

Point group_mul(const Point& a, const Point& b) {
    return {a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3 + 0.5 * (a.x1 * b.x2 - a.x2 * b.x1)};
}

Point group_inv(const Point& a) { return {-a.x1, -a.x2, -a.x3}; }

double gauge(const Point& a, Metric metric) {
    if (metric == Metric::Euclidean3) return std::sqrt(a.x1 * a.x1 + a.x2 * a.x2 + a.x3 * a.x3);
    const double r2 = a.x1 * a.x1 + a.x2 * a.x2;
    return std::sqrt(std::sqrt(r2 * r2 + 16.0 * a.x3 * a.x3));
}

double distance(const Point& a, const Point& b, Metric metric) {
    if (metric == Metric::Euclidean3) return gauge({b.x1 - a.x1, b.x2 - a.x2, b.x3 - a.x3}, metric);
    return gauge(group_mul(group_inv(a), b), metric);
}

Point dilate(double lambda, const Point& a) {
    if (!(lambda > 0.0)) throw InvalidArgument("dilate: lambda must be positive, got " + std::to_string(lambda));
    return {lambda * a.x1, lambda * a.x2, lambda * lambda * a.x3};
}

Point translate(const Point& a, const Point& z, Metric metric) {
    if (metric == Metric::Euclidean3) return {a.x1 + z.x1, a.x2 + z.x2, a.x3 + z.x3};
    return group_mul(a, z);
}

Point scale(double lambda, const Point& z, Metric metric) {
    if (metric == Metric::Euclidean3) {
        require(lambda > 0.0, "scale: lambda must be positive");
        return {lambda * z.x1, lambda * z.x2, lambda * z.x3};
    }
    return dilate(lambda, z);
}

int homogeneous_dimension(Metric metric) { return metric == Metric::Euclidean3 ? 3 : 4; }

Point ball_half_extents(double radius, Metric metric) {
    if (metric == Metric::Euclidean3) return {radius, radius, radius};
    return {radius, radius, 0.25 * radius * radius};
}

namespace {

// Strict membership of a local offset in the ball of radius r, without roots.
bool inside_ball(const Point& z, double r, Metric metric) {
    if (metric == Metric::Euclidean3) return z.x1 * z.x1 + z.x2 * z.x2 + z.x3 * z.x3 < r * r;
    const double r2 = z.x1 * z.x1 + z.x2 * z.x2;
    return r2 * r2 + 16.0 * z.x3 * z.x3 < r * r * r * r;
}

struct LatticeGeometry {
    Point lo;
    Point step;
    double cell_volume;
};

LatticeGeometry lattice_geometry(double radius, Metric metric, std::size_t n) {
    const Point half = ball_half_extents(radius, metric);
    const double dn = static_cast<double>(n);
    LatticeGeometry g;
    g.lo = {-half.x1, -half.x2, -half.x3};
    g.step = {2.0 * half.x1 / dn, 2.0 * half.x2 / dn, 2.0 * half.x3 / dn};
    g.cell_volume = g.step.x1 * g.step.x2 * g.step.x3;
    return g;
}

Point cell_center(const LatticeGeometry& g, std::size_t i, std::size_t j, std::size_t k) {
    return {g.lo.x1 + (static_cast<double>(i) + 0.5) * g.step.x1,
            g.lo.x2 + (static_cast<double>(j) + 0.5) * g.step.x2,
            g.lo.x3 + (static_cast<double>(k) + 0.5) * g.step.x3};
}

void lattice_slab(const LatticeGeometry& g, std::size_t i, std::size_t n, double radius,
                  Metric metric, const Point& center, std::vector<Point>& out) {
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            const Point z = cell_center(g, i, j, k);
            if (inside_ball(z, radius, metric)) out.push_back(translate(center, z, metric));
        }
}


}  // namespace

BallQuadrature ball_quadrature(const Point& center, double radius, Metric metric,
                               const QuadratureOptions& options) {
    require(radius > 0.0 && std::isfinite(radius), "ball_quadrature: radius must be positive");
    BallQuadrature q;
    q.center = center;
    q.radius = radius;
    q.metric = metric;
    q.scheme = options.scheme;
    q.seed = options.seed;

    const Point half = ball_half_extents(radius, metric);
    if (options.scheme == QuadratureScheme::Lattice) {
        const std::size_t n = options.resolution;
        require(n >= 2, "ball_quadrature: lattice resolution must be >= 2");
        const LatticeGeometry g = lattice_geometry(radius, metric, n);
        if (options.execution == Execution::Serial) {
            for (std::size_t i = 0; i < n; ++i) lattice_slab(g, i, n, radius, metric, center, q.nodes);
        } else {
            std::vector<std::vector<Point>> slabs(n);
#pragma omp parallel for schedule(dynamic)
            for (std::size_t i = 0; i < n; ++i) lattice_slab(g, i, n, radius, metric, center, slabs[i]);
            std::size_t total = 0;
            for (const auto& s : slabs) total += s.size();
            q.nodes.reserve(total);
            for (const auto& s : slabs) q.nodes.insert(q.nodes.end(), s.begin(), s.end());
        }
        if (q.nodes.empty())
            throw NumericalError("ball_quadrature: lattice resolution " + std::to_string(n) +
                                 " leaves no cell centre inside the ball");
        q.weights.assign(q.nodes.size(), g.cell_volume);
        return q;
    }

    const std::size_t m = options.resolution;
    require(m >= 1, "ball_quadrature: Monte-Carlo sample count must be >= 1");
    q.nodes.resize(m);
    // Each sample has its own stream; the number of proposals it needed feeds the
    // hit-or-miss volume estimate box_volume * m / proposals.
    auto draw = [&](std::size_t idx, std::size_t& proposals) {
        StreamRng rng(stream_seed(options.seed, idx));
        for (;;) {
            ++proposals;
            const Point z{(2.0 * rng.uniform() - 1.0) * half.x1, (2.0 * rng.uniform() - 1.0) * half.x2,
                          (2.0 * rng.uniform() - 1.0) * half.x3};
            if (inside_ball(z, radius, metric)) return translate(center, z, metric);
        }
    };
    std::size_t proposals = 0;
    if (options.execution == Execution::Serial) {
        for (std::size_t idx = 0; idx < m; ++idx) q.nodes[idx] = draw(idx, proposals);
    } else {
#pragma omp parallel for schedule(static) reduction(+ : proposals)
        for (std::size_t idx = 0; idx < m; ++idx) q.nodes[idx] = draw(idx, proposals);
    }
    const double box = 8.0 * half.x1 * half.x2 * half.x3;
    q.weights.assign(m, box / static_cast<double>(proposals));
    return q;
}

double ball_volume(const BallQuadrature& q) {
    double total = 0.0;
    for (double w : q.weights) total += w;
    return total;
}

BallQuadrature rescale(const BallQuadrature& unit, const Point& center, double radius) {
    require(radius > 0.0, "rescale: radius must be positive");
    BallQuadrature q;
    q.center = center;
    q.radius = unit.radius * radius;
    q.metric = unit.metric;
    q.scheme = unit.scheme;
    q.seed = unit.seed;
    const double factor = std::pow(radius, homogeneous_dimension(unit.metric));
    q.nodes.reserve(unit.size());
    q.weights.reserve(unit.size());
    for (std::size_t i = 0; i < unit.size(); ++i) {
        const Point local = translate(group_inv(unit.center), unit.nodes[i], unit.metric);
        q.nodes.push_back(translate(center, scale(radius, local, unit.metric), unit.metric));
        q.weights.push_back(unit.weights[i] * factor);
    }
    return q;
}

}  // namespace hpmean
