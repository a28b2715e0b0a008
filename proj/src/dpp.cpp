#include "hpmean/dpp.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hpmean/errors.hpp"

namespace hpmean {

// DomainSpec -----------------------------------------------------------------

DomainSpec DomainSpec::koranyi_ball(const Point& c, double R) {
    return {ShapeKind::KoranyiBall, c, 0.0, R, 0.0};
}
DomainSpec DomainSpec::koranyi_annulus(const Point& c, double r, double R) {
    return {ShapeKind::KoranyiAnnulus, c, r, R, 0.0};
}
DomainSpec DomainSpec::euclidean_ball(const Point& c, double R) {
    return {ShapeKind::EuclideanBall, c, 0.0, R, 0.0};
}
DomainSpec DomainSpec::euclidean_annulus(const Point& c, double r, double R) {
    return {ShapeKind::EuclideanAnnulus, c, r, R, 0.0};
}
DomainSpec DomainSpec::axis_excluded_annulus(const Point& c, double r, double R, double clearance) {
    return {ShapeKind::AxisExcludedAnnulus, c, r, R, clearance};
}

Metric DomainSpec::metric() const {
    return (kind == ShapeKind::EuclideanBall || kind == ShapeKind::EuclideanAnnulus) ? Metric::Euclidean3
                                                                                   : Metric::HeisenbergKoranyi;
}

void DomainSpec::validate() const {
    require(std::isfinite(outer_radius) && outer_radius > 0.0, "domain: outer radius must be positive");
    switch (kind) {
        case ShapeKind::KoranyiBall:
        case ShapeKind::EuclideanBall: break;
        case ShapeKind::AxisExcludedAnnulus:
            require(axis_clearance > 0.0, "domain: axis clearance must be positive");
            [[fallthrough]];
        case ShapeKind::KoranyiAnnulus:
        case ShapeKind::EuclideanAnnulus:
            require(inner_radius > 0.0 && inner_radius < outer_radius,
                    "domain: annulus radii must satisfy 0 < r < R");
            break;
    }
}

bool DomainSpec::contains(const Point& x) const {
    const Metric m = metric();
    const Point z = translate(group_inv(center), x, m);
    const double g = gauge(z, m);
    switch (kind) {
        case ShapeKind::KoranyiBall:
        case ShapeKind::EuclideanBall: return g < outer_radius;
        case ShapeKind::KoranyiAnnulus:
        case ShapeKind::EuclideanAnnulus: return g > inner_radius && g < outer_radius;
        case ShapeKind::AxisExcludedAnnulus:
            return g > inner_radius && g < outer_radius && std::hypot(z.x1, z.x2) > axis_clearance;
    }
    return false;
}

std::string to_string(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::KoranyiBall: return "koranyi_ball";
        case ShapeKind::KoranyiAnnulus: return "koranyi_annulus";
        case ShapeKind::EuclideanBall: return "euclidean_ball";
        case ShapeKind::EuclideanAnnulus: return "euclidean_annulus";
        case ShapeKind::AxisExcludedAnnulus: return "axis_excluded_annulus";
    }
    return "unknown";
}

ShapeKind shape_kind_from_string(const std::string& name) {
    for (ShapeKind k : {ShapeKind::KoranyiBall, ShapeKind::KoranyiAnnulus, ShapeKind::EuclideanBall,
                        ShapeKind::EuclideanAnnulus, ShapeKind::AxisExcludedAnnulus})
        if (to_string(k) == name) return k;
    throw InvalidArgument("unknown domain shape '" + name + "'");
}

std::uint64_t DiscreteDomain::fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](double v) {
        std::uint64_t bits = 0;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(v));
        h = (h ^ bits) * 1099511628211ULL;
    };
    mix(static_cast<double>(spec.kind));
    mix(spec.center.x1);
    mix(spec.center.x2);
    mix(spec.center.x3);
    mix(spec.inner_radius);
    mix(spec.outer_radius);
    mix(spec.axis_clearance);
    mix(static_cast<double>(lattice));
    mix(epsilon);
    mix(spacing);
    mix(vertical_spacing);
    mix(static_cast<double>(nodes.size()));
    mix(static_cast<double>(interior_count));
    return h;
}

// Discretisation ---------------------------------------------------------------

namespace {

constexpr std::uint32_t kUnused = std::numeric_limits<std::uint32_t>::max();

struct GridShape {
    long ni = 0, nj = 0, nk = 0;
    long i0 = 0, j0 = 0, k0 = 0;  // index offsets: lattice coordinate = index - offset

    std::size_t size() const { return static_cast<std::size_t>(ni * nj * nk); }
    bool in_range(long i, long j, long k) const {
        return i >= 0 && i < ni && j >= 0 && j < nj && k >= 0 && k < nk;
    }
    std::size_t linear(long i, long j, long k) const { return static_cast<std::size_t>((i * nj + j) * nk + k); }
};

// Assigns node ids (interior first, then referenced non-interior grid points in
// grid order) and rewrites stencil indices from grid-linear to node ids.
void finalize_nodes(DiscreteDomain& dom, const std::vector<std::size_t>& interior_grid,
                    const std::function<Point(std::size_t)>& grid_point, std::size_t grid_size,
                    std::vector<std::vector<std::pair<std::size_t, double>>>& stencils) {
    std::vector<std::uint32_t> id(grid_size, kUnused);
    dom.nodes.clear();
    for (std::size_t g : interior_grid) {
        id[g] = static_cast<std::uint32_t>(dom.nodes.size());
        dom.nodes.push_back(grid_point(g));
    }
    dom.interior_count = dom.nodes.size();
    std::vector<char> referenced(grid_size, 0);
    for (const auto& st : stencils)
        for (const auto& [g, w] : st) referenced[g] = 1;
    for (std::size_t g = 0; g < grid_size; ++g)
        if (referenced[g] && id[g] == kUnused) {
            id[g] = static_cast<std::uint32_t>(dom.nodes.size());
            dom.nodes.push_back(grid_point(g));
        }
    dom.offsets.assign(1, 0);
    std::size_t total = 0;
    for (const auto& st : stencils) total += st.size();
    dom.indices.reserve(total);
    dom.weights.reserve(total);
    for (auto& st : stencils) {
        for (const auto& [g, w] : st) {
            dom.indices.push_back(id[g]);
            dom.weights.push_back(w);
        }
        dom.offsets.push_back(dom.indices.size());
        std::vector<std::pair<std::size_t, double>>().swap(st);
    }
}

template <class Fn>
void for_each_index(std::size_t n, Execution execution, Fn&& fn) {
    if (execution == Execution::Serial) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
    } else {
#pragma omp parallel for schedule(dynamic, 16)
        for (std::size_t i = 0; i < n; ++i) fn(i);
    }
}

DiscreteDomain discretize_full(const DomainSpec& spec, double eps, double h, const DiscretizationOptions& opt) {
    DiscreteDomain dom;
    dom.spec = spec;
    dom.metric = spec.metric();
    dom.lattice = LatticeKind::Full3D;
    dom.epsilon = eps;
    dom.spacing = h;
    dom.vertical_spacing = opt.vertical_spacing > 0.0 ? opt.vertical_spacing : h;
    const double hv = dom.vertical_spacing;
    const Metric m = dom.metric;
    const Point c = spec.center;

    // Omega and its strip lie in the ball of radius R + eps about the centre.
    const double reach = spec.outer_radius + eps;
    const Point half = ball_half_extents(reach, m);
    double ext3 = half.x3;
    if (m == Metric::HeisenbergKoranyi) ext3 += 0.5 * (std::fabs(c.x1) + std::fabs(c.x2)) * reach;

    GridShape grid;
    grid.i0 = grid.j0 = static_cast<long>(std::ceil(reach / h)) + 1;
    grid.k0 = static_cast<long>(std::ceil(ext3 / hv)) + 1;
    grid.ni = grid.nj = 2 * grid.i0 + 1;
    grid.nk = 2 * grid.k0 + 1;

    auto grid_point = [&](std::size_t g) {
        const long k = static_cast<long>(g % grid.nk);
        const long j = static_cast<long>((g / grid.nk) % grid.nj);
        const long i = static_cast<long>(g / (grid.nk * grid.nj));
        return Point{c.x1 + static_cast<double>(i - grid.i0) * h, c.x2 + static_cast<double>(j - grid.j0) * h,
                     c.x3 + static_cast<double>(k - grid.k0) * hv};
    };

    std::vector<std::size_t> interior;
    for (std::size_t g = 0; g < grid.size(); ++g)
        if (spec.contains(grid_point(g))) interior.push_back(g);
    if (interior.empty()) throw NumericalError("discretize: no lattice node falls inside the domain");

    const long amax = static_cast<long>(std::ceil(eps / h));
    const double eps2 = eps * eps;
    const double eps4 = eps2 * eps2;
    const double cell = h * h * hv;
    std::vector<std::vector<std::pair<std::size_t, double>>> stencils(interior.size());
    bool escaped = false;

    for_each_index(interior.size(), opt.execution, [&](std::size_t n) {
        const std::size_t g = interior[n];
        const long kx = static_cast<long>(g % grid.nk);
        const long jx = static_cast<long>((g / grid.nk) % grid.nj);
        const long ix = static_cast<long>(g / (grid.nk * grid.nj));
        const Point x = grid_point(g);
        auto& st = stencils[n];
        for (long a = -amax; a <= amax; ++a)
            for (long b = -amax; b <= amax; ++b) {
                const double d1 = static_cast<double>(a) * h;
                const double d2 = static_cast<double>(b) * h;
                const double r2 = d1 * d1 + d2 * d2;
                if (r2 >= eps2) continue;
                double centre3 = 0.0;
                double halfwidth = 0.0;
                if (m == Metric::HeisenbergKoranyi) {
                    // z = x^-1 * y has z3 = dy3 - (x1 d2 - x2 d1)/2 and needs 16 z3^2 < eps^4 - r2^2.
                    centre3 = 0.5 * (x.x1 * d2 - x.x2 * d1);
                    halfwidth = 0.25 * std::sqrt(eps4 - r2 * r2);
                } else {
                    halfwidth = std::sqrt(eps2 - r2);
                }
                const long clo = static_cast<long>(std::ceil((centre3 - halfwidth) / hv)) - 1;
                const long chi = static_cast<long>(std::floor((centre3 + halfwidth) / hv)) + 1;
                for (long cc = clo; cc <= chi; ++cc) {
                    const Point z{d1, d2, static_cast<double>(cc) * hv - centre3};
                    const bool inside = m == Metric::HeisenbergKoranyi ? r2 * r2 + 16.0 * z.x3 * z.x3 < eps4
                                                                      : r2 + z.x3 * z.x3 < eps2;
                    if (!inside) continue;
                    const long i = ix + a, j = jx + b, k = kx + cc;
                    if (!grid.in_range(i, j, k)) {
#pragma omp atomic write
                        escaped = true;
                        continue;
                    }
                    st.emplace_back(grid.linear(i, j, k), cell);
                }
            }
    });
    if (escaped) throw NumericalError("discretize: an interior node's ball leaves the covered lattice");
    finalize_nodes(dom, interior, grid_point, grid.size(), stencils);
    return dom;
}

DiscreteDomain discretize_axisymmetric(const DomainSpec& spec, double eps, double h,
                                       const DiscretizationOptions& opt) {
    DiscreteDomain dom;
    dom.spec = spec;
    dom.metric = spec.metric();
    dom.lattice = LatticeKind::Axisymmetric;
    dom.epsilon = eps;
    dom.spacing = h;
    dom.vertical_spacing = opt.vertical_spacing > 0.0 ? opt.vertical_spacing : h;
    const double hv = dom.vertical_spacing;
    const Metric m = dom.metric;
    const Point c = spec.center;

    QuadratureOptions qo;
    qo.resolution = opt.reference_resolution;
    qo.execution = opt.execution;
    dom.reference = ball_quadrature(Point{}, 1.0, m, qo);
    const double volume_scale = std::pow(eps, homogeneous_dimension(m));

    const double reach = spec.outer_radius + eps;
    const double ext3 = ball_half_extents(reach, m).x3;
    GridShape grid;
    grid.ni = static_cast<long>(std::ceil(reach / h)) + 3;
    grid.nj = 1;
    grid.k0 = static_cast<long>(std::ceil(ext3 / hv)) + 2;
    grid.nk = 2 * grid.k0 + 1;

    auto local_point = [&](long i, long k) {
        return Point{static_cast<double>(i) * h, 0.0, static_cast<double>(k - grid.k0) * hv};
    };
    auto grid_point = [&](std::size_t g) {
        const long k = static_cast<long>(g % grid.nk);
        const long i = static_cast<long>(g / grid.nk);
        return translate(c, local_point(i, k), m);
    };

    std::vector<std::size_t> interior;
    for (std::size_t g = 0; g < grid.size(); ++g)
        if (spec.contains(grid_point(g))) interior.push_back(g);
    if (interior.empty()) throw NumericalError("discretize: no lattice node falls inside the domain");

    const auto& ref = dom.reference;
    std::vector<std::vector<std::pair<std::size_t, double>>> stencils(interior.size());
    bool escaped = false;

    for_each_index(interior.size(), opt.execution, [&](std::size_t n) {
        const std::size_t g = interior[n];
        const long kx = static_cast<long>(g % grid.nk);
        const long ix = static_cast<long>(g / grid.nk);
        const Point x = local_point(ix, kx);
        const double rho = x.x1;
        const double spread3 = m == Metric::HeisenbergKoranyi ? 0.25 * eps * eps + 0.5 * rho * eps : eps;
        const long wi0 = std::max(0L, static_cast<long>(std::floor((rho - eps) / h)) - 1);
        const long wi1 = static_cast<long>(std::ceil((rho + eps) / h)) + 1;
        const long wk0 = kx + static_cast<long>(std::floor(-spread3 / hv)) - 1;
        const long wk1 = kx + static_cast<long>(std::ceil(spread3 / hv)) + 1;
        if (wi1 >= grid.ni || wk0 < 0 || wk1 >= grid.nk) {
#pragma omp atomic write
            escaped = true;
            return;
        }
        const long wni = wi1 - wi0 + 1;
        const long wnk = wk1 - wk0 + 1;
        std::vector<double> window(static_cast<std::size_t>(wni * wnk), 0.0);
        for (std::size_t q = 0; q < ref.size(); ++q) {
            const Point y = translate(x, scale(eps, ref.nodes[q], m), m);
            const double w = ref.weights[q] * volume_scale;
            const double fi = std::hypot(y.x1, y.x2) / h;
            const double fk = y.x3 / hv + static_cast<double>(grid.k0);
            const long i0 = static_cast<long>(std::floor(fi));
            const long k0 = static_cast<long>(std::floor(fk));
            const double s = fi - static_cast<double>(i0);
            const double t = fk - static_cast<double>(k0);
            const long li = i0 - wi0;
            const long lk = k0 - wk0;
            double* row0 = &window[static_cast<std::size_t>(li * wnk + lk)];
            double* row1 = row0 + wnk;
            row0[0] += w * (1.0 - s) * (1.0 - t);
            row0[1] += w * (1.0 - s) * t;
            row1[0] += w * s * (1.0 - t);
            row1[1] += w * s * t;
        }
        auto& st = stencils[n];
        for (long a = 0; a < wni; ++a)
            for (long b = 0; b < wnk; ++b) {
                const double w = window[static_cast<std::size_t>(a * wnk + b)];
                if (w > 0.0) st.emplace_back(grid.linear(wi0 + a, 0, wk0 + b), w);
            }
    });
    if (escaped) throw NumericalError("discretize: an interior node's ball leaves the covered lattice");
    finalize_nodes(dom, interior, grid_point, grid.size(), stencils);
    return dom;
}

}  // namespace

DiscreteDomain discretize(const DomainSpec& spec, double epsilon, double h, const DiscretizationOptions& options) {
    spec.validate();
    require(epsilon > 0.0 && epsilon < 1.0, "discretize: epsilon must lie in (0, 1)");
    require(h > 0.0 && h <= epsilon / 8.0 * (1.0 + 1e-12), "discretize: spacing must satisfy 0 < h <= epsilon/8");
    require(options.vertical_spacing >= 0.0, "discretize: vertical spacing must be >= 0");
    if (options.lattice == LatticeKind::Axisymmetric) {
        require(options.reference_resolution >= 2, "discretize: reference resolution must be >= 2");
        return discretize_axisymmetric(spec, epsilon, h, options);
    }
    return discretize_full(spec, epsilon, h, options);
}

// DPP operator -----------------------------------------------------------------

PMeanResult dpp_apply(const DiscreteDomain& dom, std::span<const double> values, std::size_t node,
                      const Exponent& p, const PMeanOptions& options) {
    require(node < dom.interior_count, "dpp_apply: node is not interior");
    require(values.size() == dom.nodes.size(), "dpp_apply: value array does not match the domain");
    const std::size_t b = dom.offsets[node];
    const std::size_t e = dom.offsets[node + 1];
    std::vector<double> gathered(e - b);
    for (std::size_t k = b; k < e; ++k) gathered[k - b] = values[dom.indices[k]];
    return pmean(SampleView{gathered, std::span<const double>(dom.weights).subspan(b, e - b), true}, p, options);
}

namespace {

struct NodeUpdate {
    double value;
    int steps;
};

NodeUpdate update_node(const DiscreteDomain& dom, std::span<const double> current, std::size_t i,
                       const Exponent& p, double pmean_tol, bool warm_start, std::vector<double>& buffer) {
    const std::size_t b = dom.offsets[i];
    const std::size_t e = dom.offsets[i + 1];
    buffer.resize(e - b);
    for (std::size_t k = b; k < e; ++k) buffer[k - b] = current[dom.indices[k]];
    PMeanOptions opt;
    opt.tol = pmean_tol;
    if (warm_start) opt.start = current[i];
    const PMeanResult r =
        pmean(SampleView{buffer, std::span<const double>(dom.weights).subspan(b, e - b), true}, p, opt);
    return {r.value, r.iterations};
}

}  // namespace

SweepStats sweep(const DiscreteDomain& dom, std::span<const double> current, std::span<double> next,
                 const Exponent& p, double pmean_tol, bool warm_start, Execution execution) {
    require(current.size() == dom.nodes.size() && next.size() == dom.nodes.size(),
            "sweep: value arrays do not match the domain");
    const std::size_t n = dom.interior_count;
    for (std::size_t i = n; i < dom.nodes.size(); ++i) next[i] = current[i];

    double max_change = 0.0;
    std::size_t steps = 0;
    if (execution == Execution::Serial) {
        std::vector<double> buffer;
        for (std::size_t i = 0; i < n; ++i) {
            const NodeUpdate u = update_node(dom, current, i, p, pmean_tol, warm_start, buffer);
            next[i] = u.value;
            max_change = std::max(max_change, std::fabs(u.value - current[i]));
            steps += static_cast<std::size_t>(u.steps);
        }
    } else {
#pragma omp parallel reduction(max : max_change) reduction(+ : steps)
        {
            std::vector<double> buffer;
#pragma omp for schedule(dynamic, 64)
            for (std::size_t i = 0; i < n; ++i) {
                const NodeUpdate u = update_node(dom, current, i, p, pmean_tol, warm_start, buffer);
                next[i] = u.value;
                max_change = std::max(max_change, std::fabs(u.value - current[i]));
                steps += static_cast<std::size_t>(u.steps);
            }
        }
    }
    return {max_change, steps};
}

std::vector<double> strip_values(const DiscreteDomain& dom, const Datum& G) {
    std::vector<double> out;
    out.reserve(dom.nodes.size() - dom.interior_count);
    for (const Point& x : dom.strip_nodes()) out.push_back(G(x));
    return out;
}

std::vector<double> node_residuals(const DiscreteDomain& dom, std::span<const double> values, const Exponent& p,
                                   double pmean_tol, Execution execution) {
    std::vector<double> next(values.size());
    sweep(dom, values, next, p, pmean_tol, false, execution);
    next.resize(dom.interior_count);
    for (std::size_t i = 0; i < dom.interior_count; ++i) next[i] = std::fabs(next[i] - values[i]);
    return next;
}

double fixed_point_residual(const DiscreteDomain& dom, std::span<const double> values, const Exponent& p,
                            double pmean_tol, Execution execution) {
    std::vector<double> next(values.size());
    return sweep(dom, values, next, p, pmean_tol, false, execution).max_change;
}

SolveResult solve(const DiscreteDomain& dom, std::span<const double> strip, const Exponent& p,
                  const SolveOptions& options) {
    const std::size_t n = dom.interior_count;
    require(strip.size() == dom.nodes.size() - n, "solve: strip data does not match the strip nodes");
    require(!strip.empty(), "solve: domain has no strip nodes");
    require(options.tol >= 0.0, "solve: tol must be >= 0");
    const auto start = std::chrono::steady_clock::now();

    const auto [lo_it, hi_it] = std::minmax_element(strip.begin(), strip.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    SolveResult result;
    result.tol = options.tol > 0.0 ? options.tol : 1e-9 * (1.0 + (hi - lo));
    result.exponent = p.is_infinite() ? std::numeric_limits<double>::infinity() : p.value();
    result.domain_fingerprint = dom.fingerprint();

    double guess = 0.0;
    switch (options.initial) {
        case InitialGuess::StripMean: {
            double s = 0.0;
            for (double v : strip) s += v;
            guess = s / static_cast<double>(strip.size());
            break;
        }
        case InitialGuess::StripSup: guess = hi; break;
        case InitialGuess::StripInf: guess = lo; break;
    }
    std::vector<double> current(dom.nodes.size(), guess);
    std::copy(strip.begin(), strip.end(), current.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<double> next(current.size());

    std::size_t next_log = 1;
    double change = 0.0;
    for (std::size_t it = 1;; ++it) {
        if (it > options.max_iterations) {
            std::ostringstream msg;
            msg << "solve: no convergence within " << options.max_iterations << " iterations; history:";
            for (const auto& [k, r] : result.residual_history) msg << " (" << k << ", " << r << ")";
            if (result.residual_history.empty() || result.residual_history.back().first != it - 1)
                msg << " (" << it - 1 << ", " << change << ")";
            throw NumericalError(msg.str());
        }
        const SweepStats st = sweep(dom, current, next, p, options.pmean_tol, true, options.execution);
        change = st.max_change;
        current.swap(next);
        result.iterations = it;
        const bool done = change <= result.tol;
        if (it == next_log || done) {
            result.residual_history.emplace_back(it, change);
            if (it == next_log) next_log *= 2;
        }
        if (done) break;
    }
    result.values = std::move(current);
    result.final_residual = fixed_point_residual(dom, result.values, p, options.pmean_tol, options.execution);
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

SolveResult solve(const DiscreteDomain& dom, const Datum& G, const Exponent& p, const SolveOptions& options) {
    const std::vector<double> strip = strip_values(dom, G);
    return solve(dom, strip, p, options);
}

// Checks -----------------------------------------------------------------------

CheckOutcome comparison_check(const DiscreteDomain& dom, const SolveResult& result_F, const SolveResult& result_G,
                              double strip_gap) {
    const std::uint64_t fp = dom.fingerprint();
    if (result_F.domain_fingerprint != fp || result_G.domain_fingerprint != fp ||
        result_F.values.size() != dom.nodes.size() || result_G.values.size() != dom.nodes.size())
        throw InvalidArgument("comparison_check: results belong to different discrete domains");
    if (result_F.exponent != result_G.exponent)
        throw InvalidArgument("comparison_check: results use different exponents");
    const double slack = 2.0 * std::max(result_F.tol, result_G.tol);
    CheckOutcome out;
    out.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dom.nodes.size(); ++i) {
        const double margin = result_G.values[i] + strip_gap - result_F.values[i];
        if (margin < out.worst_margin) {
            out.worst_margin = margin;
            if (margin < -slack && out.passed) {
                out.passed = false;
                out.witness = i;
            }
        }
    }
    return out;
}

CheckOutcome subsolution_check(const Datum& field, const DiscreteDomain& dom, const Exponent& p, double slack,
                               SolutionSide side, double pmean_tol, Execution execution) {
    require(slack >= 0.0, "subsolution_check: slack must be >= 0");
    const std::size_t n = dom.interior_count;
    std::vector<double> margins(n);
    std::vector<double> node_values;
    if (dom.lattice == LatticeKind::Full3D) {
        node_values.resize(dom.nodes.size());
        for (std::size_t i = 0; i < dom.nodes.size(); ++i) node_values[i] = field(dom.nodes[i]);
    }
    const double volume_scale = std::pow(dom.epsilon, homogeneous_dimension(dom.metric));
    const Point cinv = group_inv(dom.spec.center);

    auto margin_at = [&](std::size_t i, std::vector<double>& buf, std::vector<double>& wbuf) {
        PMeanOptions opt;
        opt.tol = pmean_tol;
        double fx = 0.0;
        double mean = 0.0;
        if (dom.lattice == LatticeKind::Full3D) {
            fx = node_values[i];
            mean = dpp_apply(dom, node_values, i, p, opt).value;
        } else {
            const Point x = dom.nodes[i];
            fx = field(x);
            const Point local = translate(cinv, x, dom.metric);
            const auto& ref = dom.reference;
            buf.resize(ref.size());
            wbuf.resize(ref.size());
            for (std::size_t q = 0; q < ref.size(); ++q) {
                const Point y = translate(local, scale(dom.epsilon, ref.nodes[q], dom.metric), dom.metric);
                buf[q] = field(translate(dom.spec.center, y, dom.metric));
                wbuf[q] = ref.weights[q] * volume_scale;
            }
            mean = pmean(SampleView{buf, wbuf, true}, p, opt).value;
        }
        return side == SolutionSide::Sub ? mean - fx : fx - mean;
    };

    if (execution == Execution::Serial) {
        std::vector<double> buf, wbuf;
        for (std::size_t i = 0; i < n; ++i) margins[i] = margin_at(i, buf, wbuf);
    } else {
#pragma omp parallel
        {
            std::vector<double> buf, wbuf;
#pragma omp for schedule(dynamic, 16)
            for (std::size_t i = 0; i < n; ++i) margins[i] = margin_at(i, buf, wbuf);
        }
    }
    CheckOutcome out;
    out.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (margins[i] < out.worst_margin) out.worst_margin = margins[i];
        if (margins[i] < -slack && out.passed) {
            out.passed = false;
            out.witness = i;
        }
    }
    return out;
}

namespace {

// Distance from y to the rotation orbit of x about the vertical axis through `centre`.
double orbit_distance(const DiscreteDomain& dom, const Point& x, const Point& y) {
    const Point cinv = group_inv(dom.spec.center);
    const Point lx = translate(cinv, x, dom.metric);
    const double rho = std::hypot(lx.x1, lx.x2);
    constexpr int kAngles = 720;
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < kAngles; ++a) {
        const double phi = 2.0 * std::numbers::pi * a / kAngles;
        const Point rotated{rho * std::cos(phi), rho * std::sin(phi), lx.x3};
        best = std::min(best, distance(translate(dom.spec.center, rotated, dom.metric), y, dom.metric));
    }
    return best;
}

}  // namespace

double boundary_gap(const DiscreteDomain& dom, const SolveResult& result, const Point& y, double delta0,
                    const Datum& G) {
    require(delta0 > 0.0, "boundary_gap: delta0 must be positive");
    require(result.values.size() == dom.nodes.size(), "boundary_gap: result does not match the domain");
    const double gy = G(y);
    double gap = -1.0;
    for (std::size_t i = 0; i < dom.interior_count; ++i) {
        const Point& x = dom.nodes[i];
        double d = distance(x, y, dom.metric);
        if (dom.lattice == LatticeKind::Axisymmetric && d > delta0) {
            // Cheap lower bound first: horizontal offset of the orbit radii.
            const Point cinv = group_inv(dom.spec.center);
            const Point lx = translate(cinv, x, dom.metric);
            const Point ly = translate(cinv, y, dom.metric);
            if (std::fabs(std::hypot(lx.x1, lx.x2) - std::hypot(ly.x1, ly.x2)) > delta0) continue;
            d = orbit_distance(dom, x, y);
        }
        if (d <= delta0) gap = std::max(gap, std::fabs(result.values[i] - gy));
    }
    if (gap < 0.0) throw NumericalError("boundary_gap: no interior node within delta0 of the boundary point");
    return gap;
}

}  // namespace hpmean
