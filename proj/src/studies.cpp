#include "hpmean/studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hpmean/errors.hpp"

namespace hpmean::studies {

std::optional<double> loglog_slope(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "loglog_slope: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 || y[i] == 0.0 || !std::isfinite(y[i])) continue;
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(std::fabs(y[i])));
    }
    if (lx.size() < 2) return std::nullopt;
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

namespace {

BallQuadrature unit_lattice(Metric metric, std::size_t resolution, Execution execution) {
    QuadratureOptions qo;
    qo.resolution = resolution;
    qo.execution = execution;
    return ball_quadrature(Point{}, 1.0, metric, qo);
}

struct BallMean {
    double mean_minus_u = 0.0;
    double max_abs = 0.0;
};

BallMean ball_mean(const AmvpConfig& c, const BallQuadrature& unit, double epsilon, double u0) {
    const BallQuadrature q = rescale(unit, c.x0, epsilon);
    std::vector<double> values(q.size());
    double max_abs = 0.0;
    // Centred samples keep rounding proportional to the variation over the ball.
    for (std::size_t i = 0; i < q.size(); ++i) {
        values[i] = c.field(q.nodes[i]) - u0;
        max_abs = std::max(max_abs, std::fabs(values[i]));
    }
    PMeanOptions opt;
    opt.tol = c.pmean_tol;
    const PMeanResult r = pmean(SampleView{values, q.weights, true}, c.p, opt);
    return {r.value, max_abs};
}

// Second-order coefficient of mu_p - u for the lattice measure itself: with
// u(x0 * delta_eps z) = u0 + eps a.z + eps^2 q(z) + ..., the root of the p-mean
// equation moves by eps^2 sum w |a.z|^(p-2) q(z) / sum w |a.z|^(p-2).
double lattice_leading_coefficient(const AmvpConfig& c, const BallQuadrature& unit) {
    const FrameDerivatives fd = frame_derivatives(c.field, c.x0, c.metric);
    const double vertical =
        c.metric == Metric::HeisenbergKoranyi ? euclidean_derivatives(c.field, c.x0).gradient[2] : 0.0;
    const double pm2 = c.p.value() - 2.0;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < unit.size(); ++k) {
        const Point& z = unit.nodes[k];
        const double zc[3] = {z.x1, z.x2, z.x3};
        double az = 0.0;
        for (int i = 0; i < fd.dimension; ++i) az += fd.first[i] * zc[i];
        double q = 0.0;
        for (int i = 0; i < fd.dimension; ++i)
            for (int j = 0; j < fd.dimension; ++j) q += 0.5 * fd.second[i][j] * zc[i] * zc[j];
        if (c.metric == Metric::HeisenbergKoranyi) q += vertical * z.x3;
        const double a = std::fabs(az);
        if (a == 0.0 && pm2 < 0.0) continue;
        const double w = unit.weights[k] * (pm2 == 0.0 ? 1.0 : std::pow(a, pm2));
        num += w * q;
        den += w;
    }
    return num / den;
}

}  // namespace

AmvpReport amvp_study(const AmvpConfig& c) {
    require(!c.p.is_infinite() && c.p.value() > 1.0, "amvp: p must be finite and > 1");
    require(!c.epsilons.empty(), "amvp: epsilon list is empty");
    for (double e : c.epsilons) require(e > 0.0, "amvp: epsilons must be positive");

    AmvpReport report;
    report.laplacian = normalized_p_laplacian(c.field, c.x0, c.p, c.metric);
    report.constant = c.metric == Metric::HeisenbergKoranyi ? c_p(c.p) : euclidean_amvp_constant(3, c.p.value());
    report.expected_coefficient = report.constant * report.laplacian;
    report.degenerate = std::fabs(report.laplacian) < 1e-9;

    const BallQuadrature unit = unit_lattice(c.metric, c.resolution, c.execution);
    report.ball_nodes = unit.size();
    std::vector<BallQuadrature> floor_units;
    for (std::size_t n : c.floor_resolutions)
        if (n != c.resolution) floor_units.push_back(unit_lattice(c.metric, n, c.execution));
    const double kappa = lattice_leading_coefficient(c, unit);
    const double u0 = c.field(c.x0);

    std::vector<double> eps, lead, rem_eps, rem;
    for (double e : c.epsilons) {
        AmvpRow row;
        row.epsilon = e;
        const BallMean bm = ball_mean(c, unit, e, u0);
        row.mean_minus_u = bm.mean_minus_u;
        row.predicted = report.expected_coefficient * e * e;
        row.lattice_leading = kappa * e * e;
        row.remainder = row.mean_minus_u - row.lattice_leading;
        for (const BallQuadrature& fu : floor_units)
            row.noise_floor = std::max(row.noise_floor, std::fabs(ball_mean(c, fu, e, u0).mean_minus_u - row.mean_minus_u));
        // Root-finding tolerance plus a worst-case bound on summation rounding.
        const double rounding = 10.0 * c.pmean_tol * (1.0 + bm.max_abs) +
                                static_cast<double>(unit.size()) * std::numeric_limits<double>::epsilon() * bm.max_abs;
        row.resolved = std::fabs(row.remainder) > rounding;
        eps.push_back(e);
        lead.push_back(row.mean_minus_u);
        if (row.resolved) {
            rem_eps.push_back(e);
            rem.push_back(row.remainder);
        }
        report.rows.push_back(row);
    }

    const auto smallest = std::min_element(report.rows.begin(), report.rows.end(),
                                           [](const AmvpRow& a, const AmvpRow& b) { return a.epsilon < b.epsilon; });
    report.leading_coefficient = smallest->mean_minus_u / (smallest->epsilon * smallest->epsilon);
    if (report.degenerate) {
        report.remainder_status = "degenerate";
        return report;
    }
    report.leading_order = loglog_slope(eps, lead);
    report.remainder_order = loglog_slope(rem_eps, rem);
    report.remainder_status = report.remainder_order ? "fitted" : "noise-limited";
    return report;
}

double LatticePlan::spacing(double epsilon) const {
    require(h_ratio >= 8.0, "lattice plan: h_ratio must be >= 8");
    return epsilon / h_ratio;
}

DiscretizationOptions LatticePlan::options(double epsilon) const {
    DiscretizationOptions o;
    o.lattice = lattice;
    o.reference_resolution = reference_resolution;
    o.execution = execution;
    const double h = spacing(epsilon);
    o.vertical_spacing = vertical_coeff > 0.0 ? std::min(h, vertical_coeff * std::pow(epsilon, vertical_power)) : h;
    return o;
}

ConvergenceReport convergence_study(const ConvergenceConfig& c) {
    require(static_cast<bool>(c.exact), "convergence: exact solution missing");
    require(!c.epsilons.empty(), "convergence: epsilon list is empty");
    ConvergenceReport report;
    std::vector<double> eps, err;
    for (double e : c.epsilons) {
        const DiscreteDomain dom = discretize(c.domain, e, c.plan.spacing(e), c.plan.options(e));
        const SolveResult res = solve(dom, c.exact, c.p, c.solve);
        ConvergenceRow row;
        row.epsilon = e;
        row.h = dom.spacing;
        row.vertical_spacing = dom.vertical_spacing;
        row.nodes = dom.nodes.size();
        row.interior = dom.interior_count;
        row.iterations = res.iterations;
        row.seconds = res.seconds;
        row.final_residual = res.final_residual;
        for (std::size_t i = 0; i < dom.interior_count; ++i)
            row.sup_error = std::max(row.sup_error, std::fabs(res.values[i] - c.exact(dom.nodes[i])));
        eps.push_back(e);
        err.push_back(row.sup_error);
        report.rows.push_back(row);
    }
    report.rate = loglog_slope(eps, err);
    return report;
}

BoundaryGapReport boundary_gap_study(const BoundaryGapConfig& c) {
    require(static_cast<bool>(c.datum), "boundary gap: datum missing");
    require(!c.boundary_points.empty(), "boundary gap: no boundary points");
    require(c.delta_factor > 0.0, "boundary gap: delta_factor must be positive");
    BoundaryGapReport report;
    for (double e : c.epsilons) {
        const DiscreteDomain dom = discretize(c.domain, e, c.plan.spacing(e), c.plan.options(e));
        const SolveResult res = solve(dom, c.datum, c.p, c.solve);
        BoundaryGapRow row;
        row.epsilon = e;
        row.delta0 = c.delta_factor * e;
        row.iterations = res.iterations;
        row.seconds = res.seconds;
        for (const Point& y : c.boundary_points) {
            row.gaps.push_back(boundary_gap(dom, res, y, row.delta0, c.datum));
            row.max_gap = std::max(row.max_gap, row.gaps.back());
        }
        report.rows.push_back(std::move(row));
    }
    report.monotone = true;
    for (std::size_t i = 1; i < report.rows.size(); ++i)
        if (!(report.rows[i].max_gap < report.rows[i - 1].max_gap)) report.monotone = false;
    return report;
}

Datum rotational_test_datum(const Point& c) {
    const Point cinv = group_inv(c);
    return [cinv](const Point& x) {
        const Point z = translate(cinv, x, Metric::HeisenbergKoranyi);
        return std::sin(2.0 * std::numbers::pi * gauge(z, Metric::HeisenbergKoranyi)) + z.x3;
    };
}

}  // namespace hpmean::studies
