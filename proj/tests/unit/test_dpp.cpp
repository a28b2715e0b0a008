#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "hpmean/dpp.hpp"
#include "hpmean/errors.hpp"
#include "hpmean/harmonics.hpp"

using namespace hpmean;

namespace {

const DiscreteDomain& small_ball() {
    static const DiscreteDomain dom = discretize(DomainSpec::koranyi_ball({0, 0, 0}, 1.0), 0.5, 0.0625);
    return dom;
}

const DiscreteDomain& small_annulus() {
    static const DiscreteDomain dom = [] {
        DiscretizationOptions opt;
        opt.lattice = LatticeKind::Axisymmetric;
        opt.reference_resolution = 16;
        return discretize(DomainSpec::axis_excluded_annulus({0, 0, 0}, 0.5, 1.0, 0.3), 0.25, 0.25 / 8, opt);
    }();
    return dom;
}

double sup_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

Datum wavy() {
    return [](const Point& x) { return std::sin(3.0 * x.x1) + x.x2 * x.x2 - 2.0 * x.x3; };
}

}  // namespace

TEST_CASE("lattice classification matches a brute-force classifier") {
    const DiscreteDomain& dom = small_ball();
    const DomainSpec spec = dom.spec;
    const double h = 0.0625, eps = 0.5;
    const Metric H = Metric::HeisenbergKoranyi;

    std::vector<Point> inside, outside;
    const int n = 30;
    for (int i = -n; i <= n; ++i)
        for (int j = -n; j <= n; ++j)
            for (int k = -n; k <= n; ++k) {
                const Point x{i * h, j * h, k * h};
                (gauge(x, H) < 1.0 ? inside : outside).push_back(x);
            }
    std::size_t strip = 0;
    for (const Point& y : outside) {
        if (gauge(y, H) >= 1.0 + eps) continue;
        for (const Point& x : inside)
            if (distance(x, y, H) < eps) {
                ++strip;
                break;
            }
    }
    CHECK(dom.interior_count == inside.size());
    CHECK(dom.nodes.size() - dom.interior_count == strip);
    for (std::size_t i = 0; i < dom.interior_count; ++i) {
        CHECK(spec.contains(dom.nodes[i]));
        CHECK(dom.stencil_size(i) >= 1);
    }
    for (const Point& y : dom.strip_nodes()) CHECK_FALSE(spec.contains(y));
}

TEST_CASE("halving h multiplies the node count by about eight") {
    const auto spec = DomainSpec::koranyi_ball({0, 0, 0}, 1.0);
    const auto a = discretize(spec, 0.5, 0.0625);
    const auto b = discretize(spec, 0.5, 0.03125);
    const double ratio = static_cast<double>(b.interior_count) / static_cast<double>(a.interior_count);
    CHECK(ratio > 7.0);
    CHECK(ratio < 9.0);
}

TEST_CASE("discretize preconditions") {
    const auto spec = DomainSpec::koranyi_ball({0, 0, 0}, 1.0);
    CHECK_THROWS_AS(discretize(spec, 1.2, 0.1), InvalidArgument);
    CHECK_THROWS_AS(discretize(spec, 0.5, 0.1), InvalidArgument);
    CHECK_THROWS_AS(DomainSpec::koranyi_annulus({0, 0, 0}, 1.0, 0.5).validate(), InvalidArgument);
}

TEST_CASE("dpp_apply: constants, monotonicity and affine invariance") {
    const DiscreteDomain& dom = small_ball();
    std::vector<double> c(dom.nodes.size(), 2.5);
    for (std::size_t node : {std::size_t{0}, dom.interior_count / 2, dom.interior_count - 1})
        CHECK(dpp_apply(dom, c, node, Exponent(3.0)).value == doctest::Approx(2.5).epsilon(1e-14));

    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(dom.nodes.size());
    for (auto& x : v) x = u(rng);
    std::uniform_int_distribution<std::size_t> pick(0, dom.interior_count - 1);
    for (int t = 0; t < 20; ++t) {
        const std::size_t node = pick(rng);
        const Exponent p(t % 2 ? 3.0 : 1.5);
        const double before = dpp_apply(dom, v, node, p).value;
        auto w = v;
        const std::size_t slot = dom.offsets[node] + (static_cast<std::size_t>(t) % dom.stencil_size(node));
        w[dom.indices[slot]] += 0.3;
        CHECK(dpp_apply(dom, w, node, p).value >= before - 1e-12);
        std::vector<double> aff(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) aff[i] = -3.0 * v[i] + 1.0;
        CHECK(dpp_apply(dom, aff, node, p).value == doctest::Approx(-3.0 * before + 1.0).epsilon(1e-10));
    }
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
    for (const DiscreteDomain* dom : {&small_ball(), &small_annulus()}) {
        const std::vector<double> strip = strip_values(*dom, wavy());
        std::vector<double> cur(dom->nodes.size(), 0.1);
        std::copy(strip.begin(), strip.end(), cur.begin() + static_cast<std::ptrdiff_t>(dom->interior_count));
        std::vector<double> a(cur.size()), b(cur.size());
        for (bool warm : {false, true}) {
            const auto sa = sweep(*dom, cur, a, Exponent(3.0), 1e-12, warm, Execution::Serial);
            const auto sb = sweep(*dom, cur, b, Exponent(3.0), 1e-12, warm, Execution::Parallel);
            CHECK(a == b);
            CHECK(sa.max_change == sb.max_change);
            CHECK(sa.root_steps == sb.root_steps);
        }
        SolveOptions so;
        so.tol = 1e-6;
        so.execution = Execution::Serial;
        const auto rs = solve(*dom, wavy(), Exponent(2.5), so);
        so.execution = Execution::Parallel;
        const auto rp = solve(*dom, wavy(), Exponent(2.5), so);
        CHECK(rs.values == rp.values);
        CHECK(rs.iterations == rp.iterations);
    }
    DiscretizationOptions opt;
    opt.execution = Execution::Serial;
    const auto s = discretize(DomainSpec::koranyi_ball({0.1, 0, 0}, 1.0), 0.5, 0.0625, opt);
    opt.execution = Execution::Parallel;
    const auto p = discretize(DomainSpec::koranyi_ball({0.1, 0, 0}, 1.0), 0.5, 0.0625, opt);
    CHECK(s.nodes == p.nodes);
    CHECK(s.indices == p.indices);
    CHECK(s.weights == p.weights);
    CHECK(s.fingerprint() == p.fingerprint());
}

TEST_CASE("solve: constants are fixed points") {
    const auto r = solve(small_ball(), [](const Point&) { return 5.0; }, Exponent(3.0));
    CHECK(r.iterations <= 2);
    for (double v : r.values) CHECK(v == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("solve: Euclidean p = 2 reproduces a linear datum") {
    const auto dom = discretize(DomainSpec::euclidean_ball({0, 0, 0}, 0.6), 0.5, 0.0625);
    const Datum G = [](const Point& x) { return x.x1; };
    const auto r = solve(dom, G, Exponent(2.0));
    double err = 0.0;
    for (std::size_t i = 0; i < dom.interior_count; ++i) err = std::max(err, std::fabs(r.values[i] - dom.nodes[i].x1));
    CHECK(err <= dom.spacing + r.tol);
}

TEST_CASE("solve: bounds, strip values, residual and affine equivariance") {
    const DiscreteDomain& dom = small_annulus();
    const Exponent p(3.0);
    const Datum G = wavy();
    const auto r = solve(dom, G, p);
    const auto strip = strip_values(dom, G);
    const auto [lo, hi] = std::minmax_element(strip.begin(), strip.end());
    for (double v : r.values) {
        CHECK(v >= *lo - r.tol);
        CHECK(v <= *hi + r.tol);
    }
    for (std::size_t k = 0; k < strip.size(); ++k) CHECK(r.values[dom.interior_count + k] == strip[k]);
    CHECK(r.final_residual <= r.tol);
    CHECK(fixed_point_residual(dom, r.values, p) == doctest::Approx(r.final_residual));

    const Datum A = [G](const Point& x) { return 2.0 * G(x) - 1.0; };
    const auto ra = solve(dom, A, p);
    std::vector<double> mapped(r.values.size());
    for (std::size_t i = 0; i < mapped.size(); ++i) mapped[i] = 2.0 * r.values[i] - 1.0;
    CHECK(sup_diff(ra.values, mapped) <= 10.0 * ra.tol);
}

TEST_CASE("ordered starting iterates bracket the iteration") {
    const DiscreteDomain& dom = small_annulus();
    const Exponent p(3.0);
    const auto strip = strip_values(dom, wavy());
    const auto [lo, hi] = std::minmax_element(strip.begin(), strip.end());
    auto start = [&](double v) {
        std::vector<double> u(dom.nodes.size(), v);
        std::copy(strip.begin(), strip.end(), u.begin() + static_cast<std::ptrdiff_t>(dom.interior_count));
        return u;
    };
    auto down = start(*hi), up = start(*lo), mid = start(0.5 * (*lo + *hi));
    std::vector<double> next(down.size());
    for (int k = 0; k < 25; ++k) {
        for (auto* u : {&down, &up, &mid}) {
            sweep(dom, *u, next, p, 1e-13, false, Execution::Parallel);
            u->swap(next);
        }
        for (std::size_t i = 0; i < dom.interior_count; ++i) {
            CHECK(up[i] <= mid[i] + 1e-11);
            CHECK(mid[i] <= down[i] + 1e-11);
        }
    }
}

TEST_CASE("comparison") {
    const DiscreteDomain& dom = small_annulus();
    const Exponent p(3.0);
    const Datum G = wavy();
    const auto rg = solve(dom, G, p);
    const auto same = comparison_check(dom, rg, rg, 0.0);
    CHECK(same.passed);
    const auto rf = solve(dom, [G](const Point& x) { return G(x) + 1.0; }, p);
    std::vector<double> shifted = rg.values;
    for (auto& v : shifted) v += 1.0;
    CHECK(sup_diff(rf.values, shifted) <= 10.0 * rf.tol);
    CHECK(comparison_check(dom, rf, rg, 1.0).passed);
    CHECK_FALSE(comparison_check(dom, rf, rg, 0.0).passed);

    const auto lower = solve(dom, [G](const Point& x) { return G(x) - 0.2 * (1.0 + std::cos(5.0 * x.x2)); }, p);
    CHECK(comparison_check(dom, lower, rg, 0.0).passed);
}

TEST_CASE("subsolution checks") {
    const DiscreteDomain& dom = small_ball();
    const Datum c = [](const Point&) { return -1.5; };
    for (auto side : {SolutionSide::Sub, SolutionSide::Super}) {
        const auto out = subsolution_check(c, dom, Exponent(3.0), 1e-12, side);
        CHECK(out.passed);
        CHECK(std::fabs(out.worst_margin) < 1e-13);
    }
    // x1^2 + x2^2 is strictly subharmonic in the horizontal directions.
    const Datum sq = [](const Point& x) { return x.x1 * x.x1 + x.x2 * x.x2; };
    CHECK(subsolution_check(sq, dom, Exponent(2.0), 1e-12, SolutionSide::Sub).passed);
    CHECK_FALSE(subsolution_check(sq, dom, Exponent(2.0), 1e-12, SolutionSide::Super).passed);
}

TEST_CASE("boundary gap") {
    const DiscreteDomain& dom = small_annulus();
    const Exponent p(3.0);
    const Datum c = [](const Point&) { return 4.0; };
    const auto rc = solve(dom, c, p);
    CHECK(boundary_gap(dom, rc, {1, 0, 0}, 0.2, c) <= rc.tol);
    const Datum G = wavy();
    const auto r = solve(dom, G, p);
    double prev = 0.0;
    for (double d0 : {0.1, 0.2, 0.4}) {
        const double g = boundary_gap(dom, r, {1, 0, 0}, d0, G);
        CHECK(g >= prev);
        prev = g;
    }
    CHECK_THROWS_AS(boundary_gap(dom, r, {5, 0, 0}, 0.1, G), NumericalError);
}

TEST_CASE("iteration cap reports the residual history") {
    SolveOptions so;
    so.max_iterations = 3;
    try {
        solve(small_annulus(), wavy(), Exponent(3.0), so);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("history") != std::string::npos);
    }
}
