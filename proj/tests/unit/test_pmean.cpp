#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "hpmean/errors.hpp"
#include "hpmean/pmean.hpp"

using namespace hpmean;

namespace {

PMeanOptions with(PMeanMethod m, double tol = 1e-12) {
    PMeanOptions o;
    o.method = m;
    o.tol = tol;
    return o;
}

// Independent root oracle: plain bisection on the residual sign, 200 halvings.
double oracle_root(const std::vector<double>& u, const std::vector<double>& w, double p) {
    auto res = [&](double l) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double d = u[i] - l;
            s += w[i] * std::copysign(std::pow(std::fabs(d), p - 1.0), d);
        }
        return s;
    };
    double lo = *std::min_element(u.begin(), u.end()), hi = *std::max_element(u.begin(), u.end());
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (res(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("h_power and residual examples") {
    CHECK(h_power(0.0, Exponent(3.0)) == 0.0);
    CHECK(h_power(0.0, Exponent(1.5)) == 0.0);
    CHECK(h_power(-2.0, Exponent(3.0)) == doctest::Approx(-4.0));
    CHECK(h_power(0.5, Exponent(4.0)) == doctest::Approx(0.125));
    const SampleSet a({0.0, 1.0});
    CHECK(pmean_residual(a.view(), 0.5, Exponent(2.0)) == doctest::Approx(0.0));
    const SampleSet b({0.0, 0.0, 1.0});
    CHECK(pmean_residual(b.view(), 0.0, Exponent(3.0)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(Exponent(0.5), InvalidArgument);
}

TEST_CASE("closed forms") {
    const SampleSet s({1.0, 2.0, 3.0});
    CHECK(pmean(s.view(), Exponent(2.0)).value == doctest::Approx(2.0).epsilon(1e-15));
    std::vector<double> v;
    for (int i = 0; i <= 10; ++i) v.push_back(i);
    std::shuffle(v.begin(), v.end(), std::mt19937_64(3));
    CHECK(pmean(SampleSet(v).view(), Exponent::infinity()).value == 5.0);
    const SampleSet med({0.0, 1.0, 5.0, 9.0}, {1.0, 1.0, 1.0, 1.0}, true);
    CHECK(pmean(med.view(), Exponent(1.0)).value == doctest::Approx(3.0));
    CHECK(weighted_median(SampleSet({0.0, 1.0, 10.0}, {1.0, 3.0, 1.0}).view()) == 1.0);
}

TEST_CASE("exact roots for {0,0,1}") {
    const SampleSet s({0.0, 0.0, 1.0});
    for (auto m : {PMeanMethod::Auto, PMeanMethod::Bisection, PMeanMethod::Newton}) {
        CHECK(std::fabs(pmean(s.view(), Exponent(3.0), with(m)).value - (std::sqrt(2.0) - 1.0)) <= 1e-10);
        CHECK(std::fabs(pmean(s.view(), Exponent(4.0), with(m)).value - 1.0 / (1.0 + std::cbrt(2.0))) <= 1e-10);
    }
}

TEST_CASE("root search matches an independent bisection oracle") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0), w(0.1, 2.0);
    for (double p : {1.3, 1.9, 2.5, 3.0, 6.0, 17.0}) {
        for (int t = 0; t < 20; ++t) {
            std::vector<double> vals(15), wts(15);
            for (auto& x : vals) x = u(rng);
            for (auto& x : wts) x = w(rng);
            const SampleSet s(vals, wts);
            const double ref = oracle_root(vals, wts, p);
            CHECK(std::fabs(pmean(s.view(), Exponent(p), with(PMeanMethod::Bisection)).value - ref) < 1e-9);
            CHECK(std::fabs(pmean(s.view(), Exponent(p), with(PMeanMethod::Newton)).value - ref) < 1e-9);
        }
    }
}

TEST_CASE("stability, monotonicity, affine invariance and continuity") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.2, 1.0), d(0.0, 0.01);
    for (double p : {1.5, 2.0, 3.0, 8.0}) {
        const Exponent P(p);
        for (int t = 0; t < 30; ++t) {
            std::vector<double> a(12), wt(12), b(12), c(12);
            for (auto& x : a) x = u(rng);
            for (auto& x : wt) x = w(rng);
            const double shift = 0.01;
            for (std::size_t i = 0; i < a.size(); ++i) {
                b[i] = a[i] + d(rng);
                c[i] = a[i] + (u(rng) > 0 ? shift : -shift) * std::fabs(u(rng));
            }
            const double ma = pmean(SampleSet(a, wt).view(), P).value;
            CHECK(ma >= *std::min_element(a.begin(), a.end()));
            CHECK(ma <= *std::max_element(a.begin(), a.end()));
            CHECK(pmean(SampleSet(b, wt).view(), P).value >= ma - 1e-11);
            CHECK(std::fabs(pmean(SampleSet(c, wt).view(), P).value - ma) <= shift + 1e-11);

            std::vector<double> aff(a.size()), neg(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                aff[i] = 2.5 * a[i] - 7.0;
                neg[i] = -a[i];
            }
            CHECK(pmean(SampleSet(aff, wt).view(), P).value == doctest::Approx(2.5 * ma - 7.0).epsilon(1e-10));
            CHECK(pmean(SampleSet(neg, wt).view(), P).value == doctest::Approx(-ma).epsilon(1e-10));
        }
    }
}

TEST_CASE("limits approach the median and the midrange") {
    const SampleSet s({0.0, 0.2, 0.5, 0.9, 1.0}, {1.0, 1.0, 1.0, 1.0, 1.0});
    CHECK(std::fabs(pmean(s.view(), Exponent(1.001)).value - 0.5) < 1e-3);
    CHECK(std::fabs(pmean(s.view(), Exponent(200.0)).value - 0.5) < 1e-2);
    const SampleSet t({0.0, 0.1, 0.1, 0.2, 1.0});
    CHECK(std::fabs(pmean(t.view(), Exponent(200.0)).value - 0.5) < 0.02);
}

TEST_CASE("median tie takes the midpoint") {
    CHECK(weighted_median(SampleSet({0.0, 1.0, 3.0, 4.0}).view()) == doctest::Approx(2.0));
}

TEST_CASE("p = 1 needs continuous data") {
    const SampleSet discrete({0.0, 1.0});
    CHECK_THROWS_AS(pmean(discrete.view(), Exponent(1.0)), InvalidArgument);
}

TEST_CASE("p-mean over balls") {
    QuadratureOptions opt;
    opt.resolution = 64;
    const auto q = ball_quadrature({0, 0, 0}, 1.0, Metric::HeisenbergKoranyi, opt);
    CHECK(pmean_on_ball([](const Point&) { return 3.25; }, q, Exponent(3.0)).value == doctest::Approx(3.25));
    CHECK(std::fabs(pmean_on_ball([](const Point& x) { return x.x1; }, q, Exponent(2.0)).value) < 1e-12);
    CHECK(std::fabs(pmean_on_ball([](const Point& x) { return x.x1; }, q, Exponent(4.0)).value) < 1e-6);

    // Rescaling: the mean over B_eps(x) equals the unit-ball mean of z -> u(x * dilate(eps, z)).
    const Point x{0.4, -0.3, 0.2};
    const double eps = 0.25;
    auto u = [](const Point& y) { return y.x1 * y.x1 + std::sin(y.x3) + y.x2; };
    const auto qe = rescale(q, x, eps);
    const double direct = pmean_on_ball(u, qe, Exponent(3.0)).value;
    const double pulled =
        pmean_on_ball([&](const Point& z) { return u(group_mul(x, dilate(eps, z))); }, q, Exponent(3.0)).value;
    CHECK(direct == doctest::Approx(pulled).epsilon(1e-10));
}
