#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "hpmean/errors.hpp"
#include "hpmean/geometry.hpp"

using namespace hpmean;

namespace {

Point random_point(std::mt19937_64& rng, double scale = 2.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng), u(rng)};
}

void check_point(const Point& a, const Point& b, double tol = 1e-15) {
    CHECK(a.x1 == doctest::Approx(b.x1).epsilon(tol));
    CHECK(a.x2 == doctest::Approx(b.x2).epsilon(tol));
    CHECK(a.x3 == doctest::Approx(b.x3).epsilon(tol));
}

}  // namespace

TEST_CASE("group law examples") {
    check_point(group_mul({1, 2, 3}, {0, 0, 0}), {1, 2, 3});
    check_point(group_mul({1, 0, 0}, {0, 1, 0}), {1, 1, 0.5});
    check_point(group_mul({1, 2, 3}, {-1, -2, -3}), {0, 0, 0});
    check_point(group_inv({0, 0, 0}), {0, 0, 0});
    check_point(group_inv({1, 2, 3}), {-1, -2, -3});
}

TEST_CASE("inverse, associativity and left invariance on random points") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 100; ++t) {
        const Point a = random_point(rng), b = random_point(rng), c = random_point(rng);
        const Point e = group_mul(group_inv(a), a);
        CHECK(std::fabs(e.x1) + std::fabs(e.x2) + std::fabs(e.x3) <= 1e-15);
        const Point l = group_mul(group_mul(a, b), c);
        const Point r = group_mul(a, group_mul(b, c));
        CHECK(std::fabs(l.x3 - r.x3) <= 1e-12);
        const double d = distance(b, c, Metric::HeisenbergKoranyi);
        const double dz = distance(group_mul(a, b), group_mul(a, c), Metric::HeisenbergKoranyi);
        CHECK(std::fabs(d - dz) <= 1e-12);
    }
}

TEST_CASE("gauge examples") {
    const Metric H = Metric::HeisenbergKoranyi;
    CHECK(gauge({1, 0, 0}, H) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(gauge({0, 0, 1}, H) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(gauge({1, 1, 0}, H) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(gauge({0, 0, 0}, H) == 0.0);
    CHECK(distance({0, 0, 0}, {0, 0, 1}, H) == doctest::Approx(2.0));
    CHECK(gauge({3, 4, 0}, Metric::Euclidean3) == doctest::Approx(5.0));
}

TEST_CASE("dilations are homogeneous for the gauge and the distance") {
    check_point(dilate(2, {1, 1, 1}), {2, 2, 4});
    check_point(dilate(1, {0.3, -0.2, 0.7}), {0.3, -0.2, 0.7});
    CHECK_THROWS_AS(dilate(0.0, {1, 0, 0}), InvalidArgument);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lam(0.1, 5.0);
    for (int t = 0; t < 100; ++t) {
        const Point a = random_point(rng), b = random_point(rng);
        const double l = lam(rng);
        const Metric H = Metric::HeisenbergKoranyi;
        CHECK(gauge(dilate(3.0, a), H) / gauge(a, H) == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(distance(dilate(l, a), dilate(l, b), H) == doctest::Approx(l * distance(a, b, H)).epsilon(1e-12));
    }
}

TEST_CASE("Koranyi triangle inequality on random triples") {
    std::mt19937_64 rng(13);
    const Metric H = Metric::HeisenbergKoranyi;
    for (int t = 0; t < 1000; ++t) {
        const Point a = random_point(rng), b = random_point(rng), c = random_point(rng);
        CHECK(distance(a, c, H) <= distance(a, b, H) + distance(b, c, H) + 1e-12);
    }
}

TEST_CASE("lattice ball volumes") {
    const double heis = std::numbers::pi * std::numbers::pi / 8.0;
    QuadratureOptions opt;
    opt.resolution = 200;
    const auto q1 = ball_quadrature({0, 0, 0}, 1.0, Metric::HeisenbergKoranyi, opt);
    CHECK(std::fabs(ball_volume(q1) / heis - 1.0) < 0.01);
    const auto q2 = ball_quadrature({0.5, -1, 2}, 2.0, Metric::HeisenbergKoranyi, opt);
    CHECK(std::fabs(ball_volume(q2) / ball_volume(q1) / 16.0 - 1.0) < 0.005);
    const auto e1 = ball_quadrature({0, 0, 0}, 1.0, Metric::Euclidean3, opt);
    CHECK(std::fabs(ball_volume(e1) / (4.0 * std::numbers::pi / 3.0) - 1.0) < 0.01);
    const auto e2 = ball_quadrature({0, 0, 0}, 2.0, Metric::Euclidean3, opt);
    CHECK(std::fabs(ball_volume(e2) / ball_volume(e1) / 8.0 - 1.0) < 0.005);
    for (double w : q1.weights) CHECK(w > 0.0);
}

TEST_CASE("lattice nodes lie inside the ball and the box") {
    QuadratureOptions opt;
    opt.resolution = 40;
    const Point c{0.2, 0.1, -0.3};
    const auto q = ball_quadrature(c, 0.7, Metric::HeisenbergKoranyi, opt);
    for (const Point& x : q.nodes) CHECK(distance(c, x, Metric::HeisenbergKoranyi) < 0.7);
    CHECK_THROWS_AS(ball_quadrature(c, -1.0, Metric::HeisenbergKoranyi, opt), InvalidArgument);
}

TEST_CASE("Monte-Carlo quadrature is seeded and order independent") {
    QuadratureOptions opt;
    opt.scheme = QuadratureScheme::MonteCarlo;
    opt.resolution = 20000;
    opt.seed = 42;
    opt.execution = Execution::Serial;
    const auto a = ball_quadrature({0, 0, 0}, 1.0, Metric::HeisenbergKoranyi, opt);
    opt.execution = Execution::Parallel;
    const auto b = ball_quadrature({0, 0, 0}, 1.0, Metric::HeisenbergKoranyi, opt);
    CHECK(a.nodes == b.nodes);
    CHECK(a.weights == b.weights);
    opt.seed = 43;
    const auto c = ball_quadrature({0, 0, 0}, 1.0, Metric::HeisenbergKoranyi, opt);
    CHECK_FALSE(a.nodes == c.nodes);
    for (const Point& x : a.nodes) CHECK(gauge(x, Metric::HeisenbergKoranyi) < 1.0);
    const double heis = std::numbers::pi * std::numbers::pi / 8.0;
    CHECK(std::fabs(ball_volume(a) / heis - 1.0) < 0.03);
}

TEST_CASE("rescale maps the unit ball onto a dilated translate") {
    QuadratureOptions opt;
    opt.resolution = 32;
    const auto unit = ball_quadrature({0, 0, 0}, 1.0, Metric::HeisenbergKoranyi, opt);
    const Point c{1.0, -0.5, 0.25};
    const auto q = rescale(unit, c, 0.3);
    REQUIRE(q.size() == unit.size());
    CHECK(ball_volume(q) == doctest::Approx(ball_volume(unit) * std::pow(0.3, 4)).epsilon(1e-12));
    for (std::size_t i = 0; i < q.size(); ++i)
        CHECK(distance(c, q.nodes[i], Metric::HeisenbergKoranyi) ==
              doctest::Approx(0.3 * gauge(unit.nodes[i], Metric::HeisenbergKoranyi)).epsilon(1e-12));
}

TEST_CASE("serial and parallel lattices agree") {
    QuadratureOptions opt;
    opt.resolution = 64;
    opt.execution = Execution::Serial;
    const auto a = ball_quadrature({0.1, 0, 0}, 1.0, Metric::HeisenbergKoranyi, opt);
    opt.execution = Execution::Parallel;
    const auto b = ball_quadrature({0.1, 0, 0}, 1.0, Metric::HeisenbergKoranyi, opt);
    CHECK(a.nodes == b.nodes);
}
