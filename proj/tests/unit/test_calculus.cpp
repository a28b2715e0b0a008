#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "hpmean/calculus.hpp"
#include "hpmean/errors.hpp"
#include "hpmean/fields.hpp"
#include "hpmean/harmonics.hpp"

using namespace hpmean;

namespace {

ScalarField without_derivatives(const ScalarField& f) {
    ScalarField g;
    g.eval = f.eval;
    return g;
}

// Symbolic X1, X2 of x1^2 x2 + x3^2 with X1 = d1 - x2/2 d3, X2 = d2 + x1/2 d3.
HorizontalVector mixed_cubic_gradient(const Point& x) {
    return {2.0 * x.x1 * x.x2 - x.x2 * x.x3, x.x1 * x.x1 + x.x1 * x.x3};
}

}  // namespace

TEST_CASE("horizontal gradient examples") {
    const auto g = horizontal_gradient(fields::linear(0, 0, 1), {1, 0, 0});
    CHECK(g.c1 == doctest::Approx(0.0));
    CHECK(g.c2 == doctest::Approx(0.5));
    const auto h = horizontal_gradient(fields::linear(1, 0, 0), {0.3, -2.0, 5.0});
    CHECK(h.c1 == doctest::Approx(1.0));
    CHECK(h.c2 == doctest::Approx(0.0));
}

TEST_CASE("finite differences agree with the symbolic gradient") {
    const ScalarField fd = without_derivatives(fields::mixed_cubic());
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int t = 0; t < 50; ++t) {
        const Point x{u(rng), u(rng), u(rng)};
        const auto num = horizontal_gradient(fd, x);
        const auto exact = mixed_cubic_gradient(x);
        CHECK(std::fabs(num.c1 - exact.c1) < 1e-8);
        CHECK(std::fabs(num.c2 - exact.c2) < 1e-8);
        const auto ana = horizontal_gradient(fields::mixed_cubic(), x);
        CHECK(std::fabs(ana.c1 - exact.c1) < 1e-13);
        CHECK(std::fabs(ana.c2 - exact.c2) < 1e-13);
    }
}

TEST_CASE("sub-Laplacians") {
    const Point x{1, 0, 0};
    CHECK(delta_H(fields::horizontal_square(), x) == doctest::Approx(4.0));
    CHECK(delta_H(without_derivatives(fields::horizontal_square()), x) == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(std::fabs(delta_H(fields::linear(0, 0, 1), {0.4, 0.7, 0.1})) < 1e-14);
    CHECK(std::fabs(delta_H_inf(fields::linear(1, 0, 0), {0.4, 0.7, 0.1})) < 1e-14);
    // x1^2 + x2^2 has horizontal Hessian 2I, so the infinity Laplacian is 2 wherever the gradient is nonzero.
    CHECK(delta_H_inf(fields::horizontal_square(), {0.3, 0.8, -1}) == doctest::Approx(2.0));
    CHECK(normalized_p_laplacian(fields::horizontal_square(), x, Exponent(2.0)) == doctest::Approx(4.0));
    CHECK(normalized_p_laplacian(fields::horizontal_square(), x, Exponent(5.0)) == doctest::Approx(3 * 2.0 + 4.0));
    for (double p : {1.5, 2.0, 7.0})
        CHECK(std::fabs(normalized_p_laplacian(fields::linear(1, 0, 0), x, Exponent(p))) < 1e-14);
    CHECK_THROWS_AS(delta_H_inf(fields::horizontal_square(), {0, 0, 1}), VanishingGradient);
    // Euclidean mode reduces to the coordinate Laplacian.
    CHECK(delta_H(fields::euclidean_square(), {0.2, 0.2, 0.2}, Metric::Euclidean3) == doctest::Approx(6.0));
}

TEST_CASE("gauge power -xi is p-harmonic off the axis (finite differences)") {
    const Exponent p(3.0);
    const ScalarField f = without_derivatives(fields::gauge_power(-xi(p)));
    CHECK(std::fabs(normalized_p_laplacian(f, {1, 0, 0}, p)) < 1e-6);
}

TEST_CASE("c_p against the Gamma function of the standard library") {
    CHECK(c_p(Exponent(2.0)) == doctest::Approx(1.0 / (3.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(c_p(Exponent::infinity()) == 0.5);
    for (double p : {1.5, 2.0, 3.0, 6.0, 40.0, 99.0, 150.0, 1e4}) {
        const double r = std::exp(std::lgamma(p / 4 + 1.5) - std::lgamma(p / 4 + 1.0));
        const double ref = 2.0 / ((p + 2) * (p + 4)) * r * r;
        CHECK(c_p(Exponent(p)) == doctest::Approx(ref).epsilon(1e-12));
    }
    // The Gamma ratio grows like sqrt(p/4), so (p - 2) c_p tends to 1/2.
    CHECK(std::fabs((1e6 - 2.0) * c_p(Exponent(1e6)) - 0.5) < 1e-5);
    CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-13));
    CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
}

TEST_CASE("Euclidean expansion constant") {
    CHECK(euclidean_amvp_constant(3, 2.0) == doctest::Approx(0.1));
    CHECK(euclidean_amvp_constant(2, 2.0) == doctest::Approx(0.125));
    CHECK(euclidean_amvp_constant(3, 5.0) == doctest::Approx(0.0625));
}
