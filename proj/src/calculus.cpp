#include "hpmean/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hpmean/errors.hpp"

namespace hpmean {

double HorizontalVector::norm() const { return std::hypot(c1, c2); }

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double coord(const Point& x, int i) { return i == 0 ? x.x1 : (i == 1 ? x.x2 : x.x3); }

Point shifted(Point x, int i, double d) {
    if (i == 0) x.x1 += d;
    else if (i == 1) x.x2 += d;
    else x.x3 += d;
    return x;
}

Point shifted(const Point& x, int i, double di, int j, double dj) { return shifted(shifted(x, i, di), j, dj); }

Derivatives finite_differences(const ScalarField& f, const Point& x, DifferenceStep step) {
    Derivatives d;
    d.value = f(x);
    for (int i = 0; i < 3; ++i) {
        const double scale = 1.0 + std::fabs(coord(x, i));
        const double hg = step.gradient > 0.0 ? step.gradient : std::cbrt(kEps) * scale;
        d.gradient[i] = (f(shifted(x, i, hg)) - f(shifted(x, i, -hg))) / (2.0 * hg);
    }
    std::array<double, 3> hh{};
    for (int i = 0; i < 3; ++i)
        hh[i] = step.hessian > 0.0 ? step.hessian : std::sqrt(std::sqrt(kEps)) * (1.0 + std::fabs(coord(x, i)));
    for (int i = 0; i < 3; ++i) {
        d.hessian[i][i] = (f(shifted(x, i, hh[i])) - 2.0 * d.value + f(shifted(x, i, -hh[i]))) / (hh[i] * hh[i]);
        for (int j = i + 1; j < 3; ++j) {
            const double v = (f(shifted(x, i, hh[i], j, hh[j])) - f(shifted(x, i, hh[i], j, -hh[j])) -
                              f(shifted(x, i, -hh[i], j, hh[j])) + f(shifted(x, i, -hh[i], j, -hh[j]))) /
                             (4.0 * hh[i] * hh[j]);
            d.hessian[i][j] = v;
            d.hessian[j][i] = v;
        }
    }
    return d;
}

double hessian_scale(const FrameDerivatives& fd) {
    double s = 0.0;
    for (int i = 0; i < fd.dimension; ++i)
        for (int j = 0; j < fd.dimension; ++j) s = std::max(s, std::fabs(fd.second[i][j]));
    return s;
}

double frame_laplacian(const FrameDerivatives& fd) {
    double s = 0.0;
    for (int i = 0; i < fd.dimension; ++i) s += fd.second[i][i];
    return s;
}

double frame_infinity_laplacian(const FrameDerivatives& fd) {
    double n2 = 0.0;
    for (int i = 0; i < fd.dimension; ++i) n2 += fd.first[i] * fd.first[i];
    const double n = std::sqrt(n2);
    if (n < 1e-8 * (1.0 + hessian_scale(fd)))
        throw VanishingGradient("horizontal gradient vanishes (|grad_H f| = " + std::to_string(n) + ")");
    double s = 0.0;
    for (int i = 0; i < fd.dimension; ++i)
        for (int j = 0; j < fd.dimension; ++j) s += fd.second[i][j] * fd.first[i] * fd.first[j];
    return s / n2;
}

// Lanczos coefficients, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_series(double z) {
    double a = kLanczos[0];
    for (std::size_t k = 1; k < kLanczos.size(); ++k) a += kLanczos[k] / (z + static_cast<double>(k));
    return a;
}

}  // namespace

Derivatives euclidean_derivatives(const ScalarField& f, const Point& x, DifferenceStep step) {
    if (f.has_derivatives()) return f.derivatives(x);
    return finite_differences(f, x, step);
}

FrameDerivatives frame_derivatives(const ScalarField& f, const Point& x, Metric metric, DifferenceStep step) {
    const Derivatives d = euclidean_derivatives(f, x, step);
    FrameDerivatives fd;
    if (metric == Metric::Euclidean3) {
        fd.dimension = 3;
        fd.first = d.gradient;
        fd.second = d.hessian;
        return fd;
    }
    // X1 = (1, 0, -x2/2), X2 = (0, 1, x1/2). Both are constant along each other's
    // flow direction, so the symmetrised second derivatives are V_i^T H V_j.
    const std::array<std::array<double, 3>, 2> frame = {{{1.0, 0.0, -0.5 * x.x2}, {0.0, 1.0, 0.5 * x.x1}}};
    fd.dimension = 2;
    for (int i = 0; i < 2; ++i) {
        double g = 0.0;
        for (int a = 0; a < 3; ++a) g += frame[i][a] * d.gradient[a];
        fd.first[i] = g;
        for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) s += frame[i][a] * d.hessian[a][b] * frame[j][b];
            fd.second[i][j] = s;
        }
    }
    return fd;
}

HorizontalVector horizontal_gradient(const ScalarField& f, const Point& x, DifferenceStep step) {
    const FrameDerivatives fd = frame_derivatives(f, x, Metric::HeisenbergKoranyi, step);
    return {fd.first[0], fd.first[1]};
}

double delta_H(const ScalarField& f, const Point& x, Metric metric, DifferenceStep step) {
    return frame_laplacian(frame_derivatives(f, x, metric, step));
}

double delta_H_inf(const ScalarField& f, const Point& x, Metric metric, DifferenceStep step) {
    return frame_infinity_laplacian(frame_derivatives(f, x, metric, step));
}

double normalized_p_laplacian(const ScalarField& f, const Point& x, const Exponent& p, Metric metric,
                              DifferenceStep step) {
    const FrameDerivatives fd = frame_derivatives(f, x, metric, step);
    const double inf_lap = frame_infinity_laplacian(fd);
    if (p.is_infinite()) return inf_lap;
    return (p.value() - 2.0) * inf_lap + frame_laplacian(fd);
}

double log_gamma(double x) {
    require(x > 0.0, "log_gamma: argument must be positive");
    if (x < 0.5) {
        // Reflection keeps the series in its accurate range.
        return std::log(std::numbers::pi / std::fabs(std::sin(std::numbers::pi * x))) - log_gamma(1.0 - x);
    }
    const double z = x - 1.0;
    const double t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(lanczos_series(z));
}

double gamma_fn(double x) {
    require(x > 0.0, "gamma_fn: argument must be positive");
    if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
    if (x > 20.0) return std::exp(log_gamma(x));
    const double z = x - 1.0;
    const double t = z + kLanczosG + 0.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * lanczos_series(z);
}

double c_p(const Exponent& p) {
    if (p.is_infinite()) return 0.5;
    const double pv = p.value();
    require(pv > 1.0, "c_p: p must exceed 1");
    const double a = 0.25 * pv + 1.5;
    const double b = 0.25 * pv + 1.0;
    const double ratio = pv < 100.0 ? gamma_fn(a) / gamma_fn(b) : std::exp(log_gamma(a) - log_gamma(b));
    return 2.0 / ((pv + 2.0) * (pv + 4.0)) * ratio * ratio;
}

double euclidean_amvp_constant(int n, double p) {
    require(n >= 1, "euclidean_amvp_constant: n must be >= 1");
    require(p > 1.0, "euclidean_amvp_constant: p must exceed 1");
    return 1.0 / (2.0 * (n + p));
}

}  // namespace hpmean
