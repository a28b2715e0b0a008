#pragma once

#include <array>
#include <functional>

#include "hpmean/geometry.hpp"
#include "hpmean/pmean.hpp"

namespace hpmean {

/// Value, Euclidean gradient and Euclidean Hessian of a scalar field at a point.
struct Derivatives {
    double value = 0.0;
    std::array<double, 3> gradient{};
    std::array<std::array<double, 3>, 3> hessian{};
};

/// A scalar field on R^3, optionally with analytic first and second derivatives.
struct ScalarField {
    std::function<double(const Point&)> eval;
    std::function<Derivatives(const Point&)> derivatives;

    double operator()(const Point& x) const { return eval(x); }
    bool has_derivatives() const { return static_cast<bool>(derivatives); }
};

/// Components of a horizontal vector along X1 and X2.
struct HorizontalVector {
    double c1 = 0.0;
    double c2 = 0.0;

    double norm() const;
};

/// 0 selects the default steps: eps^(1/3)(1+|x|) for gradients, eps^(1/4)(1+|x|)
/// for Hessians.
struct DifferenceStep {
    double gradient = 0.0;
    double hessian = 0.0;
};

/// Euclidean derivatives: analytic when the field provides them, central differences otherwise.
Derivatives euclidean_derivatives(const ScalarField& f, const Point& x, DifferenceStep step = {});

/// Derivatives of f along a left-invariant frame: X1, X2 in the Heisenberg group,
/// the coordinate directions in R^3. `second` is the symmetrised Hessian (ViVj + VjVi)/2.
struct FrameDerivatives {
    int dimension = 2;
    std::array<double, 3> first{};
    std::array<std::array<double, 3>, 3> second{};
};

FrameDerivatives frame_derivatives(const ScalarField& f, const Point& x, Metric metric,
                                   DifferenceStep step = {});

/// (X1 f, X2 f) at x.
HorizontalVector horizontal_gradient(const ScalarField& f, const Point& x, DifferenceStep step = {});

/// X1^2 f + X2^2 f (the coordinate Laplacian in Euclidean mode).
double delta_H(const ScalarField& f, const Point& x, Metric metric = Metric::HeisenbergKoranyi,
               DifferenceStep step = {});

/// <D^2_sym f nu, nu> with nu the normalised horizontal gradient.
/// Throws VanishingGradient where the horizontal gradient vanishes.
double delta_H_inf(const ScalarField& f, const Point& x, Metric metric = Metric::HeisenbergKoranyi,
                   DifferenceStep step = {});

/// (p-2) delta_H_inf + delta_H; delta_H_inf alone for p = infinity.
double normalized_p_laplacian(const ScalarField& f, const Point& x, const Exponent& p,
                              Metric metric = Metric::HeisenbergKoranyi, DifferenceStep step = {});

/// Lanczos approximations of Gamma and log Gamma for positive arguments.
double gamma_fn(double x);
double log_gamma(double x);

/// 2/((p+2)(p+4)) * (Gamma(p/4+3/2)/Gamma(p/4+1))^2; 1/2 for p = infinity.
double c_p(const Exponent& p);

/// 1/(2(n+p)): the mean-value expansion constant of Euclidean balls in R^n.
double euclidean_amvp_constant(int n, double p);

}  // namespace hpmean
