#pragma once

#include <vector>

#include "hpmean/calculus.hpp"
#include "hpmean/geometry.hpp"
#include "hpmean/pmean.hpp"

namespace hpmean {

/// (4 - p) / (p - 1); requires finite p > 1.
double xi(const Exponent& p);

/// U(x) = a |c^-1 * x|^(-xi) + b, or a log|c^-1 * x| + b when p = 4.
struct RadialSolution {
    Point center;
    double coeff_a = 0.0;
    double coeff_b = 0.0;
    Exponent p{2.0};
};

/// Throws InvalidArgument at the centre.
double radial_eval(const RadialSolution& sol, const Point& x);
/// The same function with analytic derivatives.
ScalarField radial_field(const RadialSolution& sol);

/// Radial solution taking value_inner on gauge radius r_inner and value_outer on r_outer.
RadialSolution fit_radial_coeffs(const Point& center, double r_inner, double r_outer, double value_inner,
                                 double value_outer, const Exponent& p);

/// v(x) = |q0^-1 * x|^s with s >= 4.
struct PerturbationFn {
    Point q0;
    double s = 4.0;
};

double perturbation_eval(const PerturbationFn& v, const Point& x);
ScalarField perturbation_field(const PerturbationFn& v);

/// Contraction factor of one boundary iteration step. Requires mu in (0, 1) and
/// finite p >= 2; at p = 4 the xi -> 0 limit is returned.
double theta(double mu, const Exponent& p);
/// True where theta() falls back to the logarithmic limit.
bool theta_uses_log_limit(const Exponent& p);

struct BoundaryIterationParams {
    double mu = 0.5;
    Exponent p{2.0};
    double delta = 1.0;
    double eta = 0.1;

    void validate() const;
};

struct IterationStep {
    int k = 1;
    double delta_k = 0.0;
    double M_k = 0.0;
};

/// delta_k = delta / 4^(k-1) and M_k = N + theta^k (M - N) for k = 1..count.
std::vector<IterationStep> iteration_schedule(const BoundaryIterationParams& params, double M_eps, double N_eps,
                                              int count);

/// Smallest integer k >= 1 with k > log_theta(eta / 2 / (sup_G - inf_G + 1)); a logarithm
/// within 1e-9 of an integer n gives n + 1. A zero gap needs no iteration and gives 1.
int k0(double eta, double sup_G, double inf_G, double theta);

}  // namespace hpmean
