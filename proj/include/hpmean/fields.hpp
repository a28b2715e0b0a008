#pragma once

#include <string>
#include <vector>

#include "hpmean/calculus.hpp"

namespace hpmean::fields {

ScalarField constant(double c);
/// a1 x1 + a2 x2 + a3 x3 + c
ScalarField linear(double a1, double a2, double a3, double c = 0.0);
/// x1^2 + x2^2
ScalarField horizontal_square();
/// x1^2 + x2^2 + x3^2
ScalarField euclidean_square();
/// x1^2 x2 + x3^2, a cubic with mixed horizontal and vertical terms.
ScalarField mixed_cubic();
/// Korányi gauge raised to `alpha` (about the origin). Singular at the origin for alpha < 4.
ScalarField gauge_power(double alpha);
/// Natural logarithm of the Korányi gauge.
ScalarField gauge_log();

/// x -> f(c^-1 * x) (Heisenberg) or f(x - c) (Euclidean), derivatives carried along.
ScalarField left_translated(const ScalarField& f, const Point& c, Metric metric = Metric::HeisenbergKoranyi);

/// a f + b g + c
ScalarField combine(double a, const ScalarField& f, double b, const ScalarField& g, double c = 0.0);

/// Named fields used by the command-line studies: "x1", "x3", "x1sq_x2sq",
/// "euclid_sq", "mixed_cubic", "gauge_pow:<alpha>". Throws InvalidArgument otherwise.
ScalarField by_name(const std::string& name);
std::vector<std::string> registry_names();

}  // namespace hpmean::fields
