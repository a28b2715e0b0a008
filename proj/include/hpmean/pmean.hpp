#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hpmean/geometry.hpp"

namespace hpmean {

/// Exponent p of a natural p-mean: a real p > 1, the value 1 (continuous data
/// only) or infinity.
class Exponent {
public:
    /// Throws InvalidArgument unless p >= 1 (p = infinity allowed).
    explicit Exponent(double p);
    static Exponent infinity();

    double value() const { return value_; }
    bool is_infinite() const;
    bool is_median() const { return value_ == 1.0; }

private:
    double value_;
};

/// Non-owning weighted samples: values[i] carries weight weights[i] >= 0.
struct SampleView {
    std::span<const double> values;
    std::span<const double> weights;
    /// Samples come from a continuous function; required for p = 1.
    bool continuous_origin = false;
};

/// Owning, validated weighted samples.
class SampleSet {
public:
    SampleSet(std::vector<double> values, std::vector<double> weights, bool continuous_origin = false);
    /// Unit weights.
    explicit SampleSet(std::vector<double> values, bool continuous_origin = false);

    SampleView view() const { return {values_, weights_, continuous_origin_}; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    std::vector<double> values_;
    std::vector<double> weights_;
    bool continuous_origin_;
};

/// |s|^(p-2) s with h(0) = 0. Throws for infinite p.
double h_power(double s, const Exponent& p);

/// sum_i w_i h(u_i - lambda). Nonincreasing in lambda.
double pmean_residual(const SampleView& samples, double lambda, const Exponent& p);

enum class PMeanMethod {
    Auto,       ///< closed forms for p = 1, 2, infinity; safeguarded Newton otherwise
    Bisection,  ///< bisection for every finite p > 1
    Newton,     ///< safeguarded Newton for every finite p > 1
};

struct PMeanOptions {
    double tol = 1e-12;
    PMeanMethod method = PMeanMethod::Auto;
    /// Optional starting bracket; used only if it provably contains the root.
    std::optional<std::pair<double, double>> bracket;
    /// Optional first iterate for the Newton search (clamped to the bracket).
    std::optional<double> start;
    int max_iterations = 2000;
};

struct PMeanResult {
    double value = 0.0;
    /// pmean_residual at `value` (0 for closed forms).
    double residual = 0.0;
    /// Residual of the samples rescaled to unit range, divided by total weight.
    double relative_residual = 0.0;
    int iterations = 0;
};

/// Natural p-mean of weighted samples. Always min <= value <= max over the support.
PMeanResult pmean(const SampleView& samples, const Exponent& p, const PMeanOptions& options = {});

/// Weighted median; a cumulative weight of exactly one half selects the midpoint
/// of the two straddling values.
double weighted_median(const SampleView& samples);
double weighted_mean(const SampleView& samples);
/// (min + max) / 2 over samples with positive weight.
double midrange(const SampleView& samples);

/// p-mean of f sampled on the quadrature nodes with the quadrature weights.
PMeanResult pmean_on_ball(const std::function<double(const Point&)>& f, const BallQuadrature& q,
                          const Exponent& p, const PMeanOptions& options = {});

}  // namespace hpmean
