#include "hpmean/pmean.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hpmean/errors.hpp"

namespace hpmean {

Exponent::Exponent(double p) : value_(p) {
    if (std::isnan(p) || p < 1.0)
        throw InvalidArgument("exponent p must satisfy p >= 1 (or be infinite), got " + std::to_string(p));
}

Exponent Exponent::infinity() { return Exponent(std::numeric_limits<double>::infinity()); }

bool Exponent::is_infinite() const { return std::isinf(value_); }

namespace {

void validate(std::span<const double> values, std::span<const double> weights) {
    require(!values.empty(), "sample set must not be empty");
    require(values.size() == weights.size(), "sample values and weights differ in length");
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        require(std::isfinite(values[i]), "sample values must be finite");
        require(std::isfinite(weights[i]) && weights[i] >= 0.0, "sample weights must be finite and >= 0");
        total += weights[i];
    }
    require(total > 0.0, "total sample weight must be positive");
}

// h(s) specialised on the integer part of p - 2 so the inner loops stay branch-free.
enum class PowerKind { Linear, Abs1, Cube, Abs3, Pow4, General };

PowerKind power_kind(double p) {
    if (p == 2.0) return PowerKind::Linear;
    if (p == 3.0) return PowerKind::Abs1;
    if (p == 4.0) return PowerKind::Cube;
    if (p == 5.0) return PowerKind::Abs3;
    if (p == 6.0) return PowerKind::Pow4;
    return PowerKind::General;
}

template <PowerKind K>
inline double h_kernel(double s, double pm2) {
    if constexpr (K == PowerKind::Linear) {
        return s;
    } else if constexpr (K == PowerKind::Abs1) {
        return std::fabs(s) * s;
    } else if constexpr (K == PowerKind::Cube) {
        return s * s * s;
    } else if constexpr (K == PowerKind::Abs3) {
        const double a = std::fabs(s);
        return a * a * a * s;
    } else if constexpr (K == PowerKind::Pow4) {
        const double s2 = s * s;
        return s2 * s2 * s;
    } else {
        if (s == 0.0) return 0.0;
        return std::pow(std::fabs(s), pm2) * s;
    }
}

// h'(s) / (p - 1) = |s|^(p-2)
template <PowerKind K>
inline double slope_kernel(double s, double pm2) {
    if constexpr (K == PowerKind::Linear) {
        return 1.0;
    } else if constexpr (K == PowerKind::Abs1) {
        return std::fabs(s);
    } else if constexpr (K == PowerKind::Cube) {
        return s * s;
    } else if constexpr (K == PowerKind::Abs3) {
        const double a = std::fabs(s);
        return a * a * a;
    } else if constexpr (K == PowerKind::Pow4) {
        const double s2 = s * s;
        return s2 * s2;
    } else {
        if (s == 0.0) return pm2 < 0.0 ? std::numeric_limits<double>::infinity() : (pm2 == 0.0 ? 1.0 : 0.0);
        return std::pow(std::fabs(s), pm2);
    }
}

struct ResidualSlope {
    double residual;
    double slope;  // -(d residual / d lambda) * scale / (p - 1)
};

template <PowerKind K>
ResidualSlope scaled_residual_slope(std::span<const double> u, std::span<const double> w, double lambda,
                                    double inv_scale, double pm2) {
    double acc = 0.0;
    double der = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double s = (u[i] - lambda) * inv_scale;
        const double a = slope_kernel<K>(s, pm2);
        acc += w[i] * a * s;
        der += w[i] * a;
    }
    return {acc, der};
}

ResidualSlope scaled_residual_slope(PowerKind kind, std::span<const double> u, std::span<const double> w,
                                    double lambda, double inv_scale, double pm2) {
    switch (kind) {
        case PowerKind::Linear: return scaled_residual_slope<PowerKind::Linear>(u, w, lambda, inv_scale, pm2);
        case PowerKind::Abs1: return scaled_residual_slope<PowerKind::Abs1>(u, w, lambda, inv_scale, pm2);
        case PowerKind::Cube: return scaled_residual_slope<PowerKind::Cube>(u, w, lambda, inv_scale, pm2);
        case PowerKind::Abs3: return scaled_residual_slope<PowerKind::Abs3>(u, w, lambda, inv_scale, pm2);
        case PowerKind::Pow4: return scaled_residual_slope<PowerKind::Pow4>(u, w, lambda, inv_scale, pm2);
        case PowerKind::General: break;
    }
    return scaled_residual_slope<PowerKind::General>(u, w, lambda, inv_scale, pm2);
}

// sum_i w_i h((u_i - lambda) * inv_scale)
template <PowerKind K>
double scaled_residual(std::span<const double> u, std::span<const double> w, double lambda,
                       double inv_scale, double pm2) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += w[i] * h_kernel<K>((u[i] - lambda) * inv_scale, pm2);
    return acc;
}

double scaled_residual(PowerKind kind, std::span<const double> u, std::span<const double> w,
                       double lambda, double inv_scale, double pm2) {
    switch (kind) {
        case PowerKind::Linear: return scaled_residual<PowerKind::Linear>(u, w, lambda, inv_scale, pm2);
        case PowerKind::Abs1: return scaled_residual<PowerKind::Abs1>(u, w, lambda, inv_scale, pm2);
        case PowerKind::Cube: return scaled_residual<PowerKind::Cube>(u, w, lambda, inv_scale, pm2);
        case PowerKind::Abs3: return scaled_residual<PowerKind::Abs3>(u, w, lambda, inv_scale, pm2);
        case PowerKind::Pow4: return scaled_residual<PowerKind::Pow4>(u, w, lambda, inv_scale, pm2);
        case PowerKind::General: break;
    }
    return scaled_residual<PowerKind::General>(u, w, lambda, inv_scale, pm2);
}

struct Support {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double total_weight = 0.0;
    double max_abs = 0.0;
};

Support support_of(const SampleView& s) {
    Support out;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        out.total_weight += s.weights[i];
        if (s.weights[i] <= 0.0) continue;
        out.lo = std::min(out.lo, s.values[i]);
        out.hi = std::max(out.hi, s.values[i]);
    }
    out.max_abs = std::max(std::fabs(out.lo), std::fabs(out.hi));
    return out;
}

}  // namespace

SampleSet::SampleSet(std::vector<double> values, std::vector<double> weights, bool continuous_origin)
    : values_(std::move(values)), weights_(std::move(weights)), continuous_origin_(continuous_origin) {
    validate(values_, weights_);
}

SampleSet::SampleSet(std::vector<double> values, bool continuous_origin)
    : values_(std::move(values)), continuous_origin_(continuous_origin) {
    weights_.assign(values_.size(), 1.0);
    validate(values_, weights_);
}

double h_power(double s, const Exponent& p) {
    require(!p.is_infinite(), "h_power: p must be finite");
    if (s == 0.0) return 0.0;
    return std::pow(std::fabs(s), p.value() - 2.0) * s;
}

double pmean_residual(const SampleView& samples, double lambda, const Exponent& p) {
    require(!p.is_infinite(), "pmean_residual: p must be finite");
    require(samples.values.size() == samples.weights.size(), "sample values and weights differ in length");
    return scaled_residual(power_kind(p.value()), samples.values, samples.weights, lambda, 1.0,
                           p.value() - 2.0);
}

double weighted_mean(const SampleView& samples) {
    double sw = 0.0;
    double swu = 0.0;
    for (std::size_t i = 0; i < samples.values.size(); ++i) {
        sw += samples.weights[i];
        swu += samples.weights[i] * samples.values[i];
    }
    const Support sup = support_of(samples);
    return std::clamp(swu / sw, sup.lo, sup.hi);
}

double midrange(const SampleView& samples) {
    const Support sup = support_of(samples);
    return 0.5 * (sup.lo + sup.hi);
}

double weighted_median(const SampleView& samples) {
    std::vector<std::size_t> order;
    order.reserve(samples.values.size());
    for (std::size_t i = 0; i < samples.values.size(); ++i)
        if (samples.weights[i] > 0.0) order.push_back(i);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return samples.values[a] < samples.values[b]; });
    double total = 0.0;
    for (std::size_t i : order) total += samples.weights[i];
    const double half = 0.5 * total;
    const double tie = 1e-14 * total;
    double cumulative = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        cumulative += samples.weights[order[k]];
        const double v = samples.values[order[k]];
        if (std::fabs(cumulative - half) <= tie) {
            // Next strictly larger value straddles the half-way point.
            for (std::size_t m = k + 1; m < order.size(); ++m)
                if (samples.values[order[m]] > v) return 0.5 * (v + samples.values[order[m]]);
            return v;
        }
        if (cumulative > half) return v;
    }
    return samples.values[order.back()];
}

PMeanResult pmean(const SampleView& samples, const Exponent& p, const PMeanOptions& options) {
    validate(samples.values, samples.weights);
    require(options.tol > 0.0, "pmean: tol must be positive");
    const Support sup = support_of(samples);
    PMeanResult result;

    if (sup.lo == sup.hi) {
        result.value = sup.lo;
        return result;
    }
    if (p.is_infinite()) {
        result.value = 0.5 * (sup.lo + sup.hi);
        return result;
    }
    if (p.is_median()) {
        require(samples.continuous_origin, "pmean: p = 1 requires samples of a continuous function");
        result.value = weighted_median(samples);
        return result;
    }
    const double pv = p.value();
    const PowerKind kind = power_kind(pv);
    const double pm2 = pv - 2.0;
    const double range = sup.hi - sup.lo;
    const double inv_range = 1.0 / range;
    if (options.method == PMeanMethod::Auto && pv == 2.0) {
        result.value = weighted_mean(samples);
        result.residual = pmean_residual(samples, result.value, p);
        result.relative_residual = scaled_residual(kind, samples.values, samples.weights, result.value,
                                                   inv_range, pm2) /
                                   sup.total_weight;
        return result;
    }

    auto residual = [&](double lambda) {
        return scaled_residual(kind, samples.values, samples.weights, lambda, inv_range, pm2);
    };

    double lo = sup.lo;
    double hi = sup.hi;
    if (options.bracket) {
        const double blo = std::max(sup.lo, options.bracket->first);
        const double bhi = std::min(sup.hi, options.bracket->second);
        if (blo < bhi && residual(blo) >= 0.0 && residual(bhi) <= 0.0) {
            lo = blo;
            hi = bhi;
            result.iterations += 2;
        }
    }

    const double width_tol = options.tol * (1.0 + sup.max_abs);
    const double residual_tol = options.tol * sup.total_weight;
    double mid = 0.5 * (lo + hi);
    if (options.start && *options.start > lo && *options.start < hi) mid = *options.start;
    double r = 0.0;
    auto check_budget = [&] {
        if (result.iterations >= options.max_iterations)
            throw NumericalError("pmean: root search did not converge within " +
                                 std::to_string(options.max_iterations) + " iterations");
    };

    if (options.method == PMeanMethod::Bisection) {
        for (;;) {
            check_budget();
            mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) {
                // Bracket is down to adjacent doubles: the root is located exactly.
                r = residual(mid);
                ++result.iterations;
                break;
            }
            r = residual(mid);
            ++result.iterations;
            if (r == 0.0 || (hi - lo <= width_tol && std::fabs(r) <= residual_tol)) break;
            if (r > 0.0)
                lo = mid;
            else
                hi = mid;
        }
    } else {
        // Newton on the scaled residual, kept inside the bracket. Steps that leave
        // the bracket or fail to halve |residual| fall back to bisection.
        double previous = std::numeric_limits<double>::infinity();
        for (;;) {
            check_budget();
            if (mid <= lo || mid >= hi) {
                mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) {
                    r = residual(mid);
                    ++result.iterations;
                    break;
                }
            }
            const ResidualSlope rs = scaled_residual_slope(kind, samples.values, samples.weights, mid,
                                                           inv_range, pm2);
            r = rs.residual;
            ++result.iterations;
            if (r == 0.0) break;
            if (r > 0.0)
                lo = mid;
            else
                hi = mid;
            if (hi - lo <= width_tol && std::fabs(r) <= residual_tol) break;
            double next = mid + r * range / ((pv - 1.0) * rs.slope);
            const double step = next - mid;
            if (std::isfinite(step) && std::fabs(step) < 0.25 * width_tol)
                next = mid + std::copysign(0.5 * width_tol, step);  // land across the root to close the bracket
            const bool stalled = std::fabs(r) > 0.5 * previous;
            previous = std::fabs(r);
            if (!std::isfinite(next) || next <= lo || next >= hi || stalled) next = 0.5 * (lo + hi);
            mid = next;
        }
    }
    result.value = mid;
    result.relative_residual = r / sup.total_weight;
    result.residual = r * std::pow(range, pv - 1.0);
    return result;
}

PMeanResult pmean_on_ball(const std::function<double(const Point&)>& f, const BallQuadrature& q,
                          const Exponent& p, const PMeanOptions& options) {
    std::vector<double> values(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) values[i] = f(q.nodes[i]);
    return pmean(SampleView{values, q.weights, true}, p, options);
}

}  // namespace hpmean
