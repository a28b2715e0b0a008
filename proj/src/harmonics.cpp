#include "hpmean/harmonics.hpp"

#include <algorithm>
#include <cmath>

#include "hpmean/errors.hpp"
#include "hpmean/fields.hpp"

namespace hpmean {

namespace {

bool is_log_profile(const Exponent& p) { return p.value() == 4.0; }

double profile(double g, const Exponent& p) {
    return is_log_profile(p) ? std::log(g) : std::pow(g, -xi(p));
}

}  // namespace

double xi(const Exponent& p) {
    require(!p.is_infinite() && p.value() > 1.0, "xi: p must be finite and > 1");
    return (4.0 - p.value()) / (p.value() - 1.0);
}

double radial_eval(const RadialSolution& sol, const Point& x) {
    const double g = gauge(translate(group_inv(sol.center), x, Metric::HeisenbergKoranyi), Metric::HeisenbergKoranyi);
    require(g > 0.0, "radial_eval: evaluation at the centre");
    return sol.coeff_a * profile(g, sol.p) + sol.coeff_b;
}

ScalarField radial_field(const RadialSolution& sol) {
    const ScalarField base = is_log_profile(sol.p) ? fields::gauge_log() : fields::gauge_power(-xi(sol.p));
    return fields::combine(sol.coeff_a, fields::left_translated(base, sol.center), 0.0, fields::constant(0.0),
                           sol.coeff_b);
}

RadialSolution fit_radial_coeffs(const Point& center, double r_inner, double r_outer, double value_inner,
                                 double value_outer, const Exponent& p) {
    require(r_inner > 0.0 && r_inner < r_outer, "fit_radial_coeffs: radii must satisfy 0 < r_inner < r_outer");
    xi(p);
    const double fi = profile(r_inner, p);
    const double fo = profile(r_outer, p);
    RadialSolution sol{center, 0.0, 0.0, p};
    sol.coeff_a = (value_outer - value_inner) / (fo - fi);
    sol.coeff_b = value_inner - sol.coeff_a * fi;
    if (value_inner == value_outer) sol.coeff_b = value_inner;
    return sol;
}

double perturbation_eval(const PerturbationFn& v, const Point& x) {
    require(v.s >= 4.0, "perturbation: s must be >= 4");
    return std::pow(gauge(translate(group_inv(v.q0), x, Metric::HeisenbergKoranyi), Metric::HeisenbergKoranyi), v.s);
}

ScalarField perturbation_field(const PerturbationFn& v) {
    require(v.s >= 4.0, "perturbation: s must be >= 4");
    return fields::left_translated(fields::gauge_power(v.s), v.q0);
}

bool theta_uses_log_limit(const Exponent& p) { return !p.is_infinite() && p.value() == 4.0; }

double theta(double mu, const Exponent& p) {
    require(mu > 0.0 && mu < 1.0, "theta: mu must lie in (0, 1)");
    require(!p.is_infinite() && p.value() >= 2.0, "theta: p must be finite and >= 2");
    const double la = std::log(mu / (2.0 - mu));
    const double lb = std::log(mu / 2.0);
    if (theta_uses_log_limit(p)) return (la + lb) / (2.0 * lb);
    const double x = xi(p);
    // 1 - t^x = -expm1(x log t) keeps precision for p close to 4.
    return 0.5 * (std::expm1(x * la) + std::expm1(x * lb)) / std::expm1(x * lb);
}

void BoundaryIterationParams::validate() const {
    require(mu > 0.0 && mu < 1.0, "boundary iteration: mu must lie in (0, 1)");
    require(!p.is_infinite() && p.value() >= 2.0, "boundary iteration: p must be finite and >= 2");
    require(delta > 0.0, "boundary iteration: delta must be positive");
    require(eta > 0.0, "boundary iteration: eta must be positive");
}

std::vector<IterationStep> iteration_schedule(const BoundaryIterationParams& params, double M_eps, double N_eps,
                                              int count) {
    params.validate();
    require(M_eps >= N_eps, "iteration_schedule: requires M >= N");
    require(count >= 1, "iteration_schedule: count must be >= 1");
    const double th = theta(params.mu, params.p);
    std::vector<IterationStep> out;
    out.reserve(static_cast<std::size_t>(count));
    double delta_k = params.delta;
    double factor = th;
    for (int k = 1; k <= count; ++k) {
        out.push_back({k, delta_k, N_eps + factor * (M_eps - N_eps)});
        delta_k /= 4.0;
        factor *= th;
    }
    return out;
}

int k0(double eta, double sup_G, double inf_G, double theta) {
    require(theta > 0.0 && theta < 1.0, "k0: theta must lie in (0, 1)");
    require(eta > 0.0, "k0: eta must be positive");
    require(sup_G >= inf_G, "k0: requires sup_G >= inf_G");
    if (sup_G == inf_G) return 1;
    const double L = std::log(eta / 2.0 / (sup_G - inf_G + 1.0)) / std::log(theta);
    const double nearest = std::round(L);
    const double k = std::fabs(L - nearest) <= 1e-9 * std::max(1.0, std::fabs(L)) ? nearest + 1.0 : std::floor(L) + 1.0;
    return k < 1.0 ? 1 : static_cast<int>(k);
}

}  // namespace hpmean
