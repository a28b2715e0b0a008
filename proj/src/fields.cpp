#include "hpmean/fields.hpp"

#include <cmath>
#include <cstdlib>

#include "hpmean/errors.hpp"

namespace hpmean::fields {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

ScalarField from_derivatives(std::function<Derivatives(const Point&)> d) {
    ScalarField f;
    f.eval = [d](const Point& x) { return d(x).value; };
    f.derivatives = std::move(d);
    return f;
}

// Phi = (x1^2+x2^2)^2 + 16 x3^2 = gauge^4, with gradient and Hessian.
struct Quartic {
    double phi;
    std::array<double, 3> grad;
    Mat3 hess;
};

Quartic quartic(const Point& x) {
    const double r2 = x.x1 * x.x1 + x.x2 * x.x2;
    Quartic q;
    q.phi = r2 * r2 + 16.0 * x.x3 * x.x3;
    q.grad = {4.0 * x.x1 * r2, 4.0 * x.x2 * r2, 32.0 * x.x3};
    q.hess = {{{4.0 * r2 + 8.0 * x.x1 * x.x1, 8.0 * x.x1 * x.x2, 0.0},
               {8.0 * x.x1 * x.x2, 4.0 * r2 + 8.0 * x.x2 * x.x2, 0.0},
               {0.0, 0.0, 32.0}}};
    return q;
}

}  // namespace

ScalarField constant(double c) {
    return from_derivatives([c](const Point&) {
        Derivatives d;
        d.value = c;
        return d;
    });
}

ScalarField linear(double a1, double a2, double a3, double c) {
    return from_derivatives([=](const Point& x) {
        Derivatives d;
        d.value = a1 * x.x1 + a2 * x.x2 + a3 * x.x3 + c;
        d.gradient = {a1, a2, a3};
        return d;
    });
}

ScalarField horizontal_square() {
    return from_derivatives([](const Point& x) {
        Derivatives d;
        d.value = x.x1 * x.x1 + x.x2 * x.x2;
        d.gradient = {2.0 * x.x1, 2.0 * x.x2, 0.0};
        d.hessian[0][0] = 2.0;
        d.hessian[1][1] = 2.0;
        return d;
    });
}

ScalarField euclidean_square() {
    return from_derivatives([](const Point& x) {
        Derivatives d;
        d.value = x.x1 * x.x1 + x.x2 * x.x2 + x.x3 * x.x3;
        d.gradient = {2.0 * x.x1, 2.0 * x.x2, 2.0 * x.x3};
        d.hessian[0][0] = d.hessian[1][1] = d.hessian[2][2] = 2.0;
        return d;
    });
}

ScalarField mixed_cubic() {
    return from_derivatives([](const Point& x) {
        Derivatives d;
        d.value = x.x1 * x.x1 * x.x2 + x.x3 * x.x3;
        d.gradient = {2.0 * x.x1 * x.x2, x.x1 * x.x1, 2.0 * x.x3};
        d.hessian[0][0] = 2.0 * x.x2;
        d.hessian[0][1] = d.hessian[1][0] = 2.0 * x.x1;
        d.hessian[2][2] = 2.0;
        return d;
    });
}

ScalarField gauge_power(double alpha) {
    const double k = 0.25 * alpha;
    return from_derivatives([k](const Point& x) {
        const Quartic q = quartic(x);
        Derivatives d;
        d.value = std::pow(q.phi, k);
        const double c1 = k * std::pow(q.phi, k - 1.0);
        const double c2 = k * (k - 1.0) * std::pow(q.phi, k - 2.0);
        for (int i = 0; i < 3; ++i) {
            d.gradient[i] = c1 * q.grad[i];
            for (int j = 0; j < 3; ++j) d.hessian[i][j] = c1 * q.hess[i][j] + c2 * q.grad[i] * q.grad[j];
        }
        return d;
    });
}

ScalarField gauge_log() {
    return from_derivatives([](const Point& x) {
        const Quartic q = quartic(x);
        Derivatives d;
        d.value = 0.25 * std::log(q.phi);
        for (int i = 0; i < 3; ++i) {
            d.gradient[i] = q.grad[i] / (4.0 * q.phi);
            for (int j = 0; j < 3; ++j)
                d.hessian[i][j] = q.hess[i][j] / (4.0 * q.phi) - q.grad[i] * q.grad[j] / (4.0 * q.phi * q.phi);
        }
        return d;
    });
}

ScalarField left_translated(const ScalarField& f, const Point& c, Metric metric) {
    const Point cinv = group_inv(c);
    ScalarField out;
    out.eval = [f, cinv, metric](const Point& x) { return f(translate(cinv, x, metric)); };
    if (!f.has_derivatives()) return out;
    // Jacobian of x -> c^-1 * x; the identity in Euclidean mode.
    Mat3 jac = {{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
    if (metric == Metric::HeisenbergKoranyi) {
        jac[2][0] = -0.5 * cinv.x2;
        jac[2][1] = 0.5 * cinv.x1;
    }
    out.derivatives = [f, cinv, metric, jac](const Point& x) {
        const Derivatives dz = f.derivatives(translate(cinv, x, metric));
        Derivatives dx;
        dx.value = dz.value;
        for (int a = 0; a < 3; ++a) {
            double g = 0.0;
            for (int i = 0; i < 3; ++i) g += jac[i][a] * dz.gradient[i];
            dx.gradient[a] = g;
            for (int b = 0; b < 3; ++b) {
                double h = 0.0;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) h += jac[i][a] * dz.hessian[i][j] * jac[j][b];
                dx.hessian[a][b] = h;
            }
        }
        return dx;
    };
    return out;
}

ScalarField combine(double a, const ScalarField& f, double b, const ScalarField& g, double c) {
    ScalarField out;
    out.eval = [=](const Point& x) { return a * f(x) + b * g(x) + c; };
    if (!f.has_derivatives() || !g.has_derivatives()) return out;
    out.derivatives = [=](const Point& x) {
        const Derivatives df = f.derivatives(x);
        const Derivatives dg = g.derivatives(x);
        Derivatives d;
        d.value = a * df.value + b * dg.value + c;
        for (int i = 0; i < 3; ++i) {
            d.gradient[i] = a * df.gradient[i] + b * dg.gradient[i];
            for (int j = 0; j < 3; ++j) d.hessian[i][j] = a * df.hessian[i][j] + b * dg.hessian[i][j];
        }
        return d;
    };
    return out;
}

ScalarField by_name(const std::string& name) {
    if (name == "x1") return linear(1.0, 0.0, 0.0);
    if (name == "x3") return linear(0.0, 0.0, 1.0);
    if (name == "x1sq_x2sq") return horizontal_square();
    if (name == "euclid_sq") return euclidean_square();
    if (name == "mixed_cubic") return mixed_cubic();
    const std::string prefix = "gauge_pow:";
    if (name.rfind(prefix, 0) == 0) {
        const std::string arg = name.substr(prefix.size());
        char* end = nullptr;
        const double alpha = std::strtod(arg.c_str(), &end);
        require(!arg.empty() && end && *end == '\0', "field: bad exponent in '" + name + "'");
        return gauge_power(alpha);
    }
    throw InvalidArgument("unknown field '" + name + "'");
}

std::vector<std::string> registry_names() {
    return {"x1", "x3", "x1sq_x2sq", "euclid_sq", "mixed_cubic", "gauge_pow:<alpha>"};
}

}  // namespace hpmean::fields
