#include "nfpe/transform.hpp"

#include "nfpe/errors.hpp"

#include <cmath>

namespace nfpe {

TransformContext::TransformContext(ModelParams params, CoefficientSet coeffs)
    : params_(params), coeffs_(std::move(coeffs)) {
    params_.validate();
    if (params_.a == 0.0) {
        throw ParameterError("TransformContext: requires a != 0");
    }
    if (!coeffs_.f || !coeffs_.f_dot || !coeffs_.g || !coeffs_.g_dot) {
        throw ParameterError("TransformContext: f, f_dot, g, g_dot must all be set");
    }
}

double TransformContext::f_at(double tau) const {
    const double f = coeffs_.f(tau);
    if (!(f > 0.0)) {
        throw DomainError("TransformContext: f(tau) must be positive");
    }
    return f;
}

double TransformContext::y_of_x(double x, double tau) const {
    const double a = params_.a;
    const double f = f_at(tau);
    const double z = (a * x + coeffs_.g(tau)) / std::sqrt(f);
    return (std::asinh(z) + 0.5 * std::log(f)) / a;
}

double TransformContext::x_of_y(double y, double tau) const {
    const double a = params_.a;
    const double f = f_at(tau);
    const double e = std::exp(a * y);
    const double x = (0.5 * (e - f / e) - coeffs_.g(tau)) / a;
    if (!std::isfinite(x)) {
        throw DomainError("TransformContext: x_of_y overflow");
    }
    return x;
}

double TransformContext::jacobian(double x, double tau) const {
    const double f = f_at(tau);
    const double w = params_.a * x + coeffs_.g(tau);
    return 1.0 / std::sqrt(f + w * w);
}

double TransformContext::a_plus(double y, double tau) const {
    const double e = std::exp(params_.a * y);
    return e + f_at(tau) / e;
}

double TransformContext::a_minus(double y, double tau) const {
    const double e = std::exp(params_.a * y);
    return e - f_at(tau) / e;
}

double TransformContext::q_common(double y, double tau) const {
    if (!coeffs_.beta_resolved()) {
        throw ParameterError("TransformContext: q needs beta resolved");
    }
    const double a = params_.a;
    return 2.0 * (params_.kappa * coeffs_.beta(tau) -
                  (params_.alpha / a) * coeffs_.g(tau) - coeffs_.g_dot(tau) / a) -
           (coeffs_.f_dot(tau) / a) * std::exp(-a * y);
}

double TransformContext::q_full(double y, double tau) const {
    return q_common(y, tau) +
           (params_.alpha / params_.a + params_.a * params_.epsilon) *
               a_minus(y, tau);
}

double TransformContext::q_zero(double y, double tau) const {
    return q_common(y, tau) + (params_.alpha / params_.a) * a_minus(y, tau);
}

} // namespace nfpe
