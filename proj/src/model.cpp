#include "nfpe/model.hpp"

#include "nfpe/errors.hpp"

#include <cmath>
#include <string>

namespace nfpe {

void ModelParams::validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(kappa) || !std::isfinite(a) ||
        !std::isfinite(epsilon) || !std::isfinite(s)) {
        throw ParameterError("ModelParams: non-finite parameter");
    }
    if (!(alpha > 0.0)) {
        throw ParameterError("ModelParams: alpha must be positive");
    }
    if (kappa < 0.0) {
        throw ParameterError("ModelParams: kappa must be nonnegative");
    }
    if (!(epsilon > 0.0)) {
        throw ParameterError("ModelParams: epsilon must be positive");
    }
}

CoefficientSet CoefficientSet::constant(double f0, double g0) {
    CoefficientSet c;
    c.f = [f0](double) { return f0; };
    c.f_dot = [](double) { return 0.0; };
    c.g = [g0](double) { return g0; };
    c.g_dot = [](double) { return 0.0; };
    return c;
}

CoefficientSet CoefficientSet::constant(double f0, double g0, double beta0) {
    CoefficientSet c = constant(f0, g0);
    c.beta = [beta0](double) { return beta0; };
    return c;
}

CoefficientSet CoefficientSet::exp_decay_f(double f0, double decay, double tau0,
                                           double g0) {
    CoefficientSet c;
    c.f = [f0, decay, tau0](double t) { return f0 * std::exp(-decay * (t - tau0)); };
    c.f_dot = [f0, decay, tau0](double t) {
        return -decay * f0 * std::exp(-decay * (t - tau0));
    };
    c.g = [g0](double) { return g0; };
    c.g_dot = [](double) { return 0.0; };
    return c;
}

void validate_coefficients(const CoefficientSet& coeffs, std::span<const double> times,
                           double rel_tol) {
    if (!coeffs.f || !coeffs.f_dot || !coeffs.g || !coeffs.g_dot) {
        throw ParameterError("CoefficientSet: f, f_dot, g, g_dot must all be set");
    }
    for (double t : times) {
        const double fv = coeffs.f(t);
        if (!(fv >= 0.0)) {
            throw ParameterError("CoefficientSet: f(" + std::to_string(t) +
                                 ") is negative");
        }
        const double h = 1e-5 * std::max(1.0, std::abs(t));
        const double fd_f = (coeffs.f(t + h) - coeffs.f(t - h)) / (2.0 * h);
        const double fd_g = (coeffs.g(t + h) - coeffs.g(t - h)) / (2.0 * h);
        // Central differences carry O(h^2) truncation; allow for it on top of
        // the user's tolerance.
        const double scale_f = std::max({1.0, std::abs(fd_f), std::abs(coeffs.f_dot(t))});
        const double scale_g = std::max({1.0, std::abs(fd_g), std::abs(coeffs.g_dot(t))});
        if (std::abs(fd_f - coeffs.f_dot(t)) > rel_tol * scale_f + 1e-7) {
            throw ParameterError("CoefficientSet: f_dot disagrees with f near tau = " +
                                 std::to_string(t));
        }
        if (std::abs(fd_g - coeffs.g_dot(t)) > rel_tol * scale_g + 1e-7) {
            throw ParameterError("CoefficientSet: g_dot disagrees with g near tau = " +
                                 std::to_string(t));
        }
    }
}

EmpiricalMapping map_empirical_coefficients(double b0, double decay, double quad,
                                            double shift, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw ParameterError("map_empirical_coefficients: epsilon must be positive");
    }
    if (!(quad > 0.0)) {
        throw ParameterError("map_empirical_coefficients: quad must be positive");
    }
    if (b0 < 0.0) {
        throw ParameterError("map_empirical_coefficients: b0 must be nonnegative");
    }
    EmpiricalMapping m;
    m.epsilon = epsilon;
    m.a = std::sqrt(quad / epsilon);
    m.coeffs = CoefficientSet::exp_decay_f(b0 / epsilon, decay, 0.0, shift * m.a);
    return m;
}

SolvabilityReport check_exact_solvability(const ModelParams& params,
                                          const CoefficientSet& coeffs,
                                          std::span<const double> times, double tol) {
    params.validate();
    if (params.a == 0.0) {
        throw ParameterError("check_exact_solvability: requires a != 0");
    }
    if (!coeffs.beta_resolved()) {
        throw ParameterError("check_exact_solvability: beta must be resolved first");
    }
    const double c = params.alpha / params.a + params.a * params.epsilon;
    double worst = 0.0;
    for (double t : times) {
        const double rf = coeffs.f_dot(t) + 2.0 * params.a * c * coeffs.f(t);
        const double rg = coeffs.g_dot(t) + params.alpha * coeffs.g(t) -
                          params.a * params.kappa * coeffs.beta(t);
        worst = std::max(worst, std::abs(rf) + std::abs(rg));
    }
    return SolvabilityReport{worst <= tol, worst};
}

} // namespace nfpe
