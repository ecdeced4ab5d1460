#include "nfpe/moments.hpp"

#include "nfpe/errors.hpp"
#include "nfpe/quadrature.hpp"

#include <cmath>
#include <memory>

namespace nfpe {

namespace {

void check_uniform_ascending(std::span<const double> times) {
    if (times.size() < 2) {
        throw ParameterError("time grid: need at least two nodes");
    }
    const double dt = times[1] - times[0];
    if (!(dt > 0.0)) {
        throw ParameterError("time grid: nodes must ascend");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double step = times[i] - times[i - 1];
        if (std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
            throw ParameterError("time grid: spacing must be uniform");
        }
    }
}

// Right-hand side of the closed moment equation in both beta modes.
std::function<double(double, double)> moment_rhs(const ModelParams& params,
                                                 const CoefficientSet& coeffs) {
    if (!coeffs.g) {
        throw ParameterError("moment equation: coefficient g is required");
    }
    const double a = params.a;
    const double eps = params.epsilon;
    if (coeffs.beta_resolved()) {
        const double mu = params.alpha - 2.0 * a * a * eps;
        const double kappa = params.kappa;
        TimeFn g = coeffs.g;
        TimeFn beta = coeffs.beta;
        return [mu, kappa, a, eps, g, beta](double t, double x) {
            return -mu * x - kappa * beta(t) + 2.0 * a * eps * g(t);
        };
    }
    const double lam = params.alpha + params.kappa - 2.0 * a * a * eps;
    TimeFn g = coeffs.g;
    return [lam, a, eps, g](double t, double x) {
        return -lam * x + 2.0 * a * eps * g(t);
    };
}

} // namespace

MomentTrajectory::MomentTrajectory(std::vector<double> times, std::vector<double> values,
                                   std::vector<double> derivatives)
    : times_(std::move(times)), values_(std::move(values)),
      derivs_(std::move(derivatives)) {
    check_uniform_ascending(times_);
    if (values_.size() != times_.size() || derivs_.size() != times_.size()) {
        throw ParameterError("MomentTrajectory: mismatched sample counts");
    }
    dt_ = times_[1] - times_[0];
}

double MomentTrajectory::operator()(double tau) const {
    const double t0 = times_.front();
    const double t1 = times_.back();
    const double slack = 1e-9 * std::max(1.0, t1 - t0);
    if (tau < t0 - slack || tau > t1 + slack) {
        throw DomainError("MomentTrajectory: query outside sampled range");
    }
    const std::size_t last = times_.size() - 2;
    double t = std::min(std::max(tau, t0), t1);
    auto i = static_cast<std::size_t>(std::max(0.0, std::floor((t - t0) / dt_)));
    i = std::min(i, last);
    const double p = (t - times_[i]) / dt_;
    const double p2 = p * p;
    const double p3 = p2 * p;
    const double h00 = 2.0 * p3 - 3.0 * p2 + 1.0;
    const double h10 = p3 - 2.0 * p2 + p;
    const double h01 = -2.0 * p3 + 3.0 * p2;
    const double h11 = p3 - p2;
    return h00 * values_[i] + h10 * dt_ * derivs_[i] + h01 * values_[i + 1] +
           h11 * dt_ * derivs_[i + 1];
}

double moment_const_diffusion(const ModelParams& params, double x_start, double tau) {
    params.validate();
    if (tau < params.s) {
        throw DomainError("moment_const_diffusion: tau before the initial time");
    }
    return x_start * std::exp(-(params.alpha + params.kappa) * (tau - params.s));
}

double moment_quadratic(const ModelParams& params, const CoefficientSet& coeffs,
                        double x_start, double tau) {
    params.validate();
    if (tau < params.s) {
        throw DomainError("moment_quadratic: tau before the initial time");
    }
    if (!coeffs.g) {
        throw ParameterError("moment_quadratic: coefficient g is required");
    }
    const double a = params.a;
    const double eps = params.epsilon;
    double mu;
    std::function<double(double)> inhom;
    if (coeffs.beta_resolved()) {
        mu = params.alpha - 2.0 * a * a * eps;
        const double kappa = params.kappa;
        TimeFn g = coeffs.g;
        TimeFn beta = coeffs.beta;
        inhom = [kappa, a, eps, g, beta](double t) {
            return 2.0 * a * eps * g(t) - kappa * beta(t);
        };
    } else {
        mu = params.alpha + params.kappa - 2.0 * a * a * eps;
        TimeFn g = coeffs.g;
        inhom = [a, eps, g](double t) { return 2.0 * a * eps * g(t); };
    }
    const double hom = x_start * std::exp(-mu * (tau - params.s));
    if (tau == params.s) {
        return hom;
    }
    const double forced = adaptive_integrate(
        [mu, tau, &inhom](double xi) { return std::exp(-mu * (tau - xi)) * inhom(xi); },
        params.s, tau, 1e-12);
    return hom + forced;
}

MomentTrajectory moment_ode_solve(const ModelParams& params,
                                  const CoefficientSet& coeffs, double x_start,
                                  std::span<const double> tau_grid) {
    params.validate();
    check_uniform_ascending(tau_grid);
    if (std::abs(tau_grid[0] - params.s) > 1e-9 * std::max(1.0, std::abs(params.s))) {
        throw ParameterError("moment_ode_solve: grid must start at the initial time");
    }
    auto rhs = moment_rhs(params, coeffs);
    const std::size_t n = tau_grid.size();
    std::vector<double> times(tau_grid.begin(), tau_grid.end());
    std::vector<double> values(n), derivs(n);
    values[0] = x_start;
    derivs[0] = rhs(times[0], x_start);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = times[i + 1] - times[i];
        values[i + 1] = rk4_step(rhs, times[i], values[i], h);
        derivs[i + 1] = rhs(times[i + 1], values[i + 1]);
    }
    return MomentTrajectory(std::move(times), std::move(values), std::move(derivs));
}

CoefficientSet resolve_beta(const ModelParams& params, const CoefficientSet& coeffs,
                            double x_start, double tau_end, double dt) {
    if (coeffs.beta_resolved()) {
        return coeffs;
    }
    const auto grid = uniform_time_grid(params.s, tau_end, dt);
    auto traj = std::make_shared<MomentTrajectory>(
        moment_ode_solve(params, coeffs, x_start, grid));
    CoefficientSet out = coeffs;
    out.beta = [traj](double t) { return (*traj)(t); };
    return out;
}

std::vector<double> uniform_time_grid(double s, double tau_end, double dt) {
    if (!(tau_end > s)) {
        throw ParameterError("uniform_time_grid: tau_end must exceed s");
    }
    if (!(dt > 0.0)) {
        throw ParameterError("uniform_time_grid: dt must be positive");
    }
    const auto steps =
        std::max<std::size_t>(1, static_cast<std::size_t>(
                                     std::ceil((tau_end - s) / dt - 1e-9)));
    const double h = (tau_end - s) / static_cast<double>(steps);
    std::vector<double> grid(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        grid[i] = s + h * static_cast<double>(i);
    }
    grid[steps] = tau_end;
    return grid;
}

} // namespace nfpe
