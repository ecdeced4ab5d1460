#include "nfpe/reference.hpp"

#include "nfpe/errors.hpp"
#include "nfpe/moments.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace nfpe {

namespace {

double trapezoid_sum(const GridSpec& spec, const std::vector<double>& u,
                     bool weighted_by_x) {
    const int n = spec.n;
    double sum = 0.5 * (weighted_by_x ? spec.point(0) : 1.0) * u[0];
    for (int i = 1; i + 1 < n; ++i) {
        sum += (weighted_by_x ? spec.point(i) : 1.0) * u[static_cast<std::size_t>(i)];
    }
    sum += 0.5 * (weighted_by_x ? spec.point(n - 1) : 1.0) *
           u[static_cast<std::size_t>(n - 1)];
    return sum * spec.dx();
}

double grid_mean(const GridSpec& spec, const std::vector<double>& u) {
    const double m0 = trapezoid_sum(spec, u, false);
    if (m0 == 0.0) {
        throw DomainError("fd_solve: zero mass profile");
    }
    return trapezoid_sum(spec, u, true) / m0;
}

// In-place Thomas solve of a tridiagonal system; diag/rhs are clobbered.
void thomas_solve(std::vector<double>& lower, std::vector<double>& diag,
                  std::vector<double>& upper, std::vector<double>& rhs,
                  std::vector<double>& out) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    out[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        out[i] = (rhs[i] - upper[i] * out[i + 1]) / diag[i];
    }
}

} // namespace

FdSolution fd_solve(const ModelParams& params, const CoefficientSet& coeffs,
                    const DensityGrid& gamma, std::span<const double> output_times,
                    const FdOptions& opts) {
    params.validate();
    if (!coeffs.f || !coeffs.g) {
        throw ParameterError("fd_solve: coefficients f and g are required");
    }
    if (std::abs(gamma.tau() - params.s) > 1e-9 * std::max(1.0, std::abs(params.s))) {
        throw ParameterError("fd_solve: initial profile must be sampled at params.s");
    }
    if (gamma.edge_mass_fraction() > 1e-10) {
        throw ParameterError("fd_solve: initial profile touches the grid boundary");
    }
    if (output_times.empty()) {
        throw ParameterError("fd_solve: need at least one output time");
    }
    for (std::size_t i = 0; i < output_times.size(); ++i) {
        if (output_times[i] < params.s - 1e-12) {
            throw DomainError("fd_solve: output time before the initial time");
        }
        if (i > 0 && !(output_times[i] > output_times[i - 1])) {
            throw ParameterError("fd_solve: output times must ascend");
        }
    }

    const GridSpec spec = gamma.spec();
    const int n = spec.n;
    const double dx = spec.dx();
    const double s = params.s;
    const double alpha = params.alpha;
    const double kappa = params.kappa;
    const double a = params.a;
    const double eps = params.epsilon;

    // Face positions (n - 1 interior faces; boundary fluxes are zero).
    std::vector<double> xf(static_cast<std::size_t>(n - 1));
    for (int j = 0; j + 1 < n; ++j) {
        xf[static_cast<std::size_t>(j)] = spec.x_min + dx * (static_cast<double>(j) + 0.5);
    }

    // beta source: explicit callable, per-step grid feedback, or the
    // precomputed moment-ODE trajectory (the default closure).
    TimeFn beta_fn;
    bool feedback = false;
    if (coeffs.beta_resolved()) {
        beta_fn = coeffs.beta;
    } else if (opts.feedback_moment) {
        feedback = true;
    } else {
        const double tau_end = output_times.back();
        const double x0 = gamma.mean();
        if (tau_end > s + 1e-12) {
            auto traj = std::make_shared<MomentTrajectory>(moment_ode_solve(
                params, coeffs, x0, uniform_time_grid(s, tau_end, 1e-3)));
            beta_fn = [traj](double t) { return (*traj)(t); };
        } else {
            beta_fn = [x0](double) { return x0; };
        }
    }

    std::vector<double> u(gamma.values().begin(), gamma.values().end());
    const double norm0 = trapezoid_sum(spec, u, false);

    auto diffusion_at = [&](double t, double& f_t, double& g_t, double& max_d) {
        f_t = coeffs.f(t);
        g_t = coeffs.g(t);
        if (!(f_t >= 0.0)) {
            throw DomainError("fd_solve: f(tau) went negative");
        }
        const double w_lo = a * xf.front() + g_t;
        const double w_hi = a * xf.back() + g_t;
        max_d = eps * (f_t + std::max(w_lo * w_lo, w_hi * w_hi));
    };

    double dt_target = opts.dt;
    if (dt_target == 0.0) {
        double f_t, g_t, max_d;
        diffusion_at(s, f_t, g_t, max_d);
        if (opts.scheme == FdScheme::Explicit) {
            dt_target = dx * dx / (4.0 * max_d);
        } else {
            const double beta0 = feedback ? grid_mean(spec, u) : beta_fn(s);
            const double dr = std::max(std::abs(alpha * spec.x_min + kappa * beta0),
                                       std::abs(alpha * spec.x_max + kappa * beta0));
            dt_target = std::min(0.25 * dx / std::max(dr, 1e-12), 0.05);
        }
    }
    if (!(dt_target > 0.0)) {
        throw ParameterError("fd_solve: dt must be positive");
    }

    FdSolution result;
    std::vector<double> flux(static_cast<std::size_t>(n - 1));
    std::vector<double> lower(static_cast<std::size_t>(n)), diag(static_cast<std::size_t>(n)),
        upper(static_cast<std::size_t>(n)), rhs(static_cast<std::size_t>(n)),
        next(static_cast<std::size_t>(n));

    // Drift + diffusion flux divergence, shared by both schemes; diffusion
    // can be scaled out for the semi-implicit splitting.
    auto apply_fluxes = [&](const std::vector<double>& v, double t, double beta_now,
                            double f_t, double g_t, double diff_weight,
                            std::vector<double>& dv) {
        (void)t;
        for (int j = 0; j + 1 < n; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            const double w = a * xf[ju] + g_t;
            const double d = eps * (f_t + w * w);
            const double drift = alpha * xf[ju] + kappa * beta_now;
            flux[ju] = drift * 0.5 * (v[ju] + v[ju + 1]) +
                       diff_weight * d * (v[ju + 1] - v[ju]) / dx;
        }
        dv[0] = flux[0] / dx;
        for (int i = 1; i + 1 < n; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            dv[iu] = (flux[iu] - flux[iu - 1]) / dx;
        }
        dv[static_cast<std::size_t>(n - 1)] = -flux[static_cast<std::size_t>(n - 2)] / dx;
    };

    std::vector<double> dv(static_cast<std::size_t>(n));

    auto record_moment = [&](double t) {
        result.moment_times.push_back(t);
        result.moment_values.push_back(grid_mean(spec, u));
    };

    auto post_step_checks = [&](double t) {
        double minu = u[0], maxu = u[0];
        for (double v : u) {
            minu = std::min(minu, v);
            maxu = std::max(maxu, v);
        }
        if (minu < -opts.negativity_tol * std::max(1.0, maxu)) {
            throw NumericalError(NumericalError::Kind::NegativeDensity,
                                 "fd_solve: density fell below the negativity floor "
                                 "at tau = " +
                                     std::to_string(t));
        }
        if (std::abs(trapezoid_sum(spec, u, false) - norm0) > opts.norm_drift_tol) {
            throw NumericalError(NumericalError::Kind::NormDrift,
                                 "fd_solve: conserved integral drifted at tau = " +
                                     std::to_string(t));
        }
    };

    auto step_explicit = [&](double t, double h) {
        const double beta_now = feedback ? grid_mean(spec, u) : beta_fn(t);
        double f_t, g_t, max_d;
        diffusion_at(t, f_t, g_t, max_d);
        const double cfl = dx * dx / (2.0 * max_d);
        if (h > cfl * (1.0 + 1e-12)) {
            throw NumericalError(NumericalError::Kind::CflViolation,
                                 "fd_solve: explicit step " + std::to_string(h) +
                                     " exceeds the diffusion limit " +
                                     std::to_string(cfl));
        }
        apply_fluxes(u, t, beta_now, f_t, g_t, 1.0, dv);
        for (int i = 0; i < n; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            u[iu] += h * dv[iu];
        }
    };

    auto step_semi_implicit = [&](double t, double h) {
        const double beta_now = feedback ? grid_mean(spec, u) : beta_fn(t);
        double f_t, g_t, max_d;
        diffusion_at(t, f_t, g_t, max_d);
        // Explicit drift, half of the diffusion at the old time...
        apply_fluxes(u, t, beta_now, f_t, g_t, 0.5, dv);
        for (int i = 0; i < n; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            rhs[iu] = u[iu] + h * dv[iu];
        }
        // ...and the other half implicit at the new time.
        double f_n, g_n, max_dn;
        diffusion_at(t + h, f_n, g_n, max_dn);
        const double r = 0.5 * h / (dx * dx);
        for (int i = 0; i < n; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            double d_lo = 0.0, d_hi = 0.0;
            if (i > 0) {
                const double w = a * xf[iu - 1] + g_n;
                d_lo = eps * (f_n + w * w);
            }
            if (i + 1 < n) {
                const double w = a * xf[iu] + g_n;
                d_hi = eps * (f_n + w * w);
            }
            lower[iu] = -r * d_lo;
            upper[iu] = -r * d_hi;
            diag[iu] = 1.0 + r * (d_lo + d_hi);
        }
        thomas_solve(lower, diag, upper, rhs, next);
        u.swap(next);
    };

    double t = s;
    record_moment(t);
    for (double target : output_times) {
        if (target > t + 1e-12) {
            const auto steps = static_cast<std::size_t>(
                std::max(1.0, std::ceil((target - t) / dt_target - 1e-9)));
            const double h = (target - t) / static_cast<double>(steps);
            const double seg_start = t;
            for (std::size_t k = 0; k < steps; ++k) {
                const double tk = seg_start + h * static_cast<double>(k);
                if (opts.scheme == FdScheme::Explicit) {
                    step_explicit(tk, h);
                } else {
                    step_semi_implicit(tk, h);
                }
                post_step_checks(tk + h);
                record_moment(tk + h);
            }
            t = target;
        }
        result.snapshots.emplace_back(spec, target, u);
    }
    return result;
}

GridMetrics grid_metrics(const DensityGrid& u, const DensityGrid& v) {
    if (!(u.spec() == v.spec())) {
        throw ParameterError("grid_metrics: profiles live on different grids");
    }
    if (std::abs(u.tau() - v.tau()) > 1e-9 * std::max(1.0, std::abs(u.tau()))) {
        throw ParameterError("grid_metrics: profiles sampled at different times");
    }
    const int n = u.size();
    double l1 = 0.0;
    double linf = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = std::abs(u.value(i) - v.value(i));
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        l1 += w * d;
        linf = std::max(linf, d);
    }
    l1 *= u.spec().dx();
    return GridMetrics{l1, linf, std::abs(u.mean() - v.mean()),
                       std::abs(u.variance() - v.variance())};
}

} // namespace nfpe
