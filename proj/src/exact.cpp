#include "nfpe/exact.hpp"

#include "nfpe/errors.hpp"
#include "nfpe/moments.hpp"
#include "nfpe/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

namespace nfpe {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

void check_initial_profile(const ModelParams& params, const DensityGrid& gamma) {
    if (std::abs(gamma.tau() - params.s) > 1e-9 * std::max(1.0, std::abs(params.s))) {
        throw ParameterError("evolve: initial profile must be sampled at params.s");
    }
    if (std::abs(gamma.norm() - 1.0) > 1e-3) {
        throw ParameterError("evolve: initial profile must be normalized");
    }
}

} // namespace

double green_lin(const ModelParams& params, double tau, double s, double x, double y) {
    params.validate();
    if (!(tau > s)) {
        throw DomainError("green_lin: requires tau > s");
    }
    const double dt = tau - s;
    const double decay = std::exp(-params.alpha * dt);
    const double var = (params.epsilon / params.alpha) * (1.0 - decay * decay);
    const double d = x - decay * y;
    return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * M_PI * var);
}

DensityGrid evolve_const_diffusion(const ModelParams& params, const DensityGrid& gamma,
                                   double tau, const EvolveOptions& opts) {
    params.validate();
    if (params.a != 0.0) {
        throw ParameterError(
            "evolve_const_diffusion: requires a = 0 (constant diffusion)");
    }
    check_initial_profile(params, gamma);
    if (tau < params.s) {
        throw DomainError("evolve_const_diffusion: tau before the initial time");
    }
    const GridSpec& spec = gamma.spec();
    if (tau == params.s) {
        return gamma;
    }

    const double dt = tau - params.s;
    const double decay = std::exp(-params.alpha * dt);
    const double var = (params.epsilon / params.alpha) * (1.0 - decay * decay);
    const double sd = std::sqrt(var);
    const double x_mean0 = gamma.mean();
    const double x_mean1 = moment_const_diffusion(params, x_mean0, tau);
    const double dx = spec.dx();
    const int n = spec.n;

    // Forward image of a source point y is a Gaussian in x with this mean.
    auto mu = [&](double y) { return x_mean1 + decay * (y - x_mean0); };

    // Mass whose forward image falls outside the grid is lost to the output;
    // estimate it source-weighted before doing any work.
    const double inv = 1.0 / (sd * kSqrt2);
    double lost = 0.0;
    for (int i = 0; i < n; ++i) {
        const double m = mu(spec.point(i));
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        lost += w * gamma.value(i) *
                (0.5 * std::erfc((m - spec.x_min) * inv) +
                 0.5 * std::erfc((spec.x_max - m) * inv));
    }
    lost *= dx;
    if (lost > opts.truncation_tol) {
        throw NumericalError(NumericalError::Kind::Truncation,
                             "evolve_const_diffusion: estimated mass loss " +
                                 std::to_string(lost) + " exceeds tolerance");
    }

    const auto gam = gamma.interpolant();
    const GaussRule& rule = gauss_legendre(opts.gl_order);
    const double span = spec.x_max - spec.x_min;
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const double x = spec.point(i);
        double lo = spec.x_min;
        double hi = spec.x_max;
        // Viewed over source points the kernel is a Gaussian of width
        // sd/decay; restrict the window unless it already covers the grid.
        if (decay * span > opts.kernel_cut * sd) {
            const double y_c = x_mean0 + (x - x_mean1) / decay;
            const double half = opts.kernel_cut * sd / decay;
            lo = std::max(lo, y_c - half);
            hi = std::min(hi, y_c + half);
        }
        if (!(lo < hi)) {
            continue;
        }
        const double max_panel = std::min(dx, 0.5 * sd / decay);
        const auto edges = panel_edges(lo, hi, spec.x_min, dx, max_panel);
        auto integrand = [&](double y) {
            const double d = x - mu(y);
            return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * M_PI * var) *
                   gam.eval_or(y, 0.0);
        };
        out[static_cast<std::size_t>(i)] = integrate_over_edges(integrand, edges, rule);
    }

    DensityGrid result(spec, tau, std::move(out));
    if (std::abs(result.norm() - gamma.norm()) > opts.norm_tol) {
        throw NumericalError(NumericalError::Kind::NormDrift,
                             "evolve_const_diffusion: output norm drifted; grid too "
                             "coarse or too short");
    }
    return result;
}

CoefficientSet exact_coefficient_set(const ModelParams& params, double f_s, double g_s,
                                     TimeFn beta) {
    params.validate();
    if (params.a == 0.0) {
        throw ParameterError("exact_coefficient_set: requires a != 0");
    }
    if (!(f_s > 0.0)) {
        throw ParameterError("exact_coefficient_set: f_s must be positive");
    }
    if (!beta) {
        throw ParameterError("exact_coefficient_set: beta must be explicit");
    }
    const double a = params.a;
    const double al = params.alpha;
    const double kap = params.kappa;
    const double s = params.s;
    const double c = al / a + a * params.epsilon;

    CoefficientSet cs;
    cs.f = [f_s, a, c, s](double t) { return f_s * std::exp(-2.0 * a * c * (t - s)); };
    cs.f_dot = [f_s, a, c, s](double t) {
        return -2.0 * a * c * f_s * std::exp(-2.0 * a * c * (t - s));
    };
    TimeFn g = [g_s, a, al, kap, s, beta](double t) {
        const double hom = g_s * std::exp(-al * (t - s));
        if (kap == 0.0 || t == s) {
            return hom;
        }
        const double mem = adaptive_integrate(
            [al, t, &beta](double xi) { return std::exp(-al * (t - xi)) * beta(xi); },
            s, t, 1e-12);
        return hom + a * kap * mem;
    };
    cs.g = g;
    cs.g_dot = [al, a, kap, beta, g](double t) {
        return -al * g(t) + a * kap * beta(t);
    };
    cs.beta = std::move(beta);
    return cs;
}

CoefficientSet exact_coefficient_set_selfconsistent(const ModelParams& params,
                                                    double f_s, double g_s,
                                                    double x_start, double tau_end,
                                                    double dt) {
    params.validate();
    if (params.a == 0.0) {
        throw ParameterError("exact_coefficient_set_selfconsistent: requires a != 0");
    }
    if (!(f_s > 0.0)) {
        throw ParameterError("exact_coefficient_set_selfconsistent: f_s must be positive");
    }
    const double a = params.a;
    const double al = params.alpha;
    const double kap = params.kappa;
    const double eps = params.epsilon;
    const double s = params.s;
    const double lam = al + kap - 2.0 * a * a * eps;

    const auto grid = uniform_time_grid(s, tau_end, dt);
    const std::size_t n = grid.size();
    std::vector<double> xv(n), gv(n), xd(n), gd(n);
    auto fx = [&](double x, double g) { return -lam * x + 2.0 * a * eps * g; };
    auto fg = [&](double x, double g) { return -al * g + a * kap * x; };
    xv[0] = x_start;
    gv[0] = g_s;
    xd[0] = fx(x_start, g_s);
    gd[0] = fg(x_start, g_s);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = grid[i + 1] - grid[i];
        const double x0 = xv[i];
        const double g0 = gv[i];
        const double kx1 = fx(x0, g0), kg1 = fg(x0, g0);
        const double kx2 = fx(x0 + 0.5 * h * kx1, g0 + 0.5 * h * kg1);
        const double kg2 = fg(x0 + 0.5 * h * kx1, g0 + 0.5 * h * kg1);
        const double kx3 = fx(x0 + 0.5 * h * kx2, g0 + 0.5 * h * kg2);
        const double kg3 = fg(x0 + 0.5 * h * kx2, g0 + 0.5 * h * kg2);
        const double kx4 = fx(x0 + h * kx3, g0 + h * kg3);
        const double kg4 = fg(x0 + h * kx3, g0 + h * kg3);
        xv[i + 1] = x0 + (h / 6.0) * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4);
        gv[i + 1] = g0 + (h / 6.0) * (kg1 + 2.0 * kg2 + 2.0 * kg3 + kg4);
        xd[i + 1] = fx(xv[i + 1], gv[i + 1]);
        gd[i + 1] = fg(xv[i + 1], gv[i + 1]);
    }
    auto x_traj = std::make_shared<MomentTrajectory>(
        std::vector<double>(grid), std::move(xv), std::move(xd));
    auto g_traj = std::make_shared<MomentTrajectory>(
        std::vector<double>(grid), std::move(gv), std::move(gd));

    const double c = al / a + a * eps;
    CoefficientSet cs;
    cs.f = [f_s, a, c, s](double t) { return f_s * std::exp(-2.0 * a * c * (t - s)); };
    cs.f_dot = [f_s, a, c, s](double t) {
        return -2.0 * a * c * f_s * std::exp(-2.0 * a * c * (t - s));
    };
    cs.g = [g_traj](double t) { return (*g_traj)(t); };
    cs.g_dot = [g_traj, x_traj, al, a, kap](double t) {
        return -al * (*g_traj)(t) + a * kap * (*x_traj)(t);
    };
    cs.beta = [x_traj](double t) { return (*x_traj)(t); };
    return cs;
}

double green_quadratic(const TransformContext& ctx, double tau, double s, double x,
                       double xp) {
    if (!(tau > s)) {
        throw DomainError("green_quadratic: requires tau > s");
    }
    const ModelParams& p = ctx.params();
    const double eps = p.epsilon;
    const double c = p.alpha / p.a + p.a * eps;
    const double dt = tau - s;
    const double d = ctx.y_of_x(x, tau) - ctx.y_of_x(xp, s) + c * dt;
    return std::exp(p.alpha * dt - d * d / (4.0 * eps * dt)) /
           std::sqrt(4.0 * M_PI * eps * dt);
}

DensityGrid evolve_quadratic(const ModelParams& params, const CoefficientSet& coeffs,
                             const DensityGrid& gamma, double tau,
                             const QuadraticEvolveOptions& opts) {
    params.validate();
    if (params.a == 0.0) {
        throw ParameterError("evolve_quadratic: requires a != 0");
    }
    if (!coeffs.beta_resolved()) {
        throw ParameterError("evolve_quadratic: beta must be resolved first");
    }
    check_initial_profile(params, gamma);
    const double s = params.s;
    if (tau < s) {
        throw DomainError("evolve_quadratic: tau before the initial time");
    }
    const GridSpec& spec = gamma.spec();
    if (tau == s) {
        return gamma;
    }

    {
        std::vector<double> ts(9);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            ts[i] = s + (tau - s) * static_cast<double>(i) / 8.0;
        }
        const auto rep = check_exact_solvability(params, coeffs, ts, opts.solvability_tol);
        if (!rep.satisfied) {
            throw ParameterError(
                "evolve_quadratic: coefficients do not satisfy the closure "
                "conditions (residual " +
                std::to_string(rep.max_residual) + ")");
        }
    }

    const double a = params.a;
    const double al = params.alpha;
    const double eps = params.epsilon;
    const double c = al / a + a * eps;
    const double dt = tau - s;
    const double fs = coeffs.f(s);
    const double gs = coeffs.g(s);
    const double ft = coeffs.f(tau);
    const double gt = coeffs.g(tau);
    if (!(fs > 0.0) || !(ft > 0.0)) {
        throw DomainError("evolve_quadratic: f must stay positive");
    }
    const double sqfs = std::sqrt(fs);
    const double sqft = std::sqrt(ft);
    auto y_at_s = [&](double xp) {
        return (std::asinh((a * xp + gs) / sqfs) + 0.5 * std::log(fs)) / a;
    };
    auto y_at_t = [&](double x) {
        return (std::asinh((a * x + gt) / sqft) + 0.5 * std::log(ft)) / a;
    };

    const int n = spec.n;
    const double dx = spec.dx();
    std::vector<double> ys(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        ys[static_cast<std::size_t>(i)] = y_at_s(spec.point(i));
    }

    const double var = 2.0 * eps * dt;  // kernel variance in the flat variable
    const double sd = std::sqrt(var);
    const double amp = std::exp(al * dt) / std::sqrt(4.0 * M_PI * eps * dt);

    // Forward image of a source point is a Gaussian in y centred at
    // y'(x') - c dt; estimate the mass escaping the grid's y-image.
    {
        const double yt_lo = y_at_t(spec.x_min);
        const double yt_hi = y_at_t(spec.x_max);
        const double inv = 1.0 / (sd * kSqrt2);
        double lost = 0.0;
        for (int i = 0; i < n; ++i) {
            const double m = ys[static_cast<std::size_t>(i)] - c * dt;
            const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            lost += w * gamma.value(i) *
                    (0.5 * std::erfc((m - yt_lo) * inv) +
                     0.5 * std::erfc((yt_hi - m) * inv));
        }
        lost *= dx;
        if (lost > opts.truncation_tol) {
            throw NumericalError(NumericalError::Kind::Truncation,
                                 "evolve_quadratic: estimated mass loss " +
                                     std::to_string(lost) + " exceeds tolerance");
        }
    }

    const auto gam = gamma.interpolant();
    const GaussRule& rule = gauss_legendre(opts.gl_order);
    const double half_panel = 0.5 * sd;

    // Panel edges in y: source grid images inside the window, subdivided to
    // resolve the kernel.
    auto make_edges = [&](double lo, double hi) {
        std::vector<double> coarse;
        coarse.push_back(lo);
        const double slack = 1e-12 * (hi - lo);
        for (auto it = std::upper_bound(ys.begin(), ys.end(), lo); it != ys.end(); ++it) {
            if (*it >= hi - slack) {
                break;
            }
            if (*it > lo + slack) {
                coarse.push_back(*it);
            }
        }
        coarse.push_back(hi);
        std::vector<double> edges;
        edges.push_back(coarse.front());
        for (std::size_t i = 0; i + 1 < coarse.size(); ++i) {
            const double A = coarse[i];
            const double B = coarse[i + 1];
            const int sub = std::max(1, static_cast<int>(std::ceil((B - A) / half_panel)));
            for (int j = 1; j <= sub; ++j) {
                edges.push_back(j == sub ? B
                                         : A + (B - A) * static_cast<double>(j) /
                                               static_cast<double>(sub));
            }
        }
        return edges;
    };

    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const double x = spec.point(i);
        const double y_c = y_at_t(x) + c * dt;
        const double lo = std::max(ys.front(), y_c - opts.kernel_cut * sd);
        const double hi = std::min(ys.back(), y_c + opts.kernel_cut * sd);
        if (!(lo < hi)) {
            continue;
        }
        const auto edges = make_edges(lo, hi);
        auto integrand = [&](double yp) {
            const double e = std::exp(a * yp);
            const double xp = (0.5 * (e - fs / e) - gs) / a;
            // Integrating over y' absorbs dx' = (A_plus(y', s)/2) dy', which
            // cancels the initial-time change-of-measure factor exactly. The
            // final-time variant keeps the mismatched ratio instead.
            double jac = 1.0;
            if (opts.jacobian_at_final_time) {
                const double w = a * xp + gt;
                jac = 0.5 * (e + fs / e) / std::sqrt(ft + w * w);
            }
            const double d = y_c - yp;
            return amp * std::exp(-d * d / (4.0 * eps * dt)) * jac *
                   gam.eval_or(xp, 0.0);
        };
        out[static_cast<std::size_t>(i)] = integrate_over_edges(integrand, edges, rule);
    }

    DensityGrid result(spec, tau, std::move(out));
    if (!opts.jacobian_at_final_time &&
        std::abs(result.norm() - gamma.norm()) > opts.norm_tol) {
        throw NumericalError(NumericalError::Kind::NormDrift,
                             "evolve_quadratic: output norm drifted; grid too coarse "
                             "or too short");
    }
    return result;
}

} // namespace nfpe
