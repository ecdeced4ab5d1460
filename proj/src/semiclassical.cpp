#include "nfpe/semiclassical.hpp"

#include "nfpe/errors.hpp"
#include "nfpe/moments.hpp"
#include "nfpe/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nfpe {

namespace {

double traj_rhs(const TransformContext& ctx, double t, double y) {
    return -ctx.q_zero(y, t) / ctx.a_plus(y, t);
}

// Cubic interpolation on a uniform sample vector without building an
// interpolant object (hot path).
double cubic_sample(const std::vector<double>& v, double x0, double dx, double x) {
    const std::size_t n = v.size();
    double t = (x - x0) / dx;
    t = std::clamp(t, 0.0, static_cast<double>(n - 1));
    auto j = static_cast<std::ptrdiff_t>(std::floor(t)) - 1;
    j = std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(n) - 4);
    const double s = t - static_cast<double>(j);
    const double w0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
    const double w1 = s * (s - 2.0) * (s - 3.0) / 2.0;
    const double w2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
    const double w3 = s * (s - 1.0) * (s - 2.0) / 6.0;
    return w0 * v[static_cast<std::size_t>(j)] + w1 * v[static_cast<std::size_t>(j) + 1] +
           w2 * v[static_cast<std::size_t>(j) + 2] + w3 * v[static_cast<std::size_t>(j) + 3];
}

// Value and first two target-derivatives of
//   amp * int K_T(cs xi_j - ss xi') src(xi') ss dxi',
// K_T(z) = exp(-z^2 / 4T) / sqrt(4 pi T), windowed at cut standard
// deviations and clipped to the grid.
XiProfile gaussian_convolve(const GridSpec& xi, const UniformCubicInterpolant& src,
                            double amp, double cs, double ss, double T, double cut,
                            const GaussRule& rule) {
    const int n = xi.n;
    XiProfile out;
    out.v.assign(static_cast<std::size_t>(n), 0.0);
    out.d1.assign(static_cast<std::size_t>(n), 0.0);
    out.d2.assign(static_cast<std::size_t>(n), 0.0);
    const double sd = std::sqrt(2.0 * T);
    const double dxi = xi.dx();
    const double halfwidth = cut * sd / ss;
    const double inv4t = 1.0 / (4.0 * T);
    const double knorm = 1.0 / std::sqrt(4.0 * M_PI * T);
    const double max_panel = std::min(dxi, 0.5 * sd / ss);
    const std::size_t m = rule.nodes.size();
    for (int j = 0; j < n; ++j) {
        const double zc = cs * xi.point(j);
        const double center = zc / ss;
        const double lo = std::max(xi.x_min, center - halfwidth);
        const double hi = std::min(xi.x_max, center + halfwidth);
        if (!(lo < hi)) {
            continue;
        }
        const auto edges = panel_edges(lo, hi, xi.x_min, dxi, max_panel);
        double acc_v = 0.0;
        double acc_d1 = 0.0;
        double acc_d2 = 0.0;
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            const double mid = 0.5 * (edges[e] + edges[e + 1]);
            const double half = 0.5 * (edges[e + 1] - edges[e]);
            for (std::size_t k = 0; k < m; ++k) {
                const double xp = mid + half * rule.nodes[k];
                const double z = zc - ss * xp;
                const double base = half * rule.weights[k] * knorm *
                                    std::exp(-z * z * inv4t) * src.eval_or(xp, 0.0) * ss;
                const double p = -cs * z * 2.0 * inv4t;
                acc_v += base;
                acc_d1 += base * p;
                acc_d2 += base * (p * p - cs * cs * 2.0 * inv4t);
            }
        }
        out.v[static_cast<std::size_t>(j)] = amp * acc_v;
        out.d1[static_cast<std::size_t>(j)] = amp * acc_d1;
        out.d2[static_cast<std::size_t>(j)] = amp * acc_d2;
    }
    return out;
}

double l2_norm(const std::vector<double>& v, double dx) {
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double w = (i == 0 || i + 1 == v.size()) ? 0.5 : 1.0;
        sum += w * v[i] * v[i];
    }
    return std::sqrt(sum * dx);
}

} // namespace

std::vector<double> solve_trajectory(const TransformContext& ctx, double y_start,
                                     std::span<const double> tau_grid, double tol) {
    if (tau_grid.size() < 2) {
        throw ParameterError("solve_trajectory: need at least two nodes");
    }
    auto rhs = [&ctx](double t, double y) { return traj_rhs(ctx, t, y); };
    std::vector<double> out(tau_grid.size());
    out[0] = y_start;
    double est = 0.0;
    const double a = ctx.params().a;
    for (std::size_t i = 0; i + 1 < tau_grid.size(); ++i) {
        const double t = tau_grid[i];
        const double h = tau_grid[i + 1] - t;
        if (!(h > 0.0)) {
            throw ParameterError("solve_trajectory: grid must ascend");
        }
        const double full = rk4_step(rhs, t, out[i], h);
        double half = rk4_step(rhs, t, out[i], 0.5 * h);
        half = rk4_step(rhs, t + 0.5 * h, half, 0.5 * h);
        est += std::abs(full - half) / 15.0;
        if (!std::isfinite(half) || std::abs(a * half) > 600.0) {
            throw NumericalError(NumericalError::Kind::TrajectoryEscape,
                                 "solve_trajectory: characteristic left the resolved "
                                 "region near tau = " +
                                     std::to_string(t));
        }
        out[i + 1] = half;
    }
    const double span = tau_grid.back() - tau_grid.front();
    if (est > tol * span) {
        throw NumericalError(NumericalError::Kind::Resolution,
                             "solve_trajectory: step error estimate exceeds target; "
                             "reduce the grid step");
    }
    return out;
}

ExpansionCoeffs expansion_coeffs(const TransformContext& ctx,
                                 std::span<const double> tau_grid,
                                 std::span<const double> y) {
    if (tau_grid.size() != y.size()) {
        throw ParameterError("expansion_coeffs: grid and trajectory sizes differ");
    }
    const double a = ctx.params().a;
    const double al = ctx.params().alpha;
    ExpansionCoeffs ec;
    ec.r.resize(tau_grid.size());
    ec.q0.resize(tau_grid.size());
    ec.q1.resize(tau_grid.size());
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        const double t = tau_grid[i];
        const double yy = y[i];
        const double ap = ctx.a_plus(yy, t);
        const double am = ctx.a_minus(yy, t);
        const double e = std::exp(-a * yy);
        const double fd = ctx.coeffs().f_dot(t);
        const double yd = traj_rhs(ctx, t, yy);
        const double r = (fd * e + al * ap + a * yd * am) / ap;
        ec.r[i] = r;
        ec.q0[i] =
            (a / (2.0 * ap)) * (-fd * e + al * am + a * yd * ap) - (a * am / ap) * r;
        ec.q1[i] = a * am / ap;
    }
    return ec;
}

std::pair<std::vector<double>, std::vector<double>> scale_and_flat_time(
    std::span<const double> tau_grid, std::span<const double> r) {
    if (tau_grid.size() != r.size() || tau_grid.size() < 2) {
        throw ParameterError("scale_and_flat_time: bad sample sizes");
    }
    const double dt = tau_grid[1] - tau_grid[0];
    const auto ir = cumulative_integral(r, dt);
    std::vector<double> h(ir.size());
    for (std::size_t i = 0; i < ir.size(); ++i) {
        h[i] = std::exp(ir[i]);
    }
    std::vector<double> h2(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        h2[i] = h[i] * h[i];
    }
    auto taup = cumulative_integral(h2, dt);
    return {std::move(h), std::move(taup)};
}

SemiclassicalState::SemiclassicalState(TransformContext ctx, double y_start,
                                       std::vector<double> gamma_xi, double tau_max,
                                       const SemiclassicalOptions& opts)
    : ctx_(std::move(ctx)), opts_(opts), s_(ctx_.params().s), tau_max_(tau_max),
      y_start_(y_start) {
    opts_.xi_grid.validate();
    if (!(tau_max_ > s_)) {
        throw ParameterError("SemiclassicalState: tau_max must exceed the start time");
    }
    if (gamma_xi.size() != static_cast<std::size_t>(opts_.xi_grid.n)) {
        throw ParameterError("SemiclassicalState: gamma_xi does not match xi_grid");
    }
    gamma_xi_ = std::move(gamma_xi);
    double peak = 0.0;
    for (double v : gamma_xi_) {
        if (!std::isfinite(v)) {
            throw ParameterError("SemiclassicalState: non-finite initial profile");
        }
        peak = std::max(peak, std::abs(v));
    }
    if (peak == 0.0) {
        throw ParameterError("SemiclassicalState: initial profile vanishes");
    }
    if (std::abs(gamma_xi_.front()) > 1e-10 * peak ||
        std::abs(gamma_xi_.back()) > 1e-10 * peak) {
        throw NumericalError(NumericalError::Kind::Truncation,
                             "SemiclassicalState: initial profile is not negligible "
                             "at the xi-grid edges");
    }
    taus_ = uniform_time_grid(s_, tau_max_, opts_.tau_step);
    y_ = solve_trajectory(ctx_, y_start_, taus_, opts_.traj_tol);
    auto ec = expansion_coeffs(ctx_, taus_, y_);
    r_ = std::move(ec.r);
    q0_ = std::move(ec.q0);
    q1_ = std::move(ec.q1);
    auto st = scale_and_flat_time(taus_, r_);
    h_ = std::move(st.first);
    taup_ = std::move(st.second);
    max_q_ = 0.0;
    for (std::size_t i = 0; i < q0_.size(); ++i) {
        max_q_ = std::max(max_q_, std::abs(q0_[i]) + std::abs(q1_[i]));
    }
}

double SemiclassicalState::interp(const std::vector<double>& samples, double tau) const {
    const double t0 = taus_.front();
    const double t1 = taus_.back();
    const double slack = 1e-9 * std::max(1.0, t1 - t0);
    if (tau < t0 - slack || tau > t1 + slack) {
        throw DomainError("SemiclassicalState: tau outside [s, tau_max]");
    }
    return cubic_sample(samples, t0, taus_[1] - t0, std::clamp(tau, t0, t1));
}

double SemiclassicalState::trajectory(double tau) const { return interp(y_, tau); }
double SemiclassicalState::scale(double tau) const { return interp(h_, tau); }
double SemiclassicalState::flat_time(double tau) const { return interp(taup_, tau); }
double SemiclassicalState::coeff_r(double tau) const { return interp(r_, tau); }
double SemiclassicalState::coeff_q0(double tau) const { return interp(q0_, tau); }
double SemiclassicalState::coeff_q1(double tau) const { return interp(q1_, tau); }

double SemiclassicalState::trajectory_rate(double tau) const {
    return traj_rhs(ctx_, tau, trajectory(tau));
}

XiProfile SemiclassicalState::compute_phi0(double tau) const {
    const double T = flat_time(tau);
    const GridSpec& xi = opts_.xi_grid;
    if (T <= 1e-14) {
        // At the start time the profile is the initial condition itself;
        // derivatives fall back to central differences on the samples.
        XiProfile out;
        out.v = gamma_xi_;
        const auto n = static_cast<std::size_t>(xi.n);
        out.d1.assign(n, 0.0);
        out.d2.assign(n, 0.0);
        const double dxi = xi.dx();
        for (std::size_t j = 1; j + 1 < n; ++j) {
            out.d1[j] = (gamma_xi_[j + 1] - gamma_xi_[j - 1]) / (2.0 * dxi);
            out.d2[j] = (gamma_xi_[j + 1] - 2.0 * gamma_xi_[j] + gamma_xi_[j - 1]) /
                        (dxi * dxi);
        }
        return out;
    }
    const UniformCubicInterpolant src(xi.x_min, xi.dx(), gamma_xi_);
    const double amp = std::exp(ctx_.params().alpha * (tau - s_));
    return gaussian_convolve(xi, src, amp, scale(tau), 1.0, T, opts_.kernel_cut,
                             gauss_legendre(opts_.gl_order));
}

XiProfile SemiclassicalState::compute_phi1(double tau) {
    const GridSpec& xi = opts_.xi_grid;
    const auto n = static_cast<std::size_t>(xi.n);
    XiProfile acc;
    acc.v.assign(n, 0.0);
    acc.d1.assign(n, 0.0);
    acc.d2.assign(n, 0.0);
    const double span = tau - s_;
    if (span <= 0.0 || max_q_ < 1e-14) {
        return acc;
    }
    const GaussRule& srule = gauss_legendre(opts_.sigma_nodes);
    const GaussRule& prule = gauss_legendre(opts_.gl_order);
    const double smax = std::sqrt(span);
    const double taup_tau = flat_time(tau);
    const double h_tau = scale(tau);
    const double alpha = ctx_.params().alpha;
    for (std::size_t k = 0; k < srule.nodes.size(); ++k) {
        // Substituting eta = tau - sigma^2 regularizes the short-time kernel;
        // the Gauss rule never touches the endpoints.
        const double sig = 0.5 * smax * (srule.nodes[k] + 1.0);
        const double wq = 0.5 * smax * srule.weights[k] * 2.0 * sig;
        const double eta = tau - sig * sig;
        const double T = taup_tau - flat_time(eta);
        if (!(T > 0.0)) {
            continue;
        }
        const XiProfile& p0 = phi0(eta);
        const double q0v = coeff_q0(eta);
        const double q1v = coeff_q1(eta);
        std::vector<double> source(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double x = xi.point(static_cast<int>(j));
            source[j] = (q0v * x * x + q1v) * p0.d1[j];
        }
        const UniformCubicInterpolant sfn(xi.x_min, xi.dx(), std::move(source));
        const double amp = std::exp(alpha * sig * sig);
        const XiProfile c = gaussian_convolve(xi, sfn, amp, h_tau, scale(eta), T,
                                              opts_.kernel_cut, prule);
        for (std::size_t j = 0; j < n; ++j) {
            acc.v[j] += wq * c.v[j];
            acc.d1[j] += wq * c.d1[j];
            acc.d2[j] += wq * c.d2[j];
        }
    }
    return acc;
}

const XiProfile& SemiclassicalState::phi0(double tau) {
    auto it = phi0_cache_.find(tau);
    if (it == phi0_cache_.end()) {
        it = phi0_cache_.emplace(tau, compute_phi0(tau)).first;
    }
    return it->second;
}

const XiProfile& SemiclassicalState::phi1(double tau) {
    auto it = phi1_cache_.find(tau);
    if (it == phi1_cache_.end()) {
        it = phi1_cache_.emplace(tau, compute_phi1(tau)).first;
    }
    return it->second;
}

const XiProfile& phi0_profile(SemiclassicalState& state, double tau) {
    return state.phi0(tau);
}

const XiProfile& phi1_profile(SemiclassicalState& state, double tau) {
    return state.phi1(tau);
}

DensityGrid assemble_density(SemiclassicalState& state, double tau,
                             const GridSpec& x_spec, bool include_phi1,
                             bool renormalize) {
    x_spec.validate();
    const GridSpec& xi = state.options().xi_grid;
    const double eps = state.context().params().epsilon;
    const double sqe = std::sqrt(eps);
    std::vector<double> prof = state.phi0(tau).v;
    if (include_phi1) {
        const XiProfile& p1 = state.phi1(tau);
        for (std::size_t j = 0; j < prof.size(); ++j) {
            prof[j] += sqe * p1.v[j];
        }
    }
    const UniformCubicInterpolant phi(xi.x_min, xi.dx(), std::move(prof));
    const double y_c = state.trajectory(tau);
    std::vector<double> vals(static_cast<std::size_t>(x_spec.n));
    for (int i = 0; i < x_spec.n; ++i) {
        const double y = state.context().y_of_x(x_spec.point(i), tau);
        vals[static_cast<std::size_t>(i)] = phi.eval_or((y - y_c) / sqe, 0.0);
    }
    if (renormalize) {
        DensityGrid raw(x_spec, tau, vals);
        const double nrm = raw.norm();
        if (!(std::abs(nrm) > 1e-300)) {
            throw NumericalError(NumericalError::Kind::Truncation,
                                 "assemble_density: no mass on the requested grid");
        }
        for (double& v : vals) {
            v /= nrm;
        }
    }
    return DensityGrid(x_spec, tau, std::move(vals));
}

namespace {

// phi = phi0 (+ sqrt(eps) phi1) with both derivative sets combined the same way.
XiProfile combined_profile(SemiclassicalState& state, double tau, double eps,
                           bool include_phi1) {
    XiProfile out = state.phi0(tau);
    if (include_phi1) {
        const double sqe = std::sqrt(eps);
        const XiProfile& p1 = state.phi1(tau);
        for (std::size_t j = 0; j < out.v.size(); ++j) {
            out.v[j] += sqe * p1.v[j];
            out.d1[j] += sqe * p1.d1[j];
            out.d2[j] += sqe * p1.d2[j];
        }
    }
    return out;
}

} // namespace

ResidualReport residual(SemiclassicalState& state, double tau, double epsilon,
                        const ResidualOptions& opts) {
    if (!(epsilon > 0.0)) {
        throw ParameterError("residual: epsilon must be positive");
    }
    if (!(opts.dtau > 0.0)) {
        throw ParameterError("residual: dtau must be positive");
    }
    const double reach = (opts.check_stencil ? 2.0 : 1.0) * opts.dtau;
    if (tau - reach < state.start_time() || tau + reach > state.tau_max()) {
        throw DomainError("residual: tau too close to the state's time range ends");
    }
    const GridSpec& xi = state.options().xi_grid;
    const auto n = static_cast<std::size_t>(xi.n);
    const XiProfile at = combined_profile(state, tau, epsilon, opts.include_phi1);
    const XiProfile plus = combined_profile(state, tau + opts.dtau, epsilon, opts.include_phi1);
    const XiProfile minus = combined_profile(state, tau - opts.dtau, epsilon, opts.include_phi1);

    const TransformContext& ctx = state.context();
    const double a = ctx.params().a;
    const double alpha = ctx.params().alpha;
    const double sqe = std::sqrt(epsilon);
    const double y_c = state.trajectory(tau);
    const double yd = state.trajectory_rate(tau);

    std::vector<double> res(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = xi.point(static_cast<int>(j));
        const double y = y_c + sqe * x;
        const double q_full = ctx.q_zero(y, tau) + a * epsilon * ctx.a_minus(y, tau);
        const double w = (yd + q_full / ctx.a_plus(y, tau)) / sqe;
        const double dphidt = (plus.v[j] - minus.v[j]) / (2.0 * opts.dtau);
        res[j] = -dphidt + alpha * at.v[j] + w * at.d1[j] + at.d2[j];
    }
    const double dxi = xi.dx();
    const double res_norm = l2_norm(res, dxi);
    const double sol_norm = l2_norm(at.v, dxi);
    if (sol_norm == 0.0) {
        throw DomainError("residual: zero solution norm");
    }

    if (opts.check_stencil) {
        const XiProfile p2 = combined_profile(state, tau + 2.0 * opts.dtau, epsilon,
                                              opts.include_phi1);
        const XiProfile m2 = combined_profile(state, tau - 2.0 * opts.dtau, epsilon,
                                              opts.include_phi1);
        std::vector<double> diff(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double d1v = (plus.v[j] - minus.v[j]) / (2.0 * opts.dtau);
            const double d2v = (p2.v[j] - m2.v[j]) / (4.0 * opts.dtau);
            diff[j] = (d1v - d2v) / 3.0;
        }
        const double est = l2_norm(diff, dxi);
        if (est > 0.25 * res_norm) {
            throw NumericalError(NumericalError::Kind::Resolution,
                                 "residual: time-stencil error is a large fraction of "
                                 "the residual; reduce dtau");
        }
    }
    return ResidualReport{epsilon, opts.include_phi1, res_norm, sol_norm,
                          res_norm / sol_norm};
}

OrderResiduals order_equation_residuals(SemiclassicalState& state, double tau,
                                        double dtau) {
    if (!(dtau > 0.0)) {
        throw ParameterError("order_equation_residuals: dtau must be positive");
    }
    if (tau - dtau < state.start_time() || tau + dtau > state.tau_max()) {
        throw DomainError("order_equation_residuals: tau too close to the range ends");
    }
    const GridSpec& xi = state.options().xi_grid;
    const auto n = static_cast<std::size_t>(xi.n);
    const double alpha = state.context().params().alpha;
    const double rr = state.coeff_r(tau);
    const double q0v = state.coeff_q0(tau);
    const double q1v = state.coeff_q1(tau);

    const XiProfile& at0 = state.phi0(tau);
    const XiProfile& pl0 = state.phi0(tau + dtau);
    const XiProfile& mi0 = state.phi0(tau - dtau);
    const XiProfile& at1 = state.phi1(tau);
    const XiProfile& pl1 = state.phi1(tau + dtau);
    const XiProfile& mi1 = state.phi1(tau - dtau);

    std::vector<double> r0(n), r1(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = xi.point(static_cast<int>(j));
        const double dt0 = (pl0.v[j] - mi0.v[j]) / (2.0 * dtau);
        r0[j] = -dt0 + alpha * at0.v[j] + rr * x * at0.d1[j] + at0.d2[j];
        const double dt1 = (pl1.v[j] - mi1.v[j]) / (2.0 * dtau);
        const double source = (q0v * x * x + q1v) * at0.d1[j];
        r1[j] = -dt1 + alpha * at1.v[j] + rr * x * at1.d1[j] + at1.d2[j] + source;
    }
    const double dxi = xi.dx();
    const double base = l2_norm(at0.v, dxi);
    if (base == 0.0) {
        throw DomainError("order_equation_residuals: zero order-0 profile");
    }
    return OrderResiduals{l2_norm(r0, dxi) / base, l2_norm(r1, dxi) / base};
}

} // namespace nfpe
