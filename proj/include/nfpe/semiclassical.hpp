#pragma once

#include "nfpe/grid.hpp"
#include "nfpe/transform.hpp"

#include <map>
#include <span>
#include <vector>

namespace nfpe {

// Small-eps asymptotics around the deterministic characteristic Y(tau) in
// the flat variable. Writing xi = (y - Y(tau))/sqrt(eps), the solution is
// built as phi0 + sqrt(eps) phi1 where
//
//   Y' = -q0(Y, tau) / A_plus(Y, tau)                 (characteristic)
//   R  = d/dy (q0/A_plus) at Y                        (linearized rate)
//   Q0 = (1/2) d^2/dy^2 (q0/A_plus) at Y
//   Q1 = a A_minus(Y)/A_plus(Y)    (order-eps drift from the full q)
//
// and the order-0 equation (-d_tau + alpha + R xi d_xi + d_xi^2) phi0 = 0 is
// solved exactly by rescaling: with h = exp(int R) and flat time
// tau' = int h^2, phi0 is a heat convolution of the initial profile. The
// order-1 correction obeys L0 phi1 = -(Q0 xi^2 + Q1) d_xi phi0 and is
// accumulated by a Duhamel quadrature over source times.

struct SemiclassicalOptions {
    double tau_step = 1e-3;           // trajectory / coefficient grid step
    GridSpec xi_grid{-8.0, 8.0, 641}; // stretched-variable grid for profiles
    int sigma_nodes = 32;             // Gauss order of the source-time quadrature
    int gl_order = 8;                 // Gauss order per spatial panel
    double kernel_cut = 10.0;         // integrate center +- cut standard deviations
    double traj_tol = 1e-8;           // Richardson target per unit time
};

// A profile on the xi grid together with its first two xi derivatives,
// all produced analytically by the same kernel quadrature.
struct XiProfile {
    std::vector<double> v;
    std::vector<double> d1;
    std::vector<double> d2;
};

struct ExpansionCoeffs {
    std::vector<double> r;
    std::vector<double> q0;
    std::vector<double> q1;
};

// Characteristic Y on tau_grid (uniform, ascending) started from y_start.
// RK4 with halved-step Richardson control: the accumulated estimate must
// stay below tol per unit time, and a non-finite or overflowing Y aborts.
std::vector<double> solve_trajectory(const TransformContext& ctx, double y_start,
                                     std::span<const double> tau_grid,
                                     double tol = 1e-8);

// R, Q0, Q1 along a computed trajectory.
ExpansionCoeffs expansion_coeffs(const TransformContext& ctx,
                                 std::span<const double> tau_grid,
                                 std::span<const double> y);

// h = exp(cumulative R) and tau' = cumulative h^2 on the same grid.
std::pair<std::vector<double>, std::vector<double>> scale_and_flat_time(
    std::span<const double> tau_grid, std::span<const double> r);

// Precomputed trajectory, expansion coefficients, rescaling data, and the
// initial xi profile, plus caches of the quadrature-built phi profiles.
// gamma_xi samples the initial condition on opts.xi_grid (in the stretched
// variable at tau = s, where the scale factor is 1) and must be negligible
// at the grid edges.
class SemiclassicalState {
public:
    SemiclassicalState(TransformContext ctx, double y_start,
                       std::vector<double> gamma_xi, double tau_max,
                       const SemiclassicalOptions& opts = {});

    const TransformContext& context() const { return ctx_; }
    const SemiclassicalOptions& options() const { return opts_; }
    double start_time() const { return s_; }
    double tau_max() const { return tau_max_; }
    double y_start() const { return y_start_; }

    double trajectory(double tau) const;  // Y
    double scale(double tau) const;       // h
    double flat_time(double tau) const;   // tau'
    double coeff_r(double tau) const;
    double coeff_q0(double tau) const;
    double coeff_q1(double tau) const;
    double trajectory_rate(double tau) const;  // Y' from the defining equation

    std::span<const double> tau_nodes() const { return taus_; }
    std::span<const double> trajectory_nodes() const { return y_; }
    std::span<const double> gamma_xi() const { return gamma_xi_; }

    // Cached order-0 / order-1 profiles at tau in [s, tau_max].
    const XiProfile& phi0(double tau);
    const XiProfile& phi1(double tau);

private:
    XiProfile compute_phi0(double tau) const;
    XiProfile compute_phi1(double tau);
    double interp(const std::vector<double>& samples, double tau) const;

    TransformContext ctx_;
    SemiclassicalOptions opts_;
    double s_;
    double tau_max_;
    double y_start_;
    std::vector<double> taus_;
    std::vector<double> y_;
    std::vector<double> r_;
    std::vector<double> q0_;
    std::vector<double> q1_;
    std::vector<double> h_;
    std::vector<double> taup_;
    std::vector<double> gamma_xi_;
    double max_q_;  // max over nodes of |Q0| + |Q1|, for the zero-source shortcut
    std::map<double, XiProfile> phi0_cache_;
    std::map<double, XiProfile> phi1_cache_;
};

// phi0 / phi1 at tau (cached inside the state).
const XiProfile& phi0_profile(SemiclassicalState& state, double tau);
const XiProfile& phi1_profile(SemiclassicalState& state, double tau);

// Reconstructs the density on an x grid at tau:
//   u(x) = phi(xi(x)), xi(x) = (y(x, tau) - Y(tau)) / sqrt(eps),
// with phi = phi0 (+ sqrt(eps) phi1 when include_phi1) interpolated from the
// xi grid and taken as 0 beyond its edges. renormalize divides by the grid
// norm. eps is the model's epsilon.
DensityGrid assemble_density(SemiclassicalState& state, double tau,
                             const GridSpec& x_spec, bool include_phi1 = true,
                             bool renormalize = false);

struct ResidualOptions {
    double dtau = 5e-4;        // central-difference step for d/dtau
    bool include_phi1 = true;  // ablate the order-1 correction when false
    bool check_stencil = true; // abort if stencil noise dominates the residual
};

struct ResidualReport {
    double epsilon;
    bool phi1_included;
    double residual_norm;  // L2 of the full-operator residual over the xi grid
    double solution_norm;  // L2 of phi
    double ratio;          // residual_norm / solution_norm
};

// Applies the full transformed operator at the given eps (which may differ
// from the model's, for scaling sweeps; the profiles themselves are
// eps-independent) to phi and reports the relative residual:
//   L phi = -d_tau phi + alpha phi
//         + (Y' + q_full(Y + sqrt(eps) xi, tau)/A_plus) / sqrt(eps) d_xi phi
//         + d_xi^2 phi.
ResidualReport residual(SemiclassicalState& state, double tau, double epsilon,
                        const ResidualOptions& opts = {});

struct OrderResiduals {
    double order0;  // ||(-d_tau + alpha + R xi d_xi + d_xi^2) phi0|| / ||phi0||
    double order1;  // ||L0 phi1 + (Q0 xi^2 + Q1) d_xi phi0|| / ||phi0||
};

// Checks the expansion's defining equations order by order at tau, using
// the same central-difference time derivative as residual().
OrderResiduals order_equation_residuals(SemiclassicalState& state, double tau,
                                        double dtau = 5e-4);

} // namespace nfpe
