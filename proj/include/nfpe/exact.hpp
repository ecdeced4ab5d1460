#pragma once

#include "nfpe/grid.hpp"
#include "nfpe/model.hpp"
#include "nfpe/transform.hpp"

namespace nfpe {

// Propagator of the constant-diffusion linearization in centred variables
// (x and y are offsets from the respective means):
//
//   G_lin(tau, s, x, y) = e^{alpha dt / 2} / sqrt((4 pi eps / alpha) sinh(alpha dt))
//       * exp( - alpha e^{alpha dt} (x - e^{-alpha dt} y)^2 / (4 eps sinh(alpha dt)) ),
//
// a normal density in x with mean e^{-alpha dt} y and variance
// (eps/alpha)(1 - e^{-2 alpha dt}). Requires tau > s.
double green_lin(const ModelParams& params, double tau, double s, double x, double y);

struct EvolveOptions {
    double truncation_tol = 1e-6;  // estimated mass lost past the grid that aborts
    double norm_tol = 1e-4;        // allowed drift of the output integral
    double kernel_cut = 10.0;      // integrate over center +- cut standard deviations
    int gl_order = 8;              // Gauss order per quadrature panel
};

// Propagates gamma (sampled at params.s) to time tau under constant
// diffusion (params.a must be 0) with self-consistent mean field: the
// output mean follows X(tau) = X_gamma e^{-(alpha+kappa)(tau-s)} with
// X_gamma taken from the grid, and the shape relaxes through the propagator
// above. Returns the profile on gamma's grid.
DensityGrid evolve_const_diffusion(const ModelParams& params, const DensityGrid& gamma,
                                   double tau, const EvolveOptions& opts = {});

// Coefficient set of the exactly reducible quadratic-diffusion family,
// generated from initial values f_s > 0, g_s and an explicit beta:
//   f(tau) = f_s e^{-2 a c (tau - s)},  c = alpha/a + a eps,
//   g(tau) = g_s e^{-alpha (tau-s)}
//          + a kappa int_s^tau e^{-alpha (tau - xi)} beta(xi) dxi,
// which solve f' + 2 a c f = 0 and g' + alpha g = a kappa beta. The memory
// integral is evaluated adaptively (abs tol 1e-12) on each call.
CoefficientSet exact_coefficient_set(const ModelParams& params, double f_s, double g_s,
                                     TimeFn beta);

// Same family with self-consistent beta: beta = X closes the moment and g
// into the linear pair
//   X' = -(alpha + kappa - 2 a^2 eps) X + 2 a eps g,
//   g' = -alpha g + a kappa X,
// integrated by RK4 from (x_start, g_s) on a uniform grid up to tau_end and
// sampled by cubic Hermite; f keeps its closed form.
CoefficientSet exact_coefficient_set_selfconsistent(const ModelParams& params,
                                                    double f_s, double g_s,
                                                    double x_start, double tau_end,
                                                    double dt = 1e-3);

// Heat-kernel propagator of the reduced equation, pulled back to x:
//
//   G(tau, s, x, x') = e^{alpha (tau-s)} / sqrt(4 pi eps (tau-s))
//       * exp( -(y(x,tau) - y(x',s) + c (tau-s))^2 / (4 eps (tau-s)) ).
//
// Valid when ctx's coefficients satisfy the closure conditions; tau > s.
double green_quadratic(const TransformContext& ctx, double tau, double s, double x,
                       double xp);

struct QuadraticEvolveOptions {
    double truncation_tol = 1e-6;
    double norm_tol = 1e-4;
    double kernel_cut = 10.0;
    int gl_order = 8;
    // The kernel multiplies the initial profile by the change-of-measure
    // factor dy/dx'(x', s) = (f(s) + (a x' + g(s))^2)^{-1/2}. The final-time
    // variant is wrong (it breaks mass conservation at order one) and exists
    // only as a comparison switch.
    bool jacobian_at_final_time = false;
    double solvability_tol = 1e-8;
};

// Propagates gamma (sampled at params.s) to tau through the heat-kernel
// representation:
//   u(x, tau) = int G(tau, s, x, x') (f(s) + (a x' + g(s))^2)^{-1/2}
//               gamma(x') dx'.
// coeffs must satisfy the closure conditions (checked on a time sample) and
// carry a resolved beta. Returns the profile on gamma's grid.
DensityGrid evolve_quadratic(const ModelParams& params, const CoefficientSet& coeffs,
                             const DensityGrid& gamma, double tau,
                             const QuadraticEvolveOptions& opts = {});

} // namespace nfpe
