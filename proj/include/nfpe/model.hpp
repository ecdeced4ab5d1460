#pragma once

#include <functional>
#include <span>

namespace nfpe {

using TimeFn = std::function<double(double)>;

// Parameters of the drift-diffusion model
//
//   u_tau = d/dx [ (alpha x + kappa beta(tau)) u ]
//         + eps d/dx [ (f(tau) + (a x + g(tau))^2) du/dx ],
//
// posed for tau >= s. beta is the mean-field input; when it is closed with
// the solution's own first moment the equation is nonlinear, but the closure
// happens at the moment-ODE level, never by iterating the PDE.
struct ModelParams {
    double alpha;    // linear drift rate, > 0
    double kappa;    // mean-field coupling weight, >= 0
    double a;        // slope of the quadratic diffusion factor (0 = constant diffusion)
    double epsilon;  // diffusion scale, > 0
    double s = 0.0;  // initial time

    void validate() const;
};

// Time-dependent coefficients, bundled with their derivatives because the
// transformed drift needs f' and g' analytically. beta left empty means
// "self-consistent": resolve it against the moment ODE before any PDE work.
struct CoefficientSet {
    TimeFn f;
    TimeFn f_dot;
    TimeFn g;
    TimeFn g_dot;
    TimeFn beta;

    bool beta_resolved() const { return static_cast<bool>(beta); }

    static CoefficientSet constant(double f0, double g0);
    static CoefficientSet constant(double f0, double g0, double beta0);
    // f(tau) = f0 exp(-decay (tau - tau0)), g constant, beta self-consistent.
    static CoefficientSet exp_decay_f(double f0, double decay, double tau0, double g0);
};

// Spot-checks that f_dot and g_dot differentiate f and g (central difference
// comparison at the given times) and that f >= 0 there. Throws ParameterError
// on mismatch. Intended for coefficient sets assembled from user callables.
void validate_coefficients(const CoefficientSet& coeffs, std::span<const double> times,
                           double rel_tol = 1e-6);

struct EmpiricalMapping {
    double a;
    double epsilon;
    CoefficientSet coeffs;  // beta left self-consistent
};

// Translates a fitted diffusion of the form
//   D2(tau, x) = b0 exp(-decay tau) + quad (x + shift)^2
// into model form eps (f(tau) + (a x + g)^2) at a chosen eps:
//   a = sqrt(quad / eps), f(tau) = (b0 / eps) exp(-decay tau), g = shift a.
// The drift rate and coupling weight are not identifiable from the diffusion
// fit and stay free model inputs.
EmpiricalMapping map_empirical_coefficients(double b0, double decay, double quad,
                                            double shift, double epsilon);

struct SolvabilityReport {
    bool satisfied;
    double max_residual;
};

// Residuals of the closure conditions under which the quadratic-diffusion
// equation reduces exactly to a constant-coefficient heat problem
// (c = alpha/a + a eps):
//   f' + 2 a c f = 0,   g' + alpha g - a kappa beta = 0.
// max_residual is the largest combined absolute residual over `times`.
SolvabilityReport check_exact_solvability(const ModelParams& params,
                                          const CoefficientSet& coeffs,
                                          std::span<const double> times,
                                          double tol = 1e-9);

} // namespace nfpe
