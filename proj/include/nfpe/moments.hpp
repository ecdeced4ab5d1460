#pragma once

#include "nfpe/model.hpp"

#include <span>
#include <vector>

namespace nfpe {

// First moment X(tau) of the solution, sampled on a uniform time grid with
// the ODE right-hand side stored at each node so queries interpolate with a
// cubic Hermite (4th order in the grid step).
class MomentTrajectory {
public:
    MomentTrajectory(std::vector<double> times, std::vector<double> values,
                     std::vector<double> derivatives);

    // X at tau; tau outside the sampled range throws DomainError.
    double operator()(double tau) const;

    double start_time() const { return times_.front(); }
    double end_time() const { return times_.back(); }
    std::span<const double> times() const { return times_; }
    std::span<const double> values() const { return values_; }

private:
    std::vector<double> times_;
    std::vector<double> values_;
    std::vector<double> derivs_;
    double dt_;
};

// Constant-diffusion closure: with beta = X the moment equation is
// X' = -(alpha + kappa) X, so X(tau) = x_start e^{-(alpha+kappa)(tau-s)}.
double moment_const_diffusion(const ModelParams& params, double x_start, double tau);

// Quadratic diffusion. With beta resolved the moment obeys
//   X' = -(alpha - 2 a^2 eps) X - kappa beta(tau) + 2 a eps g(tau);
// self-consistent beta = X folds the coupling into the decay rate. Evaluated
// in closed form: homogeneous decay plus an integrating-factor quadrature of
// the inhomogeneity (adaptive, abs tol 1e-12).
double moment_quadratic(const ModelParams& params, const CoefficientSet& coeffs,
                        double x_start, double tau);

// RK4 integration of the same equation on tau_grid (uniform, ascending,
// starting at params.s). Works for either beta mode.
MomentTrajectory moment_ode_solve(const ModelParams& params,
                                  const CoefficientSet& coeffs, double x_start,
                                  std::span<const double> tau_grid);

// Returns a copy of coeffs whose beta is an explicit callable. Self-consistent
// sets get the RK4 trajectory started from x_start and sampled up to tau_end
// with step dt; already-resolved sets pass through unchanged.
CoefficientSet resolve_beta(const ModelParams& params, const CoefficientSet& coeffs,
                            double x_start, double tau_end, double dt = 1e-3);

// Uniform grid from params.s to tau_end with step at most dt (the step is
// shrunk to land on tau_end exactly).
std::vector<double> uniform_time_grid(double s, double tau_end, double dt);

} // namespace nfpe
