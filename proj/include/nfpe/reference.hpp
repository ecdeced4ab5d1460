#pragma once

#include "nfpe/grid.hpp"
#include "nfpe/model.hpp"

#include <span>
#include <vector>

namespace nfpe {

enum class FdScheme {
    Explicit,      // forward Euler, step bounded by the diffusion CFL limit
    SemiImplicit,  // Crank-Nicolson diffusion, explicit drift
};

struct FdOptions {
    FdScheme scheme = FdScheme::Explicit;
    // Target step; 0 picks dx^2 / (4 max D) for the explicit scheme and an
    // advective bound for the semi-implicit one. Steps are shrunk per output
    // segment so snapshot times are hit exactly.
    double dt = 0.0;
    // Self-consistent beta from the evolving grid moment each step, instead
    // of the precomputed moment-ODE trajectory. Only meaningful when the
    // coefficient set leaves beta unresolved.
    bool feedback_moment = false;
    double norm_drift_tol = 1e-6;   // |conserved sum - initial| that aborts
    double negativity_tol = 1e-8;   // relative negative-density floor
};

struct FdSolution {
    std::vector<DensityGrid> snapshots;  // one per requested output time
    std::vector<double> moment_times;    // per-step grid-moment history
    std::vector<double> moment_values;
};

// Finite-volume discretization of the full model on gamma's grid with
// zero-flux boundaries. Drift and diffusion live on cell faces,
//
//   F_{i+1/2} = (alpha x_f + kappa beta) (u_i + u_{i+1})/2
//             + D(x_f, tau) (u_{i+1} - u_i)/dx,
//   du_i/dtau = (F_{i+1/2} - F_{i-1/2})/dx,
//
// so the discrete sum is conserved exactly (to roundoff) by telescoping;
// this is the independent check the kernel-based solvers are measured
// against. output_times must ascend and lie in [params.s, inf).
FdSolution fd_solve(const ModelParams& params, const CoefficientSet& coeffs,
                    const DensityGrid& gamma, std::span<const double> output_times,
                    const FdOptions& opts = {});

struct GridMetrics {
    double l1;        // trapezoid integral of |u - v|
    double linf;      // max pointwise difference
    double mean_diff;
    double variance_diff;
};

// Compares two profiles sampled on the same grid at the same time.
GridMetrics grid_metrics(const DensityGrid& u, const DensityGrid& v);

} // namespace nfpe
