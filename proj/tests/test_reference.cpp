#include <doctest.h>

#include "nfpe/errors.hpp"
#include "nfpe/exact.hpp"
#include "nfpe/moments.hpp"
#include "nfpe/reference.hpp"

#include <cmath>
#include <vector>

using namespace nfpe;

namespace {

const ModelParams kQuadratic{0.44, 0.1, 1.0, 0.019, 0.0};

CoefficientSet fitted_coeffs() {
    return CoefficientSet::exp_decay_f(0.15789473684210525, 0.5, 0.0, 0.04);
}

} // namespace

TEST_CASE("fd_solve: discrete mass is conserved to roundoff") {
    const GridSpec spec{-2.0, 2.0, 801};
    const DensityGrid gamma = gaussian_density(spec, 0.0, 0.2, 0.01);
    const std::vector<double> times{0.5, 1.0};
    const FdSolution sol = fd_solve(kQuadratic, fitted_coeffs(), gamma, times);
    REQUIRE(sol.snapshots.size() == 2);
    for (const DensityGrid& u : sol.snapshots) {
        CHECK(std::fabs(u.norm() - gamma.norm()) < 1e-12);
        CHECK(u.min_value() > -1e-10);
    }
    CHECK(sol.snapshots[0].tau() == 0.5);
    CHECK(sol.snapshots[1].tau() == 1.0);
}

TEST_CASE("fd_solve: OU variance closed form (constant diffusion)") {
    const ModelParams params{0.44, 0.0, 0.0, 0.003, 0.0};
    const CoefficientSet coeffs = CoefficientSet::constant(1.0, 0.0, 0.0);
    const GridSpec spec{-1.0, 1.0, 1201};
    const DensityGrid gamma = gaussian_density(spec, 0.0, 0.1, 0.005);
    const std::vector<double> times{1.0};
    const FdSolution sol = fd_solve(params, coeffs, gamma, times);
    const double want = 0.005 * std::exp(-0.88) +
                        (0.003 / 0.44) * (1.0 - std::exp(-0.88));
    CHECK(std::fabs(sol.snapshots[0].variance() - want) < 1e-4);
    CHECK(std::fabs(sol.snapshots[0].mean() - 0.1 * std::exp(-0.44)) < 1e-5);
}

TEST_CASE("fd_solve: grid moment follows the moment ODE") {
    const GridSpec spec{-2.0, 2.5, 1201};
    const DensityGrid gamma = gaussian_density(spec, 0.0, 0.5, 0.01);
    const std::vector<double> times{1.0};
    const CoefficientSet coeffs = fitted_coeffs();
    const FdSolution sol = fd_solve(kQuadratic, coeffs, gamma, times);
    const double ode = moment_quadratic(kQuadratic, coeffs, 0.5, 1.0);
    CHECK(std::fabs(sol.snapshots[0].mean() - ode) / std::fabs(ode) < 1e-3);

    // per-step history brackets the run
    REQUIRE(!sol.moment_times.empty());
    CHECK(sol.moment_times.front() == 0.0);
    // the last step lands on the snapshot time up to accumulation roundoff
    CHECK(sol.moment_times.back() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(sol.moment_values.front() - gamma.mean()) < 1e-12);
    CHECK(std::fabs(sol.moment_values.back() - sol.snapshots[0].mean()) < 1e-12);
}

TEST_CASE("fd_solve: feedback moment closes like the precomputed one") {
    const GridSpec spec{-2.0, 2.5, 1001};
    const DensityGrid gamma = gaussian_density(spec, 0.0, 0.5, 0.01);
    const std::vector<double> times{0.5};

    FdOptions pre;
    const FdSolution with_ode = fd_solve(kQuadratic, fitted_coeffs(), gamma, times, pre);

    FdOptions fb;
    fb.feedback_moment = true;
    const FdSolution with_grid = fd_solve(kQuadratic, fitted_coeffs(), gamma, times, fb);

    const GridMetrics m = grid_metrics(with_ode.snapshots[0], with_grid.snapshots[0]);
    CHECK(m.l1 < 1e-5);
}

TEST_CASE("fd_solve: semi-implicit scheme agrees with explicit") {
    const GridSpec spec{-2.0, 2.0, 801};
    const DensityGrid gamma = gaussian_density(spec, 0.0, 0.2, 0.01);
    const std::vector<double> times{0.5};
    const CoefficientSet coeffs = fitted_coeffs();

    const FdSolution ex = fd_solve(kQuadratic, coeffs, gamma, times);
    FdOptions opt;
    opt.scheme = FdScheme::SemiImplicit;
    opt.dt = 4e-5;  // splitting error is O(dt); keep it under the L1 budget
    const FdSolution im = fd_solve(kQuadratic, coeffs, gamma, times, opt);
    CHECK(std::fabs(im.snapshots[0].norm() - 1.0) < 1e-10);
    CHECK(grid_metrics(ex.snapshots[0], im.snapshots[0]).l1 < 1e-5);
}

TEST_CASE("fd_solve: second-order spatial convergence to the kernel solution") {
    const ModelParams params{0.44, 0.0, 1.0, 0.019, 0.0};
    const CoefficientSet coeffs =
        exact_coefficient_set(params, 1.0, 0.04, [](double) { return 0.0; });
    const std::vector<double> times{0.25};
    auto fd_err = [&](int n) {
        const GridSpec spec{-2.0, 2.0, n};
        const DensityGrid gamma = gaussian_density(spec, 0.0, 0.3, 0.01);
        const FdSolution sol = fd_solve(params, coeffs, gamma, times);
        const DensityGrid truth = evolve_quadratic(params, coeffs, gamma, 0.25);
        return grid_metrics(truth, sol.snapshots[0]).l1;
    };
    const double ratio = fd_err(501) / fd_err(1001);
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.5);
}

TEST_CASE("fd_solve: explicit stability guard") {
    const GridSpec spec{-2.0, 2.0, 801};
    const DensityGrid gamma = gaussian_density(spec, 0.0, 0.2, 0.01);
    const std::vector<double> times{0.5};
    FdOptions opt;
    opt.dt = 0.01;  // far beyond dx^2/(2 max D) for this grid
    CHECK_THROWS_AS(fd_solve(kQuadratic, fitted_coeffs(), gamma, times, opt),
                    NumericalError);
}

TEST_CASE("fd_solve: negative initial dip is reported, not propagated") {
    const GridSpec spec{-2.0, 2.0, 801};
    DensityGrid gamma = gaussian_density(spec, 0.0, 0.2, 0.01);
    std::vector<double> v(gamma.values().begin(), gamma.values().end());
    v[100] = -1e-3;
    const DensityGrid dipped(spec, 0.0, std::move(v));
    const std::vector<double> times{0.1};
    CHECK_THROWS_AS(fd_solve(kQuadratic, fitted_coeffs(), dipped, times),
                    NumericalError);
}

TEST_CASE("fd_solve: input validation") {
    const GridSpec spec{-2.0, 2.0, 801};
    const DensityGrid gamma = gaussian_density(spec, 0.0, 0.2, 0.01);
    const CoefficientSet coeffs = fitted_coeffs();

    std::vector<double> descending{1.0, 0.5};
    CHECK_THROWS_AS(fd_solve(kQuadratic, coeffs, gamma, descending), ParameterError);
    std::vector<double> early{-0.5};
    CHECK_THROWS_AS(fd_solve(kQuadratic, coeffs, gamma, early), DomainError);
    std::vector<double> none;
    CHECK_THROWS_AS(fd_solve(kQuadratic, coeffs, gamma, none), ParameterError);

    const DensityGrid boundary = gaussian_density(spec, 0.0, 1.9, 0.05);
    std::vector<double> ok{0.5};
    CHECK_THROWS_AS(fd_solve(kQuadratic, coeffs, boundary, ok), ParameterError);
}

TEST_CASE("grid_metrics: reports the familiar norms") {
    const GridSpec spec{0.0, 1.0, 101};
    std::vector<double> a(101, 1.0);
    std::vector<double> b(101, 1.0);
    b[50] += 0.5;
    const DensityGrid u(spec, 0.0, a);
    const DensityGrid v(spec, 0.0, b);
    const GridMetrics m = grid_metrics(u, v);
    CHECK(m.linf == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.l1 == doctest::Approx(0.5 * 0.01).epsilon(1e-12));

    const GridSpec other{0.0, 2.0, 101};
    const DensityGrid w(other, 0.0, a);
    CHECK_THROWS_AS(grid_metrics(u, w), ParameterError);
}
