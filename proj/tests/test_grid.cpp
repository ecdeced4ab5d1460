#include <doctest.h>

#include "nfpe/errors.hpp"
#include "nfpe/grid.hpp"

#include <cmath>
#include <vector>

using namespace nfpe;

TEST_CASE("GridSpec: geometry and validation") {
    const GridSpec spec{-2.0, 2.0, 401};
    CHECK(spec.dx() == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(spec.point(0) == -2.0);
    CHECK(spec.point(400) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_NOTHROW(spec.validate());

    CHECK_THROWS_AS((GridSpec{1.0, -1.0, 100}.validate()), ParameterError);
    CHECK_THROWS_AS((GridSpec{0.0, 1.0, 3}.validate()), ParameterError);
    CHECK_THROWS_AS((GridSpec{0.0, 0.0, 100}.validate()), ParameterError);
}

TEST_CASE("gaussian_density: statistics match the sampled normal") {
    const GridSpec spec{-3.0, 3.0, 1201};
    const double mean = 0.4;
    const double var = 0.09;
    const DensityGrid g = gaussian_density(spec, 0.0, mean, var);
    CHECK(g.tau() == 0.0);
    CHECK(std::fabs(g.norm() - 1.0) < 1e-10);
    CHECK(std::fabs(g.mean() - mean) < 1e-10);
    CHECK(std::fabs(g.variance() - var) < 1e-9);
    CHECK(std::fabs(g.excess_kurtosis()) < 1e-6);
    CHECK(g.min_value() >= 0.0);
    CHECK(g.max_value() ==
          doctest::Approx(1.0 / std::sqrt(2.0 * M_PI * var)).epsilon(1e-6));
}

TEST_CASE("DensityGrid: edge mass flags a poorly contained profile") {
    const GridSpec wide{-5.0, 5.0, 801};
    const GridSpec tight{-0.5, 0.5, 801};
    CHECK(gaussian_density(wide, 0.0, 0.0, 0.04).edge_mass_fraction() < 1e-12);
    CHECK(gaussian_density(tight, 0.0, 0.0, 0.04).edge_mass_fraction() > 1e-4);
}

TEST_CASE("DensityGrid: rejects non-finite samples and size mismatch") {
    const GridSpec spec{0.0, 1.0, 5};
    std::vector<double> bad{0.0, 1.0, std::nan(""), 1.0, 0.0};
    CHECK_THROWS_AS(DensityGrid(spec, 0.0, bad), ParameterError);
    std::vector<double> wrong{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(DensityGrid(spec, 0.0, wrong), ParameterError);
}

TEST_CASE("DensityGrid: interpolant reproduces samples and interior values") {
    const GridSpec spec{-1.0, 1.0, 801};
    const DensityGrid g = gaussian_density(spec, 0.0, 0.0, 0.05);
    const UniformCubicInterpolant interp = g.interpolant();
    CHECK(std::fabs(interp.eval(g.x(400)) - g.value(400)) < 1e-15);
    const double x = 0.3337;
    const double exact = std::exp(-x * x / 0.1) / std::sqrt(2.0 * M_PI * 0.05);
    CHECK(std::fabs(interp.eval(x) - exact) < 1e-8);
}
