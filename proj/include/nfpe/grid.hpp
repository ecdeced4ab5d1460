#pragma once

#include "nfpe/quadrature.hpp"

#include <span>
#include <vector>

namespace nfpe {

// Uniform spatial grid description. n is the number of points (not cells).
struct GridSpec {
    double x_min = 0.0;
    double x_max = 0.0;
    int n = 0;

    double dx() const { return (x_max - x_min) / static_cast<double>(n - 1); }
    double point(int i) const { return x_min + dx() * static_cast<double>(i); }

    // Throws ParameterError unless x_min < x_max and n >= 4.
    void validate() const;

    bool operator==(const GridSpec&) const = default;
};

// A density profile sampled on a uniform grid at one time. Values are point
// samples of u(x, tau), not cell masses; integral statistics use the
// trapezoid rule on the samples. Construction checks finiteness only:
// small negative tails are legal for asymptotic reconstructions, and
// stricter floors are each producer's contract.
class DensityGrid {
public:
    DensityGrid(GridSpec spec, double tau, std::vector<double> values);

    const GridSpec& spec() const { return spec_; }
    double tau() const { return tau_; }
    std::span<const double> values() const { return values_; }
    double value(int i) const { return values_[static_cast<std::size_t>(i)]; }
    double x(int i) const { return spec_.point(i); }
    int size() const { return spec_.n; }

    double norm() const;
    double mean() const;
    double variance() const;
    double excess_kurtosis() const;
    double min_value() const;
    double max_value() const;

    // Mass in the first and last cells relative to the total; cheap proxy
    // for "the profile is supported well inside the grid".
    double edge_mass_fraction() const;

    UniformCubicInterpolant interpolant() const;

private:
    GridSpec spec_;
    double tau_;
    std::vector<double> values_;
};

// Normal density with the given mean and variance, sampled on spec.
DensityGrid gaussian_density(const GridSpec& spec, double tau, double mean,
                             double variance);

} // namespace nfpe
