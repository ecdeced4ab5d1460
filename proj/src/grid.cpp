#include "nfpe/grid.hpp"

#include "nfpe/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nfpe {

void GridSpec::validate() const {
    if (!(x_min < x_max)) {
        throw ParameterError("GridSpec: x_min must be less than x_max");
    }
    if (n < 4) {
        throw ParameterError("GridSpec: need at least four grid points");
    }
}

DensityGrid::DensityGrid(GridSpec spec, double tau, std::vector<double> values)
    : spec_(spec), tau_(tau), values_(std::move(values)) {
    spec_.validate();
    if (values_.size() != static_cast<std::size_t>(spec_.n)) {
        throw ParameterError("DensityGrid: value count does not match grid");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw ParameterError("DensityGrid: non-finite sample");
        }
    }
}

namespace {

// Trapezoid integral of w(x) * u(x) over the grid.
template <class Weight>
double trapezoid(const DensityGrid& g, const Weight& w) {
    const int n = g.size();
    double sum = 0.5 * w(g.x(0)) * g.value(0);
    for (int i = 1; i + 1 < n; ++i) {
        sum += w(g.x(i)) * g.value(i);
    }
    sum += 0.5 * w(g.x(n - 1)) * g.value(n - 1);
    return sum * g.spec().dx();
}

} // namespace

double DensityGrid::norm() const {
    return trapezoid(*this, [](double) { return 1.0; });
}

double DensityGrid::mean() const {
    const double m0 = norm();
    if (m0 == 0.0) {
        throw DomainError("DensityGrid: moments of a zero profile");
    }
    return trapezoid(*this, [](double x) { return x; }) / m0;
}

double DensityGrid::variance() const {
    const double m0 = norm();
    if (m0 == 0.0) {
        throw DomainError("DensityGrid: moments of a zero profile");
    }
    const double mu = mean();
    return trapezoid(*this, [mu](double x) { return (x - mu) * (x - mu); }) / m0;
}

double DensityGrid::excess_kurtosis() const {
    const double m0 = norm();
    if (m0 == 0.0) {
        throw DomainError("DensityGrid: moments of a zero profile");
    }
    const double mu = mean();
    const double m2 = trapezoid(*this, [mu](double x) { return (x - mu) * (x - mu); }) / m0;
    if (m2 <= 0.0) {
        throw DomainError("DensityGrid: kurtosis of a degenerate profile");
    }
    const double m4 = trapezoid(*this, [mu](double x) {
                          const double d = (x - mu) * (x - mu);
                          return d * d;
                      }) /
                      m0;
    return m4 / (m2 * m2) - 3.0;
}

double DensityGrid::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

double DensityGrid::max_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

double DensityGrid::edge_mass_fraction() const {
    const double total = std::abs(norm());
    if (total == 0.0) {
        return 0.0;
    }
    const int n = size();
    const double dx = spec_.dx();
    const double edges =
        0.5 * dx * (std::abs(values_[0]) + std::abs(values_[1]) +
                    std::abs(values_[static_cast<std::size_t>(n) - 2]) +
                    std::abs(values_[static_cast<std::size_t>(n) - 1]));
    return edges / total;
}

UniformCubicInterpolant DensityGrid::interpolant() const {
    return UniformCubicInterpolant(spec_.x_min, spec_.dx(), values_);
}

DensityGrid gaussian_density(const GridSpec& spec, double tau, double mean,
                             double variance) {
    spec.validate();
    if (!(variance > 0.0)) {
        throw ParameterError("gaussian_density: variance must be positive");
    }
    std::vector<double> values(static_cast<std::size_t>(spec.n));
    const double norm = 1.0 / std::sqrt(2.0 * M_PI * variance);
    for (int i = 0; i < spec.n; ++i) {
        const double d = spec.point(i) - mean;
        values[static_cast<std::size_t>(i)] = norm * std::exp(-0.5 * d * d / variance);
    }
    return DensityGrid(spec, tau, std::move(values));
}

} // namespace nfpe
