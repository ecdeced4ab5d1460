#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nfpe {

// Gauss-Legendre rule on [-1, 1]. Nodes ascend; weights are positive and
// sum to 2. Rules are computed once per order and cached.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

// Integral of f over [a, b] with a single Gauss-Legendre panel.
double integrate_panel(const std::function<double(double)>& f, double a, double b,
                       const GaussRule& rule);

// Integral of f over [a, b] by fixed panels of width <= max_panel, summed
// left to right (order is part of the determinism contract). order is the
// Gauss-Legendre order per panel.
double panel_integrate(const std::function<double(double)>& f, double a, double b,
                       double max_panel, int order = 8);

// Adaptive bisection to an absolute tolerance: a panel is accepted when the
// one-panel estimate and the sum of its halves agree within the tolerance
// share assigned to it. Subdivision and summation are depth-first, left
// child first, so the result is reproducible bit for bit.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 48);

// Ascending panel edges covering [lo, hi]: the interior points of the
// uniform grid x0 + k dx, with panels further subdivided so none exceeds
// max_panel. Aligning panels to a sampling grid keeps piecewise-polynomial
// interpolants exactly integrable by the per-panel Gauss rule.
std::vector<double> panel_edges(double lo, double hi, double x0, double dx,
                                double max_panel);

// Sum of Gauss-Legendre panel integrals over consecutive edge pairs,
// accumulated left to right.
double integrate_over_edges(const std::function<double(double)>& f,
                            std::span<const double> edges, const GaussRule& rule);

// Cumulative integral of uniformly sampled values, F[0] = 0. Each interval
// uses the cubic through the four nearest samples, so every prefix carries
// 4th-order error. values.size() >= 2 (short inputs fall back to lower order).
std::vector<double> cumulative_integral(std::span<const double> values, double dx);

// One classical Runge-Kutta step for a scalar ODE y' = rhs(t, y).
template <class Rhs>
double rk4_step(const Rhs& rhs, double t, double y, double h) {
    const double k1 = rhs(t, y);
    const double k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
    const double k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
    const double k4 = rhs(t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Local cubic interpolation on a uniform grid: the cubic through the four
// samples around x (shifting to the one-sided stencil near the ends).
class UniformCubicInterpolant {
public:
    UniformCubicInterpolant(double x0, double dx, std::vector<double> values);

    // Interpolated value; x outside the sampled range throws DomainError.
    double eval(double x) const;

    // Like eval() but returns fallback outside the grid instead of throwing.
    double eval_or(double x, double fallback) const;

    double x_front() const { return x0_; }
    double x_back() const { return x0_ + dx_ * static_cast<double>(values_.size() - 1); }
    double dx() const { return dx_; }
    std::size_t size() const { return values_.size(); }

private:
    double raw(double x) const;

    double x0_;
    double dx_;
    std::vector<double> values_;
};

} // namespace nfpe
