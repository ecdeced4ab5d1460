#include "nfpe/quadrature.hpp"

#include "nfpe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace nfpe {

namespace {

GaussRule compute_rule(int order) {
    GaussRule rule;
    rule.nodes.assign(order, 0.0);
    rule.weights.assign(order, 0.0);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev estimate of the (i+1)-th root counted from +1, refined
        // by Newton on the Legendre recurrence.
        double z = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(order) + 0.5));
        double p1 = 0.0;
        double dp = 0.0;
        for (int it = 0; it < 64; ++it) {
            double p0 = 1.0;
            p1 = z;
            for (int k = 2; k <= order; ++k) {
                const double p2 =
                    ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(order) * (z * p1 - p0) / (z * z - 1.0);
            const double step = p1 / dp;
            z -= step;
            if (std::abs(step) < 1e-15) {
                break;
            }
        }
        // One clean evaluation at the converged root for the weight.
        double p0 = 1.0;
        p1 = z;
        for (int k = 2; k <= order; ++k) {
            const double p2 =
                ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = p2;
        }
        dp = static_cast<double>(order) * (z * p1 - p0) / (z * z - 1.0);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[order - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

} // namespace

const GaussRule& gauss_legendre(int order) {
    if (order < 1) {
        throw ParameterError("gauss_legendre: order must be >= 1");
    }
    static std::map<int, GaussRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) {
        it = cache.emplace(order, compute_rule(order)).first;
    }
    return it->second;
}

double integrate_panel(const std::function<double(double)>& f, double a, double b,
                       const GaussRule& rule) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return half * sum;
}

double panel_integrate(const std::function<double(double)>& f, double a, double b,
                       double max_panel, int order) {
    if (!(max_panel > 0.0)) {
        throw ParameterError("panel_integrate: max_panel must be positive");
    }
    if (b == a) {
        return 0.0;
    }
    if (b < a) {
        return -panel_integrate(f, b, a, max_panel, order);
    }
    const GaussRule& rule = gauss_legendre(order);
    const int n_panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
    const double h = (b - a) / static_cast<double>(n_panels);
    double sum = 0.0;
    for (int i = 0; i < n_panels; ++i) {
        const double lo = a + h * static_cast<double>(i);
        const double hi = (i == n_panels - 1) ? b : a + h * static_cast<double>(i + 1);
        sum += integrate_panel(f, lo, hi, rule);
    }
    return sum;
}

namespace {

double adaptive_rec(const std::function<double(double)>& f, const GaussRule& rule,
                    double lo, double hi, double whole, double tol, int depth,
                    int max_depth) {
    const double mid = 0.5 * (lo + hi);
    const double left = integrate_panel(f, lo, mid, rule);
    const double right = integrate_panel(f, mid, hi, rule);
    if (std::abs(left + right - whole) <= tol) {
        return left + right;
    }
    if (depth >= max_depth) {
        throw NumericalError(NumericalError::Kind::Resolution,
                             "adaptive_integrate: tolerance not reached at max depth");
    }
    return adaptive_rec(f, rule, lo, mid, left, 0.5 * tol, depth + 1, max_depth) +
           adaptive_rec(f, rule, mid, hi, right, 0.5 * tol, depth + 1, max_depth);
}

} // namespace

double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
    if (!(abs_tol > 0.0)) {
        throw ParameterError("adaptive_integrate: abs_tol must be positive");
    }
    if (a == b) {
        return 0.0;
    }
    if (b < a) {
        return -adaptive_integrate(f, b, a, abs_tol, max_depth);
    }
    const GaussRule& rule = gauss_legendre(15);
    const double whole = integrate_panel(f, a, b, rule);
    return adaptive_rec(f, rule, a, b, whole, abs_tol, 0, max_depth);
}

std::vector<double> panel_edges(double lo, double hi, double x0, double dx,
                                double max_panel) {
    if (!(hi > lo)) {
        throw ParameterError("panel_edges: need lo < hi");
    }
    if (!(dx > 0.0) || !(max_panel > 0.0)) {
        throw ParameterError("panel_edges: dx and max_panel must be positive");
    }
    std::vector<double> coarse;
    coarse.push_back(lo);
    auto k = static_cast<long long>(std::ceil((lo - x0) / dx - 1e-12));
    for (;; ++k) {
        const double p = x0 + dx * static_cast<double>(k);
        if (p >= hi - 1e-12 * dx) {
            break;
        }
        if (p > lo + 1e-12 * dx) {
            coarse.push_back(p);
        }
    }
    coarse.push_back(hi);
    std::vector<double> edges;
    edges.push_back(coarse.front());
    for (std::size_t i = 0; i + 1 < coarse.size(); ++i) {
        const double a = coarse[i];
        const double b = coarse[i + 1];
        const int sub = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
        for (int j = 1; j <= sub; ++j) {
            edges.push_back(j == sub ? b : a + (b - a) * static_cast<double>(j) /
                                               static_cast<double>(sub));
        }
    }
    return edges;
}

double integrate_over_edges(const std::function<double(double)>& f,
                            std::span<const double> edges, const GaussRule& rule) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        sum += integrate_panel(f, edges[i], edges[i + 1], rule);
    }
    return sum;
}

std::vector<double> cumulative_integral(std::span<const double> values, double dx) {
    const std::size_t n = values.size();
    if (n < 2) {
        throw ParameterError("cumulative_integral: need at least two samples");
    }
    if (!(dx > 0.0)) {
        throw ParameterError("cumulative_integral: dx must be positive");
    }
    std::vector<double> out(n, 0.0);
    if (n == 2) {
        out[1] = 0.5 * dx * (values[0] + values[1]);
        return out;
    }
    if (n == 3) {
        out[1] = dx / 12.0 * (5.0 * values[0] + 8.0 * values[1] - values[2]);
        out[2] = dx / 3.0 * (values[0] + 4.0 * values[1] + values[2]);
        return out;
    }
    // Each interval is integrated with the cubic through the four nearest
    // samples, so every prefix (not just even ones) carries 4th-order error.
    out[1] = dx / 24.0 *
             (9.0 * values[0] + 19.0 * values[1] - 5.0 * values[2] + values[3]);
    for (std::size_t i = 1; i + 2 < n; ++i) {
        out[i + 1] = out[i] + dx / 24.0 *
                                  (-values[i - 1] + 13.0 * values[i] +
                                   13.0 * values[i + 1] - values[i + 2]);
    }
    out[n - 1] = out[n - 2] + dx / 24.0 *
                                  (values[n - 4] - 5.0 * values[n - 3] +
                                   19.0 * values[n - 2] + 9.0 * values[n - 1]);
    return out;
}

UniformCubicInterpolant::UniformCubicInterpolant(double x0, double dx,
                                                 std::vector<double> values)
    : x0_(x0), dx_(dx), values_(std::move(values)) {
    if (!(dx_ > 0.0)) {
        throw ParameterError("UniformCubicInterpolant: dx must be positive");
    }
    if (values_.size() < 4) {
        throw ParameterError("UniformCubicInterpolant: need at least four samples");
    }
}

double UniformCubicInterpolant::raw(double x) const {
    const std::size_t n = values_.size();
    double t = (x - x0_) / dx_;
    t = std::clamp(t, 0.0, static_cast<double>(n - 1));
    // Stencil of four samples with the query in the middle cell when possible.
    auto j = static_cast<std::ptrdiff_t>(std::floor(t)) - 1;
    j = std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(n) - 4);
    const double s = t - static_cast<double>(j);
    const double w0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
    const double w1 = s * (s - 2.0) * (s - 3.0) / 2.0;
    const double w2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
    const double w3 = s * (s - 1.0) * (s - 2.0) / 6.0;
    return w0 * values_[j] + w1 * values_[j + 1] + w2 * values_[j + 2] +
           w3 * values_[j + 3];
}

double UniformCubicInterpolant::eval(double x) const {
    const double slack = 1e-9 * dx_;
    if (x < x_front() - slack || x > x_back() + slack) {
        throw DomainError("UniformCubicInterpolant: query outside sampled range");
    }
    return raw(x);
}

double UniformCubicInterpolant::eval_or(double x, double fallback) const {
    const double slack = 1e-9 * dx_;
    if (x < x_front() - slack || x > x_back() + slack) {
        return fallback;
    }
    return raw(x);
}

} // namespace nfpe
