#pragma once

#include "nfpe/model.hpp"

namespace nfpe {

// The log/asinh change of variable that straightens the quadratic diffusion:
//
//   y(x, tau) = (1/a) log( a x + g + sqrt(f + (a x + g)^2) )
//
// evaluated in the numerically stable form (asinh((ax+g)/sqrt f) + log(f)/2)/a,
// together with its inverse, its Jacobian, and the transformed drift q. The
// building blocks A_pm(y, tau) = e^{a y} -+ ... appear throughout:
//
//   A_plus  = e^{a y} + f e^{-a y},   A_minus = e^{a y} - f e^{-a y},
//   a x + g = A_minus / 2,            sqrt(f + (ax+g)^2) = A_plus / 2.
//
// Requires a != 0 and f(tau) > 0 at every queried time. q needs beta
// resolved; constructing with a self-consistent beta is allowed for pure
// coordinate work, but querying q then throws.
class TransformContext {
public:
    TransformContext(ModelParams params, CoefficientSet coeffs);

    const ModelParams& params() const { return params_; }
    const CoefficientSet& coeffs() const { return coeffs_; }

    double y_of_x(double x, double tau) const;
    double x_of_y(double y, double tau) const;

    // dy/dx = 1 / sqrt(f + (a x + g)^2), the change-of-measure factor.
    double jacobian(double x, double tau) const;

    double a_plus(double y, double tau) const;
    double a_minus(double y, double tau) const;

    // Transformed drift:
    //   q(y) = 2 (kappa beta - (alpha/a) g - g'/a) - (f'/a) e^{-a y}
    //        + (alpha/a + a eps) A_minus.
    // q_zero is the same expression at eps = 0, so q_full - q_zero
    // = a eps A_minus identically.
    double q_full(double y, double tau) const;
    double q_zero(double y, double tau) const;

private:
    double f_at(double tau) const;  // validates f > 0
    double q_common(double y, double tau) const;

    ModelParams params_;
    CoefficientSet coeffs_;
};

} // namespace nfpe
