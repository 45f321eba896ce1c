// Curvature-parametrized trigonometric functions: trig for kappa>0, linear
// for kappa=0, hyperbolic for kappa<0. They satisfy
//   Cos_k^2(x) + kappa Sin_k^2(x) = 1,
//   d/dx Sin_k = Cos_k,  d/dx Cos_k = -kappa Sin_k,
// and are continuous in kappa across 0.
#pragma once

namespace vlab::ktrig {

double cos_k(double kappa, double x);
double sin_k(double kappa, double x);

/// Sin_k/Cos_k. Throws PoleError when |Cos_k| < pole_eps.
double tan_k(double kappa, double x, double pole_eps = 1e-12);

/// Principal inverse of Sin_k. For kappa>0 requires |q| <= 1/sqrt(kappa)
/// (DomainError otherwise); result lies in [-pi/(2 sqrt k), pi/(2 sqrt k)].
double arcsin_k(double kappa, double q);

/// Principal inverse of Tan_k. For kappa<0 the natural branch through
/// atanh is used, defined for |q| < 1/sqrt(-kappa).
double arctan_k(double kappa, double q);

} // namespace vlab::ktrig
