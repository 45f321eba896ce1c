#pragma once

#include <functional>
#include <vector>

namespace vlab {

/// Adaptive Gauss-Kronrod (G7/K15) integral of f over [a,b].
/// Throws QuadratureError when the error estimate exceeds abs_tol.
double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double abs_tol = 1e-10);

/// Cumulative integral F(x) = int_{x0}^{x} f, precomputed on a dense grid
/// over [lo,hi] and evaluated by cubic Hermite interpolation (node values
/// from quadrature, node slopes from f itself). Built eagerly; evaluation
/// is cheap and thread-safe.
class CumulativeIntegral {
  public:
    /// cells = 0 picks a node spacing of about 2e-3 (clamped to
    /// [2048, 131072] cells), fine enough that the interpolant and its slope
    /// stay below 1e-10 / 1e-8 for smooth integrands.
    CumulativeIntegral(const std::function<double(double)>& f, double x0,
                       double lo, double hi, int cells = 0,
                       double abs_tol = 1e-10);

    double value(double x) const;
    double slope(double x) const; // derivative of the interpolant
    double lo() const { return lo_; }
    double hi() const { return hi_; }

  private:
    int cell_of(double x) const;
    double lo_ = 0, hi_ = 0, h_ = 0;
    std::vector<double> F_; // node values of the integral
    std::vector<double> f_; // node values of the integrand
};

} // namespace vlab
