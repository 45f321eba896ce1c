#include "vlab/ktrig.hpp"

#include "vlab/errors.hpp"

#include <cmath>

namespace vlab::ktrig {

namespace {

// Below this value of |kappa| x^2 the closed forms lose relative accuracy
// to cancellation; switch to the series in kappa x^2.
constexpr double kSeriesCut = 1e-6;

} // namespace

double cos_k(double kappa, double x) {
    const double u = kappa * x * x;
    if (std::abs(u) < kSeriesCut) {
        // 1 - u/2 + u^2/24 - u^3/720
        return 1.0 + u * (-0.5 + u * (1.0 / 24.0 - u / 720.0));
    }
    if (kappa > 0.0) return std::cos(std::sqrt(kappa) * x);
    return std::cosh(std::sqrt(-kappa) * x);
}

double sin_k(double kappa, double x) {
    const double u = kappa * x * x;
    if (std::abs(u) < kSeriesCut) {
        // x (1 - u/6 + u^2/120 - u^3/5040)
        return x * (1.0 + u * (-1.0 / 6.0 + u * (1.0 / 120.0 - u / 5040.0)));
    }
    if (kappa > 0.0) {
        const double s = std::sqrt(kappa);
        return std::sin(s * x) / s;
    }
    const double s = std::sqrt(-kappa);
    return std::sinh(s * x) / s;
}

double tan_k(double kappa, double x, double pole_eps) {
    const double c = cos_k(kappa, x);
    if (std::abs(c) < pole_eps)
        throw PoleError("tan_k: evaluation at a pole (|Cos_k| < eps)");
    return sin_k(kappa, x) / c;
}

double arcsin_k(double kappa, double q) {
    const double u = kappa * q * q;
    if (std::abs(u) < kSeriesCut) {
        // q (1 + u/6 + 3 u^2/40)
        return q * (1.0 + u * (1.0 / 6.0 + u * (3.0 / 40.0)));
    }
    if (kappa > 0.0) {
        const double s = std::sqrt(kappa);
        double sq = s * q;
        if (std::abs(sq) > 1.0) {
            if (std::abs(sq) > 1.0 + 1e-12)
                throw DomainError("arcsin_k: |q| exceeds 1/sqrt(kappa)");
            sq = sq > 0 ? 1.0 : -1.0;
        }
        return std::asin(sq) / s;
    }
    const double s = std::sqrt(-kappa);
    return std::asinh(s * q) / s;
}

double arctan_k(double kappa, double q) {
    const double u = kappa * q * q;
    if (std::abs(u) < kSeriesCut) {
        // q (1 - u/3 + u^2/5)
        return q * (1.0 + u * (-1.0 / 3.0 + u / 5.0));
    }
    if (kappa > 0.0) {
        const double s = std::sqrt(kappa);
        return std::atan(s * q) / s;
    }
    const double s = std::sqrt(-kappa);
    if (std::abs(s * q) >= 1.0)
        throw DomainError("arctan_k: |q| must be below 1/sqrt(-kappa)");
    return std::atanh(s * q) / s;
}

} // namespace vlab::ktrig
