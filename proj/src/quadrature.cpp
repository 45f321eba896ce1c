#include "vlab/quadrature.hpp"

#include "vlab/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace vlab {

namespace {
using GK15 = boost::math::quadrature::gauss_kronrod<double, 15>;
}

double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double abs_tol) {
    double err = 0.0;
    const double value = GK15::integrate(f, a, b, 14, 1e-14, &err);
    if (!(err <= abs_tol + 1e-14 * std::abs(value)))
        throw QuadratureError("integrate_gk: error estimate " +
                              std::to_string(err) + " above tolerance");
    return value;
}

CumulativeIntegral::CumulativeIntegral(const std::function<double(double)>& f,
                                       double x0, double lo, double hi,
                                       int cells, double abs_tol)
    : lo_(lo), hi_(hi) {
    if (!(hi > lo))
        throw DomainError("CumulativeIntegral: empty domain");
    if (cells == 0)
        cells = static_cast<int>(
            std::clamp((hi - lo) / 2e-3, 2048.0, 131072.0));
    if (cells < 2)
        throw DomainError("CumulativeIntegral: need at least two cells");
    if (!(x0 >= lo && x0 <= hi))
        throw DomainError("CumulativeIntegral: reference point outside domain");
    h_ = (hi - lo) / cells;
    F_.resize(cells + 1);
    f_.resize(cells + 1);
    for (int k = 0; k <= cells; ++k)
        f_[k] = f(lo + h_ * k);

    // cumulative sum of per-cell integrals, then shift so F(x0) = 0
    double run = 0.0;
    F_[0] = 0.0;
    for (int k = 0; k < cells; ++k) {
        double err = 0.0;
        run += GK15::integrate(f, lo + h_ * k, lo + h_ * (k + 1), 10, 1e-13,
                               &err);
        F_[k + 1] = run;
        if (err > std::max(abs_tol, 1e-10))
            throw QuadratureError(
                "CumulativeIntegral: cell integral failed to converge");
    }
    const double shift = value(x0);
    for (double& v : F_)
        v -= shift;
}

int CumulativeIntegral::cell_of(double x) const {
    if (!(x >= lo_ - 1e-12 * (1 + std::abs(lo_)) &&
          x <= hi_ + 1e-12 * (1 + std::abs(hi_))))
        throw DomainError("CumulativeIntegral: evaluation outside cached domain");
    int k = static_cast<int>((x - lo_) / h_);
    if (k < 0) k = 0;
    if (k >= static_cast<int>(F_.size()) - 1)
        k = static_cast<int>(F_.size()) - 2;
    return k;
}

double CumulativeIntegral::value(double x) const {
    const int k = cell_of(x);
    const double t = (x - (lo_ + h_ * k)) / h_;
    const double y0 = F_[k], y1 = F_[k + 1];
    const double m0 = f_[k] * h_, m1 = f_[k + 1] * h_;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
           (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
}

double CumulativeIntegral::slope(double x) const {
    const int k = cell_of(x);
    const double t = (x - (lo_ + h_ * k)) / h_;
    const double y0 = F_[k], y1 = F_[k + 1];
    const double m0 = f_[k] * h_, m1 = f_[k + 1] * h_;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 +
            (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) /
           h_;
}

} // namespace vlab
