// Basic field/phase-space value types shared by the classical and quantum
// modules.
#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace vlab {

using Vec = std::vector<double>;

struct Interval {
    double lo = 0.0, hi = 0.0;
    bool contains(double x, double pad = 0.0) const {
        return x >= lo + pad && x <= hi - pad;
    }
    double length() const { return hi - lo; }
};

struct PhaseState {
    Vec q, p;
    double t = 0.0;
};

/// Scalar function of one coordinate together with its derivative.
struct ScalarField1D {
    std::function<double(double)> eval;
    std::function<double(double)> deriv;
};

/// Mass, either a constant (any dimension) or a positive 1-D profile m(x).
struct MassProfile {
    enum class Kind { Constant, PositionDependent1D };

    Kind kind = Kind::Constant;
    double m0 = 1.0;
    std::function<double(double)> m;       // PositionDependent1D only
    std::function<double(double)> m_prime; // derivative of m
    std::optional<Interval> domain;

    static MassProfile constant(double mass) {
        MassProfile p;
        p.kind = Kind::Constant;
        p.m0 = mass;
        return p;
    }
    static MassProfile position_dependent(std::function<double(double)> mass,
                                          std::function<double(double)> mass_prime,
                                          std::optional<Interval> dom = {}) {
        MassProfile p;
        p.kind = Kind::PositionDependent1D;
        p.m = std::move(mass);
        p.m_prime = std::move(mass_prime);
        p.domain = dom;
        return p;
    }

    bool constant_mass() const { return kind == Kind::Constant; }
    double at(double x) const { return constant_mass() ? m0 : m(x); }
    double prime(double x) const { return constant_mass() ? 0.0 : m_prime(x); }
};

/// Potential energy on n-dimensional configuration space with its gradient.
struct PotentialSpec {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    std::optional<double> homogeneity_degree;
};

} // namespace vlab
