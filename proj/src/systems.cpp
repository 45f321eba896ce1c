#include "vlab/systems.hpp"

#include "vlab/errors.hpp"

#include <cmath>

namespace vlab {

double SystemSpec::kinetic(const Vec& q, const Vec& p) const {
    double p2 = 0.0;
    for (double pi : p)
        p2 += pi * pi;
    return p2 / (2.0 * mass_at(q));
}

double SystemSpec::energy(const Vec& q, const Vec& p) const {
    return kinetic(q, p) + potential.value(q);
}

bool SystemSpec::in_domain(const Vec& q) const {
    if (!domain) return true;
    for (std::size_t i = 0; i < q.size() && i < domain->size(); ++i)
        if (!(*domain)[i].contains(q[i])) return false;
    return true;
}

PdmXi build_xi(const MassProfile& mass, double a, double c1,
               std::optional<Interval> domain) {
    if (mass.kind != MassProfile::Kind::PositionDependent1D &&
        mass.kind != MassProfile::Kind::Constant)
        throw DomainError("build_xi: unsupported mass profile");
    Interval dom = domain ? *domain
                          : mass.domain ? *mass.domain
                                        : Interval{-128.0, 128.0};
    if (!dom.contains(0.0))
        throw DomainError("build_xi: domain must contain the reference point 0");

    auto sqrt_m = [mass](double x) { return std::sqrt(mass.at(x)); };
    auto u = std::make_shared<CumulativeIntegral>(sqrt_m, 0.0, dom.lo, dom.hi);

    PdmXi xi;
    xi.mass = mass;
    xi.a = a;
    xi.c1 = c1;
    xi.u = u;
    xi.field.eval = [mass, a, c1, u](double x) {
        return (c1 + 0.5 * a * u->value(x)) / std::sqrt(mass.at(x));
    };
    xi.field.deriv = [mass, a, c1, u](double x) {
        const double m = mass.at(x);
        const double sm = std::sqrt(m);
        const double base = c1 + 0.5 * a * u->value(x);
        return -0.5 * mass.prime(x) / (m * sm) * base + 0.5 * a * u->slope(x) / sm;
    };
    return xi;
}

PotentialSpec build_pdm_potential(const PdmXi& xi, double coeff, double c2,
                                  double x_ref) {
    const double a = xi.a, c1 = xi.c1;
    PotentialSpec pot;
    auto u = xi.u;

    if (a == 0.0) {
        // xi = C1/sqrt(m) is nowhere zero; int coeff/xi = (coeff/C1) u(x)
        if (c1 == 0.0)
            throw SingularGeneratorError("build_pdm_potential: xi vanishes identically");
        const double k = coeff / c1;
        const double u_ref = u->value(x_ref);
        pot.value = [u, k, c2, u_ref](const Vec& q) {
            return c2 * std::exp(k * (u->value(q[0]) - u_ref));
        };
        pot.gradient = [u, k, c2, u_ref](const Vec& q) {
            const double v = c2 * std::exp(k * (u->value(q[0]) - u_ref));
            return Vec{v * k * u->slope(q[0])};
        };
        return pot;
    }

    // base(x) = C1 + (a/2) u(x) = xi sqrt(m); V = c2 (base/base_ref)^(2 coeff/a)
    const double e = 2.0 * coeff / a;
    const double base_ref = c1 + 0.5 * a * u->value(x_ref);
    if (base_ref == 0.0)
        throw SingularGeneratorError("build_pdm_potential: xi vanishes at x_ref");
    const long n = std::lround(e);
    const bool even_power = std::abs(e - static_cast<double>(n)) < 1e-12 &&
                            n >= 0 && n % 2 == 0;

    auto base_at = [u, a, c1](double x) { return c1 + 0.5 * a * u->value(x); };
    auto dbase_at = [u, a](double x) { return 0.5 * a * u->slope(x); };

    if (even_power) {
        pot.value = [base_at, base_ref, c2, n](const Vec& q) {
            return c2 * std::pow(base_at(q[0]) / base_ref, static_cast<double>(n));
        };
        pot.gradient = [base_at, dbase_at, base_ref, c2, n](const Vec& q) {
            const double r = base_at(q[0]) / base_ref;
            return Vec{c2 * n * std::pow(r, static_cast<double>(n - 1)) *
                       dbase_at(q[0]) / base_ref};
        };
    } else {
        pot.value = [base_at, base_ref, c2, e](const Vec& q) {
            const double r = base_at(q[0]) / base_ref;
            if (r <= 0.0)
                throw SingularGeneratorError(
                    "build_pdm_potential: xi crosses zero inside the interval");
            return c2 * std::pow(r, e);
        };
        pot.gradient = [base_at, dbase_at, base_ref, c2, e](const Vec& q) {
            const double r = base_at(q[0]) / base_ref;
            if (r <= 0.0)
                throw SingularGeneratorError(
                    "build_pdm_potential: xi crosses zero inside the interval");
            return Vec{c2 * e * std::pow(r, e - 1.0) * dbase_at(q[0]) / base_ref};
        };
    }
    return pot;
}

GeneratorSpec build_pdm_generator(const MassProfile& mass, const PdmXi& xi) {
    if (mass.kind == MassProfile::Kind::PositionDependent1D && !mass.m)
        throw DomainError("build_pdm_generator: mass profile lacks m(x)");
    GeneratorSpec g;
    g.name = "pdm-dilation";
    ScalarField1D f = xi.field;
    g.value = [f](const Vec& q, const Vec& p) { return f.eval(q[0]) * p[0]; };
    g.grad_q = [f](const Vec& q, const Vec& p) {
        return Vec{f.deriv(q[0]) * p[0]};
    };
    g.grad_p = [f](const Vec& q, const Vec&) { return Vec{f.eval(q[0])}; };
    g.a = xi.a;
    return g;
}

GeneratorSpec clausius_generator(int dim) {
    if (dim < 1) throw DomainError("clausius_generator: dim must be >= 1");
    GeneratorSpec g;
    g.name = "clausius";
    g.value = [](const Vec& q, const Vec& p) {
        double s = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i)
            s += q[i] * p[i];
        return s;
    };
    g.grad_q = [](const Vec&, const Vec& p) { return p; };
    g.grad_p = [](const Vec& q, const Vec&) { return q; };
    g.valence = -2.0;
    return g;
}

SystemSpec ml_system(double lambda, double alpha) {
    SystemSpec s;
    s.name = "ml";
    s.dim = 1;
    std::optional<Interval> dom;
    if (lambda < 0.0) {
        const double qmax = 1.0 / std::sqrt(-lambda);
        dom = Interval{-qmax, qmax};
    }
    s.mass = MassProfile::position_dependent(
        [lambda](double x) { return 1.0 / (1.0 + lambda * x * x); },
        [lambda](double x) {
            const double d = 1.0 + lambda * x * x;
            return -2.0 * lambda * x / (d * d);
        },
        dom);
    const double a2 = alpha * alpha;
    s.potential.value = [lambda, a2](const Vec& q) {
        return 0.5 * a2 * q[0] * q[0] / (1.0 + lambda * q[0] * q[0]);
    };
    s.potential.gradient = [lambda, a2](const Vec& q) {
        const double d = 1.0 + lambda * q[0] * q[0];
        return Vec{a2 * q[0] / (d * d)};
    };
    if (dom) s.domain = std::vector<Interval>{*dom};
    return s;
}

std::pair<double, double> hamiltonian_split(const SystemSpec& system,
                                            const PhaseState& state) {
    if (!system.in_domain(state.q))
        throw DomainError("hamiltonian_split: state outside system domain");
    return {system.kinetic(state.q, state.p), system.potential.value(state.q)};
}

namespace {

double param(const std::map<std::string, double>& params, const std::string& key,
             double dflt) {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
}

} // namespace

SystemSpec catalog_system(const std::string& name,
                          const std::map<std::string, double>& params) {
    if (name == "harmonic") {
        SystemSpec s;
        s.name = name;
        s.dim = static_cast<int>(param(params, "dim", 1));
        const double m0 = param(params, "mass", 1.0);
        const double w2 = param(params, "omega", 1.0) * param(params, "omega", 1.0);
        s.mass = MassProfile::constant(m0);
        s.potential.value = [m0, w2](const Vec& q) {
            double q2 = 0.0;
            for (double qi : q)
                q2 += qi * qi;
            return 0.5 * m0 * w2 * q2;
        };
        s.potential.gradient = [m0, w2](const Vec& q) {
            Vec g(q.size());
            for (std::size_t i = 0; i < q.size(); ++i)
                g[i] = m0 * w2 * q[i];
            return g;
        };
        s.potential.homogeneity_degree = 2.0;
        return s;
    }
    if (name == "kepler") {
        SystemSpec s;
        s.name = name;
        s.dim = 2;
        s.mass = MassProfile::constant(param(params, "mass", 1.0));
        const double mu = param(params, "mu", 1.0);
        s.potential.value = [mu](const Vec& q) {
            return -mu / std::sqrt(q[0] * q[0] + q[1] * q[1]);
        };
        s.potential.gradient = [mu](const Vec& q) {
            const double r2 = q[0] * q[0] + q[1] * q[1];
            const double r3 = r2 * std::sqrt(r2);
            return Vec{mu * q[0] / r3, mu * q[1] / r3};
        };
        s.potential.homogeneity_degree = -1.0;
        return s;
    }
    if (name == "quartic") {
        SystemSpec s;
        s.name = name;
        s.dim = 1;
        s.mass = MassProfile::constant(param(params, "mass", 1.0));
        const double c = param(params, "coefficient", 1.0);
        s.potential.value = [c](const Vec& q) {
            return c * q[0] * q[0] * q[0] * q[0];
        };
        s.potential.gradient = [c](const Vec& q) {
            return Vec{4.0 * c * q[0] * q[0] * q[0]};
        };
        s.potential.homogeneity_degree = 4.0;
        return s;
    }
    if (name == "ml")
        return ml_system(param(params, "lambda", 1.0), param(params, "alpha", 1.0));
    if (name == "pdm-custom") {
        const double lambda = param(params, "lambda", 1.0);
        const double a = param(params, "a", 2.0);
        const double c1 = param(params, "c1", 1.0);
        const double c2 = param(params, "c2", 1.0);
        SystemSpec ml = ml_system(lambda, 1.0);
        SystemSpec s;
        s.name = name;
        s.dim = 1;
        s.mass = ml.mass;
        s.domain = ml.domain;
        PdmXi xi = build_xi(s.mass, a, c1);
        s.potential = build_pdm_potential(xi, a, c2, 0.0);
        return s;
    }
    throw ConfigError("unknown system \"" + name + "\"");
}

} // namespace vlab
