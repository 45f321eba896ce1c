// Classical systems and virial generators: natural Hamiltonians, the
// position-dependent-mass Lagrangian family and its closed-form scaling
// fields xi, potentials V and generators G.
#pragma once

#include "vlab/fields.hpp"
#include "vlab/quadrature.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>

namespace vlab {

struct SystemSpec {
    std::string name;
    int dim = 1;
    MassProfile mass;
    PotentialSpec potential;
    std::optional<std::vector<Interval>> domain; // coordinate box

    double mass_at(const Vec& q) const {
        return mass.constant_mass() ? mass.m0 : mass.m(q[0]);
    }
    double kinetic(const Vec& q, const Vec& p) const;
    double energy(const Vec& q, const Vec& p) const;
    bool in_domain(const Vec& q) const;
};

/// A virial generator: scalar G on phase space with gradients, the scaling
/// constant a of X(L) = a L when G comes from a complete lift, and the
/// conformal valence of the associated non-strictly canonical flow when
/// that is the relevant bookkeeping. The two constants are distinct and
/// stored separately.
struct GeneratorSpec {
    std::string name;
    std::function<double(const Vec&, const Vec&)> value;
    std::function<Vec(const Vec&, const Vec&)> grad_q; // may be empty
    std::function<Vec(const Vec&, const Vec&)> grad_p; // may be empty
    std::optional<double> a;
    std::optional<double> valence;
    std::function<double(const Vec&)> gauge; // optional gauge function h
};

/// The scaling field xi(x) = (1/sqrt m)(C1 + (a/2) u(x)), u = int_0^x sqrt m,
/// solving 2 xi' + xi m'/m = a. Carries its provenance so the potential and
/// generator builders can reuse u and the constants.
struct PdmXi {
    ScalarField1D field;
    MassProfile mass;
    double a = 0.0;
    double c1 = 0.0;
    std::shared_ptr<const CumulativeIntegral> u;

    double operator()(double x) const { return field.eval(x); }
    double deriv(double x) const { return field.deriv(x); }
    double u_of(double x) const { return u->value(x); }
};

/// Solve 2 xi' + xi m'/m = a on the given domain (defaults to the mass
/// domain, else [-128, 128]). a = 0 yields the Killing field C1/sqrt(m).
PdmXi build_xi(const MassProfile& mass, double a, double c1,
               std::optional<Interval> domain = {});

/// Potential with xi V' = coeff V, normalized to V(x_ref) = c2. The scaling
/// family of section-4 type uses coeff = a; the quantum convention
/// V = C2 exp(-int b/xi) corresponds to coeff = -b. When 2 coeff/a is a
/// nonnegative even integer the closed form extends smoothly across a zero
/// of xi; otherwise evaluation beyond the zero raises SingularGeneratorError.
PotentialSpec build_pdm_potential(const PdmXi& xi, double coeff, double c2,
                                  double x_ref = 0.0);

/// G(x, p) = m(x) xi(x) v = xi(x) p, with analytic gradients.
GeneratorSpec build_pdm_generator(const MassProfile& mass, const PdmXi& xi);

/// Clausius generator G = q . p in n dimensions.
GeneratorSpec clausius_generator(int dim);

/// Mathews-Lakshmanan oscillator: m = 1/(1 + lambda q^2),
/// V = alpha^2 q^2 / (2 (1 + lambda q^2)). For lambda < 0 the coordinate
/// domain |q| < 1/sqrt(-lambda) is recorded.
SystemSpec ml_system(double lambda, double alpha);

/// (H0, V) split of the energy at a state.
std::pair<double, double> hamiltonian_split(const SystemSpec& system,
                                            const PhaseState& state);

/// Named catalog used by the CLI: "harmonic", "kepler", "quartic", "ml",
/// "pdm-custom". Unknown names raise ConfigError.
SystemSpec catalog_system(const std::string& name,
                          const std::map<std::string, double>& params = {});

} // namespace vlab
