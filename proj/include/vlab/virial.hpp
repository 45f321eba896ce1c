// Time-average estimators and the classical virial/hypervirial identity
// checks evaluated on trajectories.
#pragma once

#include "vlab/integrators.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>

namespace vlab {

struct Window {
    double t1 = 0.0, t2 = 0.0;
};

struct AverageReport {
    double mean = 0.0;
    Window window;
    std::size_t n_samples = 0;
    std::optional<double> boundary_term; // [G(t2)-G(t1)]/(t2-t1) for generators
};

struct VirialCheck {
    std::string identity;
    double lhs = 0.0, rhs = 0.0;
    double residual = 0.0;          // lhs - rhs, exactly as computed
    double relative_residual = 0.0; // |residual| / scale
    Window window;
    std::string system;
    std::map<std::string, double> params;
};

/// Composite trapezoidal average of f along the trajectory over the window
/// (defaults to the full extent). Partial end intervals are handled by
/// linear interpolation of the sampled values.
AverageReport time_average(const Trajectory& traj,
                           const std::function<double(const PhaseState&)>& f,
                           std::optional<Window> window = {});

/// Average of the generator value G itself; fills boundary_term.
AverageReport time_average(const Trajectory& traj, const GeneratorSpec& g,
                           std::optional<Window> window = {});

/// {G, H} at a state, with the sign convention dG/dt = {G, H} along the
/// flow. Generator gradients fall back to central differences when absent.
double poisson_bracket(const GeneratorSpec& g, const SystemSpec& system,
                       const PhaseState& state);

/// Time-integrated bracket relation: lhs = [G(t2)-G(t1)]/(t2-t1),
/// rhs = <{G,H}> over the same window. Exact for the true flow; the
/// residual measures integrator consistency. params reports sup|G| so the
/// boundedness hypothesis is checkable.
VirialCheck hypervirial_check(const SystemSpec& system, const GeneratorSpec& g,
                              const Trajectory& traj,
                              std::optional<Window> window = {});

/// Homogeneous-potential averages: <E_c> = kE/(k+2) and <V> = 2E/(k+2).
/// Returns the kinetic-side and potential-side checks. DegenerateDegree for
/// k = -2.
std::array<VirialCheck, 2> homogeneous_virial_check(const SystemSpec& system,
                                                    double k,
                                                    const Trajectory& traj,
                                                    std::optional<Window> window = {});

/// Lagrangian scaling relation [G(t2)-G(t1)]/(t2-t1) = a <L>, L = E_c - V.
/// Requires the generator to carry its scaling constant a.
VirialCheck lagrangian_virial_check(const SystemSpec& system,
                                    const GeneratorSpec& g,
                                    const Trajectory& traj,
                                    std::optional<Window> window = {});

/// Scaling form for homogeneous degree d != 2: (d+2)<H0> = d E, with the
/// equivalent 2<H0> = d<V> reported as the second entry.
std::array<VirialCheck, 2> nonstrict_canonical_check(const SystemSpec& system,
                                                     double d,
                                                     const Trajectory& traj,
                                                     std::optional<Window> window = {});

} // namespace vlab
