// Symplectic one-step methods for Hamilton's equations, trajectory storage
// and period detection.
#pragma once

#include "vlab/systems.hpp"

#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace vlab {

enum class Method { Verlet, ImplicitMidpoint };

struct IntegratorConfig {
    Method method = Method::ImplicitMidpoint;
    double step = 1e-3;
    double t_end = 10.0;
    double fixed_point_tol = 1e-12;
    int max_fixed_point_iters = 50;
    int sample_stride = 1;
    double escape_bound = 1e6; // unbounded-motion guard on |q|
};

struct Trajectory {
    std::shared_ptr<const SystemSpec> system;
    std::vector<PhaseState> samples; // strictly increasing t, uniform spacing
    std::vector<double> energies;    // total energy per sample
    double dt_sample = 0.0;          // step * stride

    std::size_t size() const { return samples.size(); }
    double t0() const { return samples.front().t; }
    double t1() const { return samples.back().t; }
};

/// Hamilton right-hand side (dq/dt, dp/dt). For 1-D position-dependent mass
/// dp includes the p^2 m'/(2 m^2) term.
std::pair<Vec, Vec> hamilton_rhs(const SystemSpec& system,
                                 const PhaseState& state);

/// Stormer-Verlet kick-drift-kick step. Constant mass only (MethodMismatch
/// otherwise).
PhaseState step_verlet(const SystemSpec& system, const PhaseState& state,
                       double h);

/// Implicit midpoint step, z1 = z0 + h f((z0+z1)/2), solved by fixed-point
/// iteration to tol. Valid for non-separable PDM Hamiltonians.
PhaseState step_implicit_midpoint(const SystemSpec& system,
                                  const PhaseState& state, double h,
                                  double tol = 1e-12, int max_iters = 50);

Trajectory integrate(const SystemSpec& system, const PhaseState& initial,
                     const IntegratorConfig& config);

/// Smallest T with ||z(t0+T) - z(t0)|| below tol, from the first local
/// minimum of the sampled return distance refined by quadratic
/// interpolation. Empty when no return is found.
std::optional<double> detect_period(const Trajectory& traj, double tol);

} // namespace vlab
