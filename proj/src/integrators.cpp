#include "vlab/integrators.hpp"

#include "vlab/errors.hpp"

#include <cmath>

namespace vlab {

std::pair<Vec, Vec> hamilton_rhs(const SystemSpec& system,
                                 const PhaseState& state) {
    if (!system.in_domain(state.q))
        throw DomainError("hamilton_rhs: state outside system domain");
    const double m = system.mass_at(state.q);
    Vec dq(state.q.size()), dp = system.potential.gradient(state.q);
    for (std::size_t i = 0; i < dq.size(); ++i) {
        dq[i] = state.p[i] / m;
        dp[i] = -dp[i];
    }
    if (!system.mass.constant_mass()) {
        const double mp = system.mass.prime(state.q[0]);
        dp[0] += state.p[0] * state.p[0] * mp / (2.0 * m * m);
    }
    return {std::move(dq), std::move(dp)};
}

PhaseState step_verlet(const SystemSpec& system, const PhaseState& state,
                       double h) {
    if (!system.mass.constant_mass())
        throw MethodMismatch("step_verlet requires a constant mass");
    const double m = system.mass.m0;
    PhaseState next = state;
    Vec g = system.potential.gradient(state.q);
    for (std::size_t i = 0; i < next.p.size(); ++i)
        next.p[i] -= 0.5 * h * g[i];
    for (std::size_t i = 0; i < next.q.size(); ++i)
        next.q[i] += h * next.p[i] / m;
    g = system.potential.gradient(next.q);
    for (std::size_t i = 0; i < next.p.size(); ++i)
        next.p[i] -= 0.5 * h * g[i];
    next.t = state.t + h;
    return next;
}

PhaseState step_implicit_midpoint(const SystemSpec& system,
                                  const PhaseState& state, double h,
                                  double tol, int max_iters) {
    PhaseState next = state; // iterate for z1, starting from z0
    PhaseState mid = state;
    for (int it = 0; it < max_iters; ++it) {
        for (std::size_t i = 0; i < mid.q.size(); ++i) {
            mid.q[i] = 0.5 * (state.q[i] + next.q[i]);
            mid.p[i] = 0.5 * (state.p[i] + next.p[i]);
        }
        auto [dq, dp] = hamilton_rhs(system, mid);
        double delta = 0.0;
        for (std::size_t i = 0; i < dq.size(); ++i) {
            const double qn = state.q[i] + h * dq[i];
            const double pn = state.p[i] + h * dp[i];
            delta += std::abs(qn - next.q[i]) + std::abs(pn - next.p[i]);
            next.q[i] = qn;
            next.p[i] = pn;
        }
        if (delta < tol) {
            next.t = state.t + h;
            return next;
        }
    }
    throw ConvergenceError("implicit midpoint: fixed point not reached in " +
                           std::to_string(max_iters) + " iterations");
}

Trajectory integrate(const SystemSpec& system, const PhaseState& initial,
                     const IntegratorConfig& config) {
    if (!(config.step > 0.0))
        throw ConfigError("integrate: step must be positive");
    if (config.sample_stride < 1)
        throw ConfigError("integrate: sample_stride must be >= 1");
    if (config.t_end < initial.t)
        throw ConfigError("integrate: t_end before initial time");

    Trajectory traj;
    traj.system = std::make_shared<SystemSpec>(system);

    const double span = config.t_end - initial.t;
    long n_steps = static_cast<long>(std::ceil(span / config.step - 1e-12));
    if (n_steps % config.sample_stride != 0) // keep samples uniformly spaced
        n_steps += config.sample_stride - n_steps % config.sample_stride;
    // shrink the step so the final sample lands exactly on t_end
    const double h = n_steps > 0 ? span / n_steps : config.step;
    traj.dt_sample = h * config.sample_stride;

    PhaseState z = initial;
    traj.samples.push_back(z);
    traj.energies.push_back(system.energy(z.q, z.p));
    for (long k = 0; k < n_steps; ++k) {
        z = config.method == Method::Verlet
                ? step_verlet(system, z, h)
                : step_implicit_midpoint(system, z, h, config.fixed_point_tol,
                                         config.max_fixed_point_iters);
        double qnorm = 0.0;
        for (double qi : z.q)
            qnorm += qi * qi;
        if (qnorm > config.escape_bound * config.escape_bound)
            throw EscapeError("integrate: |q| exceeded the escape bound");
        if ((k + 1) % config.sample_stride == 0) {
            traj.samples.push_back(z);
            traj.energies.push_back(system.energy(z.q, z.p));
        }
    }
    return traj;
}

namespace {

double return_distance(const PhaseState& a, const PhaseState& b) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.q.size(); ++i) {
        const double dq = a.q[i] - b.q[i];
        const double dp = a.p[i] - b.p[i];
        d2 += dq * dq + dp * dp;
    }
    return std::sqrt(d2);
}

} // namespace

std::optional<double> detect_period(const Trajectory& traj, double tol) {
    const auto& s = traj.samples;
    if (s.size() < 3) return std::nullopt;
    for (std::size_t k = 2; k + 1 < s.size(); ++k) {
        const double dm = return_distance(s[k - 1], s[0]);
        const double d0 = return_distance(s[k], s[0]);
        const double dp = return_distance(s[k + 1], s[0]);
        if (d0 < tol && d0 <= dm && d0 <= dp) {
            // parabola through the squared distances; vertex refines T
            const double y0 = dm * dm, y1 = d0 * d0, y2 = dp * dp;
            const double denom = y0 - 2.0 * y1 + y2;
            const double h = s[k].t - s[k - 1].t;
            if (denom <= 0.0) return s[k].t - s[0].t;
            const double shift = 0.5 * (y0 - y2) / denom;
            return s[k].t + shift * h - s[0].t;
        }
    }
    return std::nullopt;
}

} // namespace vlab
