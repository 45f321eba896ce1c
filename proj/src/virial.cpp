#include "vlab/virial.hpp"

#include "vlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace vlab {

namespace {

struct Sampled {
    const Trajectory* traj;
    std::vector<double> f; // f at samples

    double t(std::size_t i) const { return traj->samples[i].t; }

    double interp(double tt, std::size_t i) const {
        const double t0 = t(i), t1 = t(i + 1);
        if (t1 == t0) return f[i];
        const double w = (tt - t0) / (t1 - t0);
        return f[i] * (1.0 - w) + f[i + 1] * w;
    }

    std::size_t cell(double tt) const {
        const auto& s = traj->samples;
        auto it = std::upper_bound(s.begin(), s.end(), tt,
                                   [](double v, const PhaseState& z) {
                                       return v < z.t;
                                   });
        std::size_t i = it == s.begin() ? 0 : (it - s.begin()) - 1;
        return std::min(i, s.size() - 2);
    }

    double value_at(double tt) const { return interp(tt, cell(tt)); }

    // trapezoid over [t1, t2] with linear interpolation at the window ends
    double average(double t1, double t2) const {
        if (!(t2 > t1)) throw DomainError("time_average: window must have t2 > t1");
        const std::size_t i1 = cell(t1), i2 = cell(t2);
        if (i1 == i2)
            return 0.5 * (interp(t1, i1) + interp(t2, i1));
        double I = 0.5 * (interp(t1, i1) + f[i1 + 1]) * (t(i1 + 1) - t1);
        for (std::size_t k = i1 + 1; k < i2; ++k)
            I += 0.5 * (f[k] + f[k + 1]) * (t(k + 1) - t(k));
        I += 0.5 * (f[i2] + interp(t2, i2)) * (t2 - t(i2));
        return I / (t2 - t1);
    }
};

Sampled sample(const Trajectory& traj,
               const std::function<double(const PhaseState&)>& f) {
    Sampled s{&traj, {}};
    s.f.reserve(traj.size());
    for (const auto& z : traj.samples)
        s.f.push_back(f(z));
    return s;
}

Window full_window(const Trajectory& traj, const std::optional<Window>& w) {
    if (w) return *w;
    return Window{traj.t0(), traj.t1()};
}

std::size_t count_samples(const Trajectory& traj, const Window& w) {
    std::size_t n = 0;
    for (const auto& z : traj.samples)
        if (z.t >= w.t1 && z.t <= w.t2) ++n;
    return n;
}

Vec generator_grad_q(const GeneratorSpec& g, const Vec& q, const Vec& p) {
    if (g.grad_q) return g.grad_q(q, p);
    Vec out(q.size());
    Vec qq = q;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double h = 1e-6 * (1.0 + std::abs(q[i]));
        qq[i] = q[i] + h;
        const double fp = g.value(qq, p);
        qq[i] = q[i] - h;
        const double fm = g.value(qq, p);
        qq[i] = q[i];
        out[i] = (fp - fm) / (2.0 * h);
    }
    return out;
}

Vec generator_grad_p(const GeneratorSpec& g, const Vec& q, const Vec& p) {
    if (g.grad_p) return g.grad_p(q, p);
    Vec out(p.size());
    Vec pp = p;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double h = 1e-6 * (1.0 + std::abs(p[i]));
        pp[i] = p[i] + h;
        const double fp = g.value(q, pp);
        pp[i] = p[i] - h;
        const double fm = g.value(q, pp);
        pp[i] = p[i];
        out[i] = (fp - fm) / (2.0 * h);
    }
    return out;
}

} // namespace

AverageReport time_average(const Trajectory& traj,
                           const std::function<double(const PhaseState&)>& f,
                           std::optional<Window> window) {
    if (traj.size() < 2)
        throw DomainError("time_average: need at least two samples");
    const Window w = full_window(traj, window);
    const Sampled s = sample(traj, f);
    return AverageReport{s.average(w.t1, w.t2), w, count_samples(traj, w), {}};
}

AverageReport time_average(const Trajectory& traj, const GeneratorSpec& g,
                           std::optional<Window> window) {
    auto fn = [&g](const PhaseState& z) { return g.value(z.q, z.p); };
    AverageReport rep = time_average(traj, fn, window);
    const Sampled s = sample(traj, fn);
    rep.boundary_term = (s.value_at(rep.window.t2) - s.value_at(rep.window.t1)) /
                        (rep.window.t2 - rep.window.t1);
    return rep;
}

double poisson_bracket(const GeneratorSpec& g, const SystemSpec& system,
                       const PhaseState& state) {
    const Vec gq = generator_grad_q(g, state.q, state.p);
    const Vec gp = generator_grad_p(g, state.q, state.p);
    const double m = system.mass_at(state.q);
    Vec hq = system.potential.gradient(state.q); // dH/dq
    if (!system.mass.constant_mass())
        hq[0] -= state.p[0] * state.p[0] * system.mass.prime(state.q[0]) /
                 (2.0 * m * m);
    double pb = 0.0;
    for (std::size_t i = 0; i < state.q.size(); ++i)
        pb += gq[i] * (state.p[i] / m) - gp[i] * hq[i];
    return pb;
}

VirialCheck hypervirial_check(const SystemSpec& system, const GeneratorSpec& g,
                              const Trajectory& traj,
                              std::optional<Window> window) {
    const Window w = full_window(traj, window);
    const AverageReport g_avg = time_average(traj, g, window);
    const AverageReport pb_avg = time_average(
        traj,
        [&](const PhaseState& z) { return poisson_bracket(g, system, z); },
        window);

    double g_sup = 0.0;
    for (const auto& z : traj.samples)
        if (z.t >= w.t1 && z.t <= w.t2)
            g_sup = std::max(g_sup, std::abs(g.value(z.q, z.p)));

    VirialCheck c;
    c.identity = "hypervirial";
    c.lhs = *g_avg.boundary_term;
    c.rhs = pb_avg.mean;
    c.residual = c.lhs - c.rhs;
    c.relative_residual =
        std::abs(c.residual) / (std::abs(c.lhs) + std::abs(c.rhs) + 1.0);
    c.window = w;
    c.system = system.name;
    c.params["sup_abs_G"] = g_sup;
    return c;
}

std::array<VirialCheck, 2> homogeneous_virial_check(const SystemSpec& system,
                                                    double k,
                                                    const Trajectory& traj,
                                                    std::optional<Window> window) {
    if (k == -2.0)
        throw DegenerateDegree("homogeneous_virial_check: degree k = -2");
    const Window w = full_window(traj, window);
    const double E =
        time_average(traj, [&](const PhaseState& z) {
            return system.energy(z.q, z.p);
        }, window).mean;
    const double ec = time_average(traj, [&](const PhaseState& z) {
                          return system.kinetic(z.q, z.p);
                      }, window).mean;
    const double v = time_average(traj, [&](const PhaseState& z) {
                         return system.potential.value(z.q);
                     }, window).mean;

    VirialCheck kin, pot;
    kin.identity = "homogeneous-kinetic";
    kin.lhs = ec;
    kin.rhs = k * E / (k + 2.0);
    pot.identity = "homogeneous-potential";
    pot.lhs = v;
    pot.rhs = 2.0 * E / (k + 2.0);
    for (VirialCheck* c : {&kin, &pot}) {
        c->residual = c->lhs - c->rhs;
        c->relative_residual = std::abs(c->residual) / (std::abs(E) + 1e-300);
        c->window = w;
        c->system = system.name;
        c->params["k"] = k;
        c->params["E"] = E;
    }
    return {kin, pot};
}

VirialCheck lagrangian_virial_check(const SystemSpec& system,
                                    const GeneratorSpec& g,
                                    const Trajectory& traj,
                                    std::optional<Window> window) {
    if (!g.a)
        throw DomainError(
            "lagrangian_virial_check: generator carries no scaling constant a");
    const Window w = full_window(traj, window);
    const AverageReport g_avg = time_average(traj, g, window);
    const double l_avg = time_average(traj, [&](const PhaseState& z) {
                             return system.kinetic(z.q, z.p) -
                                    system.potential.value(z.q);
                         }, window).mean;
    VirialCheck c;
    c.identity = "lagrangian-virial";
    c.lhs = *g_avg.boundary_term;
    c.rhs = *g.a * l_avg;
    c.residual = c.lhs - c.rhs;
    c.relative_residual =
        std::abs(c.residual) / (std::abs(c.rhs) + 1.0);
    c.window = w;
    c.system = system.name;
    c.params["a"] = *g.a;
    c.params["mean_L"] = l_avg;
    return c;
}

std::array<VirialCheck, 2> nonstrict_canonical_check(const SystemSpec& system,
                                                     double d,
                                                     const Trajectory& traj,
                                                     std::optional<Window> window) {
    if (d == 2.0)
        throw DegenerateDegree(
            "nonstrict_canonical_check: degree d = 2 (use the homogeneous check)");
    const Window w = full_window(traj, window);
    const double E =
        time_average(traj, [&](const PhaseState& z) {
            return system.energy(z.q, z.p);
        }, window).mean;
    const double h0 = time_average(traj, [&](const PhaseState& z) {
                          return system.kinetic(z.q, z.p);
                      }, window).mean;
    const double v = time_average(traj, [&](const PhaseState& z) {
                         return system.potential.value(z.q);
                     }, window).mean;

    VirialCheck scaling, equiv;
    scaling.identity = "nonstrict-scaling";
    scaling.lhs = (d + 2.0) * h0;
    scaling.rhs = d * E;
    equiv.identity = "nonstrict-equivalent";
    equiv.lhs = 2.0 * h0;
    equiv.rhs = d * v;
    for (VirialCheck* c : {&scaling, &equiv}) {
        c->residual = c->lhs - c->rhs;
        c->relative_residual = std::abs(c->residual) / (std::abs(E) + 1e-300);
        c->window = w;
        c->system = system.name;
        c->params["d"] = d;
        c->params["E"] = E;
    }
    return {scaling, equiv};
}

} // namespace vlab
