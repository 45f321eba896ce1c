#include "vlab/runner.hpp"

#include "vlab/errors.hpp"
#include "vlab/ktrig.hpp"
#include "vlab/parallel.hpp"
#include "vlab/quantum.hpp"

#include <chrono>
#include <cmath>
#include <random>

namespace vlab {

namespace {

// --- schema -----------------------------------------------------------------

enum class Type { Number, Integer, String, Object, NumberMap, ArrayOfNumber };

struct KeySpec {
    const char* key;
    Type type;
    const std::vector<KeySpec>* children = nullptr; // for Type::Object
};

void validate_object(const Json& j, const std::string& path,
                     const std::vector<KeySpec>& spec) {
    if (!j.is_object())
        throw ConfigError(path + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const KeySpec* found = nullptr;
        for (const auto& k : spec)
            if (it.key() == k.key) {
                found = &k;
                break;
            }
        if (!found)
            throw ConfigError("unknown key \"" + path + "." + it.key() + "\"");
        const Json& v = it.value();
        const std::string vpath = path + "." + it.key();
        switch (found->type) {
        case Type::Number:
            if (!v.is_number()) throw ConfigError(vpath + " must be a number");
            break;
        case Type::Integer:
            if (!v.is_number_integer())
                throw ConfigError(vpath + " must be an integer");
            break;
        case Type::String:
            if (!v.is_string()) throw ConfigError(vpath + " must be a string");
            break;
        case Type::ArrayOfNumber:
            if (!v.is_array()) throw ConfigError(vpath + " must be an array");
            for (const auto& e : v)
                if (!e.is_number())
                    throw ConfigError(vpath + " must hold numbers only");
            break;
        case Type::NumberMap:
            if (!v.is_object())
                throw ConfigError(vpath + " must be an object");
            for (auto p = v.begin(); p != v.end(); ++p)
                if (!p.value().is_number())
                    throw ConfigError(vpath + "." + p.key() +
                                      " must be a number");
            break;
        case Type::Object:
            validate_object(v, vpath, *found->children);
            break;
        }
    }
}

const std::vector<KeySpec> kIntegratorSpec = {
    {"method", Type::String},   {"step", Type::Number},
    {"t_end", Type::Number},    {"fixed_point_tol", Type::Number},
    {"max_fixed_point_iters", Type::Integer},
    {"sample_stride", Type::Integer}, {"escape_bound", Type::Number},
};
const std::vector<KeySpec> kStateSpec = {
    {"q", Type::ArrayOfNumber},
    {"p", Type::ArrayOfNumber},
};
const std::vector<KeySpec> kWindowSpec = {
    {"mode", Type::String}, // "period" | "range" | "full"
    {"t1", Type::Number},         {"t2", Type::Number},
    {"period_tol", Type::Number}, {"transient_fraction", Type::Number},
};
const std::vector<KeySpec> kSystemSpec = {
    {"name", Type::String},
    {"params", Type::NumberMap},
};
const std::vector<KeySpec> kGridSpec = {
    {"x_min", Type::Number},
    {"x_max", Type::Number},
    {"n", Type::Integer},
};
const std::vector<KeySpec> kOutputSpec = {
    {"path", Type::String},
    {"format", Type::String},
};
const std::vector<KeySpec> kGaussianSpec = {
    {"x0", Type::Number},
    {"p0", Type::Number},
    {"sigma", Type::Number},
};

struct ExperimentSchema {
    const char* name;
    std::vector<KeySpec> keys;
};

const std::vector<ExperimentSchema>& schemas() {
    static const std::vector<ExperimentSchema> table = {
        {"classical-virial",
         {{"system", Type::Object, &kSystemSpec},
          {"state", Type::Object, &kStateSpec},
          {"integrator", Type::Object, &kIntegratorSpec},
          {"window", Type::Object, &kWindowSpec},
          {"tolerance", Type::Number},
          {"hypervirial_tolerance", Type::Number}}},
        {"pdm",
         {{"lambda", Type::Number},
          {"a", Type::Number},
          {"c1", Type::Number},
          {"c2", Type::Number},
          {"state", Type::Object, &kStateSpec},
          {"integrator", Type::Object, &kIntegratorSpec},
          {"window", Type::Object, &kWindowSpec},
          {"tolerance", Type::Number}}},
        {"ml-oscillator",
         {{"lambda", Type::Number},
          {"alpha", Type::Number},
          {"amplitude", Type::Number},
          {"integrator", Type::Object, &kIntegratorSpec},
          {"tolerance", Type::Number}}},
        {"nonstrict",
         {{"degree", Type::Number},
          {"coefficient", Type::Number},
          {"state", Type::Object, &kStateSpec},
          {"integrator", Type::Object, &kIntegratorSpec},
          {"window", Type::Object, &kWindowSpec},
          {"tolerance", Type::Number}}},
        {"quantum-virial",
         {{"grid", Type::Object, &kGridSpec},
          {"n_states", Type::Integer},
          {"tolerance_energy", Type::Number},
          {"tolerance_virial", Type::Number}}},
        {"pdm-quantum",
         {{"lambda", Type::Number},
          {"a", Type::Number},
          {"b", Type::Number},
          {"c1", Type::Number},
          {"c2", Type::Number},
          {"grid", Type::Object, &kGridSpec},
          {"n_states", Type::Integer},
          {"tolerance", Type::Number}}},
        {"fock-scan",
         {{"grid", Type::Object, &kGridSpec},
          {"state_index", Type::Integer},
          {"gaussian", Type::Object, &kGaussianSpec},
          {"lambda_min", Type::Number},
          {"lambda_max", Type::Number},
          {"lambda_count", Type::Integer},
          {"tolerance", Type::Number}}},
        {"ehrenfest",
         {{"grid", Type::Object, &kGridSpec},
          {"dt", Type::Number},
          {"t_half", Type::Number},
          {"gaussian", Type::Object, &kGaussianSpec},
          {"tolerance_residual", Type::Number},
          {"ratio_lo", Type::Number},
          {"ratio_hi", Type::Number}}},
        {"ktrig-check",
         {{"points", Type::Integer},
          {"tolerance_identity", Type::Number},
          {"tolerance_derivative", Type::Number},
          {"tolerance_continuity", Type::Number}}},
    };
    return table;
}

// --- config access helpers --------------------------------------------------

double jnum(const Json& j, const std::string& key, double dflt) {
    auto it = j.find(key);
    return it == j.end() ? dflt : it->get<double>();
}

int jint(const Json& j, const std::string& key, int dflt) {
    auto it = j.find(key);
    return it == j.end() ? dflt : it->get<int>();
}

std::string jstr(const Json& j, const std::string& key,
                 const std::string& dflt) {
    auto it = j.find(key);
    return it == j.end() ? dflt : it->get<std::string>();
}

Json jobj(const Json& j, const std::string& key) {
    auto it = j.find(key);
    return it == j.end() ? Json::object() : *it;
}

IntegratorConfig integrator_from(const Json& j, Method dflt_method,
                                 double dflt_step, double dflt_t_end) {
    const Json cfg = jobj(j, "integrator");
    IntegratorConfig ic;
    const std::string method = jstr(cfg, "method",
                                    dflt_method == Method::Verlet
                                        ? "verlet"
                                        : "implicit-midpoint");
    if (method == "verlet")
        ic.method = Method::Verlet;
    else if (method == "implicit-midpoint")
        ic.method = Method::ImplicitMidpoint;
    else
        throw ConfigError("integrator.method must be verlet|implicit-midpoint");
    ic.step = jnum(cfg, "step", dflt_step);
    ic.t_end = jnum(cfg, "t_end", dflt_t_end);
    ic.fixed_point_tol = jnum(cfg, "fixed_point_tol", 1e-12);
    ic.max_fixed_point_iters = jint(cfg, "max_fixed_point_iters", 50);
    ic.sample_stride = jint(cfg, "sample_stride", 1);
    ic.escape_bound = jnum(cfg, "escape_bound", 1e6);
    return ic;
}

PhaseState state_from(const Json& j, const Vec& dflt_q, const Vec& dflt_p) {
    const Json cfg = jobj(j, "state");
    PhaseState z;
    z.q = cfg.contains("q") ? cfg["q"].get<Vec>() : dflt_q;
    z.p = cfg.contains("p") ? cfg["p"].get<Vec>() : dflt_p;
    if (z.q.size() != z.p.size())
        throw ConfigError("state.q and state.p must have equal length");
    return z;
}

qm::Grid grid_from(const Json& j, double lo, double hi, int n) {
    const Json cfg = jobj(j, "grid");
    return qm::make_grid(jnum(cfg, "x_min", lo), jnum(cfg, "x_max", hi),
                         jint(cfg, "n", n));
}

// Window resolution: detected period by default, else the tail of the
// trajectory with the leading transient tenth discarded.
Window resolve_window(const Json& j, const Trajectory& traj) {
    const Json cfg = jobj(j, "window");
    const std::string mode = jstr(cfg, "mode", "period");
    if (mode == "full") return Window{traj.t0(), traj.t1()};
    if (mode == "range") {
        if (!cfg.contains("t1") || !cfg.contains("t2"))
            throw ConfigError("window.mode=range requires t1 and t2");
        return Window{cfg["t1"].get<double>(), cfg["t2"].get<double>()};
    }
    if (mode != "period")
        throw ConfigError("window.mode must be period|range|full");
    double scale = 0.0;
    for (const auto& z : traj.samples)
        for (std::size_t i = 0; i < z.q.size(); ++i)
            scale = std::max({scale, std::abs(z.q[i]), std::abs(z.p[i])});
    const double tol = jnum(cfg, "period_tol", 1e-2) * std::max(scale, 1e-12);
    if (auto T = detect_period(traj, tol))
        return Window{traj.t0(), traj.t0() + *T};
    const double frac = jnum(cfg, "transient_fraction", 0.1);
    const double span = traj.t1() - traj.t0();
    return Window{traj.t0() + frac * span, traj.t1()};
}

void gate(RunReport& rep, bool ok, const std::string& message) {
    if (!ok) {
        rep.failures.push_back(message);
        rep.pass = false;
    }
}

std::map<std::string, double> params_from(const Json& j) {
    std::map<std::string, double> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_number())
            throw ConfigError("system.params values must be numbers");
        out[it.key()] = it.value().get<double>();
    }
    return out;
}

// --- experiments ------------------------------------------------------------

RunReport run_classical_virial(const Json& cfg) {
    RunReport rep;
    const Json sys_cfg = jobj(cfg, "system");
    const std::string name = jstr(sys_cfg, "name", "harmonic");
    const SystemSpec system = catalog_system(name, params_from(jobj(sys_cfg, "params")));

    Vec q0(system.dim, 0.0), p0(system.dim, 0.0);
    q0[0] = 1.0;
    if (name == "kepler") {
        const double e = 0.6;
        q0 = {1.0 - e, 0.0};
        p0 = {0.0, std::sqrt((1.0 + e) / (1.0 - e))};
    }
    const PhaseState z0 = state_from(cfg, q0, p0);
    const IntegratorConfig ic = integrator_from(
        cfg, name == "kepler" ? Method::Verlet : Method::ImplicitMidpoint,
        name == "kepler" ? 2.5e-4 : 1e-3, 8.0);

    const Trajectory traj = integrate(system, z0, ic);
    const Window w = resolve_window(cfg, traj);

    const double tol = jnum(cfg, "tolerance", 1e-6);
    if (system.potential.homogeneity_degree) {
        const auto checks = homogeneous_virial_check(
            system, *system.potential.homogeneity_degree, traj, w);
        for (const auto& c : checks) {
            rep.checks.push_back(c);
            gate(rep, std::abs(c.residual) <= tol * std::max(1.0, std::abs(c.params.at("E"))),
                 c.identity + " residual above tolerance");
        }
    }

    // hypervirial relation at h and h/2, run concurrently; the residual must
    // shrink like h^2 for a symplectic pair
    const GeneratorSpec g = system.mass.constant_mass()
                                ? clausius_generator(system.dim)
                                : build_pdm_generator(system.mass,
                                                      build_xi(system.mass, 2.0, 1.0));
    std::array<VirialCheck, 2> refine;
    parallel_for(2, [&](int i) {
        IntegratorConfig fine = ic;
        fine.step = i == 0 ? ic.step : ic.step / 2.0;
        const Trajectory t2 = i == 0 ? traj : integrate(system, z0, fine);
        refine[i] = hypervirial_check(system, g, t2, w);
    });
    rep.checks.push_back(refine[0]);
    const double hv_tol = jnum(cfg, "hypervirial_tolerance", 1e-4);
    gate(rep, std::abs(refine[0].residual) <= hv_tol,
         "hypervirial residual above tolerance");
    rep.extra["hypervirial_residual_h"] = refine[0].residual;
    rep.extra["hypervirial_residual_h_half"] = refine[1].residual;
    if (refine[1].residual != 0.0)
        rep.extra["hypervirial_h_ratio"] = refine[0].residual / refine[1].residual;
    return rep;
}

RunReport run_pdm(const Json& cfg) {
    RunReport rep;
    const double lambda = jnum(cfg, "lambda", 1.0);
    const double a = jnum(cfg, "a", 2.0);
    const double c1 = jnum(cfg, "c1", 1.0);
    const double c2 = jnum(cfg, "c2", 1.0);

    SystemSpec system = ml_system(lambda, 1.0);
    system.name = "pdm-custom";
    const PdmXi xi = build_xi(system.mass, a, c1);
    system.potential = build_pdm_potential(xi, a, c2, 0.0);
    const GeneratorSpec g = build_pdm_generator(system.mass, xi);

    const PhaseState z0 = state_from(cfg, Vec{0.0}, Vec{0.0});
    const IntegratorConfig ic =
        integrator_from(cfg, Method::ImplicitMidpoint, 1e-3, 6.0);
    const Trajectory traj = integrate(system, z0, ic);
    const Window w = resolve_window(cfg, traj);

    const VirialCheck lag = lagrangian_virial_check(system, g, traj, w);
    rep.checks.push_back(lag);
    const double E = system.energy(z0.q, z0.p);
    const double tol = jnum(cfg, "tolerance", 1e-3);
    gate(rep, std::abs(lag.residual) <= tol * (std::abs(lag.rhs) + std::abs(E)),
         "lagrangian-virial residual above tolerance");

    rep.checks.push_back(hypervirial_check(system, g, traj, w));

    // scaling-field consistency: 2 xi' + xi m'/m = a on a grid
    double ode_residual = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double x = -2.0 + 4.0 * i / 200.0;
        const double r = 2.0 * xi.deriv(x) +
                         xi(x) * system.mass.prime(x) / system.mass.at(x) - a;
        ode_residual = std::max(ode_residual, std::abs(r));
    }
    rep.extra["xi_ode_residual"] = ode_residual;
    gate(rep, ode_residual < 1e-8, "xi ODE residual above 1e-8");
    return rep;
}

RunReport run_ml(const Json& cfg) {
    RunReport rep;
    const double lambda = jnum(cfg, "lambda", 1.0);
    const double alpha = jnum(cfg, "alpha", 1.0);
    const double amp = jnum(cfg, "amplitude", 1.0);
    const SystemSpec system = ml_system(lambda, alpha);

    const double T_law =
        2.0 * M_PI * std::sqrt(1.0 + lambda * amp * amp) / alpha;
    IntegratorConfig ic =
        integrator_from(cfg, Method::ImplicitMidpoint, 1e-3, 1.2 * T_law);
    const Trajectory traj =
        integrate(system, PhaseState{{amp}, {0.0}, 0.0}, ic);
    const auto T = detect_period(traj, 1e-2 * std::max(1.0, amp));
    if (!T)
        throw ConvergenceError("ml-oscillator: no period detected");

    VirialCheck c;
    c.identity = "ml-period";
    c.system = system.name;
    c.lhs = *T;
    c.rhs = T_law;
    c.residual = c.lhs - c.rhs;
    c.relative_residual = std::abs(c.residual) / T_law;
    c.window = Window{0.0, traj.t1()};
    c.params = {{"lambda", lambda}, {"alpha", alpha}, {"amplitude", amp}};
    rep.checks.push_back(c);
    const double tol = jnum(cfg, "tolerance", 1e-4);
    gate(rep, c.relative_residual <= tol,
         "measured period deviates from the amplitude-frequency law");
    return rep;
}

RunReport run_nonstrict(const Json& cfg) {
    RunReport rep;
    const double d = jnum(cfg, "degree", 4.0);
    const double coeff = jnum(cfg, "coefficient", 1.0);
    const SystemSpec system = catalog_system("quartic", {{"coefficient", coeff}});

    const PhaseState z0 = state_from(cfg, Vec{1.0}, Vec{0.0});
    const IntegratorConfig ic =
        integrator_from(cfg, Method::ImplicitMidpoint, 1e-3, 4.5);
    const Trajectory traj = integrate(system, z0, ic);
    const Window w = resolve_window(cfg, traj);

    const auto checks = nonstrict_canonical_check(system, d, traj, w);
    const double tol = jnum(cfg, "tolerance", 1e-3);
    for (const auto& c : checks) {
        rep.checks.push_back(c);
        gate(rep, std::abs(c.residual) <=
                      tol * std::max(1e-12, std::abs(c.params.at("E"))),
             c.identity + " residual above tolerance");
    }
    return rep;
}

RunReport run_quantum_virial(const Json& cfg) {
    RunReport rep;
    const qm::Grid grid = grid_from(cfg, -12.0, 12.0, 2001);
    const int n_states = jint(cfg, "n_states", 6);
    const MassProfile mass = MassProfile::constant(1.0);
    PotentialSpec pot;
    pot.value = [](const Vec& q) { return 0.5 * q[0] * q[0]; };
    pot.gradient = [](const Vec& q) { return Vec{q[0]}; };
    pot.homogeneity_degree = 2.0;

    const auto ham = qm::build_hamiltonian(grid, mass, pot);
    const auto spec = qm::eigensolve(ham, n_states);

    const double tol_e = jnum(cfg, "tolerance_energy", 1e-3);
    const double tol_v = jnum(cfg, "tolerance_virial", 1e-4);
    rep.extra["eigenvalues"] = spec.eigenvalues;
    for (int j = 0; j < n_states; ++j) {
        gate(rep, std::abs(spec.eigenvalues[j] - (j + 0.5)) <= tol_e,
             "E_" + std::to_string(j) + " deviates from n + 1/2");
        gate(rep, spec.edge_ok[j],
             "eigenstate " + std::to_string(j) + " has not decayed at the box edge");
    }
    for (const auto& c : qm::quantum_virial_check(spec, ham, 2.0)) {
        rep.checks.push_back(c);
        gate(rep, std::abs(c.residual) <= tol_v,
             c.identity + " residual above tolerance");
    }
    return rep;
}

RunReport run_pdm_quantum(const Json& cfg) {
    RunReport rep;
    const double lambda = jnum(cfg, "lambda", 1.0);
    const double a = jnum(cfg, "a", 2.0);
    const double b = jnum(cfg, "b", -a);
    const double c1 = jnum(cfg, "c1", 1.0);
    const double c2 = jnum(cfg, "c2", 1.0);
    const qm::Grid grid = grid_from(cfg, -91.0, 13.0, 10399);
    const int n_states = jint(cfg, "n_states", 3);

    const SystemSpec ml = ml_system(lambda, 1.0);
    const PdmXi xi = build_xi(ml.mass, a, c1);
    // quantum convention: V = C2 exp(-int b/xi)
    const PotentialSpec pot = build_pdm_potential(xi, -b, c2, 0.0);

    const auto ham = qm::build_hamiltonian(grid, ml.mass, pot);
    const auto spec = qm::eigensolve(ham, n_states);
    rep.extra["eigenvalues"] = spec.eigenvalues;

    const double tol = jnum(cfg, "tolerance", 1e-3);
    for (const auto& c : qm::pdm_quantum_check(spec, ham, a, b)) {
        rep.checks.push_back(c);
        gate(rep, c.relative_residual <= tol,
             c.identity + " residual above tolerance");
    }
    return rep;
}

RunReport run_fock_scan(const Json& cfg) {
    RunReport rep;
    const qm::Grid grid = grid_from(cfg, -12.0, 12.0, 2001);
    const MassProfile mass = MassProfile::constant(1.0);
    PotentialSpec pot;
    pot.value = [](const Vec& q) { return 0.5 * q[0] * q[0]; };
    pot.gradient = [](const Vec& q) { return Vec{q[0]}; };
    const auto ham = qm::build_hamiltonian(grid, mass, pot);

    const double lam_lo = jnum(cfg, "lambda_min", 0.5);
    const double lam_hi = jnum(cfg, "lambda_max", 2.0);
    const int count = jint(cfg, "lambda_count", 31);
    std::vector<double> lambdas(count);
    for (int i = 0; i < count; ++i)
        lambdas[i] = lam_lo + (lam_hi - lam_lo) * i / (count - 1);

    const bool use_gaussian = cfg.contains("gaussian");
    qm::WaveFunction psi = [&] {
        if (use_gaussian) {
            const Json g = cfg["gaussian"];
            return qm::gaussian_state(ham, jnum(g, "x0", 0.0), jnum(g, "p0", 0.0),
                                      jnum(g, "sigma", 1.2));
        }
        const int idx = jint(cfg, "state_index", 0);
        return qm::eigensolve(ham, idx + 1).eigenvectors.back();
    }();

    const qm::BandMatrix vop = qm::BandMatrix::diag(ham.v);
    const auto scan = qm::fock_scan(psi, ham.h0, vop, 2.0, lambdas);
    rep.extra["curve"] = Json::array();
    for (const auto& [lam, e] : scan.curve)
        rep.extra["curve"].push_back({{"lambda", lam}, {"E", e}});
    rep.extra["dE_at_1"] = scan.dE_at_1;
    rep.extra["lambda_star"] = scan.lambda_star;
    rep.extra["stationarity_residual"] = scan.stationarity_residual;
    rep.extra["h0_exp"] = scan.h0_exp;
    rep.extra["v_exp"] = scan.v_exp;

    VirialCheck c;
    c.identity = use_gaussian ? "fock-stationarity" : "fock-eigenstate";
    c.system = "harmonic";
    c.lhs = use_gaussian ? scan.stationarity_residual : scan.dE_at_1;
    c.rhs = 0.0;
    c.residual = c.lhs;
    c.relative_residual = std::abs(c.lhs) /
                          (std::abs(scan.h0_exp) + std::abs(scan.v_exp));
    rep.checks.push_back(c);
    const double tol = jnum(cfg, "tolerance", use_gaussian ? 1e-6 : 1e-4);
    gate(rep, std::abs(c.lhs) <= tol,
         use_gaussian ? "stationarity equation residual above tolerance"
                      : "dE/dlambda at lambda=1 above tolerance");
    return rep;
}

RunReport run_ehrenfest(const Json& cfg) {
    RunReport rep;
    const qm::Grid grid = grid_from(cfg, -12.0, 12.0, 2001);
    const MassProfile mass = MassProfile::constant(1.0);
    PotentialSpec pot;
    pot.value = [](const Vec& q) { return 0.5 * q[0] * q[0]; };
    pot.gradient = [](const Vec& q) { return Vec{q[0]}; };
    const auto ham = qm::build_hamiltonian(grid, mass, pot);

    const double dt = jnum(cfg, "dt", 1e-3);
    const double t_half = jnum(cfg, "t_half", 50.0);
    const int steps_T = static_cast<int>(std::lround(t_half / dt));
    const Json g = jobj(cfg, "gaussian");
    const qm::WaveFunction psi0 = qm::gaussian_state(
        ham, jnum(g, "x0", 1.0), jnum(g, "p0", 0.4), jnum(g, "sigma", 1.0));
    const qm::BandMatrix a = qm::dilation_generator(grid, mass);

    const auto scan = qm::ehrenfest_scan(ham, a, psi0, dt, steps_T);
    rep.extra["max_residual"] = scan.max_residual;
    rep.extra["avg_bracket_T"] = scan.avg_bracket_T;
    rep.extra["avg_bracket_2T"] = scan.avg_bracket_2T;
    rep.extra["decay_ratio"] = scan.decay_ratio;
    rep.extra["norm_drift"] = scan.norm_drift;

    VirialCheck c;
    c.identity = "ehrenfest-residual";
    c.system = "harmonic";
    c.lhs = scan.max_residual;
    c.rhs = 0.0;
    c.residual = scan.max_residual;
    c.window = Window{0.0, 2.0 * t_half};
    rep.checks.push_back(c);

    const double tol = jnum(cfg, "tolerance_residual", 5e-5);
    const double lo = jnum(cfg, "ratio_lo", 0.3), hi = jnum(cfg, "ratio_hi", 0.7);
    gate(rep, scan.max_residual <= tol, "Ehrenfest residual above tolerance");
    gate(rep, scan.decay_ratio >= lo && scan.decay_ratio <= hi,
         "averaged bracket does not halve when the window doubles");
    gate(rep, scan.norm_drift <= 1e-9, "norm drift above 1e-9");
    return rep;
}

RunReport run_ktrig(const Json& cfg) {
    RunReport rep;
    const int points = jint(cfg, "points", 500);
    const unsigned seed = static_cast<unsigned>(jint(cfg, "seed", 12345));
    const double tol_id = jnum(cfg, "tolerance_identity", 1e-12);
    const double tol_d = jnum(cfg, "tolerance_derivative", 1e-8);
    const double tol_c = jnum(cfg, "tolerance_continuity", 1e-7);

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ux(-3.0, 3.0);
    std::uniform_real_distribution<double> uk(-2.0, 2.0);

    double worst_id = 0.0, worst_double = 0.0, worst_deriv = 0.0, worst_cont = 0.0;
    const double h = 1e-5;
    for (int i = 0; i < points; ++i) {
        const double x = ux(rng);
        const double kappa = i % 5 == 0 ? std::round(uk(rng)) : uk(rng);
        const double c = ktrig::cos_k(kappa, x), s = ktrig::sin_k(kappa, x);
        worst_id = std::max(worst_id, std::abs(c * c + kappa * s * s - 1.0));
        worst_double = std::max(
            {worst_double,
             std::abs(ktrig::cos_k(kappa, 2 * x) - (c * c - kappa * s * s)),
             std::abs(ktrig::sin_k(kappa, 2 * x) - 2.0 * s * c)});
        const double ds =
            (ktrig::sin_k(kappa, x + h) - ktrig::sin_k(kappa, x - h)) / (2 * h);
        const double dc =
            (ktrig::cos_k(kappa, x + h) - ktrig::cos_k(kappa, x - h)) / (2 * h);
        worst_deriv = std::max(
            {worst_deriv, std::abs(ds - c), std::abs(dc + kappa * s)});
        for (double kk : {1e-8, -1e-8}) {
            worst_cont = std::max(
                {worst_cont,
                 std::abs(ktrig::cos_k(kk, x) - ktrig::cos_k(0.0, x)),
                 std::abs(ktrig::sin_k(kk, x) - ktrig::sin_k(0.0, x))});
        }
    }
    rep.extra["max_pythagorean_residual"] = worst_id;
    rep.extra["max_double_angle_residual"] = worst_double;
    rep.extra["max_derivative_residual"] = worst_deriv;
    rep.extra["max_continuity_residual"] = worst_cont;
    gate(rep, worst_id <= tol_id, "Pythagorean identity residual above tolerance");
    gate(rep, worst_double <= tol_id, "double-angle residual above tolerance");
    gate(rep, worst_deriv <= tol_d, "derivative residual above tolerance");
    gate(rep, worst_cont <= tol_c, "continuity at kappa=0 above tolerance");
    return rep;
}

} // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& s : schemas())
            v.push_back(s.name);
        return v;
    }();
    return names;
}

ExperimentConfig parse_config(const Json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("experiment") || !j["experiment"].is_string())
        throw ConfigError("config requires an \"experiment\" string");
    const std::string name = j["experiment"].get<std::string>();
    const ExperimentSchema* schema = nullptr;
    for (const auto& s : schemas())
        if (name == s.name) {
            schema = &s;
            break;
        }
    if (!schema)
        throw ConfigError("unknown experiment \"" + name + "\"");

    std::vector<KeySpec> keys = schema->keys;
    keys.push_back({"experiment", Type::String});
    keys.push_back({"seed", Type::Integer});
    keys.push_back({"output", Type::Object, &kOutputSpec});
    validate_object(j, name, keys);
    return ExperimentConfig{j};
}

void apply_override(Json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--set expects key.path=value");
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    Json* node = &config;
    std::size_t pos = 0;
    while (true) {
        const auto dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot - pos);
        if (key.empty()) throw ConfigError("--set has an empty key segment");
        if (dot == std::string::npos) {
            Json parsed = Json::parse(value, nullptr, false);
            (*node)[key] = parsed.is_discarded() ? Json(value) : parsed;
            return;
        }
        node = &(*node)[key];
        pos = dot + 1;
    }
}

RunReport run(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const Json& cfg = config.raw;
    const std::string name = cfg["experiment"].get<std::string>();

    RunReport rep;
    if (name == "classical-virial") rep = run_classical_virial(cfg);
    else if (name == "pdm") rep = run_pdm(cfg);
    else if (name == "ml-oscillator") rep = run_ml(cfg);
    else if (name == "nonstrict") rep = run_nonstrict(cfg);
    else if (name == "quantum-virial") rep = run_quantum_virial(cfg);
    else if (name == "pdm-quantum") rep = run_pdm_quantum(cfg);
    else if (name == "fock-scan") rep = run_fock_scan(cfg);
    else if (name == "ehrenfest") rep = run_ehrenfest(cfg);
    else if (name == "ktrig-check") rep = run_ktrig(cfg);
    else throw ConfigError("unknown experiment \"" + name + "\"");

    rep.config = cfg;
    rep.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    return rep;
}

int exit_code_for(const std::exception& error) {
    if (dynamic_cast<const ConfigError*>(&error)) return 2;
    if (dynamic_cast<const ConvergenceError*>(&error)) return 3;
    if (dynamic_cast<const DomainError*>(&error)) return 4;
    if (dynamic_cast<const AsymmetryError*>(&error)) return 4;
    return 1;
}

} // namespace vlab
