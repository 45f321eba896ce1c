#include <doctest.h>

#include "vlab/errors.hpp"
#include "vlab/quantum.hpp"
#include "vlab/systems.hpp"

#include <cmath>
#include <complex>
#include <random>

using namespace vlab;
using namespace vlab::qm;

namespace {

constexpr double kPi = 3.14159265358979323846;

PotentialSpec harmonic_potential() {
    PotentialSpec pot;
    pot.value = [](const Vec& q) { return 0.5 * q[0] * q[0]; };
    pot.gradient = [](const Vec& q) { return Vec{q[0]}; };
    pot.homogeneity_degree = 2.0;
    return pot;
}

PotentialSpec zero_potential() {
    PotentialSpec pot;
    pot.value = [](const Vec&) { return 0.0; };
    pot.gradient = [](const Vec& q) { return Vec(q.size(), 0.0); };
    return pot;
}

CVec random_interior(const Grid& grid, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CVec v(grid.n);
    for (int i = 0; i < grid.n; ++i)
        v[i] = Complex{u(rng), u(rng)};
    // taper to zero near the ends
    for (int i = 0; i < grid.n; ++i) {
        const double s = std::sin(kPi * (i + 1) / (grid.n + 1));
        v[i] *= s * s;
    }
    return v;
}

Complex wdot(const CVec& a, const CVec& b) {
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i)
        s += std::conj(a[i]) * b[i];
    return s;
}

} // namespace

TEST_CASE("banded matrix algebra matches dense arithmetic") {
    BandMatrix a(6, 1), b(6, 2);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            if (std::abs(i - j) <= 1) a.set(i, j, Complex{u(rng), u(rng)});
            if (std::abs(i - j) <= 2) b.set(i, j, Complex{u(rng), u(rng)});
        }
    const BandMatrix ab = a * b;
    CVec x(6);
    for (auto& v : x)
        v = Complex{u(rng), u(rng)};
    const CVec y1 = ab.apply(x);
    const CVec y2 = a.apply(b.apply(x));
    for (int i = 0; i < 6; ++i)
        CHECK(std::abs(y1[i] - y2[i]) < 1e-14);

    const BandMatrix comm = commutator(a, b);
    const CVec c1 = comm.apply(x);
    const CVec ab_x = a.apply(b.apply(x));
    const CVec ba_x = b.apply(a.apply(x));
    for (int i = 0; i < 6; ++i)
        CHECK(std::abs(c1[i] - (ab_x[i] - ba_x[i])) < 1e-14);

    const BandMatrix adj = a.hermitian_adjoint();
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            CHECK(std::abs(adj.at(i, j) - std::conj(a.at(j, i))) < 1e-15);
}

TEST_CASE("translation generator differentiates plane-like data") {
    const Grid grid = make_grid(0.0, 1.0, 399);
    const BandMatrix p = build_momentum(grid, MassProfile::constant(1.0));
    WaveFunction wf;
    wf.grid = grid;
    wf.weights.assign(grid.n, grid.dx());
    wf.std_values.resize(grid.n);
    CVec expected(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        wf.std_values[i] = std::sqrt(grid.dx()) * std::sin(kPi * x);
        expected[i] = Complex{0.0, -1.0} * kPi * std::cos(kPi * x) *
                      std::sqrt(grid.dx());
    }
    const CVec derivative = p.apply(wf.std_values);
    for (int i = 5; i < grid.n - 5; ++i)
        CHECK(std::abs(derivative[i] - expected[i]) <
              6.0 * grid.dx() * grid.dx() * std::sqrt(grid.dx()));
}

TEST_CASE("momentum is self-adjoint in the weighted product") {
    const Grid grid = make_grid(-4.0, 4.0, 257);
    const SystemSpec ml = ml_system(1.0, 1.0);
    for (const MassProfile& mass :
         {MassProfile::constant(1.0), ml.mass}) {
        const BandMatrix p = build_momentum(grid, mass);
        const CVec phi = random_interior(grid, 17), psi = random_interior(grid, 23);
        const Complex lhs = wdot(phi, p.apply(psi));
        const Complex rhs = wdot(p.apply(phi), psi);
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("momentum expectation on a real state vanishes") {
    const SystemSpec ml = ml_system(1.0, 1.0);
    const Grid grid = make_grid(-6.0, 6.0, 301);
    const auto ham = build_hamiltonian(grid, ml.mass, zero_potential());
    const BandMatrix p = build_momentum(grid, ml.mass);
    const WaveFunction g = gaussian_state(ham, 0.5, 0.0, 0.8);
    CHECK(std::abs(expectation(g, p)) < 1e-12);
}

TEST_CASE("hamiltonian is symmetric and weighted-self-adjoint") {
    const Grid grid = make_grid(-5.0, 5.0, 301);
    const SystemSpec ml = ml_system(1.0, 1.0);
    const PdmXi xi = build_xi(ml.mass, 2.0, 1.0, Interval{-30.0, 30.0});
    const PotentialSpec pot = build_pdm_potential(xi, 2.0, 1.0, 0.0);
    const auto ham = build_hamiltonian(grid, ml.mass, pot);

    for (int i = 0; i < grid.n; ++i)
        for (int j = std::max(0, i - 3); j <= std::min(grid.n - 1, i + 3); ++j)
            CHECK(std::abs(ham.h.at(i, j) - ham.h.at(j, i)) < 1e-14);

    const CVec phi = random_interior(grid, 5), psi = random_interior(grid, 7);
    CHECK(std::abs(wdot(phi, ham.h.apply(psi)) - wdot(ham.h.apply(phi), psi)) <
          1e-12 * grid.n);

    // kinetic part is positive semidefinite
    const CVec hp = ham.h0.apply(phi);
    CHECK(wdot(phi, hp).real() >= -1e-12);
}

TEST_CASE("well spectra converge to the closed forms") {
    SUBCASE("quadratic well") {
        const Grid grid = make_grid(-10.0, 10.0, 801);
        const auto ham =
            build_hamiltonian(grid, MassProfile::constant(1.0), harmonic_potential());
        const auto spec = eigensolve(ham, 6);
        for (int n = 0; n < 6; ++n)
            CHECK(std::abs(spec.eigenvalues[n] - (n + 0.5)) < 1e-6);
        CHECK(std::abs(spec.eigenvalues[0] - 0.5) < 1e-4);
        CHECK(std::abs(spec.eigenvalues[5] - 5.5) < 1e-3);
        for (int n = 0; n < 6; ++n)
            CHECK(spec.edge_ok[n]);
        const BandMatrix vop = BandMatrix::diag(ham.v);
        CHECK(std::abs(expectation(spec.eigenvectors[0], vop) - 0.25) < 1e-4);
    }
    SUBCASE("flat box") {
        const Grid grid = make_grid(0.0, 1.0, 2000);
        const auto ham =
            build_hamiltonian(grid, MassProfile::constant(1.0), zero_potential());
        const auto spec = eigensolve(ham, 3);
        for (int k = 1; k <= 3; ++k) {
            const double exact = 0.5 * k * k * kPi * kPi;
            CHECK(std::abs(spec.eigenvalues[k - 1] - exact) < 1e-6 * exact);
        }
    }
}

TEST_CASE("ground-state error decreases at better than second order") {
    auto e0_err = [](int n) {
        const Grid grid = make_grid(-10.0, 10.0, n);
        const auto ham = build_hamiltonian(grid, MassProfile::constant(1.0),
                                           harmonic_potential());
        return std::abs(eigensolve(ham, 1).eigenvalues[0] - 0.5);
    };
    const double coarse = e0_err(250), fine = e0_err(501);
    CHECK(coarse / fine > 3.2);
}

TEST_CASE("eigenvectors are orthonormal in the weighted product") {
    const Grid grid = make_grid(-8.0, 8.0, 501);
    const auto ham = build_hamiltonian(grid, MassProfile::constant(1.0),
                                       harmonic_potential());
    const auto spec = eigensolve(ham, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j <= i; ++j) {
            const Complex g =
                wdot(spec.eigenvectors[i].std_values, spec.eigenvectors[j].std_values);
            CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) < 1e-10);
        }
}

TEST_CASE("expectation guards against non-real values") {
    const Grid grid = make_grid(-6.0, 6.0, 301);
    const auto ham = build_hamiltonian(grid, MassProfile::constant(1.0),
                                       harmonic_potential());
    const WaveFunction psi = gaussian_state(ham, 1.0, 0.7, 1.0);
    const BandMatrix idm = BandMatrix::diag(std::vector<double>(grid.n, 1.0));
    CHECK(expectation(psi, idm) == doctest::Approx(1.0).epsilon(1e-12));

    ScalarField1D coordinate{[](double x) { return x; },
                             [](double) { return 1.0; }};
    const BandMatrix xd =
        xi_partial_operator(grid, MassProfile::constant(1.0), coordinate);
    CHECK_THROWS_AS((void)expectation(psi, xd), AsymmetryError);
}

TEST_CASE("virial balance holds per eigenstate in a quadratic well") {
    const Grid grid = make_grid(-10.0, 10.0, 801);
    const auto ham = build_hamiltonian(grid, MassProfile::constant(1.0),
                                       harmonic_potential());
    const auto spec = eigensolve(ham, 4);
    for (const auto& c : quantum_virial_check(spec, ham, 2.0)) {
        CHECK(std::abs(c.residual) < 1e-4);
        // equal split of the energy between the two parts
        CHECK(c.lhs / 2.0 ==
              doctest::Approx(c.params.at("E") / 2.0).epsilon(1e-4));
    }
}

TEST_CASE("weighted-measure eigenproblem reproduces the arclength picture") {
    // m = 1/(1+x^2) with the quadratic-in-u potential: eigenvalues are
    // sqrt(2) (n + 1/2)
    const SystemSpec ml = ml_system(1.0, 1.0);
    const PdmXi xi = build_xi(ml.mass, 2.0, 1.0, Interval{-100.0, 30.0});
    const PotentialSpec pot = build_pdm_potential(xi, 2.0, 1.0, 0.0);
    const Grid grid = make_grid(-91.0, 13.0, 5199);
    const auto ham = build_hamiltonian(grid, ml.mass, pot);
    const auto spec = eigensolve(ham, 3);
    for (int n = 0; n < 3; ++n)
        CHECK(std::abs(spec.eigenvalues[n] - std::sqrt(2.0) * (n + 0.5)) < 1e-5);

    for (const auto& c : pdm_quantum_check(spec, ham, 2.0, -2.0))
        CHECK(c.relative_residual < 1e-3);
}

TEST_CASE("balance check reduces to the quadratic-well identity for constant mass") {
    const MassProfile unit = MassProfile::constant(1.0);
    const PdmXi xi = build_xi(unit, 2.0, 1.0);
    const PotentialSpec pot = build_pdm_potential(xi, 2.0, 1.0, 0.0); // (1+x)^2
    const Grid grid = make_grid(-11.0, 9.0, 901);
    const auto ham = build_hamiltonian(grid, unit, pot);
    const auto spec = eigensolve(ham, 3);
    for (const auto& c : pdm_quantum_check(spec, ham, 2.0, -2.0))
        CHECK(c.relative_residual < 1e-4);
}

TEST_CASE("eigenstate commutator expectations vanish") {
    const Grid grid = make_grid(-9.0, 9.0, 601);
    const MassProfile unit = MassProfile::constant(1.0);
    const auto ham = build_hamiltonian(grid, unit, harmonic_potential());
    const auto spec = eigensolve(ham, 3);
    const BandMatrix a = dilation_generator(grid, unit);
    const BandMatrix comm = commutator(a, ham.h);
    double a_norm = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        double row = 0.0;
        for (int j = std::max(0, i - 2); j <= std::min(grid.n - 1, i + 2); ++j)
            row += std::abs(a.at(i, j));
        a_norm = std::max(a_norm, row);
    }
    for (int n = 0; n < 3; ++n) {
        const Complex v =
            wdot(spec.eigenvectors[n].std_values,
                 comm.apply(spec.eigenvectors[n].std_values));
        CHECK(std::abs(v) < 1e-6 * a_norm * spec.eigenvalues[n]);
    }
}

TEST_CASE("commutator of translation and dilation generators closes on momentum") {
    // [P, xi d/dx] = (a/2) P up to a defect whose action on smooth data
    // shrinks with dx (interior rows; the band near the walls is excluded)
    auto smooth = [](const Grid& grid) {
        CVec v(grid.n);
        for (int i = 0; i < grid.n; ++i) {
            const double x = grid.x(i);
            v[i] = std::exp(-0.4 * x * x) * std::sin(1.3 * x + 0.2);
        }
        return v;
    };
    auto interior_max = [](const Grid& grid, const CVec& v) {
        double worst = 0.0;
        for (int i = 6; i < grid.n - 6; ++i)
            worst = std::max(worst, std::abs(v[i]));
        return worst;
    };

    auto defect = [&](int n) {
        const Grid grid = make_grid(-5.0, 5.0, n);
        const MassProfile unit = MassProfile::constant(1.0);
        ScalarField1D coordinate{[](double x) { return x; },
                                 [](double) { return 1.0; }};
        const BandMatrix p = build_momentum(grid, unit);
        const BandMatrix a = xi_partial_operator(grid, unit, coordinate);
        const BandMatrix d = commutator(p, a) - p; // a = 2: (a/2) P = P
        return interior_max(grid, d.apply(smooth(grid)));
    };
    const double coarse = defect(200), fine = defect(400);
    CHECK(coarse / fine > 3.0);
    CHECK(fine < 1e-3);

    // the position-dependent case with its own scaling field
    const SystemSpec ml = ml_system(1.0, 1.0);
    const PdmXi xi = build_xi(ml.mass, 2.0, 1.0, Interval{-30.0, 30.0});
    auto defect_pdm = [&](int n) {
        const Grid grid = make_grid(-3.0, 3.0, n);
        const BandMatrix p = build_momentum(grid, ml.mass);
        const BandMatrix a = xi_partial_operator(grid, ml.mass, xi.field);
        const BandMatrix d = commutator(p, a) - p; // (a/2) = 1
        return interior_max(grid, d.apply(smooth(grid)));
    };
    CHECK(defect_pdm(200) / defect_pdm(400) > 3.0);
}

TEST_CASE("scaling scan of the energy expectation") {
    const Grid grid = make_grid(-10.0, 10.0, 801);
    const auto ham = build_hamiltonian(grid, MassProfile::constant(1.0),
                                       harmonic_potential());
    const BandMatrix vop = BandMatrix::diag(ham.v);
    std::vector<double> lambdas{0.5, 0.8, 1.0, 1.25, 2.0};

    SUBCASE("an eigenstate is stationary at unit scale") {
        const auto spec = eigensolve(ham, 1);
        const auto scan = fock_scan(spec.eigenvectors[0], ham.h0, vop, 2.0, lambdas);
        CHECK(std::abs(scan.dE_at_1) < 1e-4);
        // E(lambda) = (E/2)(lambda^-2 + lambda^2) for the equal split
        for (const auto& [lam, e] : scan.curve)
            CHECK(e == doctest::Approx(
                           0.25 * (1.0 / (lam * lam) + lam * lam))
                           .epsilon(1e-3));
        CHECK(scan.curve[2].second ==
              doctest::Approx(scan.h0_exp + scan.v_exp).epsilon(1e-12));
    }
    SUBCASE("a mis-scaled state locates its stationary dilation") {
        const WaveFunction psi = gaussian_state(ham, 0.0, 0.0, 1.3);
        const auto scan = fock_scan(psi, ham.h0, vop, 2.0, lambdas);
        CHECK(scan.stationarity_residual < 1e-6);
        CHECK(scan.lambda_star ==
              doctest::Approx(std::pow(scan.h0_exp / scan.v_exp, 0.25))
                  .epsilon(1e-10));
    }
}

TEST_CASE("unitary evolution") {
    const Grid grid = make_grid(-7.0, 7.0, 301);
    const auto ham = build_hamiltonian(grid, MassProfile::constant(1.0),
                                       harmonic_potential());

    SUBCASE("eigenstates are stationary") {
        const auto spec = eigensolve(ham, 2);
        const BandMatrix vop = BandMatrix::diag(ham.v);
        const double before = expectation(spec.eigenvectors[1], vop);
        const auto traj = evolve_cn(ham, spec.eigenvectors[1], 1e-3, 1000, 1000);
        const double after = expectation(traj.back(), vop);
        CHECK(std::abs(after - before) < 1e-8);
    }
    SUBCASE("the weighted norm survives many steps") {
        const WaveFunction psi0 = gaussian_state(ham, 1.0, 0.0, 1.0);
        const auto traj = evolve_cn(ham, psi0, 1e-2, 10000, 10000);
        CHECK(std::abs(traj.back().norm() - 1.0) < 1e-9);
    }
    SUBCASE("second-order convergence in the step size") {
        const WaveFunction psi0 = gaussian_state(ham, 1.0, 0.0, 1.0);
        auto final_state = [&](double dt, int steps) {
            return evolve_cn(ham, psi0, dt, steps, steps).back();
        };
        const WaveFunction a = final_state(4e-2, 50);
        const WaveFunction b = final_state(2e-2, 100);
        const WaveFunction c = final_state(1e-2, 200);
        double dab = 0.0, dbc = 0.0;
        for (int i = 0; i < grid.n; ++i) {
            dab += std::norm(a.std_values[i] - b.std_values[i]);
            dbc += std::norm(b.std_values[i] - c.std_values[i]);
        }
        const double ratio = std::sqrt(dab / dbc);
        CHECK(ratio > 3.0);
        CHECK(ratio < 5.0);
    }
}

TEST_CASE("expectation rates follow the commutator") {
    const Grid grid = make_grid(-8.0, 8.0, 401);
    const MassProfile unit = MassProfile::constant(1.0);
    const auto ham = build_hamiltonian(grid, unit, harmonic_potential());
    const WaveFunction psi0 = gaussian_state(ham, 1.0, 0.0, 1.0);

    SUBCASE("a conserved generator gives zero residual") {
        const auto traj = evolve_cn(ham, psi0, 1e-3, 40);
        CHECK(ehrenfest_residual(ham, ham.h, traj, 1e-3) < 1e-10);
    }
    SUBCASE("the dilation generator stays within the discretization budget") {
        const BandMatrix a = dilation_generator(grid, unit);
        const auto traj = evolve_cn(ham, psi0, 1e-3, 200);
        CHECK(ehrenfest_residual(ham, a, traj, 1e-3) < 5e-4);
    }
    SUBCASE("streamed scan agrees with the stored-trajectory residual") {
        const BandMatrix a = dilation_generator(grid, unit);
        const auto traj = evolve_cn(ham, psi0, 1e-3, 60);
        const double stored = ehrenfest_residual(ham, a, traj, 1e-3);
        const auto scan = ehrenfest_scan(ham, a, psi0, 1e-3, 30);
        CHECK(scan.max_residual == doctest::Approx(stored).epsilon(1e-6));
        CHECK(scan.norm_drift < 1e-12);
    }
}

TEST_CASE("grid construction guards") {
    CHECK_THROWS_AS((void)make_grid(1.0, -1.0, 100), DomainError);
    CHECK_THROWS_AS((void)make_grid(0.0, 1.0, 8), DomainError);
    const Grid g = make_grid(0.0, 1.0, 99);
    CHECK(g.dx() == doctest::Approx(0.01));
    CHECK(g.x(0) == doctest::Approx(0.01));
    CHECK(g.x(98) == doctest::Approx(0.99));
}
