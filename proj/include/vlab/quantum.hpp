// 1-D grid discretization of H = (1/2) P^dag P + V in the weighted measure
// sqrt(m(x)) dx, eigensolution, expectation-value virial checks, dilation
// scaling scan and Crank-Nicolson evolution.
//
// Internally every operator and wavefunction lives in the "standard" basis
// phi_i = sqrt(w_i) psi_i with w_i = sqrt(m(x_i)) dx: there the weighted
// inner product becomes the plain complex dot product, self-adjoint
// operators are entrywise Hermitian, and the eigenproblem is an ordinary
// symmetric banded one. WaveFunction::physical() maps back.
#pragma once

#include "vlab/fields.hpp"
#include "vlab/virial.hpp"

#include <complex>
#include <span>
#include <vector>

namespace vlab::qm {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

struct Grid {
    double x_min = 0.0, x_max = 0.0;
    int n = 0; // interior points; Dirichlet boundaries at x_min/x_max

    double dx() const { return (x_max - x_min) / (n + 1); }
    double x(int i) const { return x_min + dx() * (i + 1); }
    double x_mid(int r) const { return x_min + dx() * (r + 0.5); }
};

Grid make_grid(double x_min, double x_max, int n);

/// Square banded complex matrix with equal lower/upper bandwidth kb.
class BandMatrix {
  public:
    BandMatrix() = default;
    BandMatrix(int n, int kb);
    static BandMatrix diag(const std::vector<double>& values);

    int size() const { return n_; }
    int bandwidth() const { return kb_; }

    Complex at(int i, int j) const;
    void set(int i, int j, Complex v);
    void add(int i, int j, Complex v);

    CVec apply(std::span<const Complex> x) const;
    BandMatrix hermitian_adjoint() const;
    BandMatrix& operator*=(Complex s);
    double max_imag() const;

    friend BandMatrix operator+(const BandMatrix& a, const BandMatrix& b);
    friend BandMatrix operator-(const BandMatrix& a, const BandMatrix& b);
    friend BandMatrix operator*(const BandMatrix& a, const BandMatrix& b);

  private:
    int n_ = 0, kb_ = 0;
    CVec d_; // entry (i, i+off) at d_[(off+kb)*n + i]
};

BandMatrix commutator(const BandMatrix& a, const BandMatrix& b);

struct WaveFunction {
    Grid grid;
    CVec std_values;            // phi = S psi
    std::vector<double> weights; // w_i = sqrt(m(x_i)) dx

    double norm() const;
    void normalize();
    CVec physical() const; // psi_i = phi_i / sqrt(w_i)
};

struct HamiltonianMatrix {
    Grid grid;
    std::vector<double> weights;
    BandMatrix h;  // full Hamiltonian (Hermitian, real)
    BandMatrix h0; // kinetic part (1/2) P^dag P
    std::vector<double> v; // potential at the nodes
};

/// Translation generator P = -(i/sqrt(m)) d/dx with the central difference;
/// exactly Hermitian in the weighted product.
BandMatrix build_momentum(const Grid& grid, const MassProfile& mass);

/// H = (1/2) P^dag P + V. The kinetic part uses a fourth-order staggered
/// difference with midpoint mass weights (adjoint taken in the weighted
/// product, odd-reflection closure at the Dirichlet ends), which keeps
/// H0 positive semidefinite and banded.
HamiltonianMatrix build_hamiltonian(const Grid& grid, const MassProfile& mass,
                                    const PotentialSpec& potential);

struct SpectrumResult {
    std::vector<double> eigenvalues; // ascending
    std::vector<WaveFunction> eigenvectors;
    int n_states = 0;
    std::vector<bool> edge_ok; // eigenstate decayed below 1e-10 at the box ends
};

/// Lowest n_states eigenpairs of the banded symmetric matrix
/// (band reduction + bisection for the values, banded inverse iteration for
/// the vectors).
SpectrumResult eigensolve(const HamiltonianMatrix& ham, int n_states);

/// <phi, A phi> in the weighted product. AsymmetryError when the imaginary
/// part exceeds round-off scale.
double expectation(const WaveFunction& psi, const BandMatrix& op);

/// Per-eigenstate 2<H0> = k<V> for a homogeneous potential of degree k.
std::vector<VirialCheck> quantum_virial_check(const SpectrumResult& spec,
                                              const HamiltonianMatrix& ham,
                                              double k);

/// Per-eigenstate a<H0> + b<V> = 0 for the PDM potential built with the
/// declared (a, b) pair.
std::vector<VirialCheck> pdm_quantum_check(const SpectrumResult& spec,
                                           const HamiltonianMatrix& ham,
                                           double a, double b);

struct FockScan {
    std::vector<std::pair<double, double>> curve; // (lambda, E_lambda)
    double h0_exp = 0.0, v_exp = 0.0;
    double dE_at_1 = 0.0;       // central difference, delta = 1e-3
    double lambda_star = 0.0;   // stationary point of E_lambda
    double stationarity_residual = 0.0;
};

/// E_lambda = lambda^-2 <H0> + lambda^k <V> over the given lambdas, with the
/// stationarity diagnostics at lambda = 1 and at the located lambda*.
FockScan fock_scan(const WaveFunction& psi, const BandMatrix& h0,
                   const BandMatrix& v, double k,
                   const std::vector<double>& lambdas);

/// Crank-Nicolson evolution (1 + i dt H/2) psi_{n+1} = (1 - i dt H/2) psi_n,
/// sampled every `stride` steps (the initial state is sample 0).
std::vector<WaveFunction> evolve_cn(const HamiltonianMatrix& ham,
                                    const WaveFunction& psi0, double dt,
                                    int steps, int stride = 1);

/// max_t |d<A>/dt (central difference) + i <[A,H]>| over a sampled evolution.
double ehrenfest_residual(const HamiltonianMatrix& ham, const BandMatrix& a,
                          const std::vector<WaveFunction>& traj, double dt);

struct EhrenfestScan {
    double max_residual = 0.0;
    double avg_bracket_T = 0.0;  // time average of -i<[A,H]> over [0, T]
    double avg_bracket_2T = 0.0; // ... over [0, 2T]
    double decay_ratio = 0.0;    // |avg(2T)/avg(T)|
    double norm_drift = 0.0;
};

/// Streaming variant: evolves to 2T (T = steps_T * dt) computing the
/// Ehrenfest residual and the 1/T-decay diagnostic without storing states.
EhrenfestScan ehrenfest_scan(const HamiltonianMatrix& ham, const BandMatrix& a,
                             const WaveFunction& psi0, double dt, int steps_T);

/// Self-adjoint dilation generator (1/2)(xi P + P xi), with xi = x for the
/// constant-mass case.
BandMatrix dilation_generator(const Grid& grid, const MassProfile& mass,
                              const ScalarField1D* xi = nullptr);

/// Plain (non-symmetrized) xi d/dx, used for the commutator identity
/// [P, A] = (a/2) P at operator level.
BandMatrix xi_partial_operator(const Grid& grid, const MassProfile& mass,
                               const ScalarField1D& xi);

/// Normalized Gaussian exp(-(x-x0)^2/(2 sigma^2) + i p0 x) on the grid.
WaveFunction gaussian_state(const HamiltonianMatrix& ham, double x0, double p0,
                            double sigma);

} // namespace vlab::qm
