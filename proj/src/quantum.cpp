#include "vlab/quantum.hpp"

#include "vlab/errors.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace vlab::qm {

Grid make_grid(double x_min, double x_max, int n) {
    if (!(x_min < x_max)) throw DomainError("make_grid: x_min must be below x_max");
    if (n < 16) throw DomainError("make_grid: need at least 16 interior points");
    return Grid{x_min, x_max, n};
}

// ---------------------------------------------------------------------------
// BandMatrix

BandMatrix::BandMatrix(int n, int kb) : n_(n), kb_(kb) {
    d_.assign(static_cast<std::size_t>(2 * kb + 1) * n, Complex{0.0, 0.0});
}

BandMatrix BandMatrix::diag(const std::vector<double>& values) {
    BandMatrix m(static_cast<int>(values.size()), 0);
    for (int i = 0; i < m.n_; ++i)
        m.d_[i] = values[i];
    return m;
}

Complex BandMatrix::at(int i, int j) const {
    const int off = j - i;
    if (off < -kb_ || off > kb_ || i < 0 || j < 0 || i >= n_ || j >= n_)
        return {0.0, 0.0};
    return d_[static_cast<std::size_t>(off + kb_) * n_ + i];
}

void BandMatrix::set(int i, int j, Complex v) {
    const int off = j - i;
    if (off < -kb_ || off > kb_)
        throw DomainError("BandMatrix::set outside the band");
    d_[static_cast<std::size_t>(off + kb_) * n_ + i] = v;
}

void BandMatrix::add(int i, int j, Complex v) {
    const int off = j - i;
    if (off < -kb_ || off > kb_)
        throw DomainError("BandMatrix::add outside the band");
    d_[static_cast<std::size_t>(off + kb_) * n_ + i] += v;
}

CVec BandMatrix::apply(std::span<const Complex> x) const {
    CVec y(n_, Complex{0.0, 0.0});
    for (int off = -kb_; off <= kb_; ++off) {
        const Complex* diag = d_.data() + static_cast<std::size_t>(off + kb_) * n_;
        const int lo = std::max(0, -off), hi = std::min(n_, n_ - off);
        for (int i = lo; i < hi; ++i)
            y[i] += diag[i] * x[i + off];
    }
    return y;
}

BandMatrix BandMatrix::hermitian_adjoint() const {
    BandMatrix out(n_, kb_);
    for (int off = -kb_; off <= kb_; ++off)
        for (int i = std::max(0, -off); i < std::min(n_, n_ - off); ++i)
            out.set(i + off, i, std::conj(at(i, i + off)));
    return out;
}

BandMatrix& BandMatrix::operator*=(Complex s) {
    for (auto& v : d_)
        v *= s;
    return *this;
}

double BandMatrix::max_imag() const {
    double m = 0.0;
    for (const auto& v : d_)
        m = std::max(m, std::abs(v.imag()));
    return m;
}

BandMatrix operator+(const BandMatrix& a, const BandMatrix& b) {
    const int kb = std::max(a.kb_, b.kb_);
    BandMatrix out(a.n_, kb);
    for (int off = -kb; off <= kb; ++off)
        for (int i = std::max(0, -off); i < std::min(a.n_, a.n_ - off); ++i)
            out.set(i, i + off, a.at(i, i + off) + b.at(i, i + off));
    return out;
}

BandMatrix operator-(const BandMatrix& a, const BandMatrix& b) {
    const int kb = std::max(a.kb_, b.kb_);
    BandMatrix out(a.n_, kb);
    for (int off = -kb; off <= kb; ++off)
        for (int i = std::max(0, -off); i < std::min(a.n_, a.n_ - off); ++i)
            out.set(i, i + off, a.at(i, i + off) - b.at(i, i + off));
    return out;
}

BandMatrix operator*(const BandMatrix& a, const BandMatrix& b) {
    const int kb = a.kb_ + b.kb_;
    BandMatrix out(a.n_, kb);
    for (int i = 0; i < a.n_; ++i) {
        for (int off = -kb; off <= kb; ++off) {
            const int j = i + off;
            if (j < 0 || j >= a.n_) continue;
            Complex s{0.0, 0.0};
            const int klo = std::max({0, i - a.kb_, j - b.kb_});
            const int khi = std::min({a.n_ - 1, i + a.kb_, j + b.kb_});
            for (int k = klo; k <= khi; ++k)
                s += a.at(i, k) * b.at(k, j);
            if (s != Complex{0.0, 0.0}) out.set(i, j, s);
        }
    }
    return out;
}

BandMatrix commutator(const BandMatrix& a, const BandMatrix& b) {
    return a * b - b * a;
}

// ---------------------------------------------------------------------------
// WaveFunction

double WaveFunction::norm() const {
    double s = 0.0;
    for (const auto& v : std_values)
        s += std::norm(v);
    return std::sqrt(s);
}

void WaveFunction::normalize() {
    const double n = norm();
    if (n == 0.0) throw DomainError("WaveFunction::normalize: zero state");
    for (auto& v : std_values)
        v /= n;
}

CVec WaveFunction::physical() const {
    CVec psi(std_values.size());
    for (std::size_t i = 0; i < psi.size(); ++i)
        psi[i] = std_values[i] / std::sqrt(weights[i]);
    return psi;
}

// ---------------------------------------------------------------------------
// Operators

BandMatrix build_momentum(const Grid& grid, const MassProfile& mass) {
    const int n = grid.n;
    const double dx = grid.dx();
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
        const double m = mass.at(grid.x(i));
        if (!(m > 0.0)) throw DomainError("build_momentum: mass must be positive");
        w[i] = std::sqrt(m) * dx;
    }
    // std basis: P_ij = -i sqrt(w_i/w_j) sigma_i D_ij with sigma = 1/sqrt(m);
    // sqrt(w_i/w_j) sigma_i = sqrt(sigma_i sigma_j) so P is manifestly Hermitian.
    BandMatrix p(n, 1);
    for (int i = 0; i < n; ++i) {
        const double si = dx / w[i]; // sigma_i = 1/sqrt(m_i)
        if (i + 1 < n) {
            const double sj = dx / w[i + 1];
            p.set(i, i + 1, Complex{0.0, -1.0} * std::sqrt(si * sj) / (2.0 * dx));
        }
        if (i - 1 >= 0) {
            const double sj = dx / w[i - 1];
            p.set(i, i - 1, Complex{0.0, 1.0} * std::sqrt(si * sj) / (2.0 * dx));
        }
    }
    return p;
}

namespace {

// 4th-order staggered derivative stencil (nodes -> midpoints) with Dirichlet
// boundaries and odd-reflection ghosts. Column j of row r, accumulated into
// coefficient list: psi'(m_r) = [27(psi_r - psi_{r-1}) - (psi_{r+1} - psi_{r-2})]/(24 dx).
struct StagRow {
    int cols[4];
    double coef[4];
    int count = 0;
};

StagRow staggered_row(int r, int n, double dx) {
    StagRow row;
    auto add = [&](int j, double c) {
        if (j == -1 || j == n) return; // boundary node, psi = 0
        if (j == -2) { j = 0; c = -c; } // ghost: odd reflection about x_min
        else if (j == n + 1) { j = n - 1; c = -c; } // ghost at x_max
        if (j < 0 || j >= n) return;
        for (int t = 0; t < row.count; ++t)
            if (row.cols[t] == j) { row.coef[t] += c; return; }
        row.cols[row.count] = j;
        row.coef[row.count++] = c;
    };
    add(r, 27.0 / (24.0 * dx));
    add(r - 1, -27.0 / (24.0 * dx));
    add(r + 1, -1.0 / (24.0 * dx));
    add(r - 2, 1.0 / (24.0 * dx));
    return row;
}

} // namespace

HamiltonianMatrix build_hamiltonian(const Grid& grid, const MassProfile& mass,
                                    const PotentialSpec& potential) {
    const int n = grid.n;
    const double dx = grid.dx();

    HamiltonianMatrix ham;
    ham.grid = grid;
    ham.weights.resize(n);
    ham.v.resize(n);
    std::vector<double> sig(n), sqrt_sig(n);
    for (int i = 0; i < n; ++i) {
        const double m = mass.at(grid.x(i));
        if (!(m > 0.0))
            throw DomainError("build_hamiltonian: mass must be positive");
        sig[i] = 1.0 / std::sqrt(m);
        sqrt_sig[i] = std::sqrt(sig[i]);
        ham.weights[i] = std::sqrt(m) * dx;
        ham.v[i] = potential.value(Vec{grid.x(i)});
        if (!std::isfinite(ham.v[i]))
            throw DomainError("build_hamiltonian: potential not finite on the grid");
    }
    std::vector<double> sig_mid(n + 1);
    for (int r = 0; r <= n; ++r)
        sig_mid[r] = 1.0 / std::sqrt(mass.at(grid.x_mid(r)));

    // H0_std = (1/2) diag(sqrt sig) D^T diag(sig_mid) D diag(sqrt sig):
    // symmetric positive semidefinite with bandwidth 3. Assemble the upper
    // triangle and mirror it so symmetry is exact in floating point.
    BandMatrix h0(n, 3);
    for (int r = 0; r <= n; ++r) {
        const StagRow row = staggered_row(r, n, dx);
        for (int s = 0; s < row.count; ++s)
            for (int t = 0; t < row.count; ++t) {
                const int i = row.cols[s], j = row.cols[t];
                if (i > j || j - i > 3) continue;
                h0.add(i, j,
                       (0.5 * row.coef[s] * row.coef[t] * sig_mid[r]) *
                           (sqrt_sig[i] * sqrt_sig[j]));
            }
    }
    for (int i = 0; i < n; ++i)
        for (int off = 1; off <= 3; ++off)
            if (i + off < n) h0.set(i + off, i, h0.at(i, i + off));
    ham.h0 = h0;
    ham.h = h0 + BandMatrix::diag(ham.v);
    return ham;
}

// ---------------------------------------------------------------------------
// Eigensolver: band reduction + bisection + banded inverse iteration.

namespace {

// LAPACK column-major symmetric-banded (upper) storage of the real part.
std::vector<double> to_lapack_sb(const BandMatrix& h, int kd) {
    const int n = h.size();
    std::vector<double> ab(static_cast<std::size_t>(kd + 1) * n, 0.0);
    for (int j = 0; j < n; ++j)
        for (int i = std::max(0, j - kd); i <= j; ++i)
            ab[static_cast<std::size_t>(j) * (kd + 1) + (kd + i - j)] =
                h.at(i, j).real();
    return ab;
}

double band_inf_norm(const BandMatrix& h) {
    double best = 0.0;
    for (int i = 0; i < h.size(); ++i) {
        double row = 0.0;
        for (int j = std::max(0, i - h.bandwidth());
             j <= std::min(h.size() - 1, i + h.bandwidth()); ++j)
            row += std::abs(h.at(i, j));
        best = std::max(best, row);
    }
    return best;
}

// One eigenvector of the real banded matrix by inverse iteration at the
// (already converged) eigenvalue lambda.
std::vector<double> inverse_iteration(const BandMatrix& h, double lambda,
                                      double hnorm,
                                      const std::vector<std::vector<double>>& prev,
                                      unsigned seed) {
    const int n = h.size(), kd = h.bandwidth();
    const int kl = kd, ku = kd, ldab = 2 * kl + ku + 1;
    std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0);
    for (int j = 0; j < n; ++j)
        for (int i = std::max(0, j - kd); i <= std::min(n - 1, j + kd); ++i) {
            double v = h.at(i, j).real();
            if (i == j) v -= lambda;
            ab[static_cast<std::size_t>(j) * ldab + (kl + ku + i - j)] = v;
        }
    std::vector<lapack_int> ipiv(n);
    lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab.data(),
                                     ldab, ipiv.data());
    if (info < 0)
        throw ConvergenceError("eigensolve: banded factorization failed");

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> x(n);
    for (auto& v : x)
        v = uni(rng);

    auto orthogonalize = [&](std::vector<double>& y) {
        for (const auto& u : prev) {
            double dot = 0.0;
            for (int i = 0; i < n; ++i)
                dot += u[i] * y[i];
            for (int i = 0; i < n; ++i)
                y[i] -= dot * u[i];
        }
    };
    auto normalize = [&](std::vector<double>& y) {
        double s = 0.0;
        for (double v : y)
            s += v * v;
        s = std::sqrt(s);
        if (s == 0.0) throw ConvergenceError("eigensolve: degenerate start");
        for (double& v : y)
            v /= s;
    };
    orthogonalize(x);
    normalize(x);

    CVec cx(n);
    for (int it = 0; it < 12; ++it) {
        info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, 1, ab.data(),
                              ldab, ipiv.data(), x.data(), n);
        if (info != 0)
            throw ConvergenceError("eigensolve: banded solve failed");
        orthogonalize(x);
        normalize(x);
        for (int i = 0; i < n; ++i)
            cx[i] = x[i];
        CVec hx = h.apply(cx);
        double res = 0.0;
        for (int i = 0; i < n; ++i)
            res += std::norm(hx[i] - lambda * cx[i]);
        if (std::sqrt(res) <= 1e-11 * std::max(1.0, hnorm)) return x;
    }
    throw ConvergenceError("eigensolve: inverse iteration did not converge");
}

} // namespace

SpectrumResult eigensolve(const HamiltonianMatrix& ham, int n_states) {
    const int n = ham.grid.n, kd = ham.h.bandwidth();
    if (n_states < 1 || n_states > n)
        throw DomainError("eigensolve: n_states out of range");
    if (ham.h.max_imag() > 1e-12)
        throw AsymmetryError("eigensolve: Hamiltonian has an imaginary part");

    // reduce to tridiagonal (values only)
    std::vector<double> ab = to_lapack_sb(ham.h, kd);
    std::vector<double> d(n), e(n > 1 ? n - 1 : 1);
    double qdummy = 0.0;
    lapack_int info = LAPACKE_dsbtrd(LAPACK_COL_MAJOR, 'N', 'U', n, kd, ab.data(),
                                     kd + 1, d.data(), e.data(), &qdummy, 1);
    if (info != 0) throw ConvergenceError("eigensolve: band reduction failed");

    std::vector<double> w(n);
    std::vector<lapack_int> iblock(n), isplit(n);
    lapack_int m = 0, nsplit = 0;
    info = LAPACKE_dstebz('I', 'E', n, 0.0, 0.0, 1, n_states, 0.0, d.data(),
                          e.data(), &m, &nsplit, w.data(), iblock.data(),
                          isplit.data());
    if (info != 0 || m != n_states)
        throw ConvergenceError("eigensolve: bisection failed");

    const double hnorm = band_inf_norm(ham.h);
    SpectrumResult out;
    out.n_states = n_states;
    out.eigenvalues.assign(w.begin(), w.begin() + n_states);

    std::vector<std::vector<double>> vectors;
    for (int j = 0; j < n_states; ++j) {
        vectors.push_back(inverse_iteration(ham.h, w[j], hnorm, vectors,
                                            0x9e3779b9u + 97u * j));
        WaveFunction wf;
        wf.grid = ham.grid;
        wf.weights = ham.weights;
        wf.std_values.resize(n);
        for (int i = 0; i < n; ++i)
            wf.std_values[i] = vectors.back()[i];
        wf.normalize();
        // sign convention: first significant component positive
        for (int i = 0; i < n; ++i) {
            if (std::abs(wf.std_values[i]) > 1e-8) {
                if (wf.std_values[i].real() < 0.0)
                    for (auto& vv : wf.std_values)
                        vv = -vv;
                break;
            }
        }
        const CVec psi = wf.physical();
        double peak = 0.0;
        for (const auto& vv : psi)
            peak = std::max(peak, std::abs(vv));
        out.edge_ok.push_back(std::abs(psi.front()) <= 1e-10 * peak &&
                              std::abs(psi.back()) <= 1e-10 * peak);
        out.eigenvectors.push_back(std::move(wf));
    }
    return out;
}

double expectation(const WaveFunction& psi, const BandMatrix& op) {
    if (op.size() != static_cast<int>(psi.std_values.size()))
        throw DomainError("expectation: dimension mismatch");
    const CVec y = op.apply(psi.std_values);
    Complex acc{0.0, 0.0};
    double ny = 0.0, nx = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        acc += std::conj(psi.std_values[i]) * y[i];
        ny += std::norm(y[i]);
        nx += std::norm(psi.std_values[i]);
    }
    const double scale = std::max(1.0, std::sqrt(ny * nx));
    if (std::abs(acc.imag()) > 1e-12 * scale)
        throw AsymmetryError("expectation: imaginary part above round-off scale");
    return acc.real();
}

std::vector<VirialCheck> quantum_virial_check(const SpectrumResult& spec,
                                              const HamiltonianMatrix& ham,
                                              double k) {
    std::vector<VirialCheck> checks;
    const BandMatrix vop = BandMatrix::diag(ham.v);
    for (int j = 0; j < spec.n_states; ++j) {
        const double h0 = expectation(spec.eigenvectors[j], ham.h0);
        const double v = expectation(spec.eigenvectors[j], vop);
        VirialCheck c;
        c.identity = "quantum-virial[" + std::to_string(j) + "]";
        c.lhs = 2.0 * h0;
        c.rhs = k * v;
        c.residual = c.lhs - c.rhs;
        c.relative_residual =
            std::abs(c.residual) / (std::abs(c.lhs) + std::abs(c.rhs) + 1e-300);
        c.params["E"] = spec.eigenvalues[j];
        c.params["k"] = k;
        c.params["state"] = j;
        checks.push_back(std::move(c));
    }
    return checks;
}

std::vector<VirialCheck> pdm_quantum_check(const SpectrumResult& spec,
                                           const HamiltonianMatrix& ham,
                                           double a, double b) {
    std::vector<VirialCheck> checks;
    const BandMatrix vop = BandMatrix::diag(ham.v);
    for (int j = 0; j < spec.n_states; ++j) {
        const double h0 = expectation(spec.eigenvectors[j], ham.h0);
        const double v = expectation(spec.eigenvectors[j], vop);
        VirialCheck c;
        c.identity = "pdm-quantum[" + std::to_string(j) + "]";
        c.lhs = a * h0 + b * v;
        c.rhs = 0.0;
        c.residual = c.lhs;
        c.relative_residual =
            std::abs(c.lhs) / (std::abs(a * h0) + std::abs(b * v) + 1e-300);
        c.params["E"] = spec.eigenvalues[j];
        c.params["a"] = a;
        c.params["b"] = b;
        c.params["state"] = j;
        checks.push_back(std::move(c));
    }
    return checks;
}

FockScan fock_scan(const WaveFunction& psi, const BandMatrix& h0,
                   const BandMatrix& v, double k,
                   const std::vector<double>& lambdas) {
    if (k == 0.0) throw DomainError("fock_scan: degree k must be nonzero");
    FockScan scan;
    scan.h0_exp = expectation(psi, h0);
    scan.v_exp = expectation(psi, v);
    auto energy = [&](double lam) {
        return std::pow(lam, -2.0) * scan.h0_exp + std::pow(lam, k) * scan.v_exp;
    };
    for (double lam : lambdas)
        scan.curve.emplace_back(lam, energy(lam));
    const double dl = 1e-3;
    scan.dE_at_1 = (energy(1.0 + dl) - energy(1.0 - dl)) / (2.0 * dl);
    // stationarity: -2 lam^-3 H0 + k lam^(k-1) V = 0
    const double ratio = 2.0 * scan.h0_exp / (k * scan.v_exp);
    if (ratio > 0.0) {
        scan.lambda_star = std::pow(ratio, 1.0 / (k + 2.0));
        scan.stationarity_residual =
            std::abs(-2.0 * std::pow(scan.lambda_star, -3.0) * scan.h0_exp +
                     k * std::pow(scan.lambda_star, k - 1.0) * scan.v_exp);
    } else {
        scan.lambda_star = std::numeric_limits<double>::quiet_NaN();
        scan.stationarity_residual = std::numeric_limits<double>::quiet_NaN();
    }
    return scan;
}

// ---------------------------------------------------------------------------
// Crank-Nicolson

namespace {

// prefactored complex banded LU of (1 + i dt/2 H)
struct CnSolver {
    int n, kl, ku, ldab;
    std::vector<Complex> ab;
    std::vector<lapack_int> ipiv;
    const BandMatrix* h;
    double dt;

    CnSolver(const HamiltonianMatrix& ham, double dt_)
        : n(ham.grid.n), kl(ham.h.bandwidth()), ku(ham.h.bandwidth()),
          ldab(2 * kl + ku + 1), ab(static_cast<std::size_t>(ldab) * n),
          ipiv(n), h(&ham.h), dt(dt_) {
        for (int j = 0; j < n; ++j)
            for (int i = std::max(0, j - ku); i <= std::min(n - 1, j + kl); ++i) {
                Complex v = Complex{0.0, 0.5 * dt} * h->at(i, j);
                if (i == j) v += 1.0;
                ab[static_cast<std::size_t>(j) * ldab + (kl + ku + i - j)] = v;
            }
        lapack_int info = LAPACKE_zgbtrf(
            LAPACK_COL_MAJOR, n, n, kl, ku,
            reinterpret_cast<lapack_complex_double*>(ab.data()), ldab,
            ipiv.data());
        if (info != 0)
            throw LinearSolveError("evolve_cn: factorization of (1 + i dt H/2) failed");
    }

    void step(CVec& phi) const {
        CVec rhs = h->apply(phi);
        for (int i = 0; i < n; ++i)
            rhs[i] = phi[i] - Complex{0.0, 0.5 * dt} * rhs[i];
        lapack_int info = LAPACKE_zgbtrs(
            LAPACK_COL_MAJOR, 'N', n, kl, ku, 1,
            reinterpret_cast<const lapack_complex_double*>(ab.data()), ldab,
            ipiv.data(), reinterpret_cast<lapack_complex_double*>(rhs.data()),
            n);
        if (info != 0) throw LinearSolveError("evolve_cn: banded solve failed");
        phi = std::move(rhs);
    }
};

} // namespace

std::vector<WaveFunction> evolve_cn(const HamiltonianMatrix& ham,
                                    const WaveFunction& psi0, double dt,
                                    int steps, int stride) {
    if (!(dt > 0.0)) throw DomainError("evolve_cn: dt must be positive");
    if (stride < 1) throw DomainError("evolve_cn: stride must be >= 1");
    CnSolver solver(ham, dt);
    std::vector<WaveFunction> out;
    WaveFunction wf = psi0;
    out.push_back(wf);
    for (int k = 1; k <= steps; ++k) {
        solver.step(wf.std_values);
        if (k % stride == 0) out.push_back(wf);
    }
    return out;
}

namespace {

// d<A>/dt = -i<[A,H]> = 2 Im <A phi, H phi> for self-adjoint A.
double bracket_rate(const BandMatrix& a, const BandMatrix& h, const CVec& phi) {
    const CVec ap = a.apply(phi);
    const CVec hp = h.apply(phi);
    Complex z{0.0, 0.0};
    for (std::size_t i = 0; i < phi.size(); ++i)
        z += std::conj(ap[i]) * hp[i];
    return 2.0 * z.imag();
}

double real_expectation(const BandMatrix& a, const CVec& phi) {
    const CVec ap = a.apply(phi);
    Complex z{0.0, 0.0};
    for (std::size_t i = 0; i < phi.size(); ++i)
        z += std::conj(phi[i]) * ap[i];
    return z.real();
}

} // namespace

double ehrenfest_residual(const HamiltonianMatrix& ham, const BandMatrix& a,
                          const std::vector<WaveFunction>& traj, double dt) {
    if (traj.size() < 3)
        throw DomainError("ehrenfest_residual: need at least three samples");
    std::vector<double> aexp(traj.size()), rate(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        aexp[k] = real_expectation(a, traj[k].std_values);
        rate[k] = bracket_rate(a, ham.h, traj[k].std_values);
    }
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < traj.size(); ++k)
        worst = std::max(worst, std::abs((aexp[k + 1] - aexp[k - 1]) / (2.0 * dt) -
                                         rate[k]));
    return worst;
}

EhrenfestScan ehrenfest_scan(const HamiltonianMatrix& ham, const BandMatrix& a,
                             const WaveFunction& psi0, double dt, int steps_T) {
    if (steps_T < 2) throw DomainError("ehrenfest_scan: need at least two steps");
    CnSolver solver(ham, dt);
    CVec phi = psi0.std_values;

    EhrenfestScan scan;
    const double norm0 = psi0.norm();
    double a_back2 = real_expectation(a, phi); // <A> two samples back
    double a_back1 = 0.0, b_back1 = 0.0;
    double integral = 0.0, prev_rate = bracket_rate(a, ham.h, phi);
    const int total = 2 * steps_T;

    for (int k = 1; k <= total; ++k) {
        solver.step(phi);
        const double ak = real_expectation(a, phi);
        const double bk = bracket_rate(a, ham.h, phi);
        integral += 0.5 * dt * (prev_rate + bk);
        prev_rate = bk;
        if (k >= 2) {
            const double resid =
                std::abs((ak - a_back2) / (2.0 * dt) - b_back1);
            scan.max_residual = std::max(scan.max_residual, resid);
            a_back2 = a_back1;
        }
        a_back1 = ak;
        b_back1 = bk;
        if (k == steps_T) scan.avg_bracket_T = integral / (dt * steps_T);
        if (k == total) scan.avg_bracket_2T = integral / (dt * total);
    }
    double ns = 0.0;
    for (const auto& v : phi)
        ns += std::norm(v);
    scan.norm_drift = std::abs(std::sqrt(ns) - norm0);
    scan.decay_ratio = std::abs(scan.avg_bracket_2T /
                                (scan.avg_bracket_T + 1e-300));
    return scan;
}

BandMatrix dilation_generator(const Grid& grid, const MassProfile& mass,
                              const ScalarField1D* xi) {
    const BandMatrix p = build_momentum(grid, mass);
    std::vector<double> xi_vals(grid.n);
    for (int i = 0; i < grid.n; ++i)
        xi_vals[i] = xi ? xi->eval(grid.x(i)) : grid.x(i);
    const BandMatrix x = BandMatrix::diag(xi_vals);
    BandMatrix a = (x * p + p * x);
    a *= 0.5;
    return a;
}

BandMatrix xi_partial_operator(const Grid& grid, const MassProfile& mass,
                               const ScalarField1D& xi) {
    const int n = grid.n;
    const double dx = grid.dx();
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i)
        w[i] = std::sqrt(mass.at(grid.x(i))) * dx;
    BandMatrix out(n, 1);
    for (int i = 0; i < n; ++i) {
        const double xv = xi.eval(grid.x(i));
        if (i + 1 < n)
            out.set(i, i + 1, xv * std::sqrt(w[i] / w[i + 1]) / (2.0 * dx));
        if (i - 1 >= 0)
            out.set(i, i - 1, -xv * std::sqrt(w[i] / w[i - 1]) / (2.0 * dx));
    }
    return out;
}

WaveFunction gaussian_state(const HamiltonianMatrix& ham, double x0, double p0,
                            double sigma) {
    WaveFunction wf;
    wf.grid = ham.grid;
    wf.weights = ham.weights;
    wf.std_values.resize(ham.grid.n);
    for (int i = 0; i < ham.grid.n; ++i) {
        const double x = ham.grid.x(i);
        const double arg = -(x - x0) * (x - x0) / (2.0 * sigma * sigma);
        wf.std_values[i] = std::sqrt(ham.weights[i]) * std::exp(arg) *
                           std::exp(Complex{0.0, p0 * x});
    }
    wf.normalize();
    return wf;
}

} // namespace vlab::qm
