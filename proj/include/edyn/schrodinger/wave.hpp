#pragma once

#include "edyn/geometry/laplace_beltrami.hpp"
#include "edyn/pde/functionals.hpp"

#include <Eigen/SparseLU>

#include <complex>

namespace edyn::schrodinger {

using cplx = std::complex<double>;

struct WaveField {
  geometry::GridSpec grid;
  std::vector<cplx> values;
  double time = 0.0;

  WaveField() = default;
  explicit WaveField(geometry::GridSpec g) : grid(std::move(g)), values(grid.size()) {}
  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t i) { return values[i]; }
  cplx operator[](std::size_t i) const { return values[i]; }
};

/// Psi = rho^(1/2) exp(i k Phi / eta) = rho^(1/2) exp(i Phi / hbar).
WaveField assemble_wavefunction(const geometry::GridField& rho, const geometry::GridField& Phi, const SimParams& p);

struct MadelungSplit {
  geometry::GridField rho;
  geometry::GridField Phi;
  /// Node the phase was unwrapped from (largest |Psi|).
  std::size_t reference = 0;
  /// Phase winding (in units of 2 pi) around the grid line through the
  /// reference node, one entry per axis; zero on bounded axes.
  std::vector<long> winding;
  /// The unwrapping path crossed a node with |Psi| below the floor.
  bool ambiguous = false;
};

/// rho = |Psi|^2 and Phi = hbar * (phase unwrapped by an axis-ordered flood
/// fill from the largest-|Psi| node, keeping that node's own phase).
MadelungSplit madelung_split(const WaveField& psi, const SimParams& p, double floor = 1e-8);

/// Sum sqrt(M) |Psi|^2 dV.
double norm(const geometry::GridGeometry& geo, const WaveField& psi);
/// Sum sqrt(M) conj(Psi) f Psi dV for a real node function f.
double expectation(const geometry::GridGeometry& geo, const WaveField& psi, std::span<const double> f);

/// Crank-Nicolson propagator for i hbar dPsi/dt = -(hbar^2/2) Delta_M Psi + (V + V_c) Psi.
///
/// With S = diag(sqrt(M)) and B = -(hbar^2/2) K + S (V + V_c) (K the flux
/// operator) the step solves (S + i tau B) Psi' = (S - i tau B) Psi,
/// tau = dt / (2 hbar). B is real symmetric, so the update is exactly
/// unitary in the sqrt(M)-weighted inner product. The system is factored
/// once (sparse LU) and each solve is polished by iterative refinement.
class CrankNicolson {
 public:
  CrankNicolson(const geometry::GridGeometry& geo, const pde::Potentials& pot, const SimParams& p);

  /// Throws SolverError when the relative residual stays above 1e-10.
  void step(WaveField& psi);
  /// Relative residual of the most recent solve.
  double last_residual() const { return last_residual_; }

  /// <Psi|H|Psi> = Psi^H B Psi dV.
  double energy(const WaveField& psi) const;
  /// H = S^-1 B as a sparse matrix.
  Eigen::SparseMatrix<double, Eigen::RowMajor> hamiltonian_matrix() const;

 private:
  const geometry::GridGeometry& geo_;
  SimParams p_;
  Eigen::SparseMatrix<double, Eigen::ColMajor> B_;
  Eigen::SparseMatrix<cplx, Eigen::ColMajor> A_, R_;
  Eigen::SparseLU<Eigen::SparseMatrix<cplx, Eigen::ColMajor>> lu_;
  double last_residual_ = 0.0;
};

struct NonlinearResidual {
  /// (hbar^2/2 - 4 xi_free) (Delta_M |Psi| / |Psi|) Psi.
  WaveField term;
  /// -(hbar^2/2) Delta_M Psi + term + (V + V_c) Psi.
  WaveField rhs;
  /// Nodes with |Psi| below the floor (term set to zero there).
  std::vector<std::size_t> masked;
};

/// Right-hand side of the nonlinear Schrodinger equation obtained from the
/// Madelung pair with Fisher coupling xi_free. The nonlinear term vanishes
/// identically at xi_free = hbar^2 / 8.
NonlinearResidual nonlinear_residual(const geometry::GridGeometry& geo, const WaveField& psi,
                                     const pde::Potentials& pot, const SimParams& p, double xi_free,
                                     double floor = 1e-12);

}  // namespace edyn::schrodinger
