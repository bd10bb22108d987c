#pragma once

#include "edyn/geometry/laplace_beltrami.hpp"

namespace edyn::pde {

/// External and curvature potentials on the solver grid. Empty vectors
/// mean zero.
struct Potentials {
  std::vector<double> V;
  std::vector<double> Vc;

  double at(std::size_t i) const { return (V.empty() ? 0.0 : V[i]) + (Vc.empty() ? 0.0 : Vc[i]); }
};

/// V_c = xi_R * R, with R the scalar curvature of the mass-tensor metric
/// (sum over particles of R_chart(x_i) / m_i).
geometry::GridField curvature_potential(const geometry::GridGeometry& geo, double xi_R);
/// V = (omega^2 / 2) M_AB(c) dx^A dx^B with dx the minimal-image offset from c.
geometry::GridField harmonic_potential(const geometry::GridGeometry& geo, double omega,
                                       std::span<const double> center);

struct FisherInformation {
  Mat I;
  std::size_t masked_nodes = 0;
  /// Volume fraction of masked nodes exceeds 1%.
  bool accuracy_warning = false;
};

/// I_AB = integral of sqrt(M) (1/rho) d_A rho d_B rho, evaluated as
/// 4 integral sqrt(M) d_A s d_B s with s = rho^(1/2): face differences on
/// the diagonal, centred differences off it.
FisherInformation fisher_information(const geometry::GridGeometry& geo, const geometry::GridField& rho);

/// F = xi integral sqrt(M) M^AB (1/rho) d_A rho d_B rho + integral sqrt(M) rho (V + V_c).
/// The gradient term is the Dirichlet energy of s = rho^(1/2) times 4 xi,
/// assembled with the same flux operator as the Laplace-Beltrami operator.
double F_functional(const geometry::GridGeometry& geo, const geometry::GridField& rho, const Potentials& pot,
                    const SimParams& p);

/// dF/drho = V + V_c - 4 xi (Delta_M s) / s, the exact gradient of the
/// discrete F under the sqrt(M) dV pairing. Nodes with rho at the floor get
/// V + V_c only and are listed in `masked` when given.
geometry::GridField dF_drho(const geometry::GridGeometry& geo, const geometry::GridField& rho, const Potentials& pot,
                            const SimParams& p, std::vector<std::size_t>* masked = nullptr);

/// Kinetic part (1/2) integral sqrt(M) rho M^AB d_A Phi d_B Phi.
double kinetic_energy(const geometry::GridGeometry& geo, const geometry::GridField& rho,
                      const geometry::GridField& Phi);

/// H = kinetic_energy + F.
double hamiltonian(const geometry::GridGeometry& geo, const geometry::GridField& rho, const geometry::GridField& Phi,
                   const Potentials& pot, const SimParams& p);

}  // namespace edyn::pde
