#pragma once

#include "edyn/pde/functionals.hpp"

namespace edyn::pde {

/// Explicit Euler step of dPhi/dt = -(1/2) M^AB d_A Phi d_B Phi - dF/drho.
/// Throws StepSizeError when dt max|v| exceeds the smallest spacing.
void hj_step(const geometry::GridGeometry& geo, geometry::GridField& Phi, const geometry::GridField& rho,
             const Potentials& pot, const SimParams& p);

struct CoupledStepReport {
  int phase_iterations = 0;
  int density_iterations = 0;
  /// Mass removed by clipping negative densities (far tails of localized
  /// packets) before renormalisation.
  double clipped_mass = 0.0;
};

/// Stormer-Verlet step for the canonical pair (rho, Phi), rho whole-step
/// and Phi half-step:
///   Phi' = Phi  - dt/2 G(rho, Phi')             (fixed point)
///   rho' = rho  + dt/2 [R(rho, Phi') + R(rho', Phi')]   (fixed point)
///   Phi''= Phi' - dt/2 G(rho', Phi')
/// with R = -K_rho[Phi]/sqrt(M) = dH/dPhi and G = dH/drho. Symplectic, so
/// the energy error stays O(dt^2) with no secular drift. Mass is conserved
/// exactly by the flux form. Negative densities are clipped and reported as
/// in fp_step. Throws StepSizeError if the advective bound is violated, the
/// iterations do not settle, or rho becomes non-finite.
CoupledStepReport coupled_step(const geometry::GridGeometry& geo, geometry::GridField& rho,
                               geometry::GridField& Phi, const Potentials& pot, const SimParams& p);

}  // namespace edyn::pde
