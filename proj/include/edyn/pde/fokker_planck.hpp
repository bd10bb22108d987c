#pragma once

#include "edyn/geometry/laplace_beltrami.hpp"

namespace edyn::pde {

/// What moves the density: the drift potential phi (drift plus diffusion)
/// or the phase Phi (pure transport with v = M^-1 dPhi).
struct Drive {
  enum class Kind { drift_potential, phase } kind = Kind::drift_potential;
  /// Empty means phi = 0 (pure diffusion); must be set for the phase drive.
  std::vector<double> field;

  static Drive diffusion() { return {}; }
  static Drive potential(std::vector<double> phi) { return {Kind::drift_potential, std::move(phi)}; }
  static Drive phase(std::vector<double> Phi) { return {Kind::phase, std::move(Phi)}; }
};

struct FpStepReport {
  /// Mass removed by clipping negative values before renormalisation.
  double clipped_mass = 0.0;
};

/// Largest explicit step for which every update coefficient stays
/// non-negative (diffusion plus centred advection).
double fp_stable_dt(const geometry::GridGeometry& geo, const Drive& drive, const SimParams& p);

/// One explicit conservative Euler step of
///   sqrt(M) drho/dt = -eta K_rho[phi] + (eta/2) K[rho]   (drift potential)
///   sqrt(M) drho/dt = -K_rho[Phi]                         (phase)
/// with face-averaged rho in K_rho. Throws StepSizeError when p.dt exceeds
/// fp_stable_dt. Negative values are clipped and the density renormalised.
FpStepReport fp_step(const geometry::GridGeometry& geo, geometry::GridField& rho, const Drive& drive,
                     const SimParams& p);

/// Advances rho by `duration`, splitting p.dt into equal substeps no longer
/// than the stability limit. Returns the accumulated report.
FpStepReport fp_evolve(const geometry::GridGeometry& geo, geometry::GridField& rho, const Drive& drive,
                       const SimParams& p, double duration);

}  // namespace edyn::pde
