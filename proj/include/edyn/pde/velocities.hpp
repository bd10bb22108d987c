#pragma once

#include "edyn/geometry/laplace_beltrami.hpp"

namespace edyn::pde {

/// Densities at or below this value are treated as zero when a logarithm
/// is needed.
inline constexpr double kRhoFloor = 1e-30;

/// Node-major vector field: components A = 0..n-1 of node i at i*n + A.
struct VectorField {
  geometry::GridSpec grid;
  int components = 0;
  std::vector<double> values;
  /// Nodes where the field is undefined (set to zero).
  std::vector<std::size_t> masked;

  double operator()(std::size_t node, int A) const {
    return values[node * static_cast<std::size_t>(components) + static_cast<std::size_t>(A)];
  }
};

/// v^A = M^AB d_B Phi with centred differences.
VectorField current_velocity(const geometry::GridGeometry& geo, const geometry::GridField& Phi);
/// u^A = -eta M^AB d_B log rho^(1/2). Nodes whose stencil touches a density
/// at the floor are masked.
VectorField osmotic_velocity(const geometry::GridGeometry& geo, const geometry::GridField& rho, const SimParams& p);
/// btilde^A = eta M^AB d_B phi.
VectorField btilde(const geometry::GridGeometry& geo, const geometry::GridField& phi, const SimParams& p);

}  // namespace edyn::pde
