#pragma once

#include "edyn/geometry/configuration_space.hpp"

namespace edyn::geometry {

/// How closely a second-order normal-coordinate chart at x_p flattens the
/// mass tensor. Expected scaling: metric_deviation = O(r^2),
/// derivative_estimate = O(r) for probe radius r.
struct NormalCoordsReport {
  double probe_radius = 0.0;
  /// max over probes of |M'(y) - gamma|_max, gamma = m_i delta_ij delta_ab.
  double metric_deviation = 0.0;
  /// max over probes of |M'(y) - M'(0)|_max / r (forward differences).
  double derivative_estimate = 0.0;
};

/// Builds y -> x(y) = x_p + E y - (1/2) Gamma(x_p)(E y, E y), with E a
/// per-particle frame satisfying E^T h(x_p) E = I, pulls M back through the
/// exact Jacobian of that map and probes it on the coordinate axes and
/// diagonals at radius `probe_radius`. Test support.
NormalCoordsReport normal_coords_check(const ConfigurationSpace& cs, std::span<const double> x_p,
                                       double probe_radius);

}  // namespace edyn::geometry
