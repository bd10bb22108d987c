#pragma once

#include "edyn/geometry/grid.hpp"

#include <functional>
#include <span>

namespace edyn::sde {

/// Drift potential phi on configuration space, with its coordinate gradient.
class DriftPotential {
 public:
  using ValueFn = std::function<double(std::span<const double>)>;
  using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;

  DriftPotential() = default;
  DriftPotential(ValueFn value, GradientFn gradient);

  static DriftPotential zero();
  /// phi(x) = g . x
  static DriftPotential linear(std::vector<double> g);
  /// Multilinear interpolation of node values; the gradient interpolates
  /// centred differences at nodes (one-sided halves at bounded walls).
  static DriftPotential from_grid(const geometry::GridField& field);

  bool is_zero() const { return zero_; }
  double value(std::span<const double> x) const;
  /// Throws std::logic_error when the potential carries no gradient.
  void gradient(std::span<const double> x, std::span<double> out) const;

 private:
  ValueFn value_;
  GradientFn gradient_;
  bool zero_ = false;
};

}  // namespace edyn::sde
