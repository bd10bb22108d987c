#pragma once

#include "edyn/core.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace edyn::geometry {

enum class Topology { periodic, bounded };

/// One coordinate axis of a chart. Bounded axes reflect at
/// [lower + margin, upper - margin]; periodic axes wrap with period
/// upper - lower.
struct Axis {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  Topology topology = Topology::bounded;
  double margin = 0.0;

  double lo() const { return topology == Topology::periodic ? lower : lower + margin; }
  double hi() const { return topology == Topology::periodic ? upper : upper - margin; }
  double period() const { return upper - lower; }
  bool finite() const { return std::isfinite(lower) && std::isfinite(upper); }

  bool operator==(const Axis&) const = default;
};

/// Christoffel symbols of a single chart, Gamma^a_bc stored densely.
struct ChartConnection {
  int dim = 0;
  std::array<double, kMaxChartDim * kMaxChartDim * kMaxChartDim> v{};

  double& operator()(int a, int b, int c) { return v[(a * kMaxChartDim + b) * kMaxChartDim + c]; }
  double operator()(int a, int b, int c) const {
    return v[(a * kMaxChartDim + b) * kMaxChartDim + c];
  }
};

using MetricFn = std::function<SmallMat(const SmallVec&)>;
using ConnectionFn = std::function<ChartConnection(const SmallVec&)>;
using ScalarFn = std::function<double(const SmallVec&)>;

/// Coordinate chart of the single-particle space: axes, metric h_ab(x) and
/// optionally an analytic connection and scalar curvature.
class ManifoldChart {
 public:
  ManifoldChart(std::string name, std::vector<Axis> axes, MetricFn metric,
                ConnectionFn connection = {}, ScalarFn curvature = {});

  const std::string& name() const { return name_; }
  int dim() const { return static_cast<int>(axes_.size()); }
  const std::vector<Axis>& axes() const { return axes_; }
  const Axis& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }

  SmallMat metric(const SmallVec& x) const { return metric_(x); }

  bool has_analytic_connection() const { return static_cast<bool>(connection_); }
  /// Analytic connection when available, finite differences otherwise.
  ChartConnection connection(const SmallVec& x) const;
  /// Levi-Civita connection from central differences of the metric with
  /// per-axis step max(1e-5, 1e-5 |x_a|).
  ChartConnection connection_fd(const SmallVec& x) const;

  bool has_scalar_curvature() const { return static_cast<bool>(curvature_); }
  double scalar_curvature(const SmallVec& x) const;

  bool admissible(const SmallVec& x) const;
  /// Throws DomainError naming the particle and axis when x is not admissible.
  void check(const SmallVec& x, int particle = 0) const;

  /// Periodic wrap and reflection at bounded limits, in place.
  void fold(double* x) const;
  /// Minimal-image coordinate difference along one axis.
  double wrap_delta(int axis, double dx) const;

 private:
  std::string name_;
  std::vector<Axis> axes_;
  MetricFn metric_;
  ConnectionFn connection_;
  ScalarFn curvature_;
};

/// Euclidean chart. Default axes are unbounded.
ManifoldChart flat_chart(int dim);
ManifoldChart flat_chart(std::vector<Axis> axes);
/// Circle of the given radius, angle coordinate on [0, 2 pi).
ManifoldChart circle_chart(double radius = 1.0);
/// Sphere of the given radius in (theta, phi); the poles are excluded by
/// `pole_margin` on the theta axis.
ManifoldChart sphere_chart(double radius = 1.0, double pole_margin = 0.05);
/// Torus (u, v) with metric diag((R + r cos v)^2, r^2).
ManifoldChart torus_chart(double major_radius = 2.0, double minor_radius = 1.0);

/// Metric components tabulated on nodes and interpolated (multi)linearly.
struct MetricTable {
  std::vector<Axis> axes;
  std::vector<int> counts;
  /// Upper-triangle components h_ab (a <= b) in row-major order of (a, b);
  /// each holds one value per table node, axis 0 slowest.
  std::vector<std::vector<double>> components;
};
ManifoldChart table_chart(MetricTable table);

/// Transition map between the standard sphere chart and a second chart
/// whose north pole sits at the standard chart's (theta, phi) = (pi/2, 0).
SmallVec sphere_to_rotated(const SmallVec& x);
SmallVec sphere_from_rotated(const SmallVec& x);

}  // namespace edyn::geometry
