#pragma once

#include "edyn/geometry/configuration_space.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace edyn::geometry {

/// Cell-centred axis: node i sits at lower + (i + 1/2) * spacing and owns the
/// cell [lower + i*spacing, lower + (i+1)*spacing).
struct GridAxis {
  int count = 0;
  double lower = 0.0;
  double spacing = 0.0;
  Topology topology = Topology::bounded;

  double node(int i) const { return lower + (i + 0.5) * spacing; }
  double upper() const { return lower + count * spacing; }

  bool operator==(const GridAxis&) const = default;
};

/// Structured grid over (a box of) configuration space. Node indices are
/// row-major with axis 0 slowest.
class GridSpec {
 public:
  GridSpec() = default;
  explicit GridSpec(std::vector<GridAxis> axes);

  int dim() const { return static_cast<int>(axes_.size()); }
  std::size_t size() const { return size_; }
  const GridAxis& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
  const std::vector<GridAxis>& axes() const { return axes_; }
  std::size_t stride(int a) const { return strides_[static_cast<std::size_t>(a)]; }
  double cell_volume() const;

  int index_along(std::size_t node, int a) const {
    return static_cast<int>((node / stride(a)) % static_cast<std::size_t>(axis(a).count));
  }
  Vec node(std::size_t idx) const;
  void node(std::size_t idx, std::span<double> out) const;
  /// Neighbour of `node` one cell in direction dir (+1/-1) along `a`;
  /// -1 at a bounded edge.
  std::ptrdiff_t neighbor(std::size_t node, int a, int dir) const;
  /// Cell containing the point, if inside the grid box (periodic axes wrap).
  std::optional<std::size_t> locate(std::span<const double> x) const;

  bool operator==(const GridSpec& o) const { return axes_ == o.axes_; }

 private:
  std::vector<GridAxis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

/// Grid covering the admissible domain of `cs`: bounded axes span
/// [lower + margin, upper - margin] with zero-flux walls, periodic axes
/// span one period.
GridSpec make_grid(const ConfigurationSpace& cs, const std::vector<int>& counts);

enum class FieldRole { density, drift_potential, phase, potential, curvature_potential, generic };

std::string to_string(FieldRole role);
FieldRole field_role_from_string(const std::string& s);

struct GridField {
  GridSpec grid;
  std::vector<double> values;
  FieldRole role = FieldRole::generic;
  double time = 0.0;

  GridField() = default;
  GridField(GridSpec g, FieldRole r, double fill = 0.0)
      : grid(std::move(g)), values(grid.size(), fill), role(r) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

}  // namespace edyn::geometry
