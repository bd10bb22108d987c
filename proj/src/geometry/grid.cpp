#include "edyn/geometry/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace edyn::geometry {

GridSpec::GridSpec(std::vector<GridAxis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 3) throw std::invalid_argument("grid dimension must be 1..3");
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    const auto& ax = axes_[a];
    if (ax.count < 8)
      throw std::invalid_argument("grid axis " + std::to_string(a) + " needs at least 8 nodes");
    if (!(ax.spacing > 0.0) || !std::isfinite(ax.spacing) || !std::isfinite(ax.lower))
      throw std::invalid_argument("grid axis " + std::to_string(a) + " needs finite positive spacing");
  }
  strides_.assign(axes_.size(), 1);
  for (int a = static_cast<int>(axes_.size()) - 2; a >= 0; --a)
    strides_[static_cast<std::size_t>(a)] =
        strides_[static_cast<std::size_t>(a) + 1] * static_cast<std::size_t>(axes_[static_cast<std::size_t>(a) + 1].count);
  size_ = strides_[0] * static_cast<std::size_t>(axes_[0].count);
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (const auto& ax : axes_) v *= ax.spacing;
  return v;
}

Vec GridSpec::node(std::size_t idx) const {
  Vec x(dim());
  node(idx, std::span<double>(x.data(), static_cast<std::size_t>(x.size())));
  return x;
}

void GridSpec::node(std::size_t idx, std::span<double> out) const {
  for (int a = 0; a < dim(); ++a) out[static_cast<std::size_t>(a)] = axis(a).node(index_along(idx, a));
}

std::ptrdiff_t GridSpec::neighbor(std::size_t node, int a, int dir) const {
  const GridAxis& ax = axis(a);
  const int i = index_along(node, a);
  int j = i + dir;
  if (j < 0 || j >= ax.count) {
    if (ax.topology == Topology::bounded) return -1;
    j = (j + ax.count) % ax.count;
  }
  return static_cast<std::ptrdiff_t>(node) + static_cast<std::ptrdiff_t>(j - i) * static_cast<std::ptrdiff_t>(stride(a));
}

std::optional<std::size_t> GridSpec::locate(std::span<const double> x) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim(); ++a) {
    const GridAxis& ax = axis(a);
    double u = (x[static_cast<std::size_t>(a)] - ax.lower) / ax.spacing;
    if (ax.topology == Topology::periodic) {
      u = std::fmod(u, static_cast<double>(ax.count));
      if (u < 0) u += ax.count;
    } else if (u >= ax.count && u <= ax.count * (1.0 + 1e-12)) {
      u = ax.count - 1;  // point on the closing wall
    }
    if (!(u >= 0.0) || u >= ax.count) return std::nullopt;
    const int i = std::min(static_cast<int>(u), ax.count - 1);
    idx += static_cast<std::size_t>(i) * stride(a);
  }
  return idx;
}

GridSpec make_grid(const ConfigurationSpace& cs, const std::vector<int>& counts) {
  const int n = cs.dim();
  if (static_cast<int>(counts.size()) != n)
    throw std::invalid_argument("grid needs one node count per configuration axis (" +
                                std::to_string(n) + ")");
  std::vector<GridAxis> axes;
  for (int A = 0; A < n; ++A) {
    const Axis& ax = cs.chart().axis(A % cs.chart_dim());
    const double lo = ax.lo(), hi = ax.hi();
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw std::invalid_argument("grid axis " + std::to_string(A) + " has an unbounded chart axis");
    const int c = counts[static_cast<std::size_t>(A)];
    axes.push_back(GridAxis{c, lo, (hi - lo) / c, ax.topology});
  }
  return GridSpec(std::move(axes));
}

std::string to_string(FieldRole role) {
  switch (role) {
    case FieldRole::density: return "density";
    case FieldRole::drift_potential: return "drift_potential";
    case FieldRole::phase: return "phase";
    case FieldRole::potential: return "potential";
    case FieldRole::curvature_potential: return "curvature_potential";
    case FieldRole::generic: return "generic";
  }
  return "generic";
}

FieldRole field_role_from_string(const std::string& s) {
  for (auto r : {FieldRole::density, FieldRole::drift_potential, FieldRole::phase, FieldRole::potential,
                 FieldRole::curvature_potential, FieldRole::generic})
    if (to_string(r) == s) return r;
  throw std::invalid_argument("unknown field role '" + s + "'");
}

}  // namespace edyn::geometry
