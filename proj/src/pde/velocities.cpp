#include "edyn/pde/velocities.hpp"

#include <cmath>

namespace edyn::pde {

using geometry::GridField;
using geometry::GridGeometry;

namespace {

void check_field(const GridGeometry& geo, const GridField& f) {
  if (!(f.grid == geo.grid()) || f.values.size() != geo.size())
    throw std::invalid_argument("field grid does not match the solver grid");
}

// scale * M^AB D_B f at every node.
VectorField raise_gradient(const GridGeometry& geo, std::span<const double> f, double scale) {
  const int n = geo.dim();
  const auto un = static_cast<std::size_t>(n);
  std::vector<std::vector<double>> grad(un, std::vector<double>(geo.size()));
  for (int B = 0; B < n; ++B) geo.centered_gradient(f, B, grad[static_cast<std::size_t>(B)]);
  VectorField v{geo.grid(), n, std::vector<double>(geo.size() * un, 0.0), {}};
  for (std::size_t i = 0; i < geo.size(); ++i)
    for (int A = 0; A < n; ++A) {
      double s = 0.0;
      for (int B = 0; B < n; ++B) s += geo.inverse_mass(i, A, B) * grad[static_cast<std::size_t>(B)][i];
      v.values[i * un + static_cast<std::size_t>(A)] = scale * s;
    }
  return v;
}

}  // namespace

VectorField current_velocity(const GridGeometry& geo, const GridField& Phi) {
  check_field(geo, Phi);
  return raise_gradient(geo, Phi.values, 1.0);
}

VectorField btilde(const GridGeometry& geo, const GridField& phi, const SimParams& p) {
  check_field(geo, phi);
  return raise_gradient(geo, phi.values, p.eta);
}

VectorField osmotic_velocity(const GridGeometry& geo, const GridField& rho, const SimParams& p) {
  check_field(geo, rho);
  std::vector<double> half_log(geo.size());
  std::vector<char> low(geo.size());
  for (std::size_t i = 0; i < geo.size(); ++i) {
    low[i] = rho[i] <= kRhoFloor;
    half_log[i] = 0.5 * std::log(std::max(rho[i], kRhoFloor));
  }
  VectorField u = raise_gradient(geo, half_log, -p.eta);
  const auto un = static_cast<std::size_t>(geo.dim());
  for (std::size_t i = 0; i < geo.size(); ++i) {
    bool bad = low[i];
    for (int a = 0; a < geo.dim() && !bad; ++a)
      for (int dir : {-1, 1}) {
        const std::ptrdiff_t j = geo.neighbor(i, a, dir);
        if (j >= 0 && low[static_cast<std::size_t>(j)]) bad = true;
      }
    if (!bad) continue;
    u.masked.push_back(i);
    for (std::size_t A = 0; A < un; ++A) u.values[i * un + A] = 0.0;
  }
  return u;
}

}  // namespace edyn::pde
