#include "edyn/pde/functionals.hpp"

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

void check_potentials(const GridGeometry& geo, const Potentials& pot) {
  if ((!pot.V.empty() && pot.V.size() != geo.size()) || (!pot.Vc.empty() && pot.Vc.size() != geo.size()))
    throw std::invalid_argument("potential does not match the solver grid");
}

std::vector<double> root(const GridField& rho) {
  std::vector<double> s(rho.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(rho[i] >= 0.0) || !std::isfinite(rho[i])) throw std::domain_error("density must be finite and non-negative");
    s[i] = std::sqrt(rho[i]);
  }
  return s;
}

}  // namespace

GridField curvature_potential(const GridGeometry& geo, double xi_R) {
  const auto& cs = geo.space();
  if (!cs.chart().has_scalar_curvature())
    throw std::invalid_argument("chart '" + cs.chart().name() + "' has no scalar curvature");
  GridField out(geo.grid(), geometry::FieldRole::curvature_potential);
  for (std::size_t i = 0; i < geo.size(); ++i) {
    const Vec x = geo.grid().node(i);
    double R = 0.0;
    for (int k = 0; k < cs.particles(); ++k)
      R += cs.chart().scalar_curvature(cs.particle_point(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), k)) /
           cs.mass(k);
    out[i] = xi_R * R;
  }
  return out;
}

GridField harmonic_potential(const GridGeometry& geo, double omega, std::span<const double> center) {
  const auto& cs = geo.space();
  const Mat M = geometry::mass_tensor(cs, center);
  GridField out(geo.grid(), geometry::FieldRole::potential);
  for (std::size_t i = 0; i < geo.size(); ++i) {
    const Vec x = geo.grid().node(i);
    const Vec dx = cs.displacement(center, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
    out[i] = 0.5 * omega * omega * dx.dot(M * dx);
  }
  return out;
}

FisherInformation fisher_information(const GridGeometry& geo, const GridField& rho) {
  check_field(geo, rho);
  const int n = geo.dim();
  const auto& grid = geo.grid();
  const auto sq = geo.sqrt_det();
  const std::vector<double> s = root(rho);
  FisherInformation out;
  out.I = Mat::Zero(n, n);
  double masked_volume = 0.0, volume = 0.0;
  std::vector<char> low(geo.size());
  for (std::size_t i = 0; i < geo.size(); ++i) {
    low[i] = rho[i] <= kRhoFloor;
    volume += sq[i];
    if (low[i]) {
      ++out.masked_nodes;
      masked_volume += sq[i];
    }
  }
  out.accuracy_warning = masked_volume > 0.01 * volume;

  for (int A = 0; A < n; ++A) {
    const double h = grid.axis(A).spacing;
    double acc = 0.0;
    for (std::size_t i = 0; i < geo.size(); ++i) {
      const std::ptrdiff_t j = geo.neighbor(i, A, +1);
      if (j < 0) continue;
      const auto uj = static_cast<std::size_t>(j);
      if (low[i] && low[uj]) continue;
      const double d = (s[uj] - s[i]) / h;
      acc += 0.5 * (sq[i] + sq[uj]) * d * d;
    }
    out.I(A, A) = 4.0 * acc * geo.cell_volume();
  }
  if (n > 1) {
    std::vector<std::vector<double>> g(static_cast<std::size_t>(n), std::vector<double>(geo.size()));
    for (int A = 0; A < n; ++A) geo.centered_gradient(s, A, g[static_cast<std::size_t>(A)]);
    for (int A = 0; A < n; ++A)
      for (int B = A + 1; B < n; ++B) {
        double acc = 0.0;
        for (std::size_t i = 0; i < geo.size(); ++i)
          if (!low[i]) acc += sq[i] * g[static_cast<std::size_t>(A)][i] * g[static_cast<std::size_t>(B)][i];
        out.I(A, B) = out.I(B, A) = 4.0 * acc * geo.cell_volume();
      }
  }
  return out;
}

double F_functional(const GridGeometry& geo, const GridField& rho, const Potentials& pot, const SimParams& p) {
  check_field(geo, rho);
  check_potentials(geo, pot);
  const std::vector<double> s = root(rho);
  double F = p.xi > 0.0 ? 4.0 * p.xi * geo.dirichlet_energy(s) : 0.0;
  if (!pot.V.empty() || !pot.Vc.empty()) {
    std::vector<double> w(geo.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = rho[i] * pot.at(i);
    F += geo.integrate(w);
  }
  return F;
}

GridField dF_drho(const GridGeometry& geo, const GridField& rho, const Potentials& pot, const SimParams& p,
                  std::vector<std::size_t>* masked) {
  check_field(geo, rho);
  check_potentials(geo, pot);
  GridField out(geo.grid(), geometry::FieldRole::generic);
  out.time = rho.time;
  std::vector<double> lap;
  std::vector<double> s;
  if (p.xi > 0.0) {
    s = root(rho);
    lap.resize(geo.size());
    geo.laplace_beltrami<double>(s, lap);
  }
  if (masked) masked->clear();
  for (std::size_t i = 0; i < geo.size(); ++i) {
    out[i] = pot.at(i);
    if (p.xi == 0.0) continue;
    if (rho[i] <= kRhoFloor) {
      if (masked) masked->push_back(i);
      continue;
    }
    out[i] -= 4.0 * p.xi * lap[i] / s[i];
  }
  return out;
}

double kinetic_energy(const GridGeometry& geo, const GridField& rho, const GridField& Phi) {
  check_field(geo, rho);
  check_field(geo, Phi);
  return 0.5 * geo.dirichlet_energy(Phi.values, rho.values);
}

double hamiltonian(const GridGeometry& geo, const GridField& rho, const GridField& Phi, const Potentials& pot,
                   const SimParams& p) {
  return kinetic_energy(geo, rho, Phi) + F_functional(geo, rho, pot, p);
}

}  // namespace edyn::pde
