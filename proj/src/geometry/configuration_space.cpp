#include "edyn/geometry/configuration_space.hpp"

#include <cmath>
#include <sstream>

namespace edyn::geometry {

ConfigurationSpace::ConfigurationSpace(ManifoldChart chart, std::vector<double> masses)
    : chart_(std::move(chart)), masses_(std::move(masses)) {
  if (masses_.empty()) throw std::invalid_argument("configuration space needs at least one particle");
  for (std::size_t i = 0; i < masses_.size(); ++i)
    if (!(masses_[i] > 0.0))
      throw std::invalid_argument("mass of particle " + std::to_string(i) + " must be positive");
}

SmallVec ConfigurationSpace::particle_point(std::span<const double> x, int i) const {
  const int d = chart_dim();
  SmallVec xi(d);
  for (int a = 0; a < d; ++a) xi[a] = x[static_cast<std::size_t>(i * d + a)];
  return xi;
}

void ConfigurationSpace::check(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim())
    throw DomainError("point has " + std::to_string(x.size()) + " coordinates, expected " +
                      std::to_string(dim()));
  for (int i = 0; i < particles(); ++i) chart_.check(particle_point(x, i), i);
}

bool ConfigurationSpace::admissible(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (int i = 0; i < particles(); ++i)
    if (!chart_.admissible(particle_point(x, i))) return false;
  return true;
}

void ConfigurationSpace::fold(std::span<double> x) const {
  const int d = chart_dim();
  for (int i = 0; i < particles(); ++i) chart_.fold(x.data() + static_cast<std::ptrdiff_t>(i) * d);
}

Vec ConfigurationSpace::displacement(std::span<const double> from, std::span<const double> to) const {
  const int d = chart_dim();
  Vec dx(dim());
  for (int A = 0; A < dim(); ++A)
    dx[A] = chart_.wrap_delta(A % d, to[static_cast<std::size_t>(A)] - from[static_cast<std::size_t>(A)]);
  return dx;
}

bool small_cholesky(const SmallMat& a, SmallMat& l) {
  const auto d = a.rows();
  l.setZero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double s = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
    if (!(s > 0.0)) return false;
    l(j, j) = std::sqrt(s);
    for (Eigen::Index i = j + 1; i < d; ++i) {
      double t = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
      l(i, j) = t / l(j, j);
    }
  }
  return true;
}

ParticleGeometry particle_geometry(const ConfigurationSpace& cs, const SmallVec& xi, int i,
                                   bool with_connection) {
  ParticleGeometry g;
  g.h = cs.chart().metric(xi);
  const auto d = g.h.rows();
  SmallMat L;
  if (!small_cholesky(g.h, L)) {
    std::ostringstream os;
    os << "metric block of particle " << i << " is not positive-definite";
    throw ConditioningError(os.str(), i);
  }
  const auto diag = L.diagonal();
  const double ratio = diag.minCoeff() / diag.maxCoeff();
  if (!(ratio * ratio > 1e-14)) {
    std::ostringstream os;
    os << "metric block of particle " << i << " is numerically singular";
    throw ConditioningError(os.str(), i);
  }
  // h^-1 = L^-T L^-1 from the triangular inverse.
  SmallMat Li = SmallMat::Zero(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    Li(c, c) = 1.0 / L(c, c);
    for (Eigen::Index r = c + 1; r < d; ++r) {
      double s = 0.0;
      for (Eigen::Index k = c; k < r; ++k) s -= L(r, k) * Li(k, c);
      Li(r, c) = s / L(r, r);
    }
  }
  g.h_inv.resize(d, d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = a; b < d; ++b) {
      double s = 0.0;
      for (Eigen::Index k = b; k < d; ++k) s += Li(k, a) * Li(k, b);
      g.h_inv(a, b) = s;
      g.h_inv(b, a) = s;
    }
  g.sqrt_det_h = diag.prod();
  if (with_connection) g.gamma = cs.chart().connection(xi);
  return g;
}

Mat mass_tensor(const ConfigurationSpace& cs, std::span<const double> x) {
  cs.check(x);
  const int d = cs.chart_dim();
  Mat M = Mat::Zero(cs.dim(), cs.dim());
  for (int i = 0; i < cs.particles(); ++i) {
    const SmallMat h = cs.chart().metric(cs.particle_point(x, i));
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) {
        const double v = cs.mass(i) * 0.5 * (h(a, b) + h(b, a));
        M(i * d + a, i * d + b) = v;
        M(i * d + b, i * d + a) = v;
      }
  }
  return M;
}

Mat inverse_mass(const ConfigurationSpace& cs, std::span<const double> x) {
  cs.check(x);
  const int d = cs.chart_dim();
  Mat Minv = Mat::Zero(cs.dim(), cs.dim());
  for (int i = 0; i < cs.particles(); ++i) {
    const ParticleGeometry g = particle_geometry(cs, cs.particle_point(x, i), i, false);
    Minv.block(i * d, i * d, d, d) = g.h_inv / cs.mass(i);
  }
  return Minv;
}

double sqrt_det_mass(const ConfigurationSpace& cs, std::span<const double> x) {
  cs.check(x);
  const int d = cs.chart_dim();
  double s = 1.0;
  for (int i = 0; i < cs.particles(); ++i) {
    const ParticleGeometry g = particle_geometry(cs, cs.particle_point(x, i), i, false);
    s *= std::pow(cs.mass(i), 0.5 * d) * g.sqrt_det_h;
  }
  return s;
}

namespace {

// Constant per-particle mass factors cancel in the Levi-Civita formula, so
// the configuration-space connection is the chart connection per block.
template <class ChartConn>
Connection assemble_connection(const ConfigurationSpace& cs, std::span<const double> x, ChartConn&& conn) {
  cs.check(x);
  const int d = cs.chart_dim();
  Connection G(cs.dim());
  for (int i = 0; i < cs.particles(); ++i) {
    const ChartConnection g = conn(cs.particle_point(x, i));
    const int o = i * d;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c) G(o + a, o + b, o + c) = g(a, b, c);
  }
  return G;
}

}  // namespace

Connection christoffel(const ConfigurationSpace& cs, std::span<const double> x) {
  return assemble_connection(cs, x, [&](const SmallVec& xi) { return cs.chart().connection(xi); });
}

Connection christoffel_fd(const ConfigurationSpace& cs, std::span<const double> x) {
  return assemble_connection(cs, x, [&](const SmallVec& xi) { return cs.chart().connection_fd(xi); });
}

}  // namespace edyn::geometry
