#pragma once

#include "edyn/geometry/chart.hpp"

#include <span>
#include <vector>

namespace edyn::geometry {

/// N particles over one chart. Points are flat vectors of length n = N*d
/// with particle i occupying entries [i*d, (i+1)*d).
class ConfigurationSpace {
 public:
  ConfigurationSpace(ManifoldChart chart, std::vector<double> masses);

  const ManifoldChart& chart() const { return chart_; }
  int particles() const { return static_cast<int>(masses_.size()); }
  int chart_dim() const { return chart_.dim(); }
  int dim() const { return particles() * chart_dim(); }
  double mass(int i) const { return masses_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& masses() const { return masses_; }

  SmallVec particle_point(std::span<const double> x, int i) const;

  /// Throws DomainError identifying the first offending particle and axis.
  void check(std::span<const double> x) const;
  bool admissible(std::span<const double> x) const;
  void fold(std::span<double> x) const;
  /// Coordinate displacement to - from using minimal images on periodic axes.
  Vec displacement(std::span<const double> from, std::span<const double> to) const;

 private:
  ManifoldChart chart_;
  std::vector<double> masses_;
};

/// Per-particle geometric data at one point: the chart metric block, its
/// inverse, sqrt(det h) and the chart connection.
struct ParticleGeometry {
  SmallMat h;
  SmallMat h_inv;
  double sqrt_det_h = 0.0;
  ChartConnection gamma;
};

/// Cholesky factor l (lower) of a small symmetric block; false when a pivot
/// is not positive.
bool small_cholesky(const SmallMat& a, SmallMat& l);

/// Evaluates the metric block of particle `i` at x_i and inverts it.
/// Throws ConditioningError (with the particle as block index) when the
/// block is not numerically positive-definite.
ParticleGeometry particle_geometry(const ConfigurationSpace& cs, const SmallVec& xi, int i,
                                   bool with_connection = true);

/// Dense configuration-space connection Gamma^A_BC (n x n x n).
class Connection {
 public:
  explicit Connection(int n) : n_(n), v_(static_cast<std::size_t>(n) * n * n, 0.0) {}
  int dim() const { return n_; }
  double& operator()(int a, int b, int c) { return v_[index(a, b, c)]; }
  double operator()(int a, int b, int c) const { return v_[index(a, b, c)]; }

 private:
  std::size_t index(int a, int b, int c) const {
    return (static_cast<std::size_t>(a) * n_ + b) * n_ + c;
  }
  int n_;
  std::vector<double> v_;
};

/// M_AB = m_i delta_ij h_ab(x_i), assembled block by block.
Mat mass_tensor(const ConfigurationSpace& cs, std::span<const double> x);
/// M^AB from d x d block inverses.
Mat inverse_mass(const ConfigurationSpace& cs, std::span<const double> x);
/// sqrt(det M) = prod_i m_i^{d/2} sqrt(det h(x_i)).
double sqrt_det_mass(const ConfigurationSpace& cs, std::span<const double> x);
/// Christoffel symbols of M_AB; only same-particle index triples are nonzero.
Connection christoffel(const ConfigurationSpace& cs, std::span<const double> x);
/// Same, but always from finite differences of the metric.
Connection christoffel_fd(const ConfigurationSpace& cs, std::span<const double> x);

}  // namespace edyn::geometry
