#pragma once

#include "edyn/geometry/grid.hpp"

#include <Eigen/SparseCore>

#include <complex>
#include <span>
#include <vector>

namespace edyn::geometry {

/// Discrete geometry of a configuration space sampled on a grid.
///
/// Holds sqrt(M) and M^AB at nodes plus the flux weights
/// W^AB = sqrt(M) M^AB: diagonal weights are averaged onto cell faces,
/// off-diagonal weights stay at nodes and are paired with centred
/// differences. The weighted flux divergence
///
///   (K_rho f)_i = sum_A d_A(W^AA rho_face d_A f) + off-diagonal terms
///
/// is symmetric in the Euclidean inner product, so
/// Delta_M = K / sqrt(M) is self-adjoint in <f, g> = sum sqrt(M) f g dV.
/// Bounded axes carry zero flux through their end faces.
class GridGeometry {
 public:
  GridGeometry(const ConfigurationSpace& cs, GridSpec grid);

  const GridSpec& grid() const { return grid_; }
  const ConfigurationSpace& space() const { return cs_; }
  std::size_t size() const { return grid_.size(); }
  int dim() const { return grid_.dim(); }
  double cell_volume() const { return cell_volume_; }

  std::span<const double> sqrt_det() const { return sqrt_det_; }
  double inverse_mass(std::size_t node, int A, int B) const {
    return minv_[(node * static_cast<std::size_t>(dim()) + static_cast<std::size_t>(A)) * static_cast<std::size_t>(dim()) +
                 static_cast<std::size_t>(B)];
  }
  std::ptrdiff_t neighbor(std::size_t node, int a, int dir) const {
    return nbr_[(node * static_cast<std::size_t>(dim()) + static_cast<std::size_t>(a)) * 2 + (dir > 0 ? 1 : 0)];
  }
  /// Diagonal flux weight on the face between `node` and its +1 neighbour
  /// along `a`, divided by spacing^2 (zero when there is no such face).
  double face_weight(std::size_t node, int a) const {
    return face_[node * static_cast<std::size_t>(dim()) + static_cast<std::size_t>(a)];
  }
  bool has_cross_terms() const { return has_cross_; }

  /// out = K_rho f. With empty `rho` the density factor is one.
  template <class T>
  void flux_divergence(std::span<const T> f, std::span<T> out, std::span<const double> rho = {}) const;
  /// out = Delta_M f = K f / sqrt(M).
  template <class T>
  void laplace_beltrami(std::span<const T> f, std::span<T> out) const;

  /// Centred derivative along axis a; bounded edges mirror the edge value.
  void centered_gradient(std::span<const double> f, int a, std::span<double> out) const;
  /// E_rho(f, f) = -f^T K_rho f dV, assembled face by face (non-negative).
  double dirichlet_energy(std::span<const double> f, std::span<const double> rho = {}) const;
  /// Variational derivative of E_rho(f, f)/2 with respect to rho under the
  /// sqrt(M) dV measure; approximates (1/2) M^AB d_A f d_B f.
  void kinetic_density(std::span<const double> f, std::span<double> out) const;

  /// sum_i sqrt(M_i) f_i dV.
  double integrate(std::span<const double> f) const;
  /// K with unit density as a sparse matrix.
  Eigen::SparseMatrix<double, Eigen::RowMajor> flux_matrix() const;
  /// Per-node decay rate sum |K_ii| / sqrt(M_i) of the unit-density operator.
  double max_diffusion_rate() const;

 private:
  ConfigurationSpace cs_;
  GridSpec grid_;
  double cell_volume_ = 0.0;
  std::vector<double> sqrt_det_;
  std::vector<double> minv_;
  std::vector<std::ptrdiff_t> nbr_;
  std::vector<double> face_;   // W^AA averaged on the + face, / h_A^2
  std::vector<double> cross_;  // W^AB at nodes for A != B, / (4 h_A h_B)
  bool has_cross_ = false;
};

/// Delta_M f for a single field (assembles the discrete geometry on the fly).
GridField laplace_beltrami(const ConfigurationSpace& cs, const GridSpec& grid, const GridField& f);

}  // namespace edyn::geometry
