#include "edyn/geometry/normal_coords.hpp"

#include <cmath>

namespace edyn::geometry {

NormalCoordsReport normal_coords_check(const ConfigurationSpace& cs, std::span<const double> x_p,
                                       double probe_radius) {
  if (!(probe_radius > 0.0)) throw std::invalid_argument("probe radius must be positive");
  cs.check(x_p);
  const int n = cs.dim();
  const int d = cs.chart_dim();

  Mat E = Mat::Zero(n, n);
  Vec gamma_diag(n);
  for (int i = 0; i < cs.particles(); ++i) {
    const SmallMat h = cs.chart().metric(cs.particle_point(x_p, i));
    Eigen::LLT<SmallMat> llt(h);
    if (llt.info() != Eigen::Success) throw ConditioningError("metric block not positive-definite", i);
    const SmallMat L = llt.matrixL();
    // E = L^{-T}, so that E^T h E = I.
    E.block(i * d, i * d, d, d) = L.transpose().triangularView<Eigen::Upper>().solve(SmallMat::Identity(d, d));
    for (int a = 0; a < d; ++a) gamma_diag[i * d + a] = cs.mass(i);
  }
  const Connection G = christoffel(cs, x_p);
  const Vec xp = Eigen::Map<const Vec>(x_p.data(), n);

  auto pulled_back = [&](const Vec& y) {
    const Vec ey = E * y;
    Vec x = xp + ey;
    for (int A = 0; A < n; ++A) {
      double q = 0.0;
      for (int B = 0; B < n; ++B)
        for (int C = 0; C < n; ++C) q += G(A, B, C) * ey[B] * ey[C];
      x[A] -= 0.5 * q;
    }
    // J = E - Gamma(E., E y)
    Mat J = E;
    for (int A = 0; A < n; ++A)
      for (int K = 0; K < n; ++K) {
        double s = 0.0;
        for (int B = 0; B < n; ++B)
          for (int C = 0; C < n; ++C) s += G(A, B, C) * E(B, K) * ey[C];
        J(A, K) -= s;
      }
    if (!cs.admissible(std::span<const double>(x.data(), static_cast<std::size_t>(n))))
      throw DomainError("normal-coordinate probe leaves the admissible domain");
    const Mat M = mass_tensor(cs, std::span<const double>(x.data(), static_cast<std::size_t>(n)));
    return Mat(J.transpose() * M * J);
  };

  std::vector<Vec> dirs;
  for (int k = 0; k < n; ++k) {
    Vec e = Vec::Zero(n);
    e[k] = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
    for (int l = k + 1; l < n; ++l) {
      Vec f = Vec::Zero(n);
      f[k] = std::sqrt(0.5);
      f[l] = std::sqrt(0.5);
      dirs.push_back(f);
      f[l] = -f[l];
      dirs.push_back(f);
    }
  }

  const Mat gamma = gamma_diag.asDiagonal();
  const Mat M0 = pulled_back(Vec::Zero(n));
  NormalCoordsReport rep;
  rep.probe_radius = probe_radius;
  for (const Vec& dir : dirs) {
    const Mat Mp = pulled_back(probe_radius * dir);
    rep.metric_deviation = std::max(rep.metric_deviation, (Mp - gamma).cwiseAbs().maxCoeff());
    rep.derivative_estimate = std::max(rep.derivative_estimate, (Mp - M0).cwiseAbs().maxCoeff() / probe_radius);
  }
  return rep;
}

}  // namespace edyn::geometry
