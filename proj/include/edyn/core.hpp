#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace edyn {

/// Largest single-particle manifold dimension supported by the fixed-size
/// per-particle kernels.
inline constexpr int kMaxChartDim = 3;

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxChartDim, 1>;
using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0,
                               kMaxChartDim, kMaxChartDim>;

/// A point lies outside the admissible domain of a chart (or inside a
/// singular margin), or a stencil would leave it.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A metric block is numerically singular or not positive-definite.
class ConditioningError : public std::runtime_error {
 public:
  ConditioningError(const std::string& what, int block)
      : std::runtime_error(what), block_(block) {}
  int block() const { return block_; }

 private:
  int block_;
};

/// An explicit step was requested with a time step above its stability bound.
class StepSizeError : public std::runtime_error {
 public:
  StepSizeError(const std::string& what, double suggested_dt)
      : std::runtime_error(what), suggested_dt_(suggested_dt) {}
  double suggested_dt() const { return suggested_dt_; }

 private:
  double suggested_dt_;
};

/// An iterative solve did not reach its residual target.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Simulation constants shared by the stochastic and grid solvers.
///
/// `eta` fixes the units of time relative to mass and length; the per-particle
/// short-step multiplier is m_i / (eta * dt). The reduced Planck constant is
/// hbar = eta / k and `xi` is the coupling of the Fisher-information term.
struct SimParams {
  double eta = 1.0;
  double dt = 1e-3;
  double k = 1.0;
  double xi = 0.125;
  std::uint64_t seed = 0;
  std::int64_t steps = 0;

  double hbar() const { return eta / k; }
  /// Coupling at which the nonlinear Schrodinger term cancels.
  double xi_quantum() const { return hbar() * hbar() / 8.0; }

  void validate() const {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
    if (!(xi >= 0.0)) throw std::invalid_argument("xi must be non-negative");
    if (steps < 0) throw std::invalid_argument("steps must be non-negative");
  }

  bool operator==(const SimParams&) const = default;
};

}  // namespace edyn
