#pragma once

#include "edyn/geometry/configuration_space.hpp"
#include "edyn/geometry/grid.hpp"
#include "edyn/sde/potential.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace edyn::sde {

/// W sample points in configuration space, stored row-major (W x n).
struct WalkerEnsemble {
  int dim = 0;
  std::vector<double> positions;
  double time = 0.0;
  std::uint64_t seed = 0;
  /// Number of steps taken; addresses the random stream of the next step.
  std::uint64_t steps = 0;
  std::string chart;

  std::size_t count() const { return dim > 0 ? positions.size() / static_cast<std::size_t>(dim) : 0; }
  std::span<double> walker(std::size_t k) {
    return {positions.data() + k * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  std::span<const double> walker(std::size_t k) const {
    return {positions.data() + k * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

/// Step counter value reserved for initial-condition draws.
inline constexpr std::uint64_t kInitialStream = std::numeric_limits<std::uint64_t>::max();

struct Drift {
  Vec b;       // full Ito drift, not a vector under chart changes
  Vec btilde;  // eta M^AB d_B phi, transforms as a vector
};

Drift drift_velocity(const geometry::ConfigurationSpace& cs, std::span<const double> x, const DriftPotential& phi,
                     const SimParams& p);

struct StepOptions {
  /// Include the -(eta/2) M^BC Gamma^A_BC drift. Off only for regression checks.
  bool christoffel_drift = true;
};

/// One Euler-Maruyama step of every walker: x += b(x) dt + dw with
/// <dw dw^T> = eta M^-1(x) dt, all evaluated at the pre-step point; then
/// wrap/reflect into the domain. Walker k draws from the stream
/// (ens.seed, k, ens.steps), so results do not depend on threading.
void sample_step(WalkerEnsemble& ens, const geometry::ConfigurationSpace& cs, const DriftPotential& phi,
                 const SimParams& p, const StepOptions& opts = {});

/// Raw displacement of a single draw from x, without folding.
Vec draw_displacement(const geometry::ConfigurationSpace& cs, std::span<const double> x, const DriftPotential& phi,
                      const SimParams& p, std::uint64_t seed, std::uint64_t stream, std::uint64_t step,
                      const StepOptions& opts = {});

/// dx + (1/2) Gamma(x)(dx, dx), the displacement that transforms as a vector.
Vec covariant_displacement(const geometry::ConfigurationSpace& cs, std::span<const double> x,
                           std::span<const double> dx);

struct TransitionDensity {
  double value = 0.0;   // density with respect to d^n x'
  double scalar = 0.0;  // value / sqrt(M(x')), chart independent
  /// Covariant step longer than six short-step standard deviations.
  bool outside_short_step = false;
};

struct TransitionOptions {
  bool covariant_correction = true;
};

TransitionDensity transition_density(const geometry::ConfigurationSpace& cs, std::span<const double> x_from,
                                     std::span<const double> x_to, const DriftPotential& phi, const SimParams& p,
                                     const TransitionOptions& opts = {});

/// Histogram estimate of the scalar density rho: counts / (W dV sqrt(M)) at
/// each cell centre, renormalised so that sum sqrt(M) rho dV = 1.
geometry::GridField estimate_density(const WalkerEnsemble& ens, const geometry::ConfigurationSpace& cs,
                                     const geometry::GridSpec& grid);

/// Time-averaged histogram over several snapshots of an ensemble.
class DensityAccumulator {
 public:
  DensityAccumulator(const geometry::ConfigurationSpace& cs, geometry::GridSpec grid);
  void add(const WalkerEnsemble& ens);
  std::size_t snapshots() const { return snapshots_; }
  /// Walkers that fell outside the grid box (unbounded axes only).
  std::size_t dropped() const { return dropped_; }
  geometry::GridField density() const;

 private:
  geometry::GridSpec grid_;
  std::vector<double> sqrt_det_;
  std::vector<double> counts_;
  std::size_t snapshots_ = 0;
  std::size_t dropped_ = 0;
};

struct InformationMetric {
  Mat g;
  Mat standard_error;
  std::size_t samples = 0;
  /// Fewer than 1e5 samples: the estimate is flagged as unreliable.
  bool wide_error = false;
};

/// Monte-Carlo estimate of E[d_A log P d_B log P] over x' ~ P(.|x), with
/// derivatives in the conditioning point x by central differences.
InformationMetric information_metric_mc(const geometry::ConfigurationSpace& cs, std::span<const double> x,
                                        const DriftPotential& phi, const SimParams& p, std::size_t samples);

/// All walkers at one point.
WalkerEnsemble replicate(const geometry::ConfigurationSpace& cs, std::span<const double> x, std::size_t count,
                         std::uint64_t seed);
/// Coordinate Gaussian around `center` with covariance sigma^2 h^-1(center)
/// per particle, folded into the domain.
WalkerEnsemble gaussian_blob(const geometry::ConfigurationSpace& cs, std::span<const double> center, double sigma,
                             std::size_t count, std::uint64_t seed);
/// Cell averages of the gaussian_blob law as a scalar density on `grid`
/// (same convention as estimate_density). Periodic images are summed.
geometry::GridField gaussian_blob_density(const geometry::ConfigurationSpace& cs, const geometry::GridSpec& grid,
                                          std::span<const double> center, double sigma, int subsamples = 6);
/// Uniform with respect to the volume measure sqrt(M) d^n x on a bounded
/// domain (rejection against the largest sqrt(M) found on a probe grid).
WalkerEnsemble uniform_measure(const geometry::ConfigurationSpace& cs, std::size_t count, std::uint64_t seed);

/// Sample mean and covariance of the minimal-image displacement between two
/// ensembles holding the same walkers.
struct DisplacementMoments {
  Vec mean;
  Mat covariance;
};
DisplacementMoments displacement_moments(const geometry::ConfigurationSpace& cs, const WalkerEnsemble& before,
                                         const WalkerEnsemble& after);

}  // namespace edyn::sde
