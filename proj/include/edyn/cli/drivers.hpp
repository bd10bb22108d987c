#pragma once

#include "edyn/cli/config.hpp"
#include "edyn/geometry/laplace_beltrami.hpp"
#include "edyn/io/manifest.hpp"

#include <filesystem>
#include <ostream>

namespace edyn::cli {

geometry::ManifoldChart build_chart(const ChartConfig& c);
geometry::ConfigurationSpace build_space(const RunConfig& c);

struct RunOptions {
  std::filesystem::path out_dir;
  /// False runs the solver without touching the file system.
  bool write = true;
  /// Progress messages; null for quiet runs.
  std::ostream* log = nullptr;
  /// Config text echoed into the manifest (serialized config when empty).
  std::string config_text;
};

struct RunResult {
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<io::Check> checks;
  /// One line per violated or unevaluable acceptance entry.
  std::vector<std::string> violations;
  std::filesystem::path manifest;

  bool passed() const { return violations.empty(); }
  /// Throws std::out_of_range for metrics the solver did not produce.
  double metric(const std::string& name) const;
};

/// Runs the configured solver, writes snapshots, series and manifest.json
/// under opts.out_dir and evaluates the acceptance block.
///
/// Metrics by solver (all report moment_final, the final expectation of
/// cos(theta) on the sphere, cos(2 pi x0 / period) on periodic axes and
/// x0^2 otherwise):
///   sde          walkers_final
///   fp           mass_error, clipped_mass
///   coupled      energy_drift, mass_error, clipped_mass
///   schrodinger  norm_drift, energy_drift, dispersion_error (flat free packets)
///   crosscheck   l1_final, l1_max
RunResult run(const RunConfig& c, const RunOptions& opts);

struct ConvergenceLevel {
  double dt = 0.0;
  std::vector<int> grid;
  double observable = 0.0;
  double seconds = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceLevel> levels;
  /// log2 of successive-difference ratios; orders[k] uses levels k..k+2.
  std::vector<double> orders;
  double declared_order = 0.0;
  /// The wall-clock budget stopped the study early.
  bool partial = false;
  /// Finest measured order >= declared - 0.3 and the study completed.
  bool passed = false;
  std::filesystem::path manifest;
};

/// Reruns the problem halving dt (with twice the steps, so the final time is
/// fixed) or the grid spacing per level and measures the order of moment_final.
ConvergenceReport convergence_study(const RunConfig& c, int halvings, const RunOptions& opts);

}  // namespace edyn::cli
