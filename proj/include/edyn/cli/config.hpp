#pragma once

#include "edyn/core.hpp"

#include <string>
#include <utility>
#include <vector>

namespace edyn::cli {

/// Bad config text or values. `field` is "section.key" when known and
/// `line` is 1-based (0 when the problem has no single line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string field = {}, int line = 0);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

struct ChartConfig {
  std::string name = "flat";  // flat, circle, sphere, torus, table
  double radius = 1.0;
  double pole_margin = 0.05;
  double major_radius = 2.0;
  double minor_radius = 1.0;
  // Axes of flat and table charts.
  std::vector<double> lower{-10.0};
  std::vector<double> upper{10.0};
  std::vector<std::string> topology{"periodic"};  // periodic or bounded, per axis
  // Table charts: node counts per axis and the upper-triangle metric
  // components h00, h01, ..., each with one value per table node.
  std::vector<int> table_counts;
  std::vector<std::vector<double>> table_components;

  bool operator==(const ChartConfig&) const = default;
};

struct InitialConfig {
  std::string preset = "gaussian-blob";  // gaussian-blob, uniform, plane-wave, eigenmode
  std::vector<double> center;
  double sigma = 0.1;
  /// Momentum of plane waves; optional boost of Gaussian packets.
  std::vector<double> momentum;
  int l = 1;
  std::size_t walkers = 100000;

  bool operator==(const InitialConfig&) const = default;
};

struct PotentialConfig {
  std::string preset = "zero";  // zero, harmonic, scalar-curvature
  double omega = 1.0;
  std::vector<double> center;
  double xi_R = 0.0;

  bool operator==(const PotentialConfig&) const = default;
};

struct DriftConfig {
  std::string preset = "zero";  // zero, linear
  std::vector<double> gradient;

  bool operator==(const DriftConfig&) const = default;
};

struct SolverConfig {
  std::string kind = "fp";  // sde, fp, coupled, schrodinger, crosscheck
  bool christoffel_drift = true;

  bool operator==(const SolverConfig&) const = default;
};

struct OutputConfig {
  std::string dir = "edsim-out";
  /// Snapshot every this many steps; 0 writes only the first and last.
  int snapshot_every = 0;
  std::string format = "binary";  // binary, csv, both

  bool operator==(const OutputConfig&) const = default;
};

/// One declared tolerance: the named metric must stay <= (max) or >= (min)
/// the threshold.
struct Tolerance {
  std::string metric;
  bool is_max = true;
  double threshold = 0.0;

  bool operator==(const Tolerance&) const = default;
};

struct ConvergenceConfig {
  std::string parameter = "dt";  // dt or spacing
  int halvings = 2;
  double declared_order = 1.0;
  double budget_seconds = 600.0;

  bool operator==(const ConvergenceConfig&) const = default;
};

struct RunConfig {
  ChartConfig chart;
  std::vector<double> masses{1.0};
  SimParams params;
  /// Use xi = hbar^2 / 8 instead of params.xi.
  bool xi_quantum = true;
  InitialConfig initial;
  std::vector<int> grid;
  SolverConfig solver;
  PotentialConfig potential;
  PotentialConfig curvature_potential;
  DriftConfig drift;
  OutputConfig output;
  std::vector<Tolerance> acceptance;
  ConvergenceConfig convergence;

  /// params with xi resolved.
  SimParams sim() const;

  bool operator==(const RunConfig&) const = default;
};

/// Parses INI text ("[section]" headers, "key = value" lines, ';' or '#'
/// comments). Unknown sections or keys are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Canonical text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);
/// Semantic checks (positivity, known presets, matching lengths).
void validate(const RunConfig& c);
/// parse_config then validate, with the offending line attached to
/// validation errors when the field appears in the text.
RunConfig parse_and_validate(const std::string& text);

/// Preset names by category, for list-presets.
std::vector<std::pair<std::string, std::vector<std::string>>> preset_catalogue();

}  // namespace edyn::cli
