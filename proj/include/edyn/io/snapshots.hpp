#pragma once

#include "edyn/geometry/grid.hpp"
#include "edyn/schrodinger/wave.hpp"
#include "edyn/sde/walkers.hpp"

#include <filesystem>
#include <string>
#include <vector>

// Snapshot file formats. All binary integers and doubles are little-endian
// regardless of host byte order.
//
// Grid snapshot (field or wave), magic "EDFLD001":
//   u32 components   1 for real fields, 2 for waves (interleaved re, im)
//   u32 role length, role bytes (UTF-8, e.g. "density", "wave")
//   f64 time
//   u32 ndim, then per axis: u32 count, u32 topology (0 periodic, 1 bounded),
//       f64 lower, f64 spacing
//   f64 values[size * components], nodes row-major with axis 0 slowest
//
// Ensemble snapshot, magic "EDENS001":
//   u32 n, u64 W, f64 time, u64 seed, u64 steps,
//   u32 chart-name length, name bytes,
//   f64 positions[W * n], walker-major
//
// Text variants carry the same header as "# key=value" lines followed by
// comma-separated rows; doubles are printed with 17 significant digits so
// they read back exactly.

namespace edyn::io {

namespace fs = std::filesystem;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid snapshot payload as stored on disk.
struct GridSnapshot {
  geometry::GridSpec grid;
  std::string role;
  double time = 0.0;
  int components = 1;
  std::vector<double> values;
};

void write_field_binary(const fs::path& path, const geometry::GridField& f);
void write_field_csv(const fs::path& path, const geometry::GridField& f);
void write_wave_binary(const fs::path& path, const schrodinger::WaveField& psi);
void write_wave_csv(const fs::path& path, const schrodinger::WaveField& psi);

GridSnapshot read_grid_binary(const fs::path& path);
GridSnapshot read_grid_csv(const fs::path& path);
geometry::GridField to_field(const GridSnapshot& s);
schrodinger::WaveField to_wave(const GridSnapshot& s);

void write_ensemble_binary(const fs::path& path, const sde::WalkerEnsemble& e);
void write_ensemble_csv(const fs::path& path, const sde::WalkerEnsemble& e);
sde::WalkerEnsemble read_ensemble_binary(const fs::path& path);
sde::WalkerEnsemble read_ensemble_csv(const fs::path& path);

/// Plain table: "# name=value" header lines, one column-name row, data rows.
struct Series {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_series_csv(const fs::path& path, const Series& s);
Series read_series_csv(const fs::path& path);

/// %.17g formatting, which round-trips every finite double.
std::string format_double(double v);

}  // namespace edyn::io
