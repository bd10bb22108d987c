#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace edyn::io {

namespace fs = std::filesystem;

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);

struct Artifact {
  std::string path;  // relative to the manifest directory
  std::string kind;  // field, wave, ensemble, series
  std::string format;  // binary or csv
  std::string role;
  double time = 0.0;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct Check {
  std::string name;
  double value = 0.0;
  std::string comparison;  // "<=" or ">="
  double threshold = 0.0;
  bool passed = false;
};

/// Run record written next to the snapshots as manifest.json.
class Manifest {
 public:
  explicit Manifest(fs::path dir) : dir_(std::move(dir)) {}

  const fs::path& dir() const { return dir_; }
  void set_config(std::string text) { config_ = std::move(text); }
  void set_solver(std::string s) { solver_ = std::move(s); }
  /// Free-form numeric parameters, echoed for downstream tools.
  void set_parameter(const std::string& key, double value);

  /// Hashes the file (which must live under dir()) and records it.
  void add(const fs::path& file, const std::string& kind, const std::string& format, const std::string& role,
           double time);
  void add_check(Check c) { checks_.push_back(std::move(c)); }

  const std::vector<Artifact>& artifacts() const { return artifacts_; }
  const std::vector<Check>& checks() const { return checks_; }
  bool all_passed() const;

  /// Writes dir()/manifest.json and returns its path.
  fs::path write() const;

 private:
  fs::path dir_;
  std::string config_;
  std::string solver_;
  std::vector<std::pair<std::string, double>> parameters_;
  std::vector<Artifact> artifacts_;
  std::vector<Check> checks_;
};

/// Library and toolchain versions recorded in manifests.
std::string version_string();

}  // namespace edyn::io
