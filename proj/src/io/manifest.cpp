#include "edyn/io/manifest.hpp"

#include <Eigen/Core>
#include <json.hpp>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include <algorithm>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace edyn::io {

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

void Manifest::set_parameter(const std::string& key, double value) {
  for (auto& [k, v] : parameters_)
    if (k == key) {
      v = value;
      return;
    }
  parameters_.emplace_back(key, value);
}

void Manifest::add(const fs::path& file, const std::string& kind, const std::string& format,
                   const std::string& role, double time) {
  Artifact a;
  a.path = fs::relative(file, dir_).generic_string();
  a.kind = kind;
  a.format = format;
  a.role = role;
  a.time = time;
  a.sha256 = sha256_file(file);
  a.bytes = fs::file_size(file);
  artifacts_.push_back(std::move(a));
}

bool Manifest::all_passed() const {
  return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.passed; });
}

fs::path Manifest::write() const {
  nlohmann::ordered_json j;
  j["format"] = "edyn-manifest/1";
  j["versions"] = version_string();
  j["solver"] = solver_;
  j["config"] = config_;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : parameters_) params[k] = v;
  j["parameters"] = params;
  j["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& a : artifacts_)
    j["artifacts"].push_back({{"path", a.path},
                              {"kind", a.kind},
                              {"format", a.format},
                              {"role", a.role},
                              {"time", a.time},
                              {"sha256", a.sha256},
                              {"bytes", a.bytes}});
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks_)
    j["checks"].push_back({{"name", c.name},
                           {"value", c.value},
                           {"comparison", c.comparison},
                           {"threshold", c.threshold},
                           {"passed", c.passed}});
  j["status"] = all_passed() ? "pass" : "fail";
  const fs::path out = dir_ / "manifest.json";
  std::ofstream f(out, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + out.string());
  f << j.dump(2) << "\n";
  return out;
}

std::string version_string() {
  return "edyn 0.1.0; Eigen " + std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
         "." + std::to_string(EIGEN_MINOR_VERSION) + "; " + OPENSSL_VERSION_TEXT + "; " +
#if defined(__clang__)
         "clang " __clang_version__;
#elif defined(__GNUC__)
         "gcc " __VERSION__;
#else
         "unknown compiler";
#endif
}

}  // namespace edyn::io
