#include "edyn/io/snapshots.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace edyn::io {

using geometry::GridAxis;
using geometry::GridField;
using geometry::GridSpec;
using geometry::Topology;

namespace {

constexpr char kFieldMagic[8] = {'E', 'D', 'F', 'L', 'D', '0', '0', '1'};
constexpr char kEnsembleMagic[8] = {'E', 'D', 'E', 'N', 'S', '0', '0', '1'};

class Writer {
 public:
  explicit Writer(const fs::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("write failed");
  }

 private:
  void le(std::uint64_t v, int n) {
    char b[8];
    for (int i = 0; i < n; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    bytes(b, static_cast<std::size_t>(n));
  }
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const fs::path& path) : in_(path, std::ios::binary), path_(path.string()) {
    if (!in_) throw std::runtime_error("cannot open " + path_);
  }
  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw FormatError(path_ + ": truncated file");
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(le(8)); }
  std::string str() {
    const std::uint32_t n = u32();
    if (n > (1u << 20)) throw FormatError(path_ + ": implausible string length");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  void magic(const char (&want)[8]) {
    char got[8];
    bytes(got, 8);
    if (!std::equal(got, got + 8, want)) throw FormatError(path_ + ": bad magic");
  }
  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) throw FormatError(path_ + ": trailing bytes");
  }
  const std::string& path() const { return path_; }

 private:
  std::uint64_t le(int n) {
    unsigned char b[8];
    bytes(b, static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  std::ifstream in_;
  std::string path_;
};

std::uint32_t topology_code(Topology t) { return t == Topology::periodic ? 0u : 1u; }

Topology topology_from(std::uint32_t c, const std::string& where) {
  if (c == 0) return Topology::periodic;
  if (c == 1) return Topology::bounded;
  throw FormatError(where + ": unknown topology code " + std::to_string(c));
}

void write_grid_binary(const fs::path& path, const GridSpec& g, const std::string& role, double time,
                       int components, const double* values) {
  Writer w(path);
  w.bytes(kFieldMagic, 8);
  w.u32(static_cast<std::uint32_t>(components));
  w.str(role);
  w.f64(time);
  w.u32(static_cast<std::uint32_t>(g.dim()));
  for (const auto& a : g.axes()) {
    w.u32(static_cast<std::uint32_t>(a.count));
    w.u32(topology_code(a.topology));
    w.f64(a.lower);
    w.f64(a.spacing);
  }
  const std::size_t n = g.size() * static_cast<std::size_t>(components);
  for (std::size_t i = 0; i < n; ++i) w.f64(values[i]);
  w.close();
}

std::string axis_text(const GridAxis& a) {
  return std::to_string(a.count) + "," + (a.topology == Topology::periodic ? "periodic" : "bounded") + "," +
         format_double(a.lower) + "," + format_double(a.spacing);
}

void write_grid_csv(const fs::path& path, const GridSpec& g, const std::string& role, double time, int components,
                    const double* values) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "# edyn grid snapshot\n";
  out << "# role=" << role << "\n# time=" << format_double(time) << "\n# components=" << components << "\n";
  for (const auto& a : g.axes()) out << "# axis=" << axis_text(a) << "\n";
  for (int a = 0; a < g.dim(); ++a) out << "x" << a << ",";
  out << (components == 1 ? "value" : "re,im") << "\n";
  std::vector<double> x(static_cast<std::size_t>(g.dim()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.node(i, x);
    for (double v : x) out << format_double(v) << ",";
    for (int c = 0; c < components; ++c)
      out << format_double(values[i * static_cast<std::size_t>(components) + static_cast<std::size_t>(c)])
          << (c + 1 < components ? "," : "\n");
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

double parse_double(std::string_view s, const std::string& where) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw FormatError(where + ": not a number: '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t p = line.find(sep, start);
    out.push_back(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

// Header lines "# key=value" in file order, then the remaining lines.
struct TextFile {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> lines;
  std::vector<int> line_numbers;
};

TextFile read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  TextFile t;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::size_t k = 1;
      while (k < eq && line[k] == ' ') ++k;
      t.meta.emplace_back(line.substr(k, eq - k), line.substr(eq + 1));
      continue;
    }
    t.lines.push_back(line);
    t.line_numbers.push_back(number);
  }
  return t;
}

const std::string& meta_value(const TextFile& t, const std::string& key, const fs::path& path) {
  for (const auto& [k, v] : t.meta)
    if (k == key) return v;
  throw FormatError(path.string() + ": missing header '" + key + "'");
}

std::uint64_t parse_u64(const std::string& s, const std::string& where) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw FormatError(where + ": not an integer: '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_field_binary(const fs::path& path, const GridField& f) {
  write_grid_binary(path, f.grid, geometry::to_string(f.role), f.time, 1, f.values.data());
}

void write_field_csv(const fs::path& path, const GridField& f) {
  write_grid_csv(path, f.grid, geometry::to_string(f.role), f.time, 1, f.values.data());
}

void write_wave_binary(const fs::path& path, const schrodinger::WaveField& psi) {
  write_grid_binary(path, psi.grid, "wave", psi.time, 2, reinterpret_cast<const double*>(psi.values.data()));
}

void write_wave_csv(const fs::path& path, const schrodinger::WaveField& psi) {
  write_grid_csv(path, psi.grid, "wave", psi.time, 2, reinterpret_cast<const double*>(psi.values.data()));
}

GridSnapshot read_grid_binary(const fs::path& path) {
  Reader r(path);
  r.magic(kFieldMagic);
  GridSnapshot s;
  s.components = static_cast<int>(r.u32());
  if (s.components != 1 && s.components != 2) throw FormatError(r.path() + ": unsupported component count");
  s.role = r.str();
  s.time = r.f64();
  const std::uint32_t dim = r.u32();
  if (dim == 0 || dim > 8) throw FormatError(r.path() + ": implausible grid dimension");
  std::vector<GridAxis> axes(dim);
  for (auto& a : axes) {
    a.count = static_cast<int>(r.u32());
    a.topology = topology_from(r.u32(), r.path());
    a.lower = r.f64();
    a.spacing = r.f64();
  }
  s.grid = GridSpec(axes);
  s.values.resize(s.grid.size() * static_cast<std::size_t>(s.components));
  for (auto& v : s.values) v = r.f64();
  r.expect_end();
  return s;
}

GridSnapshot read_grid_csv(const fs::path& path) {
  const TextFile t = read_text(path);
  GridSnapshot s;
  const std::string where = path.string();
  s.role = meta_value(t, "role", path);
  s.time = parse_double(meta_value(t, "time", path), where);
  s.components = static_cast<int>(parse_u64(meta_value(t, "components", path), where));
  std::vector<GridAxis> axes;
  for (const auto& [k, v] : t.meta) {
    if (k != "axis") continue;
    const auto parts = split(v);
    if (parts.size() != 4) throw FormatError(where + ": malformed axis header '" + v + "'");
    GridAxis a;
    a.count = static_cast<int>(parse_u64(std::string(parts[0]), where));
    if (parts[1] == "periodic")
      a.topology = Topology::periodic;
    else if (parts[1] == "bounded")
      a.topology = Topology::bounded;
    else
      throw FormatError(where + ": unknown topology '" + std::string(parts[1]) + "'");
    a.lower = parse_double(parts[2], where);
    a.spacing = parse_double(parts[3], where);
    axes.push_back(a);
  }
  if (axes.empty()) throw FormatError(where + ": no axis headers");
  s.grid = GridSpec(axes);
  const std::size_t dim = axes.size(), comp = static_cast<std::size_t>(s.components);
  if (t.lines.size() != s.grid.size() + 1)
    throw FormatError(where + ": expected " + std::to_string(s.grid.size()) + " data rows");
  s.values.reserve(s.grid.size() * comp);
  for (std::size_t i = 1; i < t.lines.size(); ++i) {
    const auto cells = split(t.lines[i]);
    const std::string at = where + ":" + std::to_string(t.line_numbers[i]);
    if (cells.size() != dim + comp) throw FormatError(at + ": wrong column count");
    for (std::size_t c = 0; c < comp; ++c) s.values.push_back(parse_double(cells[dim + c], at));
  }
  return s;
}

GridField to_field(const GridSnapshot& s) {
  if (s.components != 1) throw FormatError("snapshot holds a complex field");
  GridField f(s.grid, geometry::field_role_from_string(s.role));
  f.values = s.values;
  f.time = s.time;
  return f;
}

schrodinger::WaveField to_wave(const GridSnapshot& s) {
  if (s.components != 2) throw FormatError("snapshot does not hold a complex field");
  schrodinger::WaveField w(s.grid);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = {s.values[2 * i], s.values[2 * i + 1]};
  w.time = s.time;
  return w;
}

void write_ensemble_binary(const fs::path& path, const sde::WalkerEnsemble& e) {
  Writer w(path);
  w.bytes(kEnsembleMagic, 8);
  w.u32(static_cast<std::uint32_t>(e.dim));
  w.u64(e.count());
  w.f64(e.time);
  w.u64(e.seed);
  w.u64(e.steps);
  w.str(e.chart);
  for (double v : e.positions) w.f64(v);
  w.close();
}

void write_ensemble_csv(const fs::path& path, const sde::WalkerEnsemble& e) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "# edyn ensemble snapshot\n# n=" << e.dim << "\n# W=" << e.count() << "\n# time=" << format_double(e.time)
      << "\n# chart=" << e.chart << "\n# seed=" << e.seed << "\n# steps=" << e.steps << "\n";
  for (int a = 0; a < e.dim; ++a) out << "x" << a << (a + 1 < e.dim ? "," : "\n");
  for (std::size_t k = 0; k < e.count(); ++k) {
    const auto w = e.walker(k);
    for (int a = 0; a < e.dim; ++a) out << format_double(w[static_cast<std::size_t>(a)]) << (a + 1 < e.dim ? "," : "\n");
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

sde::WalkerEnsemble read_ensemble_binary(const fs::path& path) {
  Reader r(path);
  r.magic(kEnsembleMagic);
  sde::WalkerEnsemble e;
  e.dim = static_cast<int>(r.u32());
  const std::uint64_t W = r.u64();
  e.time = r.f64();
  e.seed = r.u64();
  e.steps = r.u64();
  e.chart = r.str();
  if (e.dim <= 0 || W > (std::uint64_t{1} << 40)) throw FormatError(r.path() + ": implausible header");
  e.positions.resize(W * static_cast<std::uint64_t>(e.dim));
  for (auto& v : e.positions) v = r.f64();
  r.expect_end();
  return e;
}

sde::WalkerEnsemble read_ensemble_csv(const fs::path& path) {
  const TextFile t = read_text(path);
  const std::string where = path.string();
  sde::WalkerEnsemble e;
  e.dim = static_cast<int>(parse_u64(meta_value(t, "n", path), where));
  const std::uint64_t W = parse_u64(meta_value(t, "W", path), where);
  e.time = parse_double(meta_value(t, "time", path), where);
  e.chart = meta_value(t, "chart", path);
  e.seed = parse_u64(meta_value(t, "seed", path), where);
  e.steps = parse_u64(meta_value(t, "steps", path), where);
  if (t.lines.size() != W + 1) throw FormatError(where + ": expected " + std::to_string(W) + " walker rows");
  e.positions.reserve(W * static_cast<std::uint64_t>(e.dim));
  for (std::size_t i = 1; i < t.lines.size(); ++i) {
    const auto cells = split(t.lines[i]);
    const std::string at = where + ":" + std::to_string(t.line_numbers[i]);
    if (cells.size() != static_cast<std::size_t>(e.dim)) throw FormatError(at + ": wrong column count");
    for (auto c : cells) e.positions.push_back(parse_double(c, at));
  }
  return e;
}

void write_series_csv(const fs::path& path, const Series& s) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const auto& [k, v] : s.meta) out << "# " << k << "=" << v << "\n";
  for (std::size_t c = 0; c < s.columns.size(); ++c) out << s.columns[c] << (c + 1 < s.columns.size() ? "," : "\n");
  for (const auto& row : s.rows) {
    if (row.size() != s.columns.size()) throw std::invalid_argument("series row width does not match the columns");
    for (std::size_t c = 0; c < row.size(); ++c) out << format_double(row[c]) << (c + 1 < row.size() ? "," : "\n");
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Series read_series_csv(const fs::path& path) {
  const TextFile t = read_text(path);
  Series s;
  s.meta = t.meta;
  if (t.lines.empty()) throw FormatError(path.string() + ": missing column row");
  for (auto c : split(t.lines[0])) s.columns.emplace_back(c);
  for (std::size_t i = 1; i < t.lines.size(); ++i) {
    const auto cells = split(t.lines[i]);
    const std::string at = path.string() + ":" + std::to_string(t.line_numbers[i]);
    if (cells.size() != s.columns.size()) throw FormatError(at + ": wrong column count");
    std::vector<double> row;
    for (auto c : cells) row.push_back(parse_double(c, at));
    s.rows.push_back(std::move(row));
  }
  return s;
}

}  // namespace edyn::io
