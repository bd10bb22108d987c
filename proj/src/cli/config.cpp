#include "edyn/cli/config.hpp"

#include "edyn/io/snapshots.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace edyn::cli {

namespace pt = boost::property_tree;

ConfigError::ConfigError(const std::string& what, std::string field, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      field_(std::move(field)),
      line_(line) {}

SimParams RunConfig::sim() const {
  SimParams p = params;
  if (xi_quantum) p.xi = p.xi_quantum();
  return p;
}

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

// Where each "section.key" sits in the text, for diagnostics.
std::map<std::string, int> key_lines(const std::string& text) {
  std::map<std::string, int> out;
  std::istringstream in(text);
  std::string line, section;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      out.emplace(section, n);
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos) out.emplace(section + "." + trim(std::string_view(t).substr(0, eq)), n);
  }
  return out;
}

struct Value {
  std::string text;
  std::string field;
  int line;

  [[noreturn]] void fail(const std::string& why) const { throw ConfigError(field + ": " + why, field, line); }

  double number() const {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || end != text.data() + text.size()) fail("expected a number, got '" + text + "'");
    return v;
  }
  long long integer() const {
    long long v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || end != text.data() + text.size()) fail("expected an integer, got '" + text + "'");
    return v;
  }
  std::uint64_t unsigned_integer() const {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || end != text.data() + text.size())
      fail("expected a non-negative integer, got '" + text + "'");
    return v;
  }
  bool boolean() const {
    if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
    if (text == "false" || text == "no" || text == "off" || text == "0") return false;
    fail("expected true or false, got '" + text + "'");
  }
  std::vector<std::string> words() const {
    std::vector<std::string> out;
    if (trim(text).empty()) return out;
    std::size_t start = 0;
    for (;;) {
      const auto p = text.find(',', start);
      out.push_back(trim(std::string_view(text).substr(start, p == std::string::npos ? std::string::npos : p - start)));
      if (p == std::string::npos) break;
      start = p + 1;
    }
    return out;
  }
  std::vector<double> numbers() const {
    std::vector<double> out;
    for (const auto& w : words()) out.push_back(Value{w, field, line}.number());
    return out;
  }
  std::vector<int> integers() const {
    std::vector<int> out;
    for (const auto& w : words()) {
      const long long v = Value{w, field, line}.integer();
      if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) fail("integer out of range");
      out.push_back(static_cast<int>(v));
    }
    return out;
  }
};

using Setter = std::function<void(RunConfig&, const Value&)>;

void potential_keys(std::map<std::string, Setter>& keys, PotentialConfig RunConfig::*member) {
  keys["preset"] = [member](RunConfig& c, const Value& v) { (c.*member).preset = v.text; };
  keys["omega"] = [member](RunConfig& c, const Value& v) { (c.*member).omega = v.number(); };
  keys["center"] = [member](RunConfig& c, const Value& v) { (c.*member).center = v.numbers(); };
  keys["xi_R"] = [member](RunConfig& c, const Value& v) { (c.*member).xi_R = v.number(); };
}

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const auto table = [] {
    std::map<std::string, std::map<std::string, Setter>> s;
    auto& chart = s["chart"];
    chart["name"] = [](RunConfig& c, const Value& v) { c.chart.name = v.text; };
    chart["radius"] = [](RunConfig& c, const Value& v) { c.chart.radius = v.number(); };
    chart["pole_margin"] = [](RunConfig& c, const Value& v) { c.chart.pole_margin = v.number(); };
    chart["major_radius"] = [](RunConfig& c, const Value& v) { c.chart.major_radius = v.number(); };
    chart["minor_radius"] = [](RunConfig& c, const Value& v) { c.chart.minor_radius = v.number(); };
    chart["lower"] = [](RunConfig& c, const Value& v) { c.chart.lower = v.numbers(); };
    chart["upper"] = [](RunConfig& c, const Value& v) { c.chart.upper = v.numbers(); };
    chart["topology"] = [](RunConfig& c, const Value& v) { c.chart.topology = v.words(); };
    chart["table_counts"] = [](RunConfig& c, const Value& v) { c.chart.table_counts = v.integers(); };

    s["particles"]["masses"] = [](RunConfig& c, const Value& v) { c.masses = v.numbers(); };

    auto& params = s["params"];
    params["eta"] = [](RunConfig& c, const Value& v) { c.params.eta = v.number(); };
    params["dt"] = [](RunConfig& c, const Value& v) { c.params.dt = v.number(); };
    params["k"] = [](RunConfig& c, const Value& v) { c.params.k = v.number(); };
    params["xi"] = [](RunConfig& c, const Value& v) {
      c.xi_quantum = v.text == "quantum";
      if (!c.xi_quantum) c.params.xi = v.number();
    };
    params["seed"] = [](RunConfig& c, const Value& v) { c.params.seed = v.unsigned_integer(); };
    params["steps"] = [](RunConfig& c, const Value& v) { c.params.steps = v.integer(); };

    auto& init = s["initial"];
    init["preset"] = [](RunConfig& c, const Value& v) { c.initial.preset = v.text; };
    init["center"] = [](RunConfig& c, const Value& v) { c.initial.center = v.numbers(); };
    init["sigma"] = [](RunConfig& c, const Value& v) { c.initial.sigma = v.number(); };
    init["momentum"] = [](RunConfig& c, const Value& v) { c.initial.momentum = v.numbers(); };
    init["l"] = [](RunConfig& c, const Value& v) { c.initial.l = static_cast<int>(v.integer()); };
    init["walkers"] = [](RunConfig& c, const Value& v) { c.initial.walkers = v.unsigned_integer(); };

    s["grid"]["counts"] = [](RunConfig& c, const Value& v) { c.grid = v.integers(); };

    auto& solver = s["solver"];
    solver["kind"] = [](RunConfig& c, const Value& v) { c.solver.kind = v.text; };
    solver["christoffel_drift"] = [](RunConfig& c, const Value& v) { c.solver.christoffel_drift = v.boolean(); };

    potential_keys(s["potential"], &RunConfig::potential);
    potential_keys(s["curvature_potential"], &RunConfig::curvature_potential);

    auto& drift = s["drift"];
    drift["preset"] = [](RunConfig& c, const Value& v) { c.drift.preset = v.text; };
    drift["gradient"] = [](RunConfig& c, const Value& v) { c.drift.gradient = v.numbers(); };

    auto& out = s["output"];
    out["dir"] = [](RunConfig& c, const Value& v) { c.output.dir = v.text; };
    out["snapshot_every"] = [](RunConfig& c, const Value& v) { c.output.snapshot_every = static_cast<int>(v.integer()); };
    out["format"] = [](RunConfig& c, const Value& v) { c.output.format = v.text; };

    auto& conv = s["convergence"];
    conv["parameter"] = [](RunConfig& c, const Value& v) { c.convergence.parameter = v.text; };
    conv["halvings"] = [](RunConfig& c, const Value& v) { c.convergence.halvings = static_cast<int>(v.integer()); };
    conv["declared_order"] = [](RunConfig& c, const Value& v) { c.convergence.declared_order = v.number(); };
    conv["budget_seconds"] = [](RunConfig& c, const Value& v) { c.convergence.budget_seconds = v.number(); };
    return s;
  }();
  return table;
}

// Index of h_ab (a <= b) in the upper-triangle row-major order.
int triangle_index(int a, int b, int dim) { return a * dim - a * (a - 1) / 2 + (b - a); }

int chart_dim(const ChartConfig& c) {
  if (c.name == "circle") return 1;
  if (c.name == "sphere" || c.name == "torus") return 2;
  return static_cast<int>(c.lower.size());
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + io::format_double(v[i]);
  return s;
}

template <class T>
std::string join_plain(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  return os.str();
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

std::vector<std::pair<std::string, std::vector<std::string>>> preset_catalogue() {
  return {{"chart", {"flat", "circle", "sphere", "torus", "table"}},
          {"initial", {"gaussian-blob", "uniform", "plane-wave", "eigenmode"}},
          {"potential", {"zero", "harmonic", "scalar-curvature"}},
          {"drift", {"zero", "linear"}},
          {"solver", {"sde", "fp", "coupled", "schrodinger", "crosscheck"}},
          {"output.format", {"binary", "csv", "both"}},
          {"convergence.parameter", {"dt", "spacing"}}};
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  {
    std::istringstream in(text);
    try {
      pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError(e.message(), {}, static_cast<int>(e.line()));
    }
  }
  const auto lines = key_lines(text);
  auto line_of = [&](const std::string& k) {
    const auto it = lines.find(k);
    return it == lines.end() ? 0 : it->second;
  };

  RunConfig c;
  std::map<int, std::vector<double>> table;  // triangle-encoded (a * 8 + b)
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key '" + section + "' outside any section", section, line_of("." + section));
    if (section == "acceptance") {
      for (const auto& [key, node] : body) {
        const std::string field = section + "." + key;
        const Value v{trim(node.data()), field, line_of(field)};
        Tolerance t;
        if (key.rfind("max_", 0) == 0)
          t.is_max = true;
        else if (key.rfind("min_", 0) == 0)
          t.is_max = false;
        else
          v.fail("acceptance keys must start with max_ or min_");
        t.metric = key.substr(4);
        t.threshold = v.number();
        if (t.metric.empty()) v.fail("missing metric name");
        c.acceptance.push_back(t);
      }
      continue;
    }
    const auto sec = schema().find(section);
    if (sec == schema().end()) throw ConfigError("unknown section [" + section + "]", section, line_of(section));
    for (const auto& [key, node] : body) {
      const std::string field = section + "." + key;
      const Value v{trim(node.data()), field, line_of(field)};
      if (section == "chart" && key.size() == 3 && key[0] == 'h' && std::isdigit(static_cast<unsigned char>(key[1])) &&
          std::isdigit(static_cast<unsigned char>(key[2]))) {
        const int a = key[1] - '0', b = key[2] - '0';
        if (a > b) v.fail("metric components are given as h_ab with a <= b");
        table[a * 8 + b] = v.numbers();
        continue;
      }
      const auto k = sec->second.find(key);
      if (k == sec->second.end()) v.fail("unknown key");
      k->second(c, v);
    }
  }
  if (!table.empty()) {
    const int d = chart_dim(c.chart);
    c.chart.table_components.assign(static_cast<std::size_t>(d * (d + 1) / 2), {});
    for (auto& [code, values] : table) {
      const int a = code / 8, b = code % 8;
      if (b >= d) throw ConfigError("chart.h" + std::to_string(a) + std::to_string(b) + ": index exceeds the chart dimension",
                                    "chart", line_of("chart.h" + std::to_string(a) + std::to_string(b)));
      c.chart.table_components[static_cast<std::size_t>(triangle_index(a, b, d))] = std::move(values);
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  auto num = [](double v) { return io::format_double(v); };
  os << "[chart]\nname = " << c.chart.name << "\nradius = " << num(c.chart.radius)
     << "\npole_margin = " << num(c.chart.pole_margin) << "\nmajor_radius = " << num(c.chart.major_radius)
     << "\nminor_radius = " << num(c.chart.minor_radius) << "\nlower = " << join(c.chart.lower)
     << "\nupper = " << join(c.chart.upper) << "\ntopology = " << join_plain(c.chart.topology)
     << "\ntable_counts = " << join_plain(c.chart.table_counts) << "\n";
  const int d = chart_dim(c.chart);
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      const auto idx = static_cast<std::size_t>(triangle_index(a, b, d));
      if (idx < c.chart.table_components.size())
        os << "h" << a << b << " = " << join(c.chart.table_components[idx]) << "\n";
    }
  os << "\n[particles]\nmasses = " << join(c.masses) << "\n";
  os << "\n[params]\neta = " << num(c.params.eta) << "\ndt = " << num(c.params.dt) << "\nk = " << num(c.params.k)
     << "\nxi = " << (c.xi_quantum ? std::string("quantum") : num(c.params.xi)) << "\nseed = " << c.params.seed
     << "\nsteps = " << c.params.steps << "\n";
  os << "\n[initial]\npreset = " << c.initial.preset << "\ncenter = " << join(c.initial.center)
     << "\nsigma = " << num(c.initial.sigma) << "\nmomentum = " << join(c.initial.momentum) << "\nl = " << c.initial.l
     << "\nwalkers = " << c.initial.walkers << "\n";
  os << "\n[grid]\ncounts = " << join_plain(c.grid) << "\n";
  os << "\n[solver]\nkind = " << c.solver.kind << "\nchristoffel_drift = " << (c.solver.christoffel_drift ? "true" : "false")
     << "\n";
  for (const auto& [name, pot] : {std::pair{"potential", &c.potential}, std::pair{"curvature_potential", &c.curvature_potential}})
    os << "\n[" << name << "]\npreset = " << pot->preset << "\nomega = " << num(pot->omega) << "\ncenter = " << join(pot->center)
       << "\nxi_R = " << num(pot->xi_R) << "\n";
  os << "\n[drift]\npreset = " << c.drift.preset << "\ngradient = " << join(c.drift.gradient) << "\n";
  os << "\n[output]\ndir = " << c.output.dir << "\nsnapshot_every = " << c.output.snapshot_every
     << "\nformat = " << c.output.format << "\n";
  os << "\n[acceptance]\n";
  for (const auto& t : c.acceptance) os << (t.is_max ? "max_" : "min_") << t.metric << " = " << num(t.threshold) << "\n";
  os << "\n[convergence]\nparameter = " << c.convergence.parameter << "\nhalvings = " << c.convergence.halvings
     << "\ndeclared_order = " << num(c.convergence.declared_order)
     << "\nbudget_seconds = " << num(c.convergence.budget_seconds) << "\n";
  return os.str();
}

void validate(const RunConfig& c) {
  auto need = [](bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw ConfigError(field + ": " + why, field);
  };
  auto known = [&](const std::string& value, const std::string& category, const std::string& field) {
    for (const auto& [cat, names] : preset_catalogue())
      if (cat == category) need(contains(names, value), field, "unknown preset '" + value + "'");
  };

  known(c.chart.name, "chart", "chart.name");
  need(c.chart.radius > 0, "chart.radius", "must be positive");
  need(c.chart.pole_margin >= 0 && c.chart.pole_margin < std::numbers::pi / 2, "chart.pole_margin",
       "must lie in [0, pi/2)");
  need(c.chart.major_radius > c.chart.minor_radius && c.chart.minor_radius > 0, "chart.minor_radius",
       "torus radii must satisfy 0 < minor < major");
  const int d = chart_dim(c.chart);
  if (c.chart.name == "flat" || c.chart.name == "table") {
    need(d >= 1 && d <= kMaxChartDim, "chart.lower", "flat and table charts need 1 to 3 axes");
    need(c.chart.upper.size() == c.chart.lower.size(), "chart.upper", "needs one entry per axis");
    need(c.chart.topology.size() == c.chart.lower.size(), "chart.topology", "needs one entry per axis");
    for (std::size_t a = 0; a < c.chart.lower.size(); ++a) {
      need(c.chart.lower[a] < c.chart.upper[a], "chart.upper", "each upper bound must exceed its lower bound");
      need(c.chart.topology[a] == "periodic" || c.chart.topology[a] == "bounded", "chart.topology",
           "axes are periodic or bounded");
    }
  }
  if (c.chart.name == "table") {
    need(static_cast<int>(c.chart.table_counts.size()) == d, "chart.table_counts", "needs one count per axis");
    std::size_t nodes = 1;
    for (int n : c.chart.table_counts) {
      need(n >= 2, "chart.table_counts", "each axis needs at least 2 table nodes");
      nodes *= static_cast<std::size_t>(n);
    }
    need(c.chart.table_components.size() == static_cast<std::size_t>(d * (d + 1) / 2), "chart.h00",
         "all upper-triangle components h_ab are required");
    for (const auto& comp : c.chart.table_components)
      need(comp.size() == nodes, "chart.h00", "each component needs one value per table node");
  }

  need(!c.masses.empty(), "particles.masses", "at least one particle is required");
  for (double m : c.masses) need(m > 0, "particles.masses", "masses must be positive");
  const auto n = static_cast<std::size_t>(d) * c.masses.size();

  need(c.params.eta > 0, "params.eta", "must be positive");
  need(c.params.dt > 0, "params.dt", "must be positive");
  need(c.params.k > 0, "params.k", "must be positive");
  need(c.xi_quantum || c.params.xi >= 0, "params.xi", "must be non-negative");
  need(c.params.steps >= 0, "params.steps", "must be non-negative");

  known(c.solver.kind, "solver", "solver.kind");
  known(c.initial.preset, "initial", "initial.preset");
  need(c.initial.sigma > 0, "initial.sigma", "must be positive");
  if (c.initial.preset == "gaussian-blob") need(c.initial.center.size() == n, "initial.center", "needs one entry per coordinate");
  if (c.initial.preset == "plane-wave" || !c.initial.momentum.empty())
    need(c.initial.momentum.size() == n, "initial.momentum", "needs one entry per coordinate");
  need(c.initial.l >= 0, "initial.l", "must be non-negative");
  const bool walkers = c.solver.kind == "sde" || c.solver.kind == "crosscheck";
  if (walkers) need(c.initial.walkers >= 1, "initial.walkers", "must be positive");

  const bool grid_solver = c.solver.kind != "sde";
  if (grid_solver || !c.grid.empty()) {
    need(c.grid.size() == n, "grid.counts", "needs one count per coordinate");
    need(n <= 2, "grid.counts", "grid solvers support at most two coordinates");
    for (int g : c.grid) need(g >= 8, "grid.counts", "each axis needs at least 8 nodes");
  }

  for (const auto& [name, pot] : {std::pair{"potential", &c.potential}, std::pair{"curvature_potential", &c.curvature_potential}}) {
    const std::string s = name;
    known(pot->preset, "potential", s + ".preset");
    if (pot->preset == "harmonic") {
      need(pot->omega > 0, s + ".omega", "must be positive");
      need(pot->center.size() == n, s + ".center", "needs one entry per coordinate");
    }
  }
  known(c.drift.preset, "drift", "drift.preset");
  if (c.drift.preset == "linear") need(c.drift.gradient.size() == n, "drift.gradient", "needs one entry per coordinate");

  need(!c.output.dir.empty(), "output.dir", "must not be empty");
  need(c.output.snapshot_every >= 0, "output.snapshot_every", "must be non-negative");
  known(c.output.format, "output.format", "output.format");

  for (const auto& t : c.acceptance)
    need(std::isfinite(t.threshold), "acceptance." + std::string(t.is_max ? "max_" : "min_") + t.metric, "must be finite");

  known(c.convergence.parameter, "convergence.parameter", "convergence.parameter");
  need(c.convergence.halvings >= 2, "convergence.halvings", "must be at least 2");
  need(c.convergence.declared_order > 0, "convergence.declared_order", "must be positive");
  need(c.convergence.budget_seconds > 0, "convergence.budget_seconds", "must be positive");
}

RunConfig parse_and_validate(const std::string& text) {
  RunConfig c = parse_config(text);
  try {
    validate(c);
  } catch (const ConfigError& e) {
    const auto lines = key_lines(text);
    const auto it = lines.find(e.field());
    if (it == lines.end()) throw;
    throw ConfigError(e.what(), e.field(), it->second);
  }
  return c;
}

}  // namespace edyn::cli
