#include "edyn/cli/drivers.hpp"

#include "edyn/io/snapshots.hpp"
#include "edyn/pde/fokker_planck.hpp"
#include "edyn/pde/hamilton_jacobi.hpp"
#include "edyn/schrodinger/wave.hpp"
#include "edyn/sde/walkers.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>

namespace edyn::cli {

using geometry::ConfigurationSpace;
using geometry::FieldRole;
using geometry::GridField;
using geometry::GridGeometry;
using geometry::Topology;
namespace fs = std::filesystem;

geometry::ManifoldChart build_chart(const ChartConfig& c) {
  if (c.name == "circle") return geometry::circle_chart(c.radius);
  if (c.name == "sphere") return geometry::sphere_chart(c.radius, c.pole_margin);
  if (c.name == "torus") return geometry::torus_chart(c.major_radius, c.minor_radius);
  std::vector<geometry::Axis> axes;
  for (std::size_t a = 0; a < c.lower.size(); ++a)
    axes.push_back({c.lower[a], c.upper[a], c.topology[a] == "periodic" ? Topology::periodic : Topology::bounded, 0.0});
  if (c.name == "flat") return geometry::flat_chart(axes);
  if (c.name == "table") return geometry::table_chart({axes, c.table_counts, c.table_components});
  throw ConfigError("chart.name: unknown preset '" + c.name + "'", "chart.name");
}

ConfigurationSpace build_space(const RunConfig& c) { return ConfigurationSpace(build_chart(c.chart), c.masses); }

double RunResult::metric(const std::string& name) const {
  for (const auto& [k, v] : metrics)
    if (k == name) return v;
  throw std::out_of_range("metric '" + name + "' was not produced");
}

namespace {

constexpr double kPi = std::numbers::pi;

std::span<const double> as_span(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

// Scalar observable on the first coordinate, smooth on every built-in chart.
double moment_function(const ConfigurationSpace& cs, double x0) {
  const auto& a = cs.chart().axis(0);
  if (cs.chart().name() == "sphere") return std::cos(x0);
  if (a.topology == Topology::periodic) return std::cos(2.0 * kPi * (x0 - a.lower) / a.period());
  return x0 * x0;
}

double grid_moment(const GridGeometry& geo, std::span<const double> rho) {
  std::vector<double> f(geo.size());
  for (std::size_t i = 0; i < geo.size(); ++i) f[i] = rho[i] * moment_function(geo.space(), geo.grid().node(i)[0]);
  return geo.integrate(f);
}

double walker_moment(const sde::WalkerEnsemble& e, const ConfigurationSpace& cs) {
  double s = 0.0;
  for (std::size_t k = 0; k < e.count(); ++k) s += moment_function(cs, e.walker(k)[0]);
  return e.count() ? s / static_cast<double>(e.count()) : 0.0;
}

std::string step_stem(const std::string& what, std::int64_t step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%08lld", what.c_str(), static_cast<long long>(step));
  return buf;
}

class Emitter {
 public:
  Emitter(const RunConfig& c, io::Manifest* m) : c_(c), m_(m) {
    if (m_) fs::create_directories(m_->dir() / "snapshots");
  }

  bool enabled() const { return m_ != nullptr; }

  void field(const std::string& stem, const GridField& f) {
    if (!m_) return;
    const std::string role = geometry::to_string(f.role);
    if (binary()) {
      const auto p = m_->dir() / "snapshots" / (stem + ".bin");
      io::write_field_binary(p, f);
      m_->add(p, "field", "binary", role, f.time);
    }
    if (csv()) {
      const auto p = m_->dir() / "snapshots" / (stem + ".csv");
      io::write_field_csv(p, f);
      m_->add(p, "field", "csv", role, f.time);
    }
  }

  void wave(const std::string& stem, const schrodinger::WaveField& w) {
    if (!m_) return;
    if (binary()) {
      const auto p = m_->dir() / "snapshots" / (stem + ".bin");
      io::write_wave_binary(p, w);
      m_->add(p, "wave", "binary", "wave", w.time);
    }
    if (csv()) {
      const auto p = m_->dir() / "snapshots" / (stem + ".csv");
      io::write_wave_csv(p, w);
      m_->add(p, "wave", "csv", "wave", w.time);
    }
  }

  void ensemble(const std::string& stem, const sde::WalkerEnsemble& e) {
    if (!m_) return;
    if (binary()) {
      const auto p = m_->dir() / "snapshots" / (stem + ".bin");
      io::write_ensemble_binary(p, e);
      m_->add(p, "ensemble", "binary", "walkers", e.time);
    }
    if (csv()) {
      const auto p = m_->dir() / "snapshots" / (stem + ".csv");
      io::write_ensemble_csv(p, e);
      m_->add(p, "ensemble", "csv", "walkers", e.time);
    }
  }

  void series(const std::string& name, const io::Series& s, double time) {
    if (!m_) return;
    const auto p = m_->dir() / (name + ".csv");
    io::write_series_csv(p, s);
    m_->add(p, "series", "csv", name, time);
  }

  bool due(std::int64_t step) const {
    const std::int64_t total = c_.params.steps;
    const int every = c_.output.snapshot_every;
    return step == 0 || step == total || (every > 0 && step % every == 0);
  }

 private:
  bool binary() const { return c_.output.format != "csv"; }
  bool csv() const { return c_.output.format != "binary"; }
  const RunConfig& c_;
  io::Manifest* m_;
};

struct Metrics {
  std::vector<std::pair<std::string, double>> values;
  void set(const std::string& k, double v) {
    for (auto& [name, old] : values)
      if (name == k) {
        old = v;
        return;
      }
    values.emplace_back(k, v);
  }
};

struct Problem {
  const RunConfig& c;
  SimParams p;
  ConfigurationSpace cs;
  std::optional<GridGeometry> geo;
  std::ostream* log;

  Problem(const RunConfig& cfg, std::ostream* l) : c(cfg), p(cfg.sim()), cs(build_space(cfg)), log(l) {
    if (!c.grid.empty()) geo.emplace(cs, geometry::make_grid(cs, c.grid));
  }

  const GridGeometry& grid() const {
    if (!geo) throw ConfigError("grid.counts: this solver needs a grid", "grid.counts");
    return *geo;
  }

  void say(const std::string& s) const {
    if (log) *log << s << "\n";
  }

  // Mode function of the eigenmode preset on the first coordinate.
  double mode(std::span<const double> x) const {
    const auto& a = cs.chart().axis(0);
    const int l = c.initial.l;
    if (cs.chart().name() == "sphere") return std::legendre(static_cast<unsigned>(l), std::cos(x[0]));
    if (a.topology == Topology::periodic) return std::cos(2.0 * kPi * l * (x[0] - a.lower) / a.period());
    throw ConfigError("initial.preset: eigenmode needs a sphere or a periodic first axis", "initial.preset");
  }

  GridField initial_density() const {
    const auto& g = grid();
    const auto& pre = c.initial.preset;
    if (pre == "gaussian-blob") return sde::gaussian_blob_density(cs, g.grid(), c.initial.center, c.initial.sigma);
    GridField rho(g.grid(), FieldRole::density, 1.0);
    if (pre == "eigenmode")
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double m = mode(as_span(g.grid().node(i)));
        rho[i] = m * m;
      }
    const double mass = g.integrate(rho.values);
    for (auto& v : rho.values) v /= mass;
    return rho;
  }

  GridField initial_phase() const {
    const auto& g = grid();
    GridField Phi(g.grid(), FieldRole::phase, 0.0);
    if (c.initial.momentum.empty()) return Phi;
    std::vector<double> origin(static_cast<std::size_t>(cs.dim()), 0.0);
    if (c.initial.preset == "gaussian-blob") origin = c.initial.center;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Vec x = g.grid().node(i);
      // Plane waves use raw coordinates so that compatible momenta stay
      // single-valued across periodic cuts; packets use minimal images.
      const Vec dx = c.initial.preset == "gaussian-blob" ? cs.displacement(origin, as_span(x)) : x;
      double s = 0.0;
      for (int a = 0; a < cs.dim(); ++a) s += c.initial.momentum[static_cast<std::size_t>(a)] * dx[a];
      Phi[i] = s;
    }
    return Phi;
  }

  sde::WalkerEnsemble initial_walkers() const {
    const auto& pre = c.initial.preset;
    if (pre == "gaussian-blob") return sde::gaussian_blob(cs, c.initial.center, c.initial.sigma, c.initial.walkers, p.seed);
    if (pre == "uniform" || pre == "plane-wave") return sde::uniform_measure(cs, c.initial.walkers, p.seed);
    throw ConfigError("initial.preset: '" + pre + "' is not available for walker solvers", "initial.preset");
  }

  std::vector<double> potential_values(const PotentialConfig& pc) const {
    if (pc.preset == "zero") return {};
    if (pc.preset == "harmonic") return pde::harmonic_potential(grid(), pc.omega, pc.center).values;
    return pde::curvature_potential(grid(), pc.xi_R).values;
  }

  pde::Potentials potentials() const { return {potential_values(c.potential), potential_values(c.curvature_potential)}; }

  sde::DriftPotential walker_drift() const {
    if (c.drift.preset == "linear") return sde::DriftPotential::linear(c.drift.gradient);
    return sde::DriftPotential::zero();
  }

  pde::Drive grid_drive() const {
    if (c.drift.preset != "linear") return pde::Drive::diffusion();
    const auto& g = grid();
    std::vector<double> phi(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Vec x = g.grid().node(i);
      double s = 0.0;
      for (int a = 0; a < cs.dim(); ++a) s += c.drift.gradient[static_cast<std::size_t>(a)] * x[a];
      phi[i] = s;
    }
    return pde::Drive::potential(std::move(phi));
  }
};

void run_sde(Problem& pr, Emitter& out, Metrics& m) {
  const auto& c = pr.c;
  sde::WalkerEnsemble ens = pr.initial_walkers();
  const auto phi = pr.walker_drift();
  const sde::StepOptions opts{c.solver.christoffel_drift};
  io::Series series{{{"solver", "sde"}}, {"time", "moment"}, {}};
  for (std::int64_t step = 0;; ++step) {
    if (out.due(step)) {
      out.ensemble(step_stem("walkers", step), ens);
      if (pr.geo) out.field(step_stem("walker_density", step), sde::estimate_density(ens, pr.cs, pr.geo->grid()));
      series.rows.push_back({ens.time, walker_moment(ens, pr.cs)});
    }
    if (step == c.params.steps) break;
    sde::sample_step(ens, pr.cs, phi, pr.p, opts);
  }
  out.series("moments", series, ens.time);
  m.set("walkers_final", static_cast<double>(ens.count()));
  m.set("moment_final", walker_moment(ens, pr.cs));
}

void run_fp(Problem& pr, Emitter& out, Metrics& m) {
  const auto& geo = pr.grid();
  GridField rho = pr.initial_density();
  const auto drive = pr.grid_drive();
  double clipped = 0.0, mass_error = 0.0;
  io::Series series{{{"solver", "fp"}}, {"time", "mass", "moment"}, {}};
  for (std::int64_t step = 0;; ++step) {
    const double mass = geo.integrate(rho.values);
    mass_error = std::max(mass_error, std::abs(mass - 1.0));
    series.rows.push_back({rho.time, mass, grid_moment(geo, rho.values)});
    if (out.due(step)) out.field(step_stem("density", step), rho);
    if (step == pr.c.params.steps) break;
    clipped += pde::fp_evolve(geo, rho, drive, pr.p, pr.p.dt).clipped_mass;
  }
  out.series("moments", series, rho.time);
  m.set("mass_error", mass_error);
  m.set("clipped_mass", clipped);
  m.set("moment_final", grid_moment(geo, rho.values));
}

void run_coupled(Problem& pr, Emitter& out, Metrics& m) {
  const auto& geo = pr.grid();
  GridField rho = pr.initial_density(), Phi = pr.initial_phase();
  const auto pot = pr.potentials();
  const double H0 = pde::hamiltonian(geo, rho, Phi, pot, pr.p);
  double drift = 0.0, mass_error = 0.0, clipped = 0.0;
  io::Series series{{{"solver", "coupled"}}, {"time", "H", "mass", "moment"}, {}};
  for (std::int64_t step = 0;; ++step) {
    const double H = pde::hamiltonian(geo, rho, Phi, pot, pr.p);
    const double mass = geo.integrate(rho.values);
    drift = std::max(drift, std::abs(H - H0) / std::max(std::abs(H0), 1e-300));
    mass_error = std::max(mass_error, std::abs(mass - 1.0));
    series.rows.push_back({rho.time, H, mass, grid_moment(geo, rho.values)});
    if (out.due(step)) {
      out.field(step_stem("density", step), rho);
      out.field(step_stem("phase", step), Phi);
    }
    if (step == pr.c.params.steps) break;
    clipped += pde::coupled_step(geo, rho, Phi, pot, pr.p).clipped_mass;
  }
  out.series("energy", series, rho.time);
  m.set("energy_drift", drift);
  m.set("mass_error", mass_error);
  m.set("clipped_mass", clipped);
  m.set("moment_final", grid_moment(geo, rho.values));
}

void run_schrodinger(Problem& pr, Emitter& out, Metrics& m, io::Manifest* manifest) {
  const auto& c = pr.c;
  const auto& geo = pr.grid();
  const auto pot = pr.potentials();
  schrodinger::WaveField psi;
  if (c.initial.preset == "eigenmode") {
    psi = schrodinger::WaveField(geo.grid());
    for (std::size_t i = 0; i < geo.size(); ++i) psi[i] = pr.mode(as_span(geo.grid().node(i)));
    const double s = std::sqrt(schrodinger::norm(geo, psi));
    for (auto& v : psi.values) v /= s;
  } else {
    psi = schrodinger::assemble_wavefunction(pr.initial_density(), pr.initial_phase(), pr.p);
  }
  schrodinger::CrankNicolson cn(geo, pot, pr.p);

  const bool free_packet = c.chart.name == "flat" && c.initial.preset == "gaussian-blob" && pot.V.empty() &&
                           pot.Vc.empty();
  const double hbar = pr.p.hbar(), m0 = c.masses[0], s0 = c.initial.sigma;
  auto analytic = [&](double t) {
    const double r = hbar * t / (2.0 * m0 * s0 * s0);
    return s0 * s0 * (1.0 + r * r);
  };
  std::vector<double> x(geo.size()), x2(geo.size());
  for (std::size_t i = 0; i < geo.size(); ++i) {
    x[i] = geo.grid().node(i)[0];
    x2[i] = x[i] * x[i];
  }
  std::vector<double> moment_f(geo.size());
  for (std::size_t i = 0; i < geo.size(); ++i) moment_f[i] = moment_function(pr.cs, x[i]);

  const double N0 = schrodinger::norm(geo, psi), E0 = cn.energy(psi);
  double norm_drift = 0.0, energy_drift = 0.0, dispersion = 0.0;
  io::Series series{{{"solver", "schrodinger"}}, {"time", "norm", "energy", "sigma2"}, {}};
  if (free_packet) series.columns.push_back("sigma2_analytic");
  for (std::int64_t step = 0;; ++step) {
    const double N = schrodinger::norm(geo, psi), E = cn.energy(psi);
    const double mean = schrodinger::expectation(geo, psi, x) / N;
    const double var = schrodinger::expectation(geo, psi, x2) / N - mean * mean;
    norm_drift = std::max(norm_drift, std::abs(N - N0));
    energy_drift = std::max(energy_drift, std::abs(E - E0) / std::max(std::abs(E0), 1e-300));
    std::vector<double> row{psi.time, N, E, var};
    if (free_packet) {
      row.push_back(analytic(psi.time));
      dispersion = std::max(dispersion, std::abs(var - analytic(psi.time)) / analytic(psi.time));
    }
    series.rows.push_back(std::move(row));
    if (out.due(step)) out.wave(step_stem("wave", step), psi);
    if (step == c.params.steps) break;
    cn.step(psi);
  }
  out.series("dispersion", series, psi.time);
  if (manifest) {
    manifest->set_parameter("sigma0", s0);
    manifest->set_parameter("mass0", m0);
    manifest->set_parameter("free_packet", free_packet ? 1.0 : 0.0);
  }
  m.set("norm_drift", norm_drift);
  m.set("energy_drift", energy_drift);
  if (free_packet) m.set("dispersion_error", dispersion);
  m.set("moment_final", schrodinger::expectation(geo, psi, moment_f) / schrodinger::norm(geo, psi));
}

void run_crosscheck(Problem& pr, Emitter& out, Metrics& m) {
  const auto& geo = pr.grid();
  sde::WalkerEnsemble ens = pr.initial_walkers();
  GridField rho = pr.initial_density();
  const auto phi = pr.walker_drift();
  const auto drive = pr.grid_drive();
  const sde::StepOptions opts{pr.c.solver.christoffel_drift};
  io::Series series{{{"solver", "crosscheck"}, {"walkers", std::to_string(ens.count())}}, {"time", "l1"}, {}};
  double l1 = 0.0, l1_max = 0.0;
  const auto sq = geo.sqrt_det();
  for (std::int64_t step = 0;; ++step) {
    if (out.due(step)) {
      const GridField w = sde::estimate_density(ens, pr.cs, geo.grid());
      l1 = 0.0;
      for (std::size_t i = 0; i < geo.size(); ++i) l1 += sq[i] * std::abs(w[i] - rho[i]);
      l1 *= geo.cell_volume();
      l1_max = std::max(l1_max, l1);
      series.rows.push_back({rho.time, l1});
      out.field(step_stem("sde_density", step), w);
      out.field(step_stem("fp_density", step), rho);
      pr.say("t=" + io::format_double(rho.time) + " L1=" + io::format_double(l1));
    }
    if (step == pr.c.params.steps) break;
    sde::sample_step(ens, pr.cs, phi, pr.p, opts);
    pde::fp_evolve(geo, rho, drive, pr.p, pr.p.dt);
  }
  out.series("l1", series, rho.time);
  m.set("l1_final", l1);
  m.set("l1_max", l1_max);
  m.set("moment_final", grid_moment(geo, rho.values));
}

Metrics simulate(const RunConfig& c, Emitter& out, io::Manifest* manifest, std::ostream* log) {
  Problem pr(c, log);
  Metrics m;
  const auto& k = c.solver.kind;
  if (k == "sde")
    run_sde(pr, out, m);
  else if (k == "fp")
    run_fp(pr, out, m);
  else if (k == "coupled")
    run_coupled(pr, out, m);
  else if (k == "schrodinger")
    run_schrodinger(pr, out, m, manifest);
  else
    run_crosscheck(pr, out, m);
  return m;
}

void record_parameters(io::Manifest& man, const RunConfig& c) {
  const SimParams p = c.sim();
  man.set_parameter("eta", p.eta);
  man.set_parameter("dt", p.dt);
  man.set_parameter("k", p.k);
  man.set_parameter("hbar", p.hbar());
  man.set_parameter("xi", p.xi);
  man.set_parameter("steps", static_cast<double>(p.steps));
  man.set_parameter("final_time", p.dt * static_cast<double>(p.steps));
  man.set_parameter("particles", static_cast<double>(c.masses.size()));
}

}  // namespace

RunResult run(const RunConfig& c, const RunOptions& opts) {
  validate(c);
  std::optional<io::Manifest> man;
  if (opts.write) {
    fs::create_directories(opts.out_dir);
    man.emplace(opts.out_dir);
    man->set_config(opts.config_text.empty() ? serialize_config(c) : opts.config_text);
    man->set_solver(c.solver.kind);
    record_parameters(*man, c);
  }
  Emitter out(c, man ? &*man : nullptr);
  const Metrics m = simulate(c, out, man ? &*man : nullptr, opts.log);

  RunResult r;
  r.metrics = m.values;
  for (const auto& t : c.acceptance) {
    const auto it = std::find_if(m.values.begin(), m.values.end(), [&](const auto& kv) { return kv.first == t.metric; });
    if (it == m.values.end()) {
      r.violations.push_back(t.metric + ": not produced by solver '" + c.solver.kind + "'");
      r.checks.push_back({t.metric, std::nan(""), t.is_max ? "<=" : ">=", t.threshold, false});
      continue;
    }
    const bool ok = t.is_max ? it->second <= t.threshold : it->second >= t.threshold;
    r.checks.push_back({t.metric, it->second, t.is_max ? "<=" : ">=", t.threshold, ok});
    if (!ok)
      r.violations.push_back(t.metric + " = " + io::format_double(it->second) + " violates " + (t.is_max ? "<= " : ">= ") +
                             io::format_double(t.threshold));
  }
  if (man) {
    for (const auto& [k, v] : m.values) man->set_parameter("metric." + k, v);
    for (const auto& ch : r.checks) man->add_check(ch);
    r.manifest = man->write();
  }
  return r;
}

ConvergenceReport convergence_study(const RunConfig& c, int halvings, const RunOptions& opts) {
  validate(c);
  if (halvings < 2) throw ConfigError("convergence.halvings: must be at least 2", "convergence.halvings");
  const bool spacing = c.convergence.parameter == "spacing";
  if (spacing && c.solver.kind == "sde") throw ConfigError("convergence.parameter: sde runs have no grid spacing", "convergence.parameter");
  ConvergenceReport rep;
  rep.declared_order = c.convergence.declared_order;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  for (int level = 0; level <= halvings; ++level) {
    // Each level costs at least twice the previous one.
    if (!rep.levels.empty() && elapsed() + 2.0 * rep.levels.back().seconds > c.convergence.budget_seconds) {
      rep.partial = true;
      break;
    }
    RunConfig lc = c;
    const double scale = std::ldexp(1.0, level);
    if (spacing) {
      for (int& g : lc.grid) g *= static_cast<int>(scale);
    } else {
      lc.params.dt = c.params.dt / scale;
      lc.params.steps = c.params.steps * static_cast<std::int64_t>(scale);
    }
    lc.acceptance.clear();
    const auto t0 = std::chrono::steady_clock::now();
    Emitter quiet(lc, nullptr);
    const Metrics m = simulate(lc, quiet, nullptr, nullptr);
    ConvergenceLevel L;
    L.dt = lc.params.dt;
    L.grid = lc.grid;
    L.observable = std::find_if(m.values.begin(), m.values.end(), [](const auto& kv) { return kv.first == "moment_final"; })->second;
    L.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opts.log) *opts.log << "level " << level << ": observable " << io::format_double(L.observable) << " (" << L.seconds << " s)\n";
    rep.levels.push_back(L);
  }
  for (std::size_t k = 0; k + 2 < rep.levels.size(); ++k) {
    const double d0 = std::abs(rep.levels[k].observable - rep.levels[k + 1].observable);
    const double d1 = std::abs(rep.levels[k + 1].observable - rep.levels[k + 2].observable);
    rep.orders.push_back(std::log2(d0 / d1));
  }
  rep.passed = !rep.partial && !rep.orders.empty() && rep.orders.back() >= rep.declared_order - 0.3;

  if (opts.write) {
    fs::create_directories(opts.out_dir);
    io::Manifest man(opts.out_dir);
    man.set_config(opts.config_text.empty() ? serialize_config(c) : opts.config_text);
    man.set_solver(c.solver.kind);
    record_parameters(man, c);
    man.set_parameter("declared_order", rep.declared_order);
    man.set_parameter("partial", rep.partial ? 1.0 : 0.0);
    io::Series s{{{"parameter", c.convergence.parameter}, {"partial", rep.partial ? "true" : "false"}},
                 {"level", "dt", "spacing0", "observable", "order", "seconds"},
                 {}};
    for (std::size_t k = 0; k < rep.levels.size(); ++k) {
      const auto& L = rep.levels[k];
      const double h = L.grid.empty() ? std::nan("") : geometry::make_grid(build_space(c), L.grid).axis(0).spacing;
      const double order = k >= 2 ? rep.orders[k - 2] : std::nan("");
      s.rows.push_back({static_cast<double>(k), L.dt, h, L.observable, order, L.seconds});
    }
    const auto p = opts.out_dir / "convergence.csv";
    io::write_series_csv(p, s);
    man.add(p, "series", "csv", "convergence", 0.0);
    const double measured = rep.orders.empty() ? std::nan("") : rep.orders.back();
    man.add_check({"observed_order", measured, ">=", rep.declared_order - 0.3, rep.passed});
    rep.manifest = man.write();
  }
  return rep;
}

}  // namespace edyn::cli
