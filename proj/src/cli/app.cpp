#include "edyn/cli/app.hpp"

#include "edyn/cli/drivers.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace edyn::cli {

namespace {

struct Common {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool quiet = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path output_dir(const Common& o, const RunConfig& c) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("EDSIM_OUT_DIR"); env && *env) return env;
  return c.output.dir;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"edsim: entropic dynamics on curved configuration spaces"};
  app.require_subcommand(1);
  Common o;
  int halvings = -1;

  auto add_common = [&](CLI::App* sub, bool with_run_flags) {
    sub->add_option("--config", o.config, "Config file (INI)")->required();
    if (with_run_flags) {
      sub->add_option("--out", o.out, "Output directory (overrides EDSIM_OUT_DIR and output.dir)");
      sub->add_option("--seed", o.seed, "Override params.seed")->each([&](const std::string&) { o.seed_set = true; });
      sub->add_flag("--quiet", o.quiet, "Suppress progress output");
    }
  };
  auto* run_cmd = app.add_subcommand("run", "Run the configured solver");
  add_common(run_cmd, true);
  auto* cross = app.add_subcommand("crosscheck", "Run walkers and Fokker-Planck side by side");
  add_common(cross, true);
  auto* conv = app.add_subcommand("converge", "Convergence study over halvings of dt or spacing");
  add_common(conv, true);
  conv->add_option("--halvings", halvings, "Number of halvings (default: convergence.halvings)");
  auto* check = app.add_subcommand("validate-config", "Parse and validate a config");
  add_common(check, false);
  auto* list = app.add_subcommand("list-presets", "List built-in presets");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "edsim: " << e.what() << "\n";
    return kConfigError;
  }

  if (*list) {
    for (const auto& [cat, names] : preset_catalogue()) {
      out << cat << ":";
      for (const auto& n : names) out << " " << n;
      out << "\n";
    }
    return kOk;
  }

  RunConfig c;
  std::string text;
  try {
    text = read_file(o.config);
    c = parse_config(text);
    if (cross->parsed()) c.solver.kind = "crosscheck";
    if (o.seed_set) c.params.seed = o.seed;
    if (conv->parsed() && halvings >= 0) c.convergence.halvings = halvings;
    // Report validation problems against the text the user wrote.
    parse_and_validate(text);
    validate(c);
  } catch (const ConfigError& e) {
    err << "edsim: config error: " << e.what() << "\n";
    return kConfigError;
  }
  if (*check) {
    out << "config ok (solver " << c.solver.kind << ")\n";
    return kOk;
  }

  RunOptions opts;
  opts.out_dir = output_dir(o, c);
  opts.log = o.quiet ? nullptr : &out;
  opts.config_text = serialize_config(c);
  try {
    if (conv->parsed()) {
      const auto rep = convergence_study(c, c.convergence.halvings, opts);
      if (!o.quiet) {
        for (std::size_t k = 0; k < rep.orders.size(); ++k) out << "order[" << k << "] = " << rep.orders[k] << "\n";
        out << "manifest: " << rep.manifest.string() << "\n";
      }
      if (rep.partial) {
        err << "edsim: wall-clock budget exhausted after " << rep.levels.size() << " levels; report is partial\n";
        return kRuntimeError;
      }
      if (!rep.passed) {
        err << "edsim: measured order " << (rep.orders.empty() ? 0.0 : rep.orders.back()) << " below declared "
            << rep.declared_order << " - 0.3\n";
        return kToleranceViolated;
      }
      return kOk;
    }
    const auto r = run(c, opts);
    if (!o.quiet) {
      for (const auto& [k, v] : r.metrics) out << k << " = " << v << "\n";
      out << "manifest: " << r.manifest.string() << "\n";
    }
    for (const auto& v : r.violations) err << "edsim: tolerance violated: " << v << "\n";
    return r.passed() ? kOk : kToleranceViolated;
  } catch (const ConfigError& e) {
    err << "edsim: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "edsim: " << e.what() << "\n";
    return kRuntimeError;
  }
}

}  // namespace edyn::cli
