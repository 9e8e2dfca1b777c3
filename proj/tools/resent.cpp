// resent: restoration-entropy bounds from the command line.
//
//   resent bound   --system lanford --a 0.6667 --metric lanford-eq15
//   resent sweep   --system linmap --matrix 2,1;0,2 --horizons 1,2,4,8,16
//   resent oracle  --system lanford --resolution 11
//   resent lanford
//   resent props   --seed 42

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "resent/commands.hpp"

namespace {

using resent::ConfigError;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("cannot parse '" + s + "' as a number");
}

std::vector<double> doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(to_double(item));
  return out;
}

std::vector<resent::Interval> parse_box(const std::string& s) {
  std::vector<resent::Interval> box;
  for (const auto& axis : split(s, ';')) {
    const auto v = doubles(axis);
    if (v.size() != 2) throw ConfigError("box axes are 'lo,hi' separated by ';'");
    box.push_back({v[0], v[1]});
  }
  return box;
}

struct Flags {
  std::string config_file, system, matrix, box, metric, horizons, output, dims, a_values;
  std::vector<std::string> params;
  std::optional<double> a, refine_tol, bar_tol, step, int_tol, fd_step, inv_horizon, tol;
  std::optional<int> resolution, bar_cycles, time_samples, instances;
  std::optional<std::size_t> refine_budget;
  std::optional<std::uint64_t> seed;
  bool no_files = false, no_invariance = false;
};

resent::RunConfig build_config(const std::string& command, const Flags& f) {
  resent::RunConfig c;
  if (!f.config_file.empty()) resent::apply_config_file(c, f.config_file);
  c.command = resent::parse_command(command);
  if (!f.system.empty()) c.system = f.system;
  for (const auto& kv : f.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--param expects name=value");
    c.params[kv.substr(0, eq)] = to_double(kv.substr(eq + 1));
  }
  if (f.a) c.params["a"] = *f.a;
  if (!f.matrix.empty()) c.matrix = f.matrix;
  if (!f.box.empty()) c.box = parse_box(f.box);
  if (!f.metric.empty()) c.metric = f.metric;
  if (f.resolution) c.resolution = *f.resolution;
  if (!f.horizons.empty()) c.horizons = doubles(f.horizons);
  if (!f.output.empty()) c.output = f.output;
  if (f.no_files) c.write_files = false;
  if (f.refine_budget) c.refine_budget = *f.refine_budget;
  if (f.refine_tol) c.refine_tol = *f.refine_tol;
  if (f.bar_tol) c.barycenter_tol = *f.bar_tol;
  if (f.bar_cycles) c.barycenter_max_cycles = *f.bar_cycles;
  if (f.time_samples) c.time_samples = *f.time_samples;
  if (f.step) c.step = *f.step;
  if (f.int_tol) c.integrator_tol = *f.int_tol;
  if (f.fd_step) c.fd_step = *f.fd_step;
  if (f.inv_horizon) c.invariance_horizon = *f.inv_horizon;
  if (f.no_invariance) c.check_invariance = false;
  if (f.seed) c.seed = *f.seed;
  if (f.instances) c.instances = *f.instances;
  if (!f.dims.empty()) {
    c.dims.clear();
    for (double d : doubles(f.dims)) c.dims.push_back(static_cast<int>(d));
  }
  if (f.tol) c.tol = *f.tol;
  if (!f.a_values.empty()) c.lanford_a = doubles(f.a_values);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Restoration-entropy upper bounds via metric-adapted singular values"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config_file, "JSON config file (flags override its keys)");
  app.add_option("--system", f.system, "lanford | linmap | linode | identity, or a JSON system file");
  app.add_option("--param", f.params, "system parameter name=value (repeatable)");
  app.add_option("--a", f.a, "Lanford parameter a");
  app.add_option("--matrix", f.matrix, "matrix: diag:2,0.5 | 2,1;0,2 | file");
  app.add_option("--box", f.box, "declared K: lo,hi;lo,hi;...");
  app.add_option("--metric", f.metric, "identity | constant:<file> | lanford-eq15 | auto:N | auto:T | auto");
  app.add_option("--resolution", f.resolution, "grid points per axis");
  app.add_option("--horizons", f.horizons, "comma-separated horizons (sweep: N or T; oracle: t)");
  app.add_option("--output", f.output, "output stem");
  app.add_flag("--no-files", f.no_files, "print only, write no report files");
  app.add_option("--refine-budget", f.refine_budget, "refine the grid (r -> 2r-1) up to this many points");
  app.add_option("--refine-tol", f.refine_tol, "stop refining when the bound moves less than this");
  app.add_option("--bar-tol", f.bar_tol, "barycenter stopping distance");
  app.add_option("--bar-max-cycles", f.bar_cycles, "barycenter cycle limit");
  app.add_option("--time-samples", f.time_samples, "atoms of the time-T metric");
  app.add_option("--step", f.step, "RK4 step");
  app.add_option("--int-tol", f.int_tol, "Richardson error bound per unit time");
  app.add_option("--fd-step", f.fd_step, "finite-difference step of the orbital derivative");
  app.add_option("--invariance-horizon", f.inv_horizon, "horizon of the invariance spot check");
  app.add_flag("--no-invariance-check", f.no_invariance, "skip the spot check of a declared K");
  app.add_option("--seed", f.seed, "property-suite seed");
  app.add_option("--instances", f.instances, "random instances per dimension");
  app.add_option("--dims", f.dims, "property-suite dimensions, comma-separated");
  app.add_option("--tol", f.tol, "property-suite base tolerance");
  app.add_option("--a-values", f.a_values, "Lanford parameters for the reproduction run");

  for (const char* name : {"bound", "sweep", "oracle", "lanford", "props"}) {
    app.add_subcommand(name)->fallthrough();
  }
  app.get_subcommand("bound")->description("entropy bound over K for one metric");
  app.get_subcommand("sweep")->description("bounds of the automatic metric over a list of horizons");
  app.get_subcommand("oracle")->description("finite-time Lyapunov oracle next to the bound");
  app.get_subcommand("lanford")->description("Lanford closed-form reproduction");
  app.get_subcommand("props")->description("randomized geometry property suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : resent::kExitConfig;
  }
  try {
    const resent::RunConfig config = build_config(app.get_subcommands().front()->get_name(), f);
    return resent::run_command(config, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return resent::kExitConfig;
  }
}
