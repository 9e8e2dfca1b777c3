#pragma once

// Run configuration shared by the command-line front end and the tests:
// flags or a JSON file, matrix and metric specifications, and the resolution
// of a configuration into a system, a sample set and a metric.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "resent/dynamics.hpp"
#include "resent/entropy.hpp"
#include "resent/metric.hpp"

namespace resent {

/// Bad flags, files or combinations of options (exit code 1).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The declared set failed the forward-invariance spot check (exit code 3).
class InvarianceError : public std::runtime_error {
 public:
  InvarianceError(const std::string& what, InvarianceReport report) : std::runtime_error(what), report_(report) {}
  const InvarianceReport& report() const { return report_; }

 private:
  InvarianceReport report_;
};

enum class Command { bound, sweep, oracle, lanford, props };

Command parse_command(const std::string& name);
std::string to_string(Command c);

/// "diag:2,0.5", "2,1;0,2" (rows separated by ';'), or a path to a file that
/// holds either a JSON array of rows or whitespace-separated rows.
Matrix parse_matrix_spec(const std::string& spec);

struct MetricSpec {
  enum class Kind { identity, constant, lanford, automatic };
  Kind kind = Kind::identity;
  std::string text;
  /// constant:<file>
  std::string file;
  /// auto:<horizon>, auto:N=<n>, auto:T=<t>; absent for a bare "auto" (sweeps).
  std::optional<double> horizon;
  /// 'N', 'T' or 0 when the spelling did not say.
  char horizon_kind = 0;
};

MetricSpec parse_metric_spec(const std::string& text);

struct RunConfig {
  Command command = Command::bound;
  /// Built-in name or path to a JSON system file.
  std::string system = "lanford";
  std::map<std::string, double> params;
  std::optional<std::string> matrix;
  /// Declared K; absent means the system default (auto-selected for Lanford).
  std::optional<std::vector<Interval>> box;
  /// Empty: lanford-eq15 for Lanford, identity otherwise.
  std::string metric;
  /// 0: 21 for Lanford, 5 otherwise.
  int resolution = 0;
  std::vector<double> horizons;
  /// Output stem; "<stem>.report.json" etc. Empty: "<system>_<command>".
  std::string output;
  bool write_files = true;

  std::optional<std::size_t> refine_budget;
  double refine_tol = 1e-4;
  double barycenter_tol = 1e-9;
  int barycenter_max_cycles = 10000;
  int time_samples = 64;
  double step = 1e-3;
  double integrator_tol = 1e-9;
  double fd_step = 1e-5;
  double invariance_horizon = 20.0;
  bool check_invariance = true;

  std::uint64_t seed = 42;
  int instances = 200;
  std::vector<int> dims{1, 2, 3, 5};
  double tol = 1e-8;

  std::vector<double> lanford_a{2.0 / 3.0, 0.75, 1.0};

  /// Throws ConfigError.
  void validate() const;
  std::string stem() const;
};

/// Reads the keys of a JSON config file into `config` (unknown keys are errors).
void apply_config_file(RunConfig& config, const std::filesystem::path& path);
void apply_config_json(RunConfig& config, const std::string& json_text);

struct ResolvedSystem {
  SystemModel system;
  CompactSet set;
  std::string set_label;
  /// The set came from the user and gets the invariance spot check.
  bool declared = false;
  int resolution = 0;
  std::optional<InvarianceReport> invariance;
};

/// Builds the system and its sample set. The Lanford default set comes from the
/// automatic invariant-set search; a declared set is spot-checked when
/// config.check_invariance is on (InvarianceError on escape).
ResolvedSystem resolve_system(const RunConfig& config);

/// Builds the metric named by `spec` for `system`. `horizon_override` replaces
/// the horizon of an automatic metric (sweeps).
MetricField make_metric(const MetricSpec& spec, const SystemModel& system, const RunConfig& config,
                        std::optional<double> horizon_override = std::nullopt);

MinimizingMetricOptions minimizing_options(const RunConfig& config);
IntegratorOptions integrator_options(const RunConfig& config);

}  // namespace resent
