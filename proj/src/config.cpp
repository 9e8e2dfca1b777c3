#include "resent/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace resent {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse '" + s + "' as a number in " + what);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows, const std::string& what) {
  if (rows.empty()) throw ConfigError("empty matrix in " + what);
  const std::size_t n = rows.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw ConfigError("matrix in " + what + " must be square");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (j.is_string()) return parse_matrix_spec(j.get<std::string>());
  try {
    return rows_to_matrix(j.get<std::vector<std::vector<double>>>(), what);
  } catch (const json::exception&) {
    throw ConfigError("matrix in " + what + " must be an array of rows or a matrix spec string");
  }
}

Matrix matrix_from_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const std::string t = trim(text);
  if (!t.empty() && t.front() == '[') {
    try {
      return matrix_from_json(json::parse(t), path.string());
    } catch (const json::parse_error& e) {
      throw ConfigError("malformed matrix file " + path.string() + ": " + e.what());
    }
  }
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::vector<double> row;
    std::string cell;
    while (cells >> cell) row.push_back(parse_number(cell, path.string()));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows_to_matrix(rows, path.string());
}

std::vector<Interval> box_from_json(const json& j) {
  std::vector<Interval> box;
  try {
    for (const json& b : j) box.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
  } catch (const json::exception&) {
    throw ConfigError("box must be an array of [lo, hi] pairs");
  }
  return box;
}

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "bound") return Command::bound;
  if (name == "sweep") return Command::sweep;
  if (name == "oracle") return Command::oracle;
  if (name == "lanford") return Command::lanford;
  if (name == "props") return Command::props;
  throw ConfigError("unknown command '" + name + "'");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::bound: return "bound";
    case Command::sweep: return "sweep";
    case Command::oracle: return "oracle";
    case Command::lanford: return "lanford";
    case Command::props: return "props";
  }
  return "unknown";
}

Matrix parse_matrix_spec(const std::string& raw) {
  const std::string spec = trim(raw);
  if (spec.empty()) throw ConfigError("empty matrix specification");
  if (spec.rfind("diag:", 0) == 0) {
    const auto cells = split(spec.substr(5), ',');
    Vector d(static_cast<Eigen::Index>(cells.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) d(static_cast<Eigen::Index>(i)) = parse_number(cells[i], spec);
    return d.asDiagonal();
  }
  const bool inline_rows = spec.find_first_not_of("0123456789+-.eE,; \t") == std::string::npos;
  if (!inline_rows) {
    if (!std::filesystem::exists(spec)) throw ConfigError("matrix spec '" + spec + "' is neither a file nor rows");
    return matrix_from_file(spec);
  }
  std::vector<std::vector<double>> rows;
  for (const std::string& r : split(spec, ';')) {
    if (r.empty()) continue;
    std::vector<double> row;
    for (const std::string& c : split(r, ',')) row.push_back(parse_number(c, spec));
    rows.push_back(std::move(row));
  }
  return rows_to_matrix(rows, spec);
}

MetricSpec parse_metric_spec(const std::string& raw) {
  MetricSpec m;
  m.text = trim(raw);
  const std::string& t = m.text;
  if (t == "identity") {
    m.kind = MetricSpec::Kind::identity;
  } else if (t == "lanford-eq15") {
    m.kind = MetricSpec::Kind::lanford;
  } else if (t.rfind("constant:", 0) == 0) {
    m.kind = MetricSpec::Kind::constant;
    m.file = t.substr(9);
    if (m.file.empty()) throw ConfigError("constant metric needs a matrix file");
  } else if (t == "auto") {
    m.kind = MetricSpec::Kind::automatic;
  } else if (t.rfind("auto:", 0) == 0) {
    m.kind = MetricSpec::Kind::automatic;
    std::string rest = t.substr(5);
    if (rest.size() > 2 && (rest[0] == 'N' || rest[0] == 'T') && rest[1] == '=') {
      m.horizon_kind = rest[0];
      rest = rest.substr(2);
    }
    m.horizon = parse_number(rest, "metric " + t);
    if (!(*m.horizon > 0.0)) throw ConfigError("automatic metric horizon must be positive");
  } else {
    throw ConfigError("unknown metric '" + t + "' (identity, constant:<file>, lanford-eq15, auto:N, auto:T)");
  }
  return m;
}

void RunConfig::validate() const {
  if (resolution != 0 && resolution < 2) throw ConfigError("resolution must be at least 2");
  if (!(refine_tol > 0.0)) throw ConfigError("refinement tolerance must be positive");
  if (!(barycenter_tol >= 0.0)) throw ConfigError("barycenter tolerance must be nonnegative");
  if (barycenter_max_cycles < 1) throw ConfigError("barycenter max_cycles must be positive");
  if (time_samples < 1) throw ConfigError("time_samples must be positive");
  if (!(step > 0.0)) throw ConfigError("integrator step must be positive");
  if (!(integrator_tol > 0.0)) throw ConfigError("integrator tolerance must be positive");
  if (!(fd_step > 0.0)) throw ConfigError("finite-difference step must be positive");
  if (!(invariance_horizon > 0.0)) throw ConfigError("invariance horizon must be positive");
  for (double h : horizons)
    if (!(h > 0.0)) throw ConfigError("horizons must be positive");
  if (box) {
    for (const Interval& iv : *box)
      if (!(iv.lo < iv.hi)) throw ConfigError("box intervals need lo < hi");
  }
  if (command == Command::props) {
    if (!(tol > 0.0) || !std::isfinite(tol)) throw ConfigError("property tolerance must be positive (got tol = " + std::to_string(tol) + ")");
    if (instances < 1) throw ConfigError("instances must be positive");
    if (dims.empty()) throw ConfigError("dims must be nonempty");
    for (int n : dims)
      if (n < 1 || n > 10) throw ConfigError("dims must lie in 1..10");
  }
  if (command == Command::sweep && horizons.empty()) throw ConfigError("sweep needs a nonempty horizon list");
  if (command == Command::lanford) {
    if (lanford_a.empty()) throw ConfigError("lanford needs at least one value of a");
    for (double a : lanford_a)
      if (a < 2.0 / 3.0 - 1e-12) throw ConfigError("the Lanford closed form needs a >= 2/3");
  }
}

std::string RunConfig::stem() const {
  if (!output.empty()) return output;
  std::string sys = std::filesystem::path(system).stem().string();
  return sys + "_" + to_string(command);
}

void apply_config_json(RunConfig& c, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "command") c.command = parse_command(get_as<std::string>(v, key));
    else if (key == "system") c.system = get_as<std::string>(v, key);
    else if (key == "params") c.params = get_as<std::map<std::string, double>>(v, key);
    else if (key == "matrix") c.matrix = v.is_string() ? v.get<std::string>() : v.dump();
    else if (key == "box") c.box = box_from_json(v);
    else if (key == "metric") c.metric = get_as<std::string>(v, key);
    else if (key == "resolution") c.resolution = get_as<int>(v, key);
    else if (key == "horizons") c.horizons = get_as<std::vector<double>>(v, key);
    else if (key == "output") c.output = get_as<std::string>(v, key);
    else if (key == "refine_budget") c.refine_budget = get_as<std::size_t>(v, key);
    else if (key == "refine_tol") c.refine_tol = get_as<double>(v, key);
    else if (key == "barycenter_tol") c.barycenter_tol = get_as<double>(v, key);
    else if (key == "barycenter_max_cycles") c.barycenter_max_cycles = get_as<int>(v, key);
    else if (key == "time_samples") c.time_samples = get_as<int>(v, key);
    else if (key == "step") c.step = get_as<double>(v, key);
    else if (key == "integrator_tol") c.integrator_tol = get_as<double>(v, key);
    else if (key == "fd_step") c.fd_step = get_as<double>(v, key);
    else if (key == "invariance_horizon") c.invariance_horizon = get_as<double>(v, key);
    else if (key == "check_invariance") c.check_invariance = get_as<bool>(v, key);
    else if (key == "seed") c.seed = get_as<std::uint64_t>(v, key);
    else if (key == "instances") c.instances = get_as<int>(v, key);
    else if (key == "dims") c.dims = get_as<std::vector<int>>(v, key);
    else if (key == "tol") c.tol = get_as<double>(v, key);
    else if (key == "a_values") c.lanford_a = get_as<std::vector<double>>(v, key);
    else throw ConfigError("unknown config key '" + key + "'");
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  apply_config_json(config, read_file(path));
}

IntegratorOptions integrator_options(const RunConfig& c) {
  return {.step = c.step, .tol = c.integrator_tol, .max_halvings = 4, .fixed_step = false};
}

MinimizingMetricOptions minimizing_options(const RunConfig& c) {
  MinimizingMetricOptions o;
  o.barycenter.tol = c.barycenter_tol;
  o.barycenter.max_cycles = c.barycenter_max_cycles;
  o.integrator = {.step = c.step, .tol = c.integrator_tol, .max_halvings = 0, .fixed_step = true};
  o.fd_step = c.fd_step;
  return o;
}

ResolvedSystem resolve_system(const RunConfig& config) {
  std::string name = config.system;
  std::map<std::string, double> params;
  std::optional<Matrix> matrix;
  std::optional<std::vector<Interval>> box;
  int resolution = 0;

  // A system file supplies defaults that flags then override.
  if (name.size() > 5 && name.substr(name.size() - 5) == ".json") {
    json j;
    try {
      j = json::parse(read_file(name));
    } catch (const json::parse_error& e) {
      throw ConfigError("malformed system file " + name + ": " + e.what());
    }
    name = j.value("name", std::string{});
    if (name.empty()) throw ConfigError("system file needs a 'name'");
    if (j.contains("params")) params = get_as<std::map<std::string, double>>(j.at("params"), "params");
    if (j.contains("matrix")) matrix = matrix_from_json(j.at("matrix"), config.system);
    if (j.contains("box")) box = box_from_json(j.at("box"));
    if (j.contains("resolution")) resolution = get_as<int>(j.at("resolution"), "resolution");
    if (j.contains("dim")) {
      const int dim = get_as<int>(j.at("dim"), "dim");
      if (name == "identity") params["dim"] = dim;
    }
  }
  for (const auto& [k, v] : config.params) params[k] = v;
  if (config.matrix) matrix = parse_matrix_spec(*config.matrix);
  if (config.box) box = config.box;
  if (config.resolution != 0) resolution = config.resolution;

  ResolvedSystem out;
  try {
    out.system = make_builtin_system(name, params, matrix);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const bool lanford = out.system.name == "lanford";
  out.resolution = resolution != 0 ? resolution : (lanford ? 21 : 5);
  if (out.resolution < 2) throw ConfigError("resolution must be at least 2");

  InvarianceOptions inv;
  inv.horizon = config.invariance_horizon;
  inv.integrator.step = config.step;

  if (box) {
    if (static_cast<Eigen::Index>(box->size()) != out.system.dim) {
      throw ConfigError("box has " + std::to_string(box->size()) + " axes, system has dimension " +
                        std::to_string(out.system.dim));
    }
    out.set = CompactSet::box(*box);
    if (lanford) {
      // K must lie in z >= 0 for the Lanford system.
      out.set.constraint = SetConstraint{"z_nonnegative", {}, [](const Vector& v) { return -v(2); }};
    }
    out.set_label = "declared";
    out.declared = true;
    if (config.check_invariance) {
      const std::vector<Vector> points = sample_set(out.set, out.resolution);
      inv.stop_at_first_escape = true;
      out.invariance = check_invariance(out.system, out.set, points, inv);
      if (!out.invariance->passed()) {
        throw InvarianceError("declared set is not forward invariant: an orbit from the grid leaves it within t = " +
                                  std::to_string(config.invariance_horizon),
                              *out.invariance);
      }
    }
  } else if (lanford) {
    try {
      AutoSetSelection sel = select_lanford_set(out.system.params.at("a"), out.resolution, inv);
      out.set = sel.set;
      out.set_label = "auto: " + sel.label;
      out.invariance = sel.invariance;
    } catch (const NumericError& e) {
      throw InvarianceError(e.what(), InvarianceReport{inv.horizon, 0, 0});
    }
  } else {
    out.set = CompactSet::box(std::vector<Interval>(static_cast<std::size_t>(out.system.dim), Interval{-1.0, 1.0}));
    out.set_label = "default box [-1, 1]^n";
  }
  return out;
}

MetricField make_metric(const MetricSpec& spec, const SystemModel& system, const RunConfig& config,
                        std::optional<double> horizon_override) {
  switch (spec.kind) {
    case MetricSpec::Kind::identity:
      return MetricField::identity(system.dim);
    case MetricSpec::Kind::constant: {
      const Matrix m = parse_matrix_spec(spec.file);
      if (m.rows() != system.dim) throw ConfigError("constant metric dimension does not match the system");
      try {
        return MetricField::constant(SpdMatrix(m), spec.text);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("constant metric is not positive definite: ") + e.what());
      }
    }
    case MetricSpec::Kind::lanford:
      if (system.name != "lanford") throw ConfigError("lanford-eq15 is only defined for the Lanford system");
      return lanford_metric(system.params.at("a"));
    case MetricSpec::Kind::automatic: {
      const std::optional<double> h = horizon_override ? horizon_override : spec.horizon;
      if (!h) throw ConfigError("automatic metric needs a horizon (auto:N or auto:T)");
      const MinimizingMetricOptions opts = minimizing_options(config);
      if (system.is_discrete()) {
        if (spec.horizon_kind == 'T') throw ConfigError("auto:T needs a continuous-time system");
        if (*h != std::round(*h) || *h < 1) throw ConfigError("auto:N needs a positive integer N");
        return minimizing_metric_dt(system, static_cast<int>(*h), opts);
      }
      if (spec.horizon_kind == 'N') throw ConfigError("auto:N needs a discrete-time system");
      return minimizing_metric_ct(system, *h, config.time_samples, opts);
    }
  }
  throw ConfigError("unhandled metric kind");
}

}  // namespace resent
