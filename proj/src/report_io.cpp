#include "resent/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace resent {

using nlohmann::json;

namespace {

json set_to_json(const SetDescriptor& s) {
  json bounds = json::array();
  for (const Interval& iv : s.bounds) bounds.push_back({iv.lo, iv.hi});
  return {{"kind", s.kind},
          {"bounds", bounds},
          {"constraint", s.constraint},
          {"constraint_params", s.constraint_params},
          {"label", s.label}};
}

SetDescriptor set_from_json(const json& j) {
  SetDescriptor s;
  s.kind = j.at("kind").get<std::string>();
  for (const json& b : j.at("bounds")) s.bounds.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
  s.constraint = j.at("constraint").get<std::string>();
  s.constraint_params = j.at("constraint_params").get<std::map<std::string, double>>();
  s.label = j.at("label").get<std::string>();
  return s;
}

json diagnostics_to_json(const ReportDiagnostics& d) {
  json excluded = json::array();
  for (const ExcludedPoint& e : d.excluded) excluded.push_back({{"state", e.state}, {"reason", e.reason}});
  json refinement = json::array();
  for (const RefinementStep& r : d.refinement) refinement.push_back({{"resolution", r.resolution}, {"bound", r.bound}});
  json invariance = nullptr;
  if (d.invariance) {
    invariance = {{"horizon", d.invariance->horizon},
                  {"points", d.invariance->points},
                  {"escaped", d.invariance->escaped},
                  {"escaped_fraction", d.invariance->escaped_fraction()}};
  }
  return {{"excluded", excluded},
          {"barycenter_nonconverged", d.barycenter_nonconverged},
          {"invariance", invariance},
          {"refinement", refinement},
          {"notes", d.notes}};
}

ReportDiagnostics diagnostics_from_json(const json& j) {
  ReportDiagnostics d;
  for (const json& e : j.at("excluded"))
    d.excluded.push_back({e.at("state").get<std::vector<double>>(), e.at("reason").get<std::string>()});
  d.barycenter_nonconverged = j.at("barycenter_nonconverged").get<std::size_t>();
  if (const json& inv = j.at("invariance"); !inv.is_null()) {
    d.invariance = InvarianceReport{inv.at("horizon").get<double>(), inv.at("points").get<std::size_t>(),
                                    inv.at("escaped").get<std::size_t>()};
  }
  for (const json& r : j.at("refinement")) d.refinement.push_back({r.at("resolution").get<int>(), r.at("bound").get<double>()});
  d.notes = j.at("notes").get<std::vector<std::string>>();
  return d;
}

}  // namespace

std::string report_to_json(const BoundReport& r, int indent) {
  json points = json::array();
  for (const PointBound& p : r.per_point) points.push_back({{"state", p.state}, {"spectrum", p.spectrum}, {"local", p.local}});
  json oracle = nullptr;
  if (r.oracle) {
    oracle = {{"horizons", r.oracle->horizons},
              {"values", r.oracle->values},
              {"aitken", r.oracle->aitken ? json(*r.oracle->aitken) : json(nullptr)}};
  }
  const json j = {{"schema_version", r.schema_version},
                  {"system", {{"name", r.system}, {"time_type", to_string(r.time_type)}, {"params", r.params}}},
                  {"set", set_to_json(r.set)},
                  {"resolution", r.resolution},
                  {"metric", r.metric},
                  {"horizon", r.horizon},
                  {"units", r.units},
                  {"bound", r.bound},
                  {"argmax", r.argmax},
                  {"maximizer", r.per_point.empty() ? std::vector<double>{} : r.maximizer()},
                  {"per_point", points},
                  {"oracle", oracle},
                  {"created_at", r.created_at},
                  {"diagnostics", diagnostics_to_json(r.diagnostics)}};
  return j.dump(indent) + "\n";
}

BoundReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    BoundReport r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) {
      throw std::invalid_argument("unsupported report schema_version " + std::to_string(r.schema_version));
    }
    const json& sys = j.at("system");
    r.system = sys.at("name").get<std::string>();
    const std::string tt = sys.at("time_type").get<std::string>();
    if (tt != "discrete" && tt != "continuous") throw std::invalid_argument("unknown time_type " + tt);
    r.time_type = tt == "discrete" ? TimeType::discrete : TimeType::continuous;
    r.params = sys.at("params").get<std::map<std::string, double>>();
    r.set = set_from_json(j.at("set"));
    r.resolution = j.at("resolution").get<std::vector<int>>();
    r.metric = j.at("metric").get<std::string>();
    r.horizon = j.at("horizon").get<double>();
    r.units = j.at("units").get<std::string>();
    r.bound = j.at("bound").get<double>();
    r.argmax = j.at("argmax").get<std::size_t>();
    for (const json& p : j.at("per_point")) {
      r.per_point.push_back({p.at("state").get<std::vector<double>>(), p.at("spectrum").get<std::vector<double>>(),
                             p.at("local").get<double>()});
    }
    if (const json& o = j.at("oracle"); !o.is_null()) {
      OracleSummary s{o.at("horizons").get<std::vector<double>>(), o.at("values").get<std::vector<double>>(), {}};
      if (!o.at("aitken").is_null()) s.aitken = o.at("aitken").get<double>();
      r.oracle = std::move(s);
    }
    r.created_at = j.at("created_at").get<std::string>();
    r.diagnostics = diagnostics_from_json(j.at("diagnostics"));
    return r;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed report JSON: ") + e.what());
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string points_csv(const BoundReport& r) {
  std::ostringstream os;
  const std::size_t n = r.per_point.empty() ? r.set.bounds.size() : r.per_point.front().state.size();
  for (std::size_t i = 0; i < n; ++i) os << 'x' << i << ',';
  for (std::size_t i = 0; i < n; ++i) os << (r.time_type == TimeType::discrete ? "log2_alpha" : "varsigma") << i << ',';
  os << "local\n";
  for (const PointBound& p : r.per_point) {
    for (double v : p.state) os << format_double(v) << ',';
    for (double v : p.spectrum) os << format_double(v) << ',';
    os << format_double(p.local) << '\n';
  }
  return os.str();
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream os;
  const std::size_t n = rows.empty() ? 0 : rows.front().maximizer.size();
  os << "horizon,bound,barycenter_nonconverged";
  for (std::size_t i = 0; i < n; ++i) os << ",argmax_x" << i;
  os << '\n';
  for (const SweepRow& row : rows) {
    os << format_double(row.horizon) << ',' << format_double(row.bound) << ',' << row.nonconverged;
    for (double v : row.maximizer) os << ',' << format_double(v);
    os << '\n';
  }
  return os.str();
}

std::string oracle_csv(const OracleResult& oracle, double bound) {
  std::ostringstream os;
  os << "horizon,oracle,bound\n";
  for (std::size_t k = 0; k < oracle.horizons.size(); ++k) {
    os << format_double(oracle.horizons[k]) << ',' << format_double(oracle.values[k]) << ',' << format_double(bound)
       << '\n';
  }
  if (oracle.aitken) os << "aitken," << format_double(*oracle.aitken) << ',' << format_double(bound) << '\n';
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace resent
