#include "resent/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "resent/props.hpp"
#include "resent/report_io.hpp"

namespace resent {

namespace {

std::string default_metric(const SystemModel& system) { return system.name == "lanford" ? "lanford-eq15" : "identity"; }

std::string point_text(const std::vector<double>& x) {
  std::ostringstream os;
  os << std::setprecision(6) << '(';
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

std::string grid_text(const std::vector<int>& res) {
  std::ostringstream os;
  for (std::size_t i = 0; i < res.size(); ++i) os << (i ? "x" : "") << res[i];
  return os.str();
}

void annotate(BoundReport& r, const ResolvedSystem& rs) {
  r.set.label = rs.set_label;
  r.diagnostics.invariance = rs.invariance;
  if (!rs.declared && rs.system.name != "lanford") {
    r.diagnostics.notes.push_back("default set; forward invariance not checked");
  }
}

BoundReport bound_for(const RunConfig& c, const ResolvedSystem& rs, const MetricField& metric, double horizon) {
  BoundOptions bo;
  bo.horizon = horizon;
  BoundReport r = c.refine_budget
                      ? refine_bound(rs.system, rs.set, metric, rs.resolution, *c.refine_budget, c.refine_tol, bo)
                      : [&] {
                          const int res[] = {rs.resolution};
                          return compute_bound(rs.system, rs.set, metric, res, bo);
                        }();
  annotate(r, rs);
  return r;
}

void print_bound(std::ostream& out, const BoundReport& r) {
  out << std::setprecision(10);
  out << "bound = " << r.bound << ' ' << r.units << "  (system " << r.system << ", metric " << r.metric << ", K = "
      << r.set.label << ", grid " << grid_text(r.resolution) << ")\n";
  out << "maximizer = " << point_text(r.maximizer()) << '\n';
  if (!r.diagnostics.excluded.empty()) out << "excluded points: " << r.diagnostics.excluded.size() << '\n';
  if (r.diagnostics.barycenter_nonconverged > 0) {
    out << "barycenter stopped on max_cycles at " << r.diagnostics.barycenter_nonconverged << " points\n";
  }
}

void write_report(const RunConfig& c, const std::string& stem, const BoundReport& r, std::ostream& out) {
  if (!c.write_files) return;
  write_text_file(stem + ".report.json", report_to_json(r));
  write_text_file(stem + ".points.csv", points_csv(r));
  out << "wrote " << stem << ".report.json, " << stem << ".points.csv\n";
}

std::vector<double> default_oracle_horizons() { return {5.0, 10.0, 20.0, 40.0}; }

}  // namespace

int cmd_bound(const RunConfig& c, std::ostream& out) {
  const ResolvedSystem rs = resolve_system(c);
  const MetricSpec spec = parse_metric_spec(c.metric.empty() ? default_metric(rs.system) : c.metric);
  const MetricField metric = make_metric(spec, rs.system, c);
  const BoundReport r = bound_for(c, rs, metric, spec.horizon.value_or(0.0));
  print_bound(out, r);
  write_report(c, c.stem(), r, out);
  return kExitOk;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  const ResolvedSystem rs = resolve_system(c);
  const MetricSpec spec = parse_metric_spec(c.metric.empty() ? "auto" : c.metric);
  if (spec.kind != MetricSpec::Kind::automatic) throw ConfigError("sweep runs the automatic metric (--metric auto)");
  std::vector<SweepRow> rows;
  out << std::setprecision(10);
  out << (rs.system.is_discrete() ? "N" : "T") << "\tbound (" << (rs.system.is_discrete() ? "bits/step" : "bits/time")
      << ")\n";
  for (std::size_t k = 0; k < c.horizons.size(); ++k) {
    const double h = c.horizons[k];
    const MetricField metric = make_metric(spec, rs.system, c, h);
    const BoundReport r = bound_for(c, rs, metric, h);
    rows.push_back({h, r.bound, r.diagnostics.barycenter_nonconverged, r.maximizer()});
    out << h << '\t' << r.bound;
    if (r.diagnostics.barycenter_nonconverged > 0) out << "\t(" << r.diagnostics.barycenter_nonconverged << " unconverged)";
    out << '\n';
    write_report(c, c.stem() + "-h" + std::to_string(k), r, out);
  }
  double worst_increase = 0.0;
  for (std::size_t k = 1; k < rows.size(); ++k) worst_increase = std::max(worst_increase, rows[k].bound - rows[k - 1].bound);
  const bool monotone = worst_increase <= 1e-6;
  out << "monotone nonincreasing: " << (monotone ? "yes" : "no") << " (largest increase " << worst_increase << ")\n";
  if (c.write_files) {
    write_text_file(c.stem() + ".sweep.csv", sweep_csv(rows));
    out << "wrote " << c.stem() << ".sweep.csv\n";
  }
  return kExitOk;
}

int cmd_oracle(const RunConfig& c, std::ostream& out) {
  const ResolvedSystem rs = resolve_system(c);
  const MetricSpec spec = parse_metric_spec(c.metric.empty() ? default_metric(rs.system) : c.metric);
  const MetricField metric = make_metric(spec, rs.system, c);
  BoundReport r = bound_for(c, rs, metric, spec.horizon.value_or(0.0));
  const std::vector<double> horizons = c.horizons.empty() ? default_oracle_horizons() : c.horizons;
  const std::vector<Vector> points = sample_set(rs.set, rs.resolution);
  OracleOptions oo;
  oo.integrator = integrator_options(c);
  const OracleResult oracle = lyapunov_oracle(rs.system, points, horizons, oo);
  r.oracle = oracle.summary();
  const double distortion = metric_distortion(metric, points);

  print_bound(out, r);
  out << "t\toracle\tslack\n";
  bool dominated = true;
  for (std::size_t k = 0; k < horizons.size(); ++k) {
    const double slack = distortion / horizons[k] + 1e-6;
    const bool ok = r.bound + slack >= oracle.values[k];
    dominated = dominated && ok;
    out << horizons[k] << '\t' << oracle.values[k] << '\t' << slack << (ok ? "" : "\tVIOLATION") << '\n';
  }
  if (oracle.aitken) out << "aitken\t" << *oracle.aitken << '\n';
  if (!oracle.excluded.empty()) out << "orbits excluded (escaped): " << oracle.excluded.size() << '\n';
  out << "bound dominates oracle: " << (dominated ? "yes" : "no") << '\n';
  write_report(c, c.stem(), r, out);
  if (c.write_files) {
    write_text_file(c.stem() + ".sweep.csv", oracle_csv(oracle, r.bound));
    out << "wrote " << c.stem() << ".sweep.csv\n";
  }
  return dominated ? kExitOk : kExitNumeric;
}

int cmd_lanford(const RunConfig& c, std::ostream& out) {
  std::ostringstream csv;
  csv << "a,bound,closed_form,proximate_entropy,lambda_error,set\n";
  bool all_ok = true;
  out << std::setprecision(10);
  out << "a\tbound\tclosed form\tH_L(O2)\tmax lambda error\tK\n";
  for (std::size_t k = 0; k < c.lanford_a.size(); ++k) {
    const double a = c.lanford_a[k];
    RunConfig ck = c;
    ck.system = "lanford";
    ck.params["a"] = a;
    const ResolvedSystem rs = resolve_system(ck);
    const MetricField metric = lanford_metric(a);
    const BoundReport r = bound_for(ck, rs, metric, 0.0);
    const double closed = lanford_closed_form(a);
    Vector o2(3);
    o2 << 0.0, 0.0, a;
    const double hl = proximate_entropy(rs.system, o2);
    double lambda_err = 0.0;
    for (const PointBound& p : r.per_point) {
      const Vector x = Eigen::Map<const Vector>(p.state.data(), 3);
      const auto [l1, l23] = lanford_lambdas(a, x);
      const LogSingularVector expected = LogSingularVector::sorted({l1, l23, l23});
      for (std::size_t i = 0; i < 3; ++i) lambda_err = std::max(lambda_err, std::abs(expected[i] - p.spectrum[i]));
    }
    const bool ok = std::abs(r.bound - closed) <= 1e-3 && lambda_err <= 1e-8 && std::abs(hl - closed) <= 1e-10;
    all_ok = all_ok && ok;
    out << a << '\t' << r.bound << '\t' << closed << '\t' << hl << '\t' << lambda_err << '\t' << rs.set_label
        << (ok ? "" : "\tMISMATCH") << '\n';
    csv << format_double(a) << ',' << format_double(r.bound) << ',' << format_double(closed) << ','
        << format_double(hl) << ',' << format_double(lambda_err) << ',' << rs.set_label << '\n';
    write_report(c, c.stem() + "-a" + std::to_string(k), r, out);
  }
  if (c.write_files) {
    write_text_file(c.stem() + ".sweep.csv", csv.str());
    out << "wrote " << c.stem() << ".sweep.csv\n";
  }
  out << "reproduction: " << (all_ok ? "ok" : "mismatch") << '\n';
  return all_ok ? kExitOk : kExitNumeric;
}

int cmd_props(const RunConfig& c, std::ostream& out) {
  PropsOptions po;
  po.seed = c.seed;
  po.instances = c.instances;
  po.dims = c.dims;
  po.tol = c.tol;
  const std::vector<PropertyResult> results = run_property_suite(po);
  out << "seed " << c.seed << ", " << c.instances << " instances per dimension\n";
  bool ok = true;
  for (const PropertyResult& r : results) {
    ok = ok && r.passed();
    out << (r.passed() ? "PASS " : "FAIL ") << std::left << std::setw(16) << r.name << std::right
        << " worst " << std::setprecision(3) << std::scientific << r.worst << " tol " << r.tolerance
        << std::defaultfloat << "  [" << r.statement << "]\n";
  }
  return ok ? kExitOk : kExitProps;
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    switch (config.command) {
      case Command::bound: return cmd_bound(config, out);
      case Command::sweep: return cmd_sweep(config, out);
      case Command::oracle: return cmd_oracle(config, out);
      case Command::lanford: return cmd_lanford(config, out);
      case Command::props: return cmd_props(config, out);
    }
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvarianceError& e) {
    err << "invariance check failed: " << e.what() << " (" << e.report().escaped << " of " << e.report().points
        << " sampled orbits escaped)\n";
    return kExitInvariance;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace resent
