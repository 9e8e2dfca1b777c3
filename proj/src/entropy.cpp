#include "resent/entropy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "resent/kernels.hpp"
#include "resent/parallel.hpp"

namespace resent {

namespace {

constexpr double kLn2 = std::numbers::ln2;

std::vector<double> as_std(const Vector& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

std::string describe_point(const Vector& x) {
  std::ostringstream os;
  os << std::setprecision(6) << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << ')';
  return os.str();
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<int> expand_resolution(const CompactSet& set, std::span<const int> resolution) {
  if (resolution.size() == 1) return std::vector<int>(set.bounds.size(), resolution[0]);
  return std::vector<int>(resolution.begin(), resolution.end());
}

BoundReport report_skeleton(const SystemModel& system, const CompactSet& set, const MetricField& metric,
                            std::vector<int> resolution, const BoundOptions& options) {
  BoundReport r;
  r.system = system.name;
  r.time_type = system.time_type;
  r.params = system.params;
  r.set = SetDescriptor::of(set);
  r.resolution = std::move(resolution);
  r.metric = metric.descriptor();
  r.horizon = options.horizon;
  r.units = system.is_discrete() ? "bits/step" : "bits/time";
  r.created_at = utc_now();
  return r;
}

void check_inputs(const SystemModel& system, const CompactSet& set, const MetricField& metric) {
  if (set.dim() != system.dim) throw std::invalid_argument("set dimension does not match system " + system.name);
  if (metric.dim() != system.dim) throw std::invalid_argument("metric dimension does not match system " + system.name);
}

// Deterministic reduction over the per-point slots; nullopt slots were excluded.
void assemble(BoundReport& report, std::vector<std::optional<PointBound>>& slots, const std::vector<Vector>& points,
              std::vector<std::string>& reasons) {
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i]) {
      report.per_point.push_back(std::move(*slots[i]));
    } else {
      report.diagnostics.excluded.push_back({as_std(points[i]), reasons[i]});
    }
  }
  if (report.per_point.empty()) throw NumericError("every sample point was excluded; no bound available");
  std::size_t best = 0;
  for (std::size_t i = 1; i < report.per_point.size(); ++i) {
    if (report.per_point[i].local > report.per_point[best].local) best = i;
  }
  report.argmax = best;
  report.bound = report.per_point[best].local;
}

// Checks that a cocycle value can be inverted and returns its inverse.
Matrix invert_cocycle(const Matrix& a, const Vector& x, double t) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  if (!s.allFinite() || s(s.size() - 1) <= 1e-14 * s(0)) {
    std::ostringstream os;
    os << "Jacobian of the time-" << t << " map is singular at x = " << describe_point(x)
       << "; the minimizing metric requires Dphi(x) to be invertible on K";
    throw SingularJacobianError(os.str());
  }
  return svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
}

MetricSample barycenter_metric(std::span<const SpdMatrix> atoms, const BarycenterOptions& options) {
  const BarycenterResult bar = inductive_barycenter(atoms, WeightVector::uniform(atoms.size()), options);
  return {inverse(bar.value), bar.cycles, bar.last_distance, bar.converged};
}

std::string format_horizon(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace

SetDescriptor SetDescriptor::of(const CompactSet& set, std::string label) {
  SetDescriptor d;
  d.kind = set.kind();
  d.bounds = set.bounds;
  if (set.constraint) {
    d.constraint = set.constraint->name;
    d.constraint_params = set.constraint->params;
  }
  d.label = std::move(label);
  return d;
}

BoundReport dt_bound(const SystemModel& system, const CompactSet& set, const MetricField& metric,
                     std::span<const int> resolution, const BoundOptions& options) {
  if (!system.is_discrete()) throw std::invalid_argument("dt_bound needs a discrete-time system");
  check_inputs(system, set, metric);
  std::vector<int> res = expand_resolution(set, resolution);
  const std::vector<Vector> points = sample_set(set, res);
  BoundReport report = report_skeleton(system, set, metric, res, options);

  const std::size_t n = points.size();
  std::vector<std::optional<Vector>> images(n);
  std::vector<std::string> reasons(n);
  parallel_for(n, [&](std::size_t i) {
    try {
      images[i] = flow(system, points[i], 1.0);
    } catch (const EscapeError& e) {
      reasons[i] = e.what();
    }
  });

  MetricField p = metric;
  if (options.tabulate && metric.kind() == MetricKind::tabulated) {
    std::vector<Vector> needed = points;
    for (const auto& y : images)
      if (y) needed.push_back(*y);
    p = metric.tabulate(needed);
    report.diagnostics.barycenter_nonconverged = p.table_nonconverged();
  }

  std::vector<std::optional<PointBound>> slots(n);
  parallel_for(n, [&](std::size_t i) {
    if (!images[i]) return;
    try {
      const Matrix a = system.jacobian(points[i]);
      const MetricSpectrum sp = metric_singular_values(p, points[i], *images[i], a);
      slots[i] = PointBound{as_std(points[i]), sp.values.values(), sp.values.positive_part_sum()};
    } catch (const SingularJacobianError&) {
      throw;
    } catch (const NumericError& e) {
      reasons[i] = e.what();
    }
  });
  assemble(report, slots, points, reasons);
  return report;
}

BoundReport ct_bound(const SystemModel& system, const CompactSet& set, const MetricField& metric,
                     std::span<const int> resolution, const BoundOptions& options) {
  if (system.is_discrete()) throw std::invalid_argument("ct_bound needs a continuous-time system");
  check_inputs(system, set, metric);
  if (!metric.has_orbital_derivative()) {
    throw std::invalid_argument("metric '" + metric.descriptor() +
                                "' has no orbital derivative; enable the flow finite-difference derivative");
  }
  std::vector<int> res = expand_resolution(set, resolution);
  const std::vector<Vector> points = sample_set(set, res);
  BoundReport report = report_skeleton(system, set, metric, res, options);

  const std::size_t n = points.size();
  std::vector<std::optional<PointBound>> slots(n);
  std::vector<std::string> reasons(n);
  std::vector<char> nonconverged(n, 0);
  parallel_for(n, [&](std::size_t i) {
    try {
      const auto [sample, pdot] = metric.value_and_derivative(points[i]);
      nonconverged[i] = sample.converged ? 0 : 1;
      const MetricSpectrum sp = ct_metric_spectrum(sample.value, points[i], system.jacobian(points[i]), pdot);
      slots[i] = PointBound{as_std(points[i]), sp.values.values(), sp.values.positive_part_sum() / (2.0 * kLn2)};
    } catch (const SingularJacobianError&) {
      throw;
    } catch (const NumericError& e) {
      reasons[i] = e.what();
    }
  });
  report.diagnostics.barycenter_nonconverged =
      static_cast<std::size_t>(std::count(nonconverged.begin(), nonconverged.end(), 1));
  assemble(report, slots, points, reasons);
  return report;
}

BoundReport compute_bound(const SystemModel& system, const CompactSet& set, const MetricField& metric,
                          std::span<const int> resolution, const BoundOptions& options) {
  return system.is_discrete() ? dt_bound(system, set, metric, resolution, options)
                              : ct_bound(system, set, metric, resolution, options);
}

BoundReport refine_bound(const SystemModel& system, const CompactSet& set, const MetricField& metric,
                         int start_resolution, std::size_t max_points, double tol, const BoundOptions& options) {
  if (start_resolution < 2) throw std::invalid_argument("refinement starts from a resolution of at least 2");
  if (!(tol > 0.0)) throw std::invalid_argument("refinement tolerance must be positive");
  auto grid_size = [&](int r) { return std::pow(static_cast<double>(r), static_cast<double>(set.dim())); };

  int r = start_resolution;
  const int first[] = {r};
  BoundReport report = compute_bound(system, set, metric, first, options);
  std::vector<RefinementStep> history{{r, report.bound}};
  while (true) {
    const int next = 2 * r - 1;
    if (grid_size(next) > static_cast<double>(max_points)) {
      report.diagnostics.notes.push_back("refinement stopped at the point budget");
      break;
    }
    const int res[] = {next};
    BoundReport finer = compute_bound(system, set, metric, res, options);
    history.push_back({next, finer.bound});
    const double change = std::abs(finer.bound - report.bound);
    report = std::move(finer);
    r = next;
    if (change < tol) break;
  }
  report.diagnostics.refinement = std::move(history);
  return report;
}

MetricField minimizing_metric_dt(const SystemModel& system, int n, const MinimizingMetricOptions& options) {
  if (!system.is_discrete()) throw std::invalid_argument("the N-step minimizing metric needs a discrete-time system");
  if (n < 1) throw std::invalid_argument("minimizing metric horizon N must be at least 1");
  const BarycenterOptions bar = options.barycenter;
  auto rule = [system, n, bar](const Vector& x) {
    std::vector<double> times(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) times[static_cast<std::size_t>(j)] = j;
    const std::vector<CocycleJacobian> path = cocycle_path(system, x, times);
    const SpdMatrix eye = SpdMatrix::identity(system.dim);
    std::vector<SpdMatrix> atoms;
    atoms.reserve(path.size());
    for (const CocycleJacobian& c : path) atoms.push_back(congruence(invert_cocycle(c.matrix, x, c.t), eye));
    return barycenter_metric(atoms, bar);
  };
  return MetricField::tabulated("auto:N=" + std::to_string(n), system.dim, rule);
}

MetricField minimizing_metric_ct(const SystemModel& system, double t, int time_samples,
                                 const MinimizingMetricOptions& options) {
  if (system.is_discrete()) throw std::invalid_argument("the time-T minimizing metric needs a continuous-time system");
  if (!(t > 0.0)) throw std::invalid_argument("minimizing metric horizon T must be positive");
  if (time_samples < 1) throw std::invalid_argument("time_samples must be at least 1");
  std::vector<double> nodes(static_cast<std::size_t>(time_samples), 0.0);
  for (int k = 1; k < time_samples; ++k) nodes[static_cast<std::size_t>(k)] = t * k / (time_samples - 1);
  if (time_samples > 1) nodes.back() = t;

  // fixed_cycles > 0 pins the barycenter to exactly that many cycles.
  auto eval_at = [system, nodes, options](const Vector& x, int fixed_cycles) {
    const std::vector<CocycleJacobian> path = cocycle_path(system, x, nodes, options.integrator);
    const SpdMatrix eye = SpdMatrix::identity(system.dim);
    std::vector<SpdMatrix> atoms;
    atoms.reserve(path.size());
    for (const CocycleJacobian& c : path) atoms.push_back(congruence(invert_cocycle(c.matrix, x, c.t), eye));
    BarycenterOptions bar = options.barycenter;
    if (fixed_cycles > 0) {
      bar.max_cycles = fixed_cycles;
      bar.fixed_cycles = true;
    }
    return barycenter_metric(atoms, bar);
  };
  auto rule = [eval_at](const Vector& x) { return eval_at(x, 0); };
  const double h = options.fd_step;
  const IntegratorOptions one_step{.step = h, .tol = 1e-9, .max_halvings = 0, .fixed_step = true};
  auto combined = [eval_at, system, h, one_step](const Vector& x) {
    MetricSample base = eval_at(x, 0);
    const Vector xh = flow(system, x, h, one_step);
    const MetricSample shifted = eval_at(xh, base.cycles);
    const Matrix d = (shifted.value.matrix() - base.value.matrix()) / h;
    return std::pair<MetricSample, Matrix>{std::move(base), 0.5 * (d + d.transpose())};
  };
  MetricField field = MetricField::tabulated("auto:T=" + format_horizon(t), system.dim, rule);
  return field.with_flow_derivative(system, h, combined);
}

std::optional<double> aitken_extrapolate(double v0, double v1, double v2) {
  const double d1 = v1 - v0;
  const double d2 = v2 - v1;
  const double denom = d2 - d1;
  const double scale = std::max({std::abs(v0), std::abs(v1), std::abs(v2), 1.0});
  if (std::abs(denom) <= 1e-14 * scale) {
    // Already stationary (or exactly linear); nothing to accelerate.
    if (std::abs(d2) <= 1e-14 * scale) return v2;
    return std::nullopt;
  }
  const double out = v2 - d2 * d2 / denom;
  return std::isfinite(out) ? std::optional<double>(out) : std::nullopt;
}

namespace {

struct PointExponents {
  // exponents[h] for each horizon; empty if the orbit was excluded.
  std::vector<LogSingularVector> exponents;
  std::string reason;
};

LogSingularVector exponents_of(const Matrix& a, double t) {
  return log_singular_values_with_zeros(a).scaled(1.0 / t);
}

std::vector<PointExponents> oracle_generic(const SystemModel& system, std::span<const Vector> points,
                                           std::span<const double> horizons, const IntegratorOptions& integrator) {
  std::vector<PointExponents> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    try {
      const auto path = cocycle_path(system, points[i], horizons, integrator);
      for (const auto& c : path) out[i].exponents.push_back(exponents_of(c.matrix, c.t));
    } catch (const EscapeError& e) {
      out[i].exponents.clear();
      out[i].reason = e.what();
    }
  });
  return out;
}

// Fixed-step batch integration of the Lanford state and tangent; the step is
// the integrator's initial step.
std::vector<PointExponents> oracle_lanford_batch(double a, std::span<const Vector> points,
                                                 std::span<const double> horizons, double h) {
  constexpr std::size_t kBlock = 256;
  std::vector<PointExponents> out(points.size());
  const kernels::Isa isa = kernels::active_isa();
  const std::size_t blocks = (points.size() + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t begin = b * kBlock;
    const std::size_t end = std::min(points.size(), begin + kBlock);
    kernels::LanfordBatch batch(end - begin, true);
    for (std::size_t i = begin; i < end; ++i) batch.set_lane(i - begin, points[i](0), points[i](1), points[i](2));
    std::vector<char> dead(end - begin, 0);
    double t = 0.0;
    Matrix v(3, 3);
    for (double target : horizons) {
      const double span = target - t;
      if (span > 0.0) {
        const int steps = std::max(1, static_cast<int>(std::ceil(span / h - 1e-9)));
        kernels::lanford_rk4(isa, a, span / steps, steps, batch);
        t = target;
      }
      for (std::size_t l = 0; l < end - begin; ++l) {
        if (dead[l]) continue;
        const double x = batch.at(0, l), y = batch.at(1, l), z = batch.at(2, l);
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c) v(r, c) = batch.at(static_cast<std::size_t>(3 + 3 * r + c), l);
        const double norm = std::sqrt(x * x + y * y + z * z);
        if (!std::isfinite(norm) || norm > kBlowUpNorm || !v.allFinite()) {
          dead[l] = 1;
          std::ostringstream os;
          os << "orbit escaped (|x| > " << kBlowUpNorm << " or non-finite) by t = " << target;
          out[begin + l].exponents.clear();
          out[begin + l].reason = os.str();
          batch.set_lane(l, 0.0, 0.0, 0.0);
          continue;
        }
        out[begin + l].exponents.push_back(exponents_of(v, target));
      }
    }
  });
  return out;
}

}  // namespace

OracleResult lyapunov_oracle(const SystemModel& system, std::span<const Vector> points, std::span<const double> horizons,
                             const OracleOptions& options) {
  if (horizons.empty()) throw std::invalid_argument("oracle needs at least one horizon");
  for (std::size_t k = 0; k < horizons.size(); ++k) {
    if (!(horizons[k] > 0.0)) throw std::invalid_argument("oracle horizons must be positive");
    if (k > 0 && horizons[k] <= horizons[k - 1]) throw std::invalid_argument("oracle horizons must increase");
    if (system.is_discrete() && std::abs(horizons[k] - std::round(horizons[k])) > 1e-12)
      throw std::invalid_argument("discrete-time oracle horizons must be integers");
  }
  if (points.empty()) throw std::invalid_argument("oracle needs at least one sample point");

  const bool batch = options.use_batch_kernel && system.batch == BatchKernel::lanford && !system.is_discrete();
  const std::vector<PointExponents> per_point =
      batch ? oracle_lanford_batch(system.params.at("a"), points, horizons, options.integrator.step)
            : oracle_generic(system, points, horizons, options.integrator);

  OracleResult result;
  result.horizons.assign(horizons.begin(), horizons.end());
  result.values.assign(horizons.size(), -std::numeric_limits<double>::infinity());
  result.argmax.assign(horizons.size(), 0);
  for (std::size_t i = 0; i < per_point.size(); ++i) {
    const PointExponents& pe = per_point[i];
    if (pe.exponents.size() != horizons.size()) {
      result.excluded.push_back({as_std(points[i]), pe.reason});
      continue;
    }
    for (std::size_t k = 0; k < horizons.size(); ++k) {
      const double v = pe.exponents[k].positive_part_sum();
      if (v > result.values[k]) {
        result.values[k] = v;
        result.argmax[k] = i;
      }
      if (options.keep_profiles) result.profiles.push_back({as_std(points[i]), horizons[k], pe.exponents[k]});
    }
  }
  if (result.excluded.size() == points.size()) throw NumericError("every oracle orbit escaped; no value available");
  const std::size_t m = result.values.size();
  if (m >= 3) result.aitken = aitken_extrapolate(result.values[m - 3], result.values[m - 2], result.values[m - 1]);
  return result;
}

double proximate_entropy(const SystemModel& system, const Vector& equilibrium, double tol) {
  if (system.is_discrete()) throw std::invalid_argument("proximate entropy is defined here for vector fields");
  if (equilibrium.size() != system.dim) throw std::invalid_argument("equilibrium dimension does not match the system");
  const double residual = system.rhs(equilibrium).norm();
  if (residual > tol * std::max(1.0, equilibrium.norm())) {
    std::ostringstream os;
    os << "point " << describe_point(equilibrium) << " is not an equilibrium (|f(O)| = " << residual << ")";
    throw std::invalid_argument(os.str());
  }
  Eigen::EigenSolver<Matrix> eig(system.jacobian(equilibrium), false);
  if (eig.info() != Eigen::Success) throw NumericError("eigenvalue computation failed at the equilibrium");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < eig.eigenvalues().size(); ++j) sum += std::max(eig.eigenvalues()(j).real(), 0.0);
  return sum / kLn2;
}

double lanford_closed_form(double a) {
  if (!(a >= 2.0 / 3.0 - 1e-12)) throw std::invalid_argument("the Lanford closed form is only established for a >= 2/3");
  return 2.0 * (2.0 * a - 1.0) / kLn2;
}

std::pair<double, double> lanford_lambdas(double a, const Vector& v) {
  const double x = v(0), y = v(1), z = v(2);
  const double common = 2.0 * (a * z - z * z - x * x - y * y) / a;
  return {2.0 * (a - 2.0 * z) + common, 2.0 * (a - 1.0 + z) + common};
}

double metric_distortion(const MetricField& metric, std::span<const Vector> points) {
  std::vector<double> up(points.size()), down(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const SpdMatrix p = metric.eval(points[i]);
    up[i] = log_max_partial_product(power(p, 0.5).matrix());
    down[i] = log_max_partial_product(power(p, -0.5).matrix());
  });
  if (points.empty()) return 0.0;
  return *std::max_element(up.begin(), up.end()) + *std::max_element(down.begin(), down.end());
}

}  // namespace resent
