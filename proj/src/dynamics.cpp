#include "resent/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "resent/kernels.hpp"
#include "resent/parallel.hpp"

namespace resent {

std::string to_string(TimeType t) { return t == TimeType::discrete ? "discrete" : "continuous"; }

namespace {

void require_dim(const SystemModel& system, const Vector& x) {
  if (x.size() != system.dim) throw std::invalid_argument("state dimension does not match system " + system.name);
}

void check_orbit(const Vector& s, Eigen::Index n, double t) {
  const auto x = s.head(n);
  if (!s.allFinite() || x.norm() > kBlowUpNorm) {
    std::ostringstream msg;
    msg << "orbit escaped (|x| > " << kBlowUpNorm << " or non-finite) at t = " << t;
    throw EscapeError(msg.str(), t);
  }
}

// State followed, when tangent is set, by the column-major n x n matrix V.
Vector augmented_rhs(const SystemModel& system, const Vector& s, bool tangent) {
  const Eigen::Index n = system.dim;
  const Vector x = s.head(n);
  Vector d(s.size());
  d.head(n) = system.rhs(x);
  if (tangent) {
    Eigen::Map<const Matrix> v(s.data() + n, n, n);
    Eigen::Map<Matrix> dv(d.data() + n, n, n);
    dv = system.jacobian(x) * v;
  }
  return d;
}

Vector rk4_step(const SystemModel& system, const Vector& s, double dt, bool tangent) {
  const Vector k1 = augmented_rhs(system, s, tangent);
  const Vector k2 = augmented_rhs(system, s + 0.5 * dt * k1, tangent);
  const Vector k3 = augmented_rhs(system, s + 0.5 * dt * k2, tangent);
  const Vector k4 = augmented_rhs(system, s + dt * k3, tangent);
  return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

int step_count(double span, double h) { return std::max(1, static_cast<int>(std::ceil(span / h - 1e-9))); }

std::vector<Vector> integrate_path(const SystemModel& system, const Vector& s0, std::span<const double> times,
                                   double h, bool tangent) {
  std::vector<Vector> out;
  out.reserve(times.size());
  Vector s = s0;
  double t = 0.0;
  for (double target : times) {
    const double span = target - t;
    if (span > 0.0) {
      const int n = step_count(span, h);
      const double dt = span / n;
      for (int i = 0; i < n; ++i) {
        s = rk4_step(system, s, dt, tangent);
        check_orbit(s, system.dim, t + (i + 1) * dt);
      }
      t = target;
    }
    out.push_back(s);
  }
  return out;
}

// Integrates at step h and h/2 and halves until the Richardson estimate is
// below tol (relative to 1 + |state|, per unit time) or halvings run out.
std::vector<Vector> integrate_controlled(const SystemModel& system, const Vector& s0, std::span<const double> times,
                                         bool tangent, const IntegratorOptions& options, IntegrationStats* stats) {
  if (!(options.step > 0.0)) throw std::invalid_argument("integrator step must be positive");
  double h = options.step;
  if (options.fixed_step) {
    auto path = integrate_path(system, s0, times, h, tangent);
    if (stats) *stats = {h, 0.0, 0};
    return path;
  }
  const double horizon = std::max(1.0, times.empty() ? 0.0 : times.back());
  std::vector<Vector> coarse = integrate_path(system, s0, times, h, tangent);
  for (int halving = 0;; ++halving) {
    std::vector<Vector> fine = integrate_path(system, s0, times, 0.5 * h, tangent);
    double err = 0.0;
    for (std::size_t k = 0; k < fine.size(); ++k) {
      err = std::max(err, (coarse[k] - fine[k]).norm() / (15.0 * (1.0 + fine[k].norm())));
    }
    err /= horizon;
    if (err <= options.tol || halving >= options.max_halvings) {
      if (stats) *stats = {0.5 * h, err, halving};
      return fine;
    }
    h *= 0.5;
    coarse = std::move(fine);
  }
}

long discrete_steps(double t) {
  if (t < 0.0 || std::abs(t - std::round(t)) > 1e-12) {
    throw std::invalid_argument("discrete-time horizon must be a nonnegative integer");
  }
  return std::lround(t);
}

void validate_times(std::span<const double> times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || (i > 0 && times[i] < times[i - 1])) {
      throw std::invalid_argument("cocycle times must be nonnegative and nondecreasing");
    }
  }
}

}  // namespace

Vector flow(const SystemModel& system, const Vector& x0, double t, const IntegratorOptions& options,
            IntegrationStats* stats) {
  require_dim(system, x0);
  if (system.is_discrete()) {
    const long steps = discrete_steps(t);
    Vector x = x0;
    for (long k = 0; k < steps; ++k) {
      x = system.rhs(x);
      check_orbit(x, system.dim, static_cast<double>(k + 1));
    }
    return x;
  }
  if (t < 0.0) throw std::invalid_argument("flow horizon must be nonnegative");
  if (t == 0.0) return x0;
  const double times[] = {t};
  return integrate_controlled(system, x0, times, false, options, stats).back();
}

std::vector<CocycleJacobian> cocycle_path(const SystemModel& system, const Vector& x0, std::span<const double> times,
                                          const IntegratorOptions& options, IntegrationStats* stats) {
  require_dim(system, x0);
  validate_times(times);
  const Eigen::Index n = system.dim;
  std::vector<CocycleJacobian> out;
  out.reserve(times.size());
  if (system.is_discrete()) {
    Vector x = x0;
    Matrix a = Matrix::Identity(n, n);
    long done = 0;
    for (double t : times) {
      const long target = discrete_steps(t);
      for (; done < target; ++done) {
        a = system.jacobian(x) * a;
        x = system.rhs(x);
        check_orbit(x, n, static_cast<double>(done + 1));
      }
      out.push_back({x0, t, a});
    }
    return out;
  }
  Vector s0(n + n * n);
  s0.head(n) = x0;
  Eigen::Map<Matrix>(s0.data() + n, n, n).setIdentity();
  const std::vector<Vector> path = integrate_controlled(system, s0, times, true, options, stats);
  for (std::size_t k = 0; k < times.size(); ++k) {
    out.push_back({x0, times[k], Eigen::Map<const Matrix>(path[k].data() + n, n, n)});
  }
  return out;
}

CocycleJacobian cocycle(const SystemModel& system, const Vector& x0, double t, const IntegratorOptions& options,
                        IntegrationStats* stats) {
  const double times[] = {t};
  return cocycle_path(system, x0, times, options, stats).front();
}

CompactSet CompactSet::box(std::vector<Interval> bounds) {
  if (bounds.empty()) throw std::invalid_argument("box needs at least one axis");
  for (const Interval& iv : bounds) {
    if (!(iv.lo < iv.hi)) throw std::invalid_argument("box bounds need lo < hi on every axis");
  }
  return CompactSet{std::move(bounds), std::nullopt};
}

bool CompactSet::contains(const Vector& x, double slack) const {
  if (x.size() != dim()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const Interval& iv = bounds[static_cast<std::size_t>(i)];
    if (!(x(i) >= iv.lo - slack && x(i) <= iv.hi + slack)) return false;
  }
  return !constraint || constraint->violation(x) <= slack;
}

std::vector<Vector> sample_set(const CompactSet& set, std::span<const int> resolution) {
  const std::size_t d = set.bounds.size();
  if (resolution.size() != d) throw std::invalid_argument("resolution must give one count per axis");
  for (int r : resolution) {
    if (r < 2) throw std::invalid_argument("resolution must be at least 2 per axis");
  }
  std::vector<Vector> out;
  std::vector<int> idx(d, 0);
  Vector x(static_cast<Eigen::Index>(d));
  while (true) {
    for (std::size_t i = 0; i < d; ++i) {
      const double s = static_cast<double>(idx[i]) / (resolution[i] - 1);
      x(static_cast<Eigen::Index>(i)) = set.bounds[i].lo * (1.0 - s) + set.bounds[i].hi * s;
    }
    if (!set.constraint || set.constraint->violation(x) <= 1e-12) out.push_back(x);
    bool wrapped = true;
    for (std::size_t axis = d; axis-- > 0;) {
      if (++idx[axis] < resolution[axis]) {
        wrapped = false;
        break;
      }
      idx[axis] = 0;
    }
    if (wrapped) break;
  }
  if (out.empty()) throw std::invalid_argument("sample set is empty: the constraint excludes every grid point");
  return out;
}

std::vector<Vector> sample_set(const CompactSet& set, int resolution) {
  const std::vector<int> res(set.bounds.size(), resolution);
  return sample_set(set, res);
}

namespace {

bool orbit_escapes_generic(const SystemModel& system, const CompactSet& set, const Vector& x0,
                           const InvarianceOptions& options) {
  try {
    if (system.is_discrete()) {
      Vector x = x0;
      const long steps = std::lround(options.horizon);
      for (long k = 0; k < steps; ++k) {
        x = system.rhs(x);
        if (!x.allFinite() || !set.contains(x, options.slack)) return true;
      }
      return false;
    }
    const double h = options.integrator.step;
    const int per_check = std::max(1, static_cast<int>(std::lround(options.check_interval / h)));
    const int checks = static_cast<int>(std::ceil(options.horizon / (per_check * h) - 1e-9));
    Vector x = x0;
    for (int c = 0; c < checks; ++c) {
      for (int k = 0; k < per_check; ++k) {
        x = rk4_step(system, x, h, false);
        check_orbit(x, system.dim, 0.0);
      }
      if (!set.contains(x, options.slack)) return true;
    }
    return false;
  } catch (const EscapeError&) {
    return true;
  }
}

std::size_t lanford_block_escapes(double a, const CompactSet& set, std::span<const Vector> points,
                                  const InvarianceOptions& options, const std::atomic<bool>& stop) {
  const kernels::Isa isa = kernels::active_isa();
  kernels::LanfordBatch batch(points.size(), false);
  for (std::size_t i = 0; i < points.size(); ++i) batch.set_lane(i, points[i](0), points[i](1), points[i](2));
  std::vector<char> escaped(points.size(), 0);
  std::size_t count = 0;
  const double h = options.integrator.step;
  const int per_check = std::max(1, static_cast<int>(std::lround(options.check_interval / h)));
  const int checks = static_cast<int>(std::ceil(options.horizon / (per_check * h) - 1e-9));
  Vector x(3);
  for (int c = 0; c < checks && count < points.size(); ++c) {
    if (options.stop_at_first_escape && stop.load()) break;
    kernels::lanford_rk4(isa, a, h, per_check, batch);
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (escaped[i]) continue;
      x << batch.at(0, i), batch.at(1, i), batch.at(2, i);
      if (!x.allFinite() || !set.contains(x, options.slack)) {
        escaped[i] = 1;
        ++count;
        batch.set_lane(i, 0.0, 0.0, 0.0);  // park the lane on the equilibrium O1
      }
    }
  }
  return count;
}

}  // namespace

InvarianceReport check_invariance(const SystemModel& system, const CompactSet& set, std::span<const Vector> points,
                                  const InvarianceOptions& options) {
  if (!(options.horizon > 0.0)) throw std::invalid_argument("invariance horizon must be positive");
  InvarianceReport report{options.horizon, points.size(), 0};
  std::atomic<bool> stop{false};
  std::atomic<std::size_t> escaped{0};
  if (system.batch == BatchKernel::lanford && !system.is_discrete()) {
    constexpr std::size_t kBlock = 256;
    const double a = system.params.at("a");
    const std::size_t blocks = (points.size() + kBlock - 1) / kBlock;
    parallel_for(blocks, [&](std::size_t b) {
      const std::size_t begin = b * kBlock;
      const std::size_t end = std::min(points.size(), begin + kBlock);
      const std::size_t e = lanford_block_escapes(a, set, points.subspan(begin, end - begin), options, stop);
      if (e > 0) stop = true;
      escaped += e;
    });
  } else {
    parallel_for(points.size(), [&](std::size_t i) {
      if (options.stop_at_first_escape && stop.load()) return;
      if (orbit_escapes_generic(system, set, points[i], options)) {
        stop = true;
        ++escaped;
      }
    });
  }
  report.escaped = escaped.load();
  return report;
}

SystemModel lanford_system(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("Lanford parameter a must be positive");
  SystemModel s;
  s.name = "lanford";
  s.time_type = TimeType::continuous;
  s.dim = 3;
  s.params = {{"a", a}};
  s.batch = BatchKernel::lanford;
  s.rhs = [a](const Vector& v) {
    const double x = v(0), y = v(1), z = v(2);
    Vector d(3);
    d << (a - 1.0) * x - y + x * z, x + (a - 1.0) * y + y * z, a * z - (x * x + y * y + z * z);
    return d;
  };
  s.jacobian = [a](const Vector& v) {
    const double x = v(0), y = v(1), z = v(2);
    Matrix j(3, 3);
    j << a - 1.0 + z, -1.0, x,
         1.0, a - 1.0 + z, y,
         -2.0 * x, -2.0 * y, a - 2.0 * z;
    return j;
  };
  return s;
}

namespace {
SystemModel linear_system(const Matrix& m, TimeType type, std::string name) {
  if (m.rows() == 0 || m.rows() != m.cols() || !m.allFinite()) {
    throw std::invalid_argument("linear system needs a finite square matrix");
  }
  SystemModel s;
  s.name = std::move(name);
  s.time_type = type;
  s.dim = m.rows();
  s.rhs = [m](const Vector& x) -> Vector { return m * x; };
  s.jacobian = [m](const Vector&) -> Matrix { return m; };
  return s;
}
}  // namespace

SystemModel linear_map(const Matrix& m) { return linear_system(m, TimeType::discrete, "linmap"); }
SystemModel linear_ode(const Matrix& m) { return linear_system(m, TimeType::continuous, "linode"); }

SystemModel identity_map(Eigen::Index dim) {
  if (dim < 1) throw std::invalid_argument("identity map needs dim >= 1");
  SystemModel s = linear_system(Matrix::Identity(dim, dim), TimeType::discrete, "identity");
  s.params = {{"dim", static_cast<double>(dim)}};
  return s;
}

std::vector<std::string> builtin_system_names() { return {"lanford", "linmap", "linode", "identity"}; }

SystemModel make_builtin_system(const std::string& name, const std::map<std::string, double>& params,
                                const std::optional<Matrix>& matrix) {
  auto allow_only = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : params) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* key) { return k == key; })) {
        throw std::invalid_argument("unknown parameter '" + k + "' for system " + name);
      }
    }
  };
  if (name == "lanford") {
    allow_only({"a"});
    const auto it = params.find("a");
    return lanford_system(it == params.end() ? 2.0 / 3.0 : it->second);
  }
  if (name == "linmap" || name == "linode") {
    allow_only({});
    if (!matrix) throw std::invalid_argument(name + " needs a matrix");
    return name == "linmap" ? linear_map(*matrix) : linear_ode(*matrix);
  }
  if (name == "identity") {
    allow_only({"dim"});
    const auto it = params.find("dim");
    const double dim = it == params.end() ? 2.0 : it->second;
    if (dim < 1 || dim != std::round(dim)) throw std::invalid_argument("identity dim must be a positive integer");
    return identity_map(static_cast<Eigen::Index>(dim));
  }
  throw std::invalid_argument("unknown system '" + name + "'");
}

double jacobian_consistency_error(const SystemModel& system, std::span<const Vector> points, double h) {
  double worst = 0.0;
  for (const Vector& x : points) {
    const Matrix j = system.jacobian(x);
    Matrix fd(system.dim, system.dim);
    for (Eigen::Index c = 0; c < system.dim; ++c) {
      Vector xp = x, xm = x;
      xp(c) += h;
      xm(c) -= h;
      fd.col(c) = (system.rhs(xp) - system.rhs(xm)) / (2.0 * h);
    }
    worst = std::max(worst, (fd - j).cwiseAbs().maxCoeff() / std::max(1.0, j.cwiseAbs().maxCoeff()));
  }
  return worst;
}

AutoSetSelection select_lanford_set(double a, int resolution, const InvarianceOptions& options) {
  const SystemModel system = lanford_system(a);
  std::vector<std::pair<std::string, CompactSet>> candidates;
  for (double r = 1.2; r > 0.07; r *= 0.5) {
    std::ostringstream label;
    label << "box r=" << r;
    candidates.emplace_back(label.str(), CompactSet::box({{-r, r}, {-r, r}, {0.0, 2.0 * a}}));
  }
  {
    const double r = a / std::sqrt(2.0);
    CompactSet ellipsoid = CompactSet::box({{-r, r}, {-r, r}, {0.0, a}});
    ellipsoid.constraint = SetConstraint{"lanford_ellipsoid", {{"a", a}}, [a](const Vector& v) {
                                           return v(0) * v(0) + v(1) * v(1) - 2.0 * v(2) * (a - v(2));
                                         }};
    candidates.emplace_back("invariant ellipsoid", std::move(ellipsoid));
  }
  {
    CompactSet axis = CompactSet::box({{-1.2, 1.2}, {-1.2, 1.2}, {0.0, 2.0 * a}});
    axis.constraint = SetConstraint{"z_axis", {}, [](const Vector& v) { return std::max(std::abs(v(0)), std::abs(v(1))); }};
    candidates.emplace_back("z-axis segment", std::move(axis));
  }

  InvarianceOptions search = options;
  search.stop_at_first_escape = true;
  AutoSetSelection selection;
  for (auto& [label, set] : candidates) {
    const std::vector<Vector> points = sample_set(set, resolution);
    InvarianceReport report = check_invariance(system, set, points, search);
    selection.attempts.push_back({label, set, report});
    if (report.passed()) {
      selection.set = set;
      selection.label = label;
      selection.invariance = report;
      return selection;
    }
  }
  throw NumericError("no Lanford candidate set passed the invariance spot check");
}

}  // namespace resent
