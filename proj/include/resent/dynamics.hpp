#pragma once

// Dynamical systems: maps and vector fields with analytic Jacobians, the flow
// and its linear cocycle A^(t)(x) = D phi^t(x), compact sample sets and the
// forward-invariance spot check.

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "resent/spd.hpp"

namespace resent {

enum class TimeType { discrete, continuous };

std::string to_string(TimeType t);

/// Vectorized integrators available for a system (see kernels.hpp).
enum class BatchKernel { none, lanford };

struct SystemModel {
  std::string name;
  TimeType time_type = TimeType::continuous;
  Eigen::Index dim = 0;
  /// x -> phi(x) for maps, x -> f(x) for vector fields.
  std::function<Vector(const Vector&)> rhs;
  std::function<Matrix(const Vector&)> jacobian;
  std::map<std::string, double> params;
  BatchKernel batch = BatchKernel::none;

  bool is_discrete() const { return time_type == TimeType::discrete; }
};

/// Escape or blow-up of an orbit.
class EscapeError : public NumericError {
 public:
  EscapeError(const std::string& what, double time) : NumericError(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

inline constexpr double kBlowUpNorm = 1e8;

struct IntegratorOptions {
  /// Initial RK4 step in time units.
  double step = 1e-3;
  /// Richardson estimate bound, relative to 1 + |state|, per unit time.
  double tol = 1e-9;
  /// Step halvings allowed while the estimate is above tol.
  int max_halvings = 4;
  /// Skip the Richardson check and integrate once with `step`.
  bool fixed_step = false;
};

struct IntegrationStats {
  double step = 0.0;
  double error_estimate = 0.0;
  int halvings = 0;
};

/// Time-t map. Discrete systems require integer t.
Vector flow(const SystemModel& system, const Vector& x0, double t, const IntegratorOptions& options = {},
            IntegrationStats* stats = nullptr);

struct CocycleJacobian {
  Vector x;
  double t = 0.0;
  Matrix matrix;
};

/// A^(t)(x0): ordered Jacobian product for maps, the variational equation
/// V' = Df(x(t)) V, V(0) = I, integrated jointly with the state for flows.
CocycleJacobian cocycle(const SystemModel& system, const Vector& x0, double t, const IntegratorOptions& options = {},
                        IntegrationStats* stats = nullptr);

/// A^(t)(x0) at every (nondecreasing) time in `times`, from one pass along the orbit.
std::vector<CocycleJacobian> cocycle_path(const SystemModel& system, const Vector& x0, std::span<const double> times,
                                          const IntegratorOptions& options = {}, IntegrationStats* stats = nullptr);

/// Constraint g(x) <= 0 restricting a box. `name` and `params` describe it in reports.
struct SetConstraint {
  std::string name;
  std::map<std::string, double> params;
  std::function<double(const Vector&)> violation;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct CompactSet {
  std::vector<Interval> bounds;
  std::optional<SetConstraint> constraint;

  static CompactSet box(std::vector<Interval> bounds);
  std::string kind() const { return constraint ? "box_with_constraint" : "box"; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(bounds.size()); }
  /// Membership with absolute slack on both the box and the constraint.
  bool contains(const Vector& x, double slack = 0.0) const;
};

/// Row-major uniform grid over the box (last axis fastest), filtered by the
/// constraint. Throws if the constraint removes every point.
std::vector<Vector> sample_set(const CompactSet& set, std::span<const int> resolution);

/// Same resolution on every axis.
std::vector<Vector> sample_set(const CompactSet& set, int resolution);

struct InvarianceReport {
  double horizon = 0.0;
  std::size_t points = 0;
  std::size_t escaped = 0;
  double escaped_fraction() const { return points == 0 ? 0.0 : static_cast<double>(escaped) / static_cast<double>(points); }
  bool passed() const { return escaped == 0; }
  friend bool operator==(const InvarianceReport&, const InvarianceReport&) = default;
};

struct InvarianceOptions {
  double horizon = 20.0;
  /// Distance outside K tolerated before a point counts as escaped.
  double slack = 1e-6;
  /// Time between membership checks for flows.
  double check_interval = 0.01;
  /// Stop at the first escape (the fraction is then a lower bound).
  bool stop_at_first_escape = false;
  IntegratorOptions integrator{.step = 1e-3, .tol = 1e-9, .max_halvings = 0, .fixed_step = true};
};

/// Iterates every point and counts orbits that leave K within the horizon.
InvarianceReport check_invariance(const SystemModel& system, const CompactSet& set, std::span<const Vector> points,
                                  const InvarianceOptions& options = {});

/// Built-in systems. Unknown names throw std::invalid_argument.
///   lanford   continuous, R^3, param a (default 2/3)
///   linmap    discrete x -> M x
///   linode    continuous x' = M x
///   identity  discrete identity map of dimension `dim` (default 2)
SystemModel lanford_system(double a = 2.0 / 3.0);
SystemModel linear_map(const Matrix& m);
SystemModel linear_ode(const Matrix& m);
SystemModel identity_map(Eigen::Index dim);

std::vector<std::string> builtin_system_names();
SystemModel make_builtin_system(const std::string& name, const std::map<std::string, double>& params,
                                const std::optional<Matrix>& matrix = std::nullopt);

/// Max relative error between the analytic Jacobian and central differences
/// at the given points.
double jacobian_consistency_error(const SystemModel& system, std::span<const Vector> points, double h = 1e-6);

/// Result of the Lanford invariant-set search.
struct AutoSetAttempt {
  std::string label;
  CompactSet set;
  InvarianceReport invariance;
};

struct AutoSetSelection {
  CompactSet set;
  std::string label;
  InvarianceReport invariance;
  std::vector<AutoSetAttempt> attempts;
};

/// Walks the Lanford candidate sets from largest to smallest and returns the
/// first whose grid passes the invariance spot check: the default box
/// [-r, r]^2 x [0, 2a] with r = 1.2 halved four times, the invariant ellipsoid
/// x^2 + y^2 <= 2 z (a - z) (exactly invariant for a = 2/3), and the z-axis
/// segment. Throws if none passes.
AutoSetSelection select_lanford_set(double a, int resolution, const InvarianceOptions& options = {});

}  // namespace resent
