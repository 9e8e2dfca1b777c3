#pragma once

// Restoration-entropy upper bounds from a metric field, the metric sequences
// that drive them toward the exact value, the finite-time Lyapunov oracle and
// the proximate entropy at an equilibrium.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "resent/dynamics.hpp"
#include "resent/metric.hpp"

namespace resent {

inline constexpr int kReportSchemaVersion = 1;

/// Thrown when a Jacobian that must be invertible is not.
class SingularJacobianError : public NumericError {
 public:
  using NumericError::NumericError;
};

struct SetDescriptor {
  std::string kind;
  std::vector<Interval> bounds;
  std::string constraint;
  std::map<std::string, double> constraint_params;
  std::string label;

  static SetDescriptor of(const CompactSet& set, std::string label = {});
  friend bool operator==(const SetDescriptor&, const SetDescriptor&) = default;
};

struct PointBound {
  std::vector<double> state;
  /// log2 alpha_i for maps; natural-log varsigma_i for flows.
  std::vector<double> spectrum;
  /// bits per step or bits per unit time.
  double local = 0.0;
  friend bool operator==(const PointBound&, const PointBound&) = default;
};

struct ExcludedPoint {
  std::vector<double> state;
  std::string reason;
  friend bool operator==(const ExcludedPoint&, const ExcludedPoint&) = default;
};

struct OracleSummary {
  std::vector<double> horizons;
  std::vector<double> values;
  std::optional<double> aitken;
  friend bool operator==(const OracleSummary&, const OracleSummary&) = default;
};

struct RefinementStep {
  int resolution = 0;
  double bound = 0.0;
  friend bool operator==(const RefinementStep&, const RefinementStep&) = default;
};

struct ReportDiagnostics {
  std::vector<ExcludedPoint> excluded;
  std::size_t barycenter_nonconverged = 0;
  std::optional<InvarianceReport> invariance;
  std::vector<RefinementStep> refinement;
  std::vector<std::string> notes;
  friend bool operator==(const ReportDiagnostics&, const ReportDiagnostics&) = default;
};

struct BoundReport {
  int schema_version = kReportSchemaVersion;
  std::string system;
  TimeType time_type = TimeType::continuous;
  std::map<std::string, double> params;
  SetDescriptor set;
  std::vector<int> resolution;
  std::string metric;
  /// N for discrete minimizing metrics, T for continuous ones, 0 otherwise.
  double horizon = 0.0;
  std::string units;
  std::vector<PointBound> per_point;
  double bound = 0.0;
  std::size_t argmax = 0;
  std::optional<OracleSummary> oracle;
  std::string created_at;
  ReportDiagnostics diagnostics;

  const std::vector<double>& maximizer() const { return per_point.at(argmax).state; }
  friend bool operator==(const BoundReport&, const BoundReport&) = default;
};

struct BoundOptions {
  /// Precompute tabulated metrics at the sample points before the sweep.
  bool tabulate = true;
  /// Reported in the BoundReport; 0 for fixed metrics.
  double horizon = 0.0;
};

/// Local value sum max{0, log2 alpha_i^P(x)} at every sample; bound is the max.
BoundReport dt_bound(const SystemModel& system, const CompactSet& set, const MetricField& metric,
                     std::span<const int> resolution, const BoundOptions& options = {});
/// Local value (1 / (2 ln 2)) sum max{0, varsigma_i^P(x)}; needs an orbital derivative.
BoundReport ct_bound(const SystemModel& system, const CompactSet& set, const MetricField& metric,
                     std::span<const int> resolution, const BoundOptions& options = {});
/// Dispatches on the system's time type.
BoundReport compute_bound(const SystemModel& system, const CompactSet& set, const MetricField& metric,
                          std::span<const int> resolution, const BoundOptions& options = {});

/// Re-runs `compute_bound` with the resolution going r -> 2r - 1 on every axis
/// until the bound moves by less than `tol` or the next grid would exceed
/// `max_points`. The history lands in diagnostics.refinement.
BoundReport refine_bound(const SystemModel& system, const CompactSet& set, const MetricField& metric,
                         int start_resolution, std::size_t max_points, double tol = 1e-4,
                         const BoundOptions& options = {});

struct MinimizingMetricOptions {
  BarycenterOptions barycenter{};
  IntegratorOptions integrator{.step = 1e-3, .tol = 1e-9, .max_halvings = 0, .fixed_step = true};
  /// Forward-difference step for the orbital derivative of P_T.
  double fd_step = 1e-5;
};

/// P_N(x) = bar(I, A^(1)(x)^{-1} * I, ..., A^(N-1)(x)^{-1} * I)^{-1}, tabulated.
MetricField minimizing_metric_dt(const SystemModel& system, int n, const MinimizingMetricOptions& options = {});

/// P_T(x) = bar(A^(s_k)(x)^{-1} * I, k = 0..m-1)^{-1} over m equally spaced
/// nodes s_k in [0, T] (both ends included; m = 1 is the single node 0), with a
/// finite-difference orbital derivative along the flow. The derivative
/// re-evaluates the barycenter at the flowed point with the cycle count fixed
/// to the one reached at x, so the quotient differentiates one smooth map.
MetricField minimizing_metric_ct(const SystemModel& system, double t, int time_samples = 64,
                                 const MinimizingMetricOptions& options = {});

struct LyapunovProfile {
  std::vector<double> x;
  double t = 0.0;
  /// Lambda_i(t, x) = log2 alpha_i(A^(t)(x)) / t, nonincreasing.
  LogSingularVector exponents;
};

struct OracleOptions {
  IntegratorOptions integrator{};
  bool keep_profiles = false;
  bool use_batch_kernel = true;
};

struct OracleResult {
  std::vector<double> horizons;
  /// max_x sum max{0, Lambda_i(t, x)} per horizon.
  std::vector<double> values;
  /// Index into `points` of the maximizer per horizon.
  std::vector<std::size_t> argmax;
  /// Aitken extrapolation from the last three values (needs >= 3 horizons).
  std::optional<double> aitken;
  std::vector<LyapunovProfile> profiles;
  std::vector<ExcludedPoint> excluded;

  OracleSummary summary() const { return {horizons, values, aitken}; }
};

/// Finite-time Lyapunov oracle over the given points, one orbit pass per point.
/// Orbits that blow up are excluded and listed.
OracleResult lyapunov_oracle(const SystemModel& system, std::span<const Vector> points, std::span<const double> horizons,
                             const OracleOptions& options = {});

/// Aitken delta-squared extrapolation of three successive values.
std::optional<double> aitken_extrapolate(double v0, double v1, double v2);

/// (1 / ln 2) sum max{Re beta_j, 0} over the eigenvalues of Df(O).
double proximate_entropy(const SystemModel& system, const Vector& equilibrium, double tol = 1e-9);

/// 2 (2a - 1) / ln 2; rejects a < 2/3.
double lanford_closed_form(double a);

/// Closed forms of the three roots for the Lanford metric: {lambda_1, lambda_23}.
std::pair<double, double> lanford_lambdas(double a, const Vector& x);

/// max_x max_k log2 omega_k(P(x)^{1/2}) + max_x max_k log2 omega_k(P(x)^{-1/2})
/// over the points: how far the metric can move the partial sums of log
/// singular values of a cocycle away from the Euclidean ones. A horizon-t
/// oracle value can exceed the metric bound by at most this divided by t.
double metric_distortion(const MetricField& metric, std::span<const Vector> points);

}  // namespace resent
