#pragma once

// Riemannian metrics x -> P(x) on the state space and the spectra they induce:
// singular values of a Jacobian measured from (R^n, P(x)) to (R^n, P(phi(x)))
// for maps, and the roots of det(P J + J^T P + Pdot - lambda P) = 0 for flows.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "resent/dynamics.hpp"
#include "resent/spd.hpp"

namespace resent {

/// Stand-in for log 0 = -inf. The max{0, .} in every bound annihilates it.
inline constexpr double kLogZero = -1e18;

/// Base-2 log singular values, nonincreasing; exact zeros map to kLogZero.
LogSingularVector log_singular_values_with_zeros(const Matrix& g);

enum class MetricKind { constant, analytic, tabulated };
enum class PdotSource { none, analytic, finite_difference };

std::string to_string(MetricKind k);
std::string to_string(PdotSource s);

/// Value of a computed metric at one point together with barycenter bookkeeping.
struct MetricSample {
  SpdMatrix value;
  int cycles = 0;
  double last_distance = 0.0;
  bool converged = true;
};

class MetricField {
 public:
  using Rule = std::function<MetricSample(const Vector&)>;
  using Derivative = std::function<Matrix(const Vector&)>;
  using ValueAndDerivative = std::function<std::pair<MetricSample, Matrix>(const Vector&)>;

  static MetricField identity(Eigen::Index dim);
  static MetricField constant(const SpdMatrix& p, std::string descriptor);
  static MetricField analytic(std::string descriptor, Eigen::Index dim, std::function<SpdMatrix(const Vector&)> eval,
                              Derivative orbital_derivative);
  static MetricField tabulated(std::string descriptor, Eigen::Index dim, Rule rule);

  const std::string& descriptor() const { return descriptor_; }
  Eigen::Index dim() const { return dim_; }
  MetricKind kind() const { return kind_; }
  PdotSource pdot_source() const { return pdot_; }
  bool has_orbital_derivative() const { return pdot_ != PdotSource::none; }

  SpdMatrix eval(const Vector& x) const;
  MetricSample sample(const Vector& x) const;
  Matrix orbital_derivative(const Vector& x) const;
  std::pair<MetricSample, Matrix> value_and_derivative(const Vector& x) const;

  /// Copy whose values at `points` are precomputed (in parallel) into an
  /// immutable table; other points still go through the rule.
  MetricField tabulate(std::span<const Vector> points) const;
  std::size_t table_size() const { return table_ ? table_->size() : 0; }
  /// Table entries whose barycenter stopped on max_cycles rather than tol.
  std::size_t table_nonconverged() const;

  /// Copy whose orbital derivative is the forward difference along the flow
  /// of `system` (one RK4 step of length h). A custom combined evaluation may
  /// replace the generic one.
  MetricField with_flow_derivative(const SystemModel& system, double h = 1e-5,
                                   ValueAndDerivative combined = {}) const;

  /// c * P; c * Pdot.
  MetricField scaled(double c) const;

 private:
  using Table = std::map<std::vector<double>, MetricSample>;

  std::string descriptor_;
  Eigen::Index dim_ = 0;
  MetricKind kind_ = MetricKind::constant;
  PdotSource pdot_ = PdotSource::none;
  Rule rule_;
  Derivative derivative_;
  ValueAndDerivative combined_;
  std::shared_ptr<const Table> table_;
};

/// Metric P(x, y, z) = diag(1, 1, 1/2) exp(2z/a) with Pdot = (2 zdot / a) P.
MetricField lanford_metric(double a);

struct MetricSpectrum {
  Vector point;
  LogSingularVector values;
};

/// log2 of the singular values of B = P(phi(x))^{1/2} A P(x)^{-1/2}.
MetricSpectrum metric_singular_values(const MetricField& metric, const Vector& x, const Vector& phi_x,
                                      const Matrix& jacobian);

/// Eigenvalues, nonincreasing, of P^{-1/2} (P J + J^T P + Pdot) P^{-1/2}. Values are
/// natural-log rates, not base-2 logs. Rejects an asymmetric Pdot.
MetricSpectrum ct_metric_spectrum(const SpdMatrix& p, const Vector& x, const Matrix& jacobian, const Matrix& pdot);
MetricSpectrum ct_metric_spectrum(const MetricField& metric, const Vector& x, const Matrix& jacobian, const Matrix& pdot);

/// (P(x(h, x)) - P(x)) / h, symmetrized; x(h, x) is one RK4 step of length h.
Matrix orbital_derivative_fd(const MetricField& metric, const SystemModel& system, const Vector& x, double h = 1e-5);

/// Largest log2 of the product of the k largest singular values, over k = 0..n.
double log_max_partial_product(const Matrix& g);

}  // namespace resent
