#pragma once

// Trace-metric geometry on symmetric positive-definite matrices: matrix
// powers, the congruence action g*p = g p g^T, geodesics p #_t q, log
// singular values, the vectorial distance, the majorization order and the
// cyclic inductive barycenter.
//
// All logarithms are base 2. Matrices are small (n <= 10) and every matrix
// function goes through a full symmetric eigen-decomposition.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace resent {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when an eigen-decomposition or SVD breaks down, or a quantity that
/// must be finite is not.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigenvalues at or below this fraction of the largest one reject an SpdMatrix.
inline constexpr double kSpdRelativeFloor = 1e-12;

/// Symmetric positive-definite matrix. Construction symmetrizes the input and
/// rejects it unless the smallest eigenvalue exceeds kSpdRelativeFloor times the
/// largest. The stored matrix is exactly symmetric.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Matrix& m);

  static SpdMatrix identity(Eigen::Index n);
  static SpdMatrix diagonal(std::span<const double> entries);
  /// Symmetrizes without the eigenvalue check. For results of operations whose
  /// positivity follows from the formula (powers, congruences, geodesics).
  static SpdMatrix trusted(const Matrix& m);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  struct Unchecked {};
  SpdMatrix(const Matrix& m, Unchecked);

  Matrix m_;
};

/// Nonincreasing vector of base-2 logarithms (a point of the closed Weyl chamber).
class LogSingularVector {
 public:
  LogSingularVector() = default;
  /// Throws std::invalid_argument if `values` is not nonincreasing.
  explicit LogSingularVector(std::vector<double> values);
  static LogSingularVector sorted(std::vector<double> values);
  static LogSingularVector zeros(std::size_t n) { return LogSingularVector(std::vector<double>(n, 0.0)); }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  double norm() const;
  double sum() const;
  /// Sum of max{0, v_i}.
  double positive_part_sum() const;
  /// i(xi) = -(xi_n, ..., xi_1).
  LogSingularVector reversed_negation() const;
  LogSingularVector scaled(double factor) const;

  friend bool operator==(const LogSingularVector&, const LogSingularVector&) = default;

 private:
  std::vector<double> values_;
};

/// Elementwise sum, re-sorted nonincreasing.
LogSingularVector sorted_sum(const LogSingularVector& a, const LogSingularVector& b);

/// Element of the probability simplex.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> weights);
  static WeightVector uniform(std::size_t m);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& values() const { return w_; }

 private:
  std::vector<double> w_;
};

SpdMatrix power(const SpdMatrix& p, double t);
SpdMatrix inverse(const SpdMatrix& p);

/// g * p = g p g^T. Rejects g whose condition number exceeds 1e14.
SpdMatrix congruence(const Matrix& g, const SpdMatrix& p);

/// p #_t q = p^{1/2} (p^{-1/2} q p^{-1/2})^t p^{1/2}.
SpdMatrix geodesic(const SpdMatrix& p, const SpdMatrix& q, double t);

/// Base-2 logs of the singular values of an invertible g, nonincreasing.
LogSingularVector log_singular_values(const Matrix& g);

/// 2 sigma(p^{-1/2} q^{1/2}).
LogSingularVector vectorial_distance(const SpdMatrix& p, const SpdMatrix& q);

/// ||log2 eig(p^{-1/2} q p^{-1/2})||_2, the trace-metric distance in bits.
double riemannian_distance(const SpdMatrix& p, const SpdMatrix& q);

inline constexpr double kMajorizationTolerance = 1e-8;

/// x <= y in the majorization order: partial sums of x do not exceed those of y
/// and the totals agree. Slack is `tol * max(1, ||x||, ||y||)`.
bool majorizes_leq(const LogSingularVector& x, const LogSingularVector& y,
                   double tol = kMajorizationTolerance);

/// Largest amount by which x <= y is violated (0 when it holds exactly).
double majorization_violation(const LogSingularVector& x, const LogSingularVector& y);

struct BarycenterOptions {
  int max_cycles = 10000;
  double tol = 1e-9;
  /// Run exactly max_cycles cycles, ignoring tol. Makes the result a fixed
  /// smooth function of the atoms, which finite differences rely on.
  bool fixed_cycles = false;
};

struct BarycenterResult {
  SpdMatrix value;
  int cycles = 0;
  /// Distance between the last two full-cycle iterates.
  double last_distance = 0.0;
  bool converged = false;
};

/// Cyclic inductive mean: bar_1 = p_1, bar_k = bar_{k-1} #_{s_k} p_{k mod m} with
/// s_k = w_{k mod m} / sum_{i<=k} w_{i mod m}; residue 0 selects atom m. Stops
/// once consecutive full-cycle iterates are closer than tol.
BarycenterResult inductive_barycenter(std::span<const SpdMatrix> atoms, const WeightVector& weights,
                                      const BarycenterOptions& options = {});

/// Unique symmetric h with h s + s h = v, for SPD s and symmetric v.
Matrix lyapunov_solve(const SpdMatrix& s, const Matrix& v);

/// Largest |m_ij - m_ji| relative to max(1, |m|_max).
double asymmetry(const Matrix& m);

}  // namespace resent
