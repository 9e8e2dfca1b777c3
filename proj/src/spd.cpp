#include "resent/spd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace resent {

namespace {

struct SymmetricEigen {
  Vector values;  // ascending
  Matrix vectors;
};

SymmetricEigen eigen_decompose(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw NumericError("symmetric eigen-decomposition failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix apply_spectral(const SymmetricEigen& e, const Vector& diag) {
  return e.vectors * diag.asDiagonal() * e.vectors.transpose();
}

Matrix spectral_power(const SymmetricEigen& e, double t) {
  Vector d(e.values.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(e.values(i) > 0.0)) throw NumericError("power of a matrix that is not positive definite");
    d(i) = std::pow(e.values(i), t);
  }
  return apply_spectral(e, d);
}

void require_same_dim(const SpdMatrix& p, const SpdMatrix& q) {
  if (p.dim() != q.dim()) throw std::invalid_argument("SPD matrices of different dimension");
}

}  // namespace

SpdMatrix::SpdMatrix(const Matrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw std::invalid_argument("SpdMatrix needs a nonempty square matrix");
  }
  if (!m.allFinite()) throw std::invalid_argument("SpdMatrix entries must be finite");
  m_ = symmetrized(m);
  const Vector ev = eigen_decompose(m_).values;
  const double largest = ev(ev.size() - 1);
  if (!(largest > 0.0) || !(ev(0) > kSpdRelativeFloor * largest)) {
    throw std::invalid_argument("matrix is not positive definite");
  }
}

SpdMatrix::SpdMatrix(const Matrix& m, Unchecked) : m_(symmetrized(m)) {}

SpdMatrix SpdMatrix::identity(Eigen::Index n) { return SpdMatrix(Matrix::Identity(n, n), Unchecked{}); }

SpdMatrix SpdMatrix::diagonal(std::span<const double> entries) {
  Vector d(static_cast<Eigen::Index>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) d(static_cast<Eigen::Index>(i)) = entries[i];
  return SpdMatrix(Matrix(d.asDiagonal()));
}

SpdMatrix SpdMatrix::trusted(const Matrix& m) { return SpdMatrix(m, Unchecked{}); }

LogSingularVector::LogSingularVector(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
    if (values_[i] < values_[i + 1]) throw std::invalid_argument("LogSingularVector must be nonincreasing");
  }
}

LogSingularVector LogSingularVector::sorted(std::vector<double> values) {
  std::sort(values.begin(), values.end(), std::greater<>());
  return LogSingularVector(std::move(values));
}

double LogSingularVector::norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

double LogSingularVector::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

double LogSingularVector::positive_part_sum() const {
  double s = 0.0;
  for (double v : values_) s += std::max(0.0, v);
  return s;
}

LogSingularVector LogSingularVector::reversed_negation() const {
  std::vector<double> r(values_.rbegin(), values_.rend());
  for (double& v : r) v = -v;
  return LogSingularVector(std::move(r));
}

LogSingularVector LogSingularVector::scaled(double factor) const {
  std::vector<double> r = values_;
  for (double& v : r) v *= factor;
  return sorted(std::move(r));
}

LogSingularVector sorted_sum(const LogSingularVector& a, const LogSingularVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("length mismatch");
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + b[i];
  return LogSingularVector::sorted(std::move(r));
}

WeightVector::WeightVector(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.empty()) throw std::invalid_argument("empty weight vector");
  double total = 0.0;
  for (double w : w_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be finite and nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12 * static_cast<double>(w_.size())) {
    throw std::invalid_argument("weights must sum to 1");
  }
}

WeightVector WeightVector::uniform(std::size_t m) {
  if (m == 0) throw std::invalid_argument("empty weight vector");
  return WeightVector(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

SpdMatrix power(const SpdMatrix& p, double t) {
  if (t == 1.0) return p;
  return SpdMatrix::trusted(spectral_power(eigen_decompose(p.matrix()), t));
}

SpdMatrix inverse(const SpdMatrix& p) { return power(p, -1.0); }

SpdMatrix congruence(const Matrix& g, const SpdMatrix& p) {
  if (g.rows() != p.dim() || g.cols() != p.dim()) throw std::invalid_argument("congruence: dimension mismatch");
  const Vector sv = Eigen::JacobiSVD<Matrix>(g).singularValues();
  if (!sv.allFinite() || !(sv(sv.size() - 1) > 0.0) || sv(0) / sv(sv.size() - 1) > 1e14) {
    throw NumericError("congruence: ill-conditioned action");
  }
  return SpdMatrix::trusted(g * p.matrix() * g.transpose());
}

SpdMatrix geodesic(const SpdMatrix& p, const SpdMatrix& q, double t) {
  require_same_dim(p, q);
  if (t == 0.0) return p;
  if (t == 1.0) return q;
  const SymmetricEigen ep = eigen_decompose(p.matrix());
  const Matrix half = spectral_power(ep, 0.5);
  const Matrix inv_half = spectral_power(ep, -0.5);
  const Matrix inner = symmetrized(inv_half * q.matrix() * inv_half);
  const Matrix inner_t = spectral_power(eigen_decompose(inner), t);
  return SpdMatrix::trusted(half * inner_t * half);
}

LogSingularVector log_singular_values(const Matrix& g) {
  if (g.rows() != g.cols() || g.rows() == 0) throw std::invalid_argument("log_singular_values needs a square matrix");
  const Vector sv = Eigen::JacobiSVD<Matrix>(g).singularValues();
  if (!sv.allFinite()) throw NumericError("non-finite singular values");
  const double floor = std::numeric_limits<double>::epsilon() * static_cast<double>(g.rows()) * sv(0);
  std::vector<double> out(static_cast<std::size_t>(sv.size()));
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (!(sv(i) > floor)) throw NumericError("log_singular_values: matrix is singular");
    out[static_cast<std::size_t>(i)] = std::log2(sv(i));
  }
  return LogSingularVector::sorted(std::move(out));
}

LogSingularVector vectorial_distance(const SpdMatrix& p, const SpdMatrix& q) {
  require_same_dim(p, q);
  const Matrix g = power(p, -0.5).matrix() * power(q, 0.5).matrix();
  return log_singular_values(g).scaled(2.0);
}

double riemannian_distance(const SpdMatrix& p, const SpdMatrix& q) {
  require_same_dim(p, q);
  const Matrix inv_half = power(p, -0.5).matrix();
  const Vector ev = eigen_decompose(symmetrized(inv_half * q.matrix() * inv_half)).values;
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (!(ev(i) > 0.0)) throw NumericError("riemannian_distance: lost positive definiteness");
    const double l = std::log2(ev(i));
    s += l * l;
  }
  return std::sqrt(s);
}

double majorization_violation(const LogSingularVector& x, const LogSingularVector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("majorization: length mismatch");
  double sx = 0.0, sy = 0.0, worst = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    if (k + 1 < x.size()) {
      worst = std::max(worst, sx - sy);
    } else {
      worst = std::max(worst, std::abs(sx - sy));
    }
  }
  return worst;
}

bool majorizes_leq(const LogSingularVector& x, const LogSingularVector& y, double tol) {
  const double slack = tol * std::max({1.0, x.norm(), y.norm()});
  return majorization_violation(x, y) <= slack;
}

BarycenterResult inductive_barycenter(std::span<const SpdMatrix> atoms, const WeightVector& weights,
                                      const BarycenterOptions& options) {
  const std::size_t m = atoms.size();
  if (m == 0) throw std::invalid_argument("barycenter of an empty atom list");
  if (weights.size() != m) throw std::invalid_argument("barycenter: weights and atoms differ in length");
  if (options.max_cycles < 1) throw std::invalid_argument("barycenter: max_cycles must be positive");
  for (const SpdMatrix& a : atoms) require_same_dim(atoms[0], a);
  if (m == 1) return {atoms[0], 1, 0.0, true};

  SpdMatrix current = atoms[0];
  double running_weight = weights[0];
  SpdMatrix previous_cycle = current;
  double last_distance = std::numeric_limits<double>::infinity();

  for (int cycle = 1; cycle <= options.max_cycles; ++cycle) {
    const std::size_t first = cycle == 1 ? 1 : 0;
    for (std::size_t idx = first; idx < m; ++idx) {
      running_weight += weights[idx];
      if (weights[idx] == 0.0) continue;
      const double s = weights[idx] / running_weight;
      current = s >= 1.0 ? atoms[idx] : geodesic(current, atoms[idx], s);
    }
    if (cycle > 1) {
      last_distance = riemannian_distance(previous_cycle, current);
      if (!options.fixed_cycles && last_distance < options.tol) {
        return {current, cycle, last_distance, true};
      }
    }
    previous_cycle = current;
  }
  return {current, options.max_cycles, last_distance, last_distance < options.tol};
}

Matrix lyapunov_solve(const SpdMatrix& s, const Matrix& v) {
  if (v.rows() != s.dim() || v.cols() != s.dim()) throw std::invalid_argument("lyapunov_solve: dimension mismatch");
  if (asymmetry(v) > 1e-10) throw std::invalid_argument("lyapunov_solve: right-hand side must be symmetric");
  const SymmetricEigen e = eigen_decompose(s.matrix());
  Matrix h = e.vectors.transpose() * v * e.vectors;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) h(i, j) /= e.values(i) + e.values(j);
  }
  return symmetrized(e.vectors * h * e.vectors.transpose());
}

double asymmetry(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("asymmetry of a non-square matrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace resent
