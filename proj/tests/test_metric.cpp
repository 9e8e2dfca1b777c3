#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "resent/dynamics.hpp"
#include "resent/entropy.hpp"
#include "resent/metric.hpp"
#include "resent/props.hpp"

using namespace resent;

namespace {

// log2 sqrt of the generalized eigenvalues of (A^T P A, P): the metric
// singular values of A for a constant metric P, computed without any square root.
std::vector<double> generalized_oracle(const Matrix& a, const Matrix& p) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(a.transpose() * p * a, p);
  std::vector<double> out;
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i) out.push_back(0.5 * std::log2(es.eigenvalues()(i)));
  return out;
}

}  // namespace

TEST_CASE("constant-metric singular values match the generalized eigenproblem") {
  std::mt19937_64 rng(21);
  for (int n : {1, 2, 3, 5}) {
    for (int k = 0; k < 25; ++k) {
      const SpdMatrix p = random_matrices::spd(rng, n);
      const Matrix a = random_matrices::invertible(rng, n);
      const MetricField metric = MetricField::constant(p, "constant");
      const Vector x = Vector::Zero(n);
      const MetricSpectrum s = metric_singular_values(metric, x, x, a);
      const std::vector<double> want = generalized_oracle(a, p.matrix());
      for (int i = 0; i < n; ++i) CHECK(s.values[i] == doctest::Approx(want[i]).epsilon(1e-9));
      // determinant identity: the sum is log2 |det A| whatever the metric
      CHECK(s.values.sum() == doctest::Approx(std::log2(std::abs(a.determinant()))).epsilon(1e-9));
    }
  }
}

TEST_CASE("metric singular values are invariant under metric scaling") {
  std::mt19937_64 rng(22);
  const SpdMatrix p = random_matrices::spd(rng, 3);
  const Matrix a = random_matrices::invertible(rng, 3);
  const MetricField m1 = MetricField::constant(p, "p");
  const MetricField m2 = m1.scaled(7.5);
  const Vector x = Vector::Zero(3);
  const MetricSpectrum s1 = metric_singular_values(m1, x, x, a);
  const MetricSpectrum s2 = metric_singular_values(m2, x, x, a);
  for (int i = 0; i < 3; ++i) CHECK(s1.values[i] == doctest::Approx(s2.values[i]).epsilon(1e-12));
}

TEST_CASE("congruence consistency: metric g^T g equals identity metric after change of coordinates") {
  std::mt19937_64 rng(23);
  const Matrix g = random_matrices::invertible(rng, 3);
  const Matrix a = random_matrices::invertible(rng, 3);
  const MetricField m = MetricField::constant(SpdMatrix(g.transpose() * g), "gtg");
  const Vector x = Vector::Zero(3);
  const MetricSpectrum s = metric_singular_values(m, x, x, a);
  const LogSingularVector want = log_singular_values(g * a * g.inverse());
  for (int i = 0; i < 3; ++i) CHECK(s.values[i] == doctest::Approx(want[i]).epsilon(1e-9));
}

TEST_CASE("singular jacobian gives the log-zero sentinel") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 2.0;
  const LogSingularVector s = log_singular_values_with_zeros(a);
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == kLogZero);
}

TEST_CASE("continuous-time spectrum for a constant metric") {
  std::mt19937_64 rng(24);
  const SpdMatrix p = random_matrices::spd(rng, 3);
  const Matrix j = random_matrices::gaussian(rng, 3, 3);
  const MetricSpectrum s = ct_metric_spectrum(p, Vector::Zero(3), j, Matrix::Zero(3, 3));
  const Matrix sym = p.matrix() * j + j.transpose() * p.matrix();
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(sym, p.matrix());
  for (int i = 0; i < 3; ++i) CHECK(s.values[i] == doctest::Approx(es.eigenvalues()(2 - i)).epsilon(1e-9));
}

TEST_CASE("lanford metric spectrum at the origin") {
  const double a = 2.0 / 3.0;
  const SystemModel sys = lanford_system(a);
  const MetricField m = lanford_metric(a);
  const Vector x = Vector::Zero(3);
  const MetricSpectrum s = ct_metric_spectrum(m, x, sys.jacobian(x), m.orbital_derivative(x));
  CHECK(s.values[0] == doctest::Approx(4.0 / 3.0));
  CHECK(s.values[1] == doctest::Approx(-2.0 / 3.0));
  CHECK(s.values[2] == doctest::Approx(-2.0 / 3.0));
}

TEST_CASE("lanford analytic orbital derivative matches the finite difference") {
  const double a = 0.75;
  const SystemModel sys = lanford_system(a);
  const MetricField m = lanford_metric(a);
  Vector x(3);
  x << 0.2, -0.1, 0.6;
  const Matrix fd = orbital_derivative_fd(m, sys, x);
  // forward difference: first order in the step
  CHECK((fd - m.orbital_derivative(x)).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("lanford metric spectrum matches the closed-form roots") {
  for (double a : {2.0 / 3.0, 0.75, 1.0}) {
    const SystemModel sys = lanford_system(a);
    const MetricField m = lanford_metric(a);
    const CompactSet k = CompactSet::box({{-0.5, 0.5}, {-0.5, 0.5}, {0.0, 2 * a}});
    for (const Vector& x : sample_set(k, 5)) {
      const MetricSpectrum s = ct_metric_spectrum(m, x, sys.jacobian(x), m.orbital_derivative(x));
      const auto [l1, l23] = lanford_lambdas(a, x);
      const LogSingularVector want = LogSingularVector::sorted({l1, l23, l23});
      for (int i = 0; i < 3; ++i) CHECK(s.values[i] == doctest::Approx(want[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("asymmetric orbital derivative is rejected") {
  Matrix pdot = Matrix::Zero(2, 2);
  pdot(0, 1) = 1.0;
  CHECK_THROWS(ct_metric_spectrum(SpdMatrix::identity(2), Vector::Zero(2), Matrix::Zero(2, 2), pdot));
}

TEST_CASE("tabulated metric reuses its table") {
  int calls = 0;
  const MetricField m = MetricField::tabulated("counting", 1, [&](const Vector&) {
    ++calls;
    return MetricSample{SpdMatrix::identity(1), 1, 0.0, true};
  });
  const std::vector<Vector> pts{Vector::Zero(1), Vector::Ones(1)};
  const MetricField t = m.tabulate(pts);
  const int after = calls;
  CHECK(t.table_size() == 2);
  (void)t.eval(pts[0]);
  (void)t.eval(pts[1]);
  CHECK(calls == after);
}
