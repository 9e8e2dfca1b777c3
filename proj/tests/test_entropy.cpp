#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "resent/dynamics.hpp"
#include "resent/entropy.hpp"
#include "resent/metric.hpp"

using namespace resent;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

const CompactSet kUnitSquare = CompactSet::box({{-1.0, 1.0}, {-1.0, 1.0}});

}  // namespace

TEST_CASE("identity map has zero entropy bound") {
  const SystemModel s = identity_map(2);
  const int res[] = {3};
  const BoundReport r = compute_bound(s, kUnitSquare, MetricField::identity(2), res);
  CHECK(r.bound == 0.0);
  CHECK(r.units == "bits/step");
}

TEST_CASE("diag(2, 1/2) with the identity metric gives one bit per step") {
  const SystemModel s = linear_map(mat2(2, 0, 0, 0.5));
  const int res[] = {3};
  const BoundReport r = dt_bound(s, kUnitSquare, MetricField::identity(2), res);
  CHECK(r.bound == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.per_point.size() == 9);
}

TEST_CASE("lanford bound with the closed-form metric") {
  const double a = 2.0 / 3.0;
  const SystemModel s = lanford_system(a);
  const CompactSet k = CompactSet::box({{-0.3, 0.3}, {-0.3, 0.3}, {0.0, 2 * a}});
  const int res[] = {5, 5, 11};
  const BoundReport r = ct_bound(s, k, lanford_metric(a), res);
  CHECK(r.bound == doctest::Approx(lanford_closed_form(a)).epsilon(1e-12));
  CHECK(r.bound == doctest::Approx(0.9617966939).epsilon(1e-9));
  CHECK(r.units == "bits/time");
}

TEST_CASE("ct bound needs an orbital derivative") {
  const SystemModel s = lanford_system(2.0 / 3.0);
  const MetricField m = MetricField::tabulated("no pdot", 3, [](const Vector&) {
    return MetricSample{SpdMatrix::identity(3), 0, 0.0, true};
  });
  const int res[] = {2};
  CHECK_THROWS(ct_bound(s, CompactSet::box({{0, 1}, {0, 1}, {0, 1}}), m, res));
}

TEST_CASE("minimizing metric of a scalar map is 2^(N-1)") {
  Matrix m(1, 1);
  m << 2.0;
  const SystemModel s = linear_map(m);
  for (int n : {1, 2, 4, 8}) {
    const MetricField p = minimizing_metric_dt(s, n);
    CHECK(p.eval(Vector::Zero(1)).matrix()(0, 0) == doctest::Approx(std::pow(2.0, n - 1)).epsilon(1e-9));
  }
}

TEST_CASE("first minimizing metric is the identity") {
  const SystemModel s = linear_map(mat2(2, 1, 0, 2));
  const MetricField p = minimizing_metric_dt(s, 1);
  CHECK((p.eval(Vector::Zero(2)).matrix() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
  const int res[] = {2};
  const BoundReport a = dt_bound(s, kUnitSquare, p, res);
  const BoundReport b = dt_bound(s, kUnitSquare, MetricField::identity(2), res);
  CHECK(a.bound == doctest::Approx(b.bound).epsilon(1e-14));
}

TEST_CASE("time-T metric of a scalar linear ode gives lambda / ln 2") {
  Matrix m(1, 1);
  m << 0.3;
  const SystemModel s = linear_ode(m);
  MinimizingMetricOptions o;
  o.barycenter.max_cycles = 200;
  const MetricField p = minimizing_metric_ct(s, 2.0, 8, o);
  const int res[] = {3};
  const BoundReport r = ct_bound(s, CompactSet::box({{-1.0, 1.0}}), p, res);
  CHECK(r.bound == doctest::Approx(0.3 / std::numbers::ln2).epsilon(1e-5));
}

TEST_CASE("oracle on diag(2, 1/2) is exactly one bit per step") {
  const SystemModel s = linear_map(mat2(2, 0, 0, 0.5));
  const std::vector<Vector> pts = sample_set(kUnitSquare, 3);
  const double hs[] = {1, 5, 10, 20};
  const OracleResult r = lyapunov_oracle(s, pts, hs);
  for (double v : r.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("aitken extrapolation of a geometric sequence") {
  // v_k = 1 + 0.5^k
  const auto e = aitken_extrapolate(1.5, 1.25, 1.125);
  REQUIRE(e.has_value());
  CHECK(*e == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(aitken_extrapolate(1.0, 1.0, 1.0) == 1.0);    // stationary
  CHECK_FALSE(aitken_extrapolate(1.0, 2.0, 3.0).has_value());  // linear, no limit
}

TEST_CASE("proximate entropy at lanford equilibria") {
  for (double a : {2.0 / 3.0, 0.75, 1.0}) {
    Vector o2(3);
    o2 << 0, 0, a;
    CHECK(proximate_entropy(lanford_system(a), o2) == doctest::Approx(lanford_closed_form(a)).epsilon(1e-12));
  }
  CHECK_THROWS(proximate_entropy(lanford_system(0.75), Vector::Ones(3)));  // not an equilibrium
  CHECK_THROWS(lanford_closed_form(0.5));
}

TEST_CASE("refinement stops within the budget") {
  const SystemModel s = linear_map(mat2(2, 0, 0, 0.5));
  const BoundReport r = refine_bound(s, kUnitSquare, MetricField::identity(2), 3, 100, 1e-6);
  CHECK_FALSE(r.diagnostics.refinement.empty());
  CHECK(r.per_point.size() <= 100);
}

TEST_CASE("metric distortion vanishes for the identity metric") {
  const std::vector<Vector> pts = sample_set(kUnitSquare, 3);
  CHECK(metric_distortion(MetricField::identity(2), pts) == doctest::Approx(0.0));
}
