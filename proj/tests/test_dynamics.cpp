#include <cmath>
#include <vector>

#include "doctest.h"
#include "resent/dynamics.hpp"

using namespace resent;

TEST_CASE("lanford jacobian agrees with finite differences") {
  const SystemModel s = lanford_system(2.0 / 3.0);
  const CompactSet k = CompactSet::box({{-1.0, 1.0}, {-1.0, 1.0}, {0.0, 4.0 / 3.0}});
  const int res[] = {5, 5, 4};
  const std::vector<Vector> pts = sample_set(k, res);
  CHECK(pts.size() == 100);
  CHECK(jacobian_consistency_error(s, pts) < 1e-6);
}

TEST_CASE("sample_set covers the corners of the box") {
  const CompactSet k = CompactSet::box({{0.0, 1.0}, {-2.0, 2.0}});
  const std::vector<Vector> pts = sample_set(k, 3);
  REQUIRE(pts.size() == 9);
  double lo = 1e9, hi = -1e9;
  for (const Vector& p : pts) {
    lo = std::min(lo, p(1));
    hi = std::max(hi, p(1));
  }
  CHECK(lo == -2.0);
  CHECK(hi == 2.0);
}

TEST_CASE("linear ode flow matches the matrix exponential") {
  Matrix m(2, 2);
  m << 0.5, 0.0, 0.0, -1.0;
  const SystemModel s = linear_ode(m);
  Vector x(2);
  x << 1.0, 1.0;
  const Vector y = flow(s, x, 2.0);
  CHECK(y(0) == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
  CHECK(y(1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-9));
}

TEST_CASE("cocycle property D(x, s+t) = D(phi_s x, t) D(x, s)") {
  const SystemModel s = lanford_system(2.0 / 3.0);
  Vector x(3);
  x << 0.1, -0.05, 0.4;
  const CocycleJacobian a = cocycle(s, x, 0.7);
  const Vector mid = flow(s, x, 0.7);
  const CocycleJacobian b = cocycle(s, mid, 0.8);
  const CocycleJacobian ab = cocycle(s, x, 1.5);
  CHECK((b.matrix * a.matrix - ab.matrix).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((flow(s, mid, 0.8) - flow(s, x, 1.5)).norm() < 1e-9);
}

TEST_CASE("discrete cocycle is the product of jacobians") {
  Matrix m(2, 2);
  m << 2, 1, 0, 2;
  const SystemModel s = linear_map(m);
  const CocycleJacobian c = cocycle(s, Vector::Zero(2), 3.0);
  CHECK((c.matrix - m * m * m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("escape to infinity raises EscapeError") {
  Matrix m(1, 1);
  m << 30.0;
  const SystemModel s = linear_ode(m);
  CHECK_THROWS_AS(flow(s, Vector::Ones(1), 10.0), EscapeError);
}

TEST_CASE("invariance spot check flags a non-invariant box") {
  Matrix m(1, 1);
  m << 1.0;
  const SystemModel s = linear_ode(m);
  const CompactSet k = CompactSet::box({{-1.0, 1.0}});
  const std::vector<Vector> pts = sample_set(k, 5);
  InvarianceOptions o;
  o.horizon = 2.0;
  const InvarianceReport r = check_invariance(s, k, pts, o);
  CHECK(r.points == 5);
  CHECK(r.escaped == 4);  // everything except the origin
  CHECK_FALSE(r.passed());
}

TEST_CASE("lanford auto set passes its own spot check") {
  const AutoSetSelection sel = select_lanford_set(2.0 / 3.0, 9);
  CHECK(sel.invariance.passed());
  CHECK(sel.invariance.points > 0);
  CHECK_FALSE(sel.attempts.empty());
}

TEST_CASE("unknown builtin system") { CHECK_THROWS(make_builtin_system("henon-ish", {})); }
