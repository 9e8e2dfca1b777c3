#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "resent/props.hpp"
#include "resent/spd.hpp"

using namespace resent;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

SpdMatrix diag(std::vector<double> d) { return SpdMatrix::diagonal(d); }

}  // namespace

TEST_CASE("spd construction rejects non-spd input") {
  Matrix bad(2, 2);
  bad << 1, 2, 2, 1;  // eigenvalue -1
  CHECK_THROWS_AS(SpdMatrix{bad}, std::invalid_argument);
  Matrix nearly_singular(2, 2);
  nearly_singular << 1, 0, 0, 1e-13;
  CHECK_THROWS(SpdMatrix{nearly_singular});
  CHECK_THROWS(SpdMatrix{Matrix(2, 3)});
}

TEST_CASE("power and inverse on a diagonal matrix") {
  const SpdMatrix p = diag({4.0, 0.25});
  CHECK(power(p, 0.5).matrix()(0, 0) == doctest::Approx(2.0));
  CHECK(power(p, 0.5).matrix()(1, 1) == doctest::Approx(0.5));
  CHECK(max_abs(inverse(p).matrix() * p.matrix() - Matrix::Identity(2, 2)) < 1e-14);
}

TEST_CASE("geodesic midpoint solves the Riccati equation X p^-1 X = q") {
  std::mt19937_64 rng(7);
  for (int n : {1, 2, 3, 5}) {
    for (int k = 0; k < 20; ++k) {
      const SpdMatrix p = random_matrices::spd(rng, n);
      const SpdMatrix q = random_matrices::spd(rng, n);
      const Matrix x = geodesic(p, q, 0.5).matrix();
      const Matrix lhs = x * p.matrix().inverse() * x;
      CHECK(max_abs(lhs - q.matrix()) < 1e-9 * (1.0 + max_abs(q.matrix())));
    }
  }
}

TEST_CASE("geodesic endpoints") {
  std::mt19937_64 rng(8);
  const SpdMatrix p = random_matrices::spd(rng, 3);
  const SpdMatrix q = random_matrices::spd(rng, 3);
  CHECK(max_abs(geodesic(p, q, 0.0).matrix() - p.matrix()) < 1e-10);
  CHECK(max_abs(geodesic(p, q, 1.0).matrix() - q.matrix()) < 1e-10);
}

TEST_CASE("log singular values against a direct SVD") {
  Matrix g(2, 2);
  g << 2, 1, 0, 2;
  const LogSingularVector s = log_singular_values(g);
  // singular values of [[2,1],[0,2]]: sqrt((9 +- sqrt(17)) / 2)
  CHECK(s[0] == doctest::Approx(0.5 * std::log2((9 + std::sqrt(17.0)) / 2)));
  CHECK(s[1] == doctest::Approx(0.5 * std::log2((9 - std::sqrt(17.0)) / 2)));
  CHECK(s.sum() == doctest::Approx(2.0));
}

TEST_CASE("vectorial distance of commuting matrices") {
  const LogSingularVector d = vectorial_distance(SpdMatrix::identity(2), diag({4.0, 0.25}));
  CHECK(d[0] == doctest::Approx(2.0));
  CHECK(d[1] == doctest::Approx(-2.0));
  CHECK(riemannian_distance(SpdMatrix::identity(2), diag({4.0, 0.25})) == doctest::Approx(std::sqrt(8.0)));
}

TEST_CASE("riemannian distance is congruence invariant") {
  std::mt19937_64 rng(9);
  const SpdMatrix p = random_matrices::spd(rng, 3);
  const SpdMatrix q = random_matrices::spd(rng, 3);
  const Matrix g = random_matrices::invertible(rng, 3);
  CHECK(riemannian_distance(congruence(g, p), congruence(g, q)) == doctest::Approx(riemannian_distance(p, q)));
}

TEST_CASE("majorization order") {
  const LogSingularVector x({1.0, 0.0});
  const LogSingularVector y({2.0, -1.0});
  CHECK(majorizes_leq(x, y));
  CHECK_FALSE(majorizes_leq(y, x));
  CHECK_FALSE(majorizes_leq(LogSingularVector({1.0, 0.5}), y));  // totals differ
  CHECK(majorization_violation(x, y) <= 0.0);
}

TEST_CASE("inductive barycenter of commuting atoms is the weighted geometric mean") {
  const std::vector<SpdMatrix> atoms{diag({1.0, 8.0}), diag({4.0, 2.0}), diag({16.0, 0.5})};
  const BarycenterResult r = inductive_barycenter(atoms, WeightVector::uniform(3));
  CHECK(r.converged);
  CHECK(r.value.matrix()(0, 0) == doctest::Approx(4.0));  // (1*4*16)^(1/3)
  CHECK(r.value.matrix()(1, 1) == doctest::Approx(2.0));  // (8*2*0.5)^(1/3)
  CHECK(std::abs(r.value.matrix()(0, 1)) < 1e-14);
}

TEST_CASE("barycenter of two atoms is the geodesic midpoint") {
  std::mt19937_64 rng(10);
  const std::vector<SpdMatrix> atoms{random_matrices::spd(rng, 3), random_matrices::spd(rng, 3)};
  const BarycenterResult r = inductive_barycenter(atoms, WeightVector::uniform(2));
  const SpdMatrix mid = geodesic(atoms[0], atoms[1], 0.5);
  CHECK(riemannian_distance(r.value, mid) < 1e-6);
}

TEST_CASE("barycenter reports max_cycles exhaustion") {
  std::mt19937_64 rng(11);
  const std::vector<SpdMatrix> atoms{random_matrices::spd(rng, 3), random_matrices::spd(rng, 3),
                                     random_matrices::spd(rng, 3)};
  BarycenterOptions o;
  o.max_cycles = 2;
  o.tol = 1e-15;
  const BarycenterResult r = inductive_barycenter(atoms, WeightVector::uniform(3), o);
  CHECK_FALSE(r.converged);
  CHECK(r.cycles == 2);
}

TEST_CASE("construction symmetrizes") {
  Matrix asym(2, 2);
  asym << 2, 1, 0, 2;
  const SpdMatrix p(asym);
  CHECK(p.matrix()(0, 1) == 0.5);
  CHECK(p.matrix()(1, 0) == 0.5);
}

TEST_CASE("weights live on the simplex") {
  CHECK_NOTHROW(WeightVector({1.0, 0.0}));
  CHECK_THROWS(WeightVector({1.5, -0.5}));
  CHECK_THROWS(WeightVector({0.5, 0.4}));
}

TEST_CASE("scalar barycenter of 1 and 4 is 2") {
  const std::vector<SpdMatrix> atoms{diag({1.0}), diag({4.0})};
  CHECK(inductive_barycenter(atoms, WeightVector::uniform(2)).value.matrix()(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("lyapunov solve") {
  std::mt19937_64 rng(12);
  for (int n : {1, 2, 4}) {
    const SpdMatrix s = random_matrices::spd(rng, n);
    const Matrix v = random_matrices::symmetric(rng, n);
    const Matrix h = lyapunov_solve(s, v);
    CHECK(max_abs(h * s.matrix() + s.matrix() * h - v) < 1e-10 * (1.0 + max_abs(v)));
    CHECK(asymmetry(h) < 1e-12);
  }
}
