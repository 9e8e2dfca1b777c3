#include <cstring>
#include <vector>

#include "doctest.h"
#include "resent/dynamics.hpp"
#include "resent/kernels.hpp"

using namespace resent;
using namespace resent::kernels;

namespace {

LanfordBatch make_batch(std::size_t n, bool tangent) {
  LanfordBatch b(n, tangent);
  for (std::size_t i = 0; i < n; ++i) b.set_lane(i, 0.3 * std::sin(1.0 + i), 0.2 * std::cos(2.0 * i), 0.05 + 0.01 * i);
  return b;
}

bool bit_equal(double x, double y) { return std::memcmp(&x, &y, sizeof x) == 0; }

}  // namespace

TEST_CASE("scalar kernel is always available") { CHECK(isa_available(Isa::scalar)); }

TEST_CASE("avx2 and scalar kernels agree bit for bit") {
  if (!isa_available(Isa::avx2)) {
    MESSAGE("avx2 not available on this host; skipped");
    return;
  }
  for (bool tangent : {false, true}) {
    for (std::size_t n : {1u, 3u, 4u, 7u, 33u}) {  // include remainder lanes
      LanfordBatch s = make_batch(n, tangent);
      LanfordBatch v = make_batch(n, tangent);
      lanford_rk4(Isa::scalar, 2.0 / 3.0, 1e-3, 500, s);
      lanford_rk4(Isa::avx2, 2.0 / 3.0, 1e-3, 500, v);
      bool same = true;
      for (std::size_t c = 0; c < s.components(); ++c)
        for (std::size_t i = 0; i < n; ++i) same = same && bit_equal(s.at(c, i), v.at(c, i));
      CHECK(same);
    }
  }
}

TEST_CASE("batched kernel agrees with the generic integrator") {
  const double a = 0.75;
  LanfordBatch b = make_batch(5, true);
  const LanfordBatch start = b;
  lanford_rk4(active_isa(), a, 1e-3, 1000, b);
  const SystemModel sys = lanford_system(a);
  IntegratorOptions o;
  o.step = 1e-3;
  o.fixed_step = true;
  for (std::size_t i = 0; i < 5; ++i) {
    Vector x(3);
    x << start.at(0, i), start.at(1, i), start.at(2, i);
    const CocycleJacobian c = cocycle(sys, x, 1.0, o);
    const Vector end = flow(sys, x, 1.0, o);
    for (int k = 0; k < 3; ++k) CHECK(b.at(k, i) == doctest::Approx(end(k)).epsilon(1e-12));
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) CHECK(b.at(3 + 3 * r + k, i) == doctest::Approx(c.matrix(r, k)).epsilon(1e-10));
  }
}
