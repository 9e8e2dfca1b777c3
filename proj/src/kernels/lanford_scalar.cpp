#include "lanford_rk4_body.hpp"
#include "resent/kernels.hpp"

namespace resent::kernels::detail {

namespace {
struct ScalarOps {
  using V = double;
  static constexpr std::size_t kWidth = 1;
  static V broadcast(double v) { return v; }
  static V load(const double* p) { return *p; }
  static void store(double* p, V v) { *p = v; }
};
}  // namespace

void lanford_rk4_scalar(double a, double dt, int steps, std::size_t begin, std::size_t end, bool tangent,
                        double* const* comps) {
  if (tangent) {
    lanford_rk4_lanes<ScalarOps, 12>(a, dt, steps, begin, end, comps);
  } else {
    lanford_rk4_lanes<ScalarOps, 3>(a, dt, steps, begin, end, comps);
  }
}

}  // namespace resent::kernels::detail
