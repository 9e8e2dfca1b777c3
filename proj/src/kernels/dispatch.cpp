#include <cstdlib>
#include <string>

#include "resent/kernels.hpp"

namespace resent::kernels {

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) {
  if (isa == Isa::scalar) return true;
#if defined(RESENT_HAVE_AVX2_KERNELS) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() {
  if (const char* forced = std::getenv("RESENT_ISA")) {
    const std::string name(forced);
    if (name == "scalar") return Isa::scalar;
    if (name == "avx2" && isa_available(Isa::avx2)) return Isa::avx2;
  }
  return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

LanfordBatch::LanfordBatch(std::size_t count, bool with_tangent) : count_(count), with_tangent_(with_tangent) {
  for (std::size_t c = 0; c < components(); ++c) data_[c].assign(count, 0.0);
}

void LanfordBatch::set_lane(std::size_t lane, double x, double y, double z) {
  data_[0][lane] = x;
  data_[1][lane] = y;
  data_[2][lane] = z;
  if (with_tangent_) {
    for (std::size_t k = 0; k < 9; ++k) data_[3 + k][lane] = (k % 4 == 0) ? 1.0 : 0.0;
  }
}

std::array<double*, 12> LanfordBatch::pointers() {
  std::array<double*, 12> p{};
  for (std::size_t c = 0; c < components(); ++c) p[c] = data_[c].data();
  return p;
}

void lanford_rk4(Isa isa, double a, double dt, int steps, LanfordBatch& batch) {
  auto comps = batch.pointers();
  std::size_t done = 0;
  if (isa == Isa::avx2 && isa_available(Isa::avx2)) {
    done = detail::lanford_rk4_avx2(a, dt, steps, 0, batch.size(), batch.has_tangent(), comps.data());
  }
  detail::lanford_rk4_scalar(a, dt, steps, done, batch.size(), batch.has_tangent(), comps.data());
}

}  // namespace resent::kernels
