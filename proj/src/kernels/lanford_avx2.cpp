// Compiled with -mavx2 (and without FMA) when the target is x86-64; only
// entered after a runtime CPU check.

#include "lanford_rk4_body.hpp"
#include "resent/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace resent::kernels::detail {

#if defined(__AVX2__)

namespace {

struct Avx2Vec {
  __m256d v;
};

inline Avx2Vec operator+(Avx2Vec a, Avx2Vec b) { return {_mm256_add_pd(a.v, b.v)}; }
inline Avx2Vec operator-(Avx2Vec a, Avx2Vec b) { return {_mm256_sub_pd(a.v, b.v)}; }
inline Avx2Vec operator*(Avx2Vec a, Avx2Vec b) { return {_mm256_mul_pd(a.v, b.v)}; }

struct Avx2Ops {
  using V = Avx2Vec;
  static constexpr std::size_t kWidth = 4;
  static V broadcast(double v) { return {_mm256_set1_pd(v)}; }
  static V load(const double* p) { return {_mm256_loadu_pd(p)}; }
  static void store(double* p, V v) { _mm256_storeu_pd(p, v.v); }
};

}  // namespace

std::size_t lanford_rk4_avx2(double a, double dt, int steps, std::size_t begin, std::size_t end, bool tangent,
                             double* const* comps) {
  return tangent ? lanford_rk4_lanes<Avx2Ops, 12>(a, dt, steps, begin, end, comps)
                 : lanford_rk4_lanes<Avx2Ops, 3>(a, dt, steps, begin, end, comps);
}

#else

std::size_t lanford_rk4_avx2(double, double, int, std::size_t begin, std::size_t, bool, double* const*) {
  return begin;
}

#endif

}  // namespace resent::kernels::detail
