#pragma once

// Lane-generic RK4 body for the Lanford field and its variational equation.
// `Ops` supplies the lane type V (double or a SIMD register wrapper) with
// +, -, * and load/store/broadcast. Every instantiation must see the same
// expression sequence: the scalar and SIMD kernels are compared bit for bit.

#include <cstddef>

namespace resent::kernels::detail {

template <class V>
struct LanfordCoefficients {
  V a;
  V a_minus_1;
  V two;
};

template <class V>
inline void lanford_field(const LanfordCoefficients<V>& c, const V* s, V* d) {
  const V x = s[0], y = s[1], z = s[2];
  d[0] = c.a_minus_1 * x - y + x * z;
  d[1] = x + c.a_minus_1 * y + y * z;
  d[2] = c.a * z - (x * x + y * y + z * z);
}

// Jacobian rows: [a-1+z, -1, x], [1, a-1+z, y], [-2x, -2y, a-2z]; d = J V.
template <class V>
inline void lanford_tangent(const LanfordCoefficients<V>& c, const V* s, V* d) {
  const V x = s[0], y = s[1], z = s[2];
  const V diag = c.a_minus_1 + z;
  const V last = c.a - c.two * z;
  const V* v = s + 3;
  V* dv = d + 3;
  for (int col = 0; col < 3; ++col) {
    dv[col] = diag * v[col] - v[3 + col] + x * v[6 + col];
    dv[3 + col] = v[col] + diag * v[3 + col] + y * v[6 + col];
    dv[6 + col] = last * v[6 + col] - c.two * (x * v[col] + y * v[3 + col]);
  }
}

template <class V, int kDim>
inline void lanford_rhs(const LanfordCoefficients<V>& c, const V* s, V* d) {
  lanford_field(c, s, d);
  if constexpr (kDim == 12) lanford_tangent(c, s, d);
}

template <class V, int kDim>
inline void lanford_rk4_step(const LanfordCoefficients<V>& c, const V& half_dt, const V& dt, const V& sixth_dt,
                             V* s) {
  V k1[kDim], k2[kDim], k3[kDim], k4[kDim], tmp[kDim];
  lanford_rhs<V, kDim>(c, s, k1);
  for (int i = 0; i < kDim; ++i) tmp[i] = s[i] + half_dt * k1[i];
  lanford_rhs<V, kDim>(c, tmp, k2);
  for (int i = 0; i < kDim; ++i) tmp[i] = s[i] + half_dt * k2[i];
  lanford_rhs<V, kDim>(c, tmp, k3);
  for (int i = 0; i < kDim; ++i) tmp[i] = s[i] + dt * k3[i];
  lanford_rhs<V, kDim>(c, tmp, k4);
  for (int i = 0; i < kDim; ++i) s[i] = s[i] + sixth_dt * (k1[i] + c.two * k2[i] + c.two * k3[i] + k4[i]);
}

/// Advances lanes [begin, begin + n * Ops::kWidth) and returns the first lane not processed.
template <class Ops, int kDim>
std::size_t lanford_rk4_lanes(double a, double dt, int steps, std::size_t begin, std::size_t end,
                              double* const* comps) {
  using V = typename Ops::V;
  const LanfordCoefficients<V> c{Ops::broadcast(a), Ops::broadcast(a - 1.0), Ops::broadcast(2.0)};
  const V half_dt = Ops::broadcast(0.5 * dt);
  const V full_dt = Ops::broadcast(dt);
  const V sixth_dt = Ops::broadcast(dt / 6.0);
  std::size_t lane = begin;
  for (; lane + Ops::kWidth <= end; lane += Ops::kWidth) {
    V s[kDim];
    for (int i = 0; i < kDim; ++i) s[i] = Ops::load(comps[i] + lane);
    for (int step = 0; step < steps; ++step) lanford_rk4_step<V, kDim>(c, half_dt, full_dt, sixth_dt, s);
    for (int i = 0; i < kDim; ++i) Ops::store(comps[i] + lane, s[i]);
  }
  return lane;
}

}  // namespace resent::kernels::detail
