#pragma once

// Batched RK4 kernels for the built-in Lanford field. Lanes are laid out
// structure-of-arrays: component c of point i lives at comps[c][i]. The scalar
// kernel is the reference; the AVX2 kernel runs four lanes per instruction and
// performs the same operations in the same order, so both produce identical
// bits. The kernel is picked at runtime from the CPU features, and the
// RESENT_ISA environment variable (scalar | avx2) can force a choice.

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

namespace resent::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
/// Best available ISA, honoring RESENT_ISA when it names an available one.
Isa active_isa();

/// Lanford states and, when `with_tangent` is set, the 3x3 tangent matrices
/// (row-major entries V_rc in comps[3 + 3r + c]).
class LanfordBatch {
 public:
  LanfordBatch(std::size_t count, bool with_tangent);

  std::size_t size() const { return count_; }
  bool has_tangent() const { return with_tangent_; }
  std::size_t components() const { return with_tangent_ ? 12 : 3; }

  double& at(std::size_t component, std::size_t lane) { return data_[component][lane]; }
  double at(std::size_t component, std::size_t lane) const { return data_[component][lane]; }
  /// Resets lane to state (x, y, z) and, if tracked, V = I.
  void set_lane(std::size_t lane, double x, double y, double z);

  std::array<double*, 12> pointers();

 private:
  std::size_t count_;
  bool with_tangent_;
  std::array<std::vector<double>, 12> data_;
};

/// Advances every lane by `steps` RK4 steps of size dt.
void lanford_rk4(Isa isa, double a, double dt, int steps, LanfordBatch& batch);

namespace detail {
void lanford_rk4_scalar(double a, double dt, int steps, std::size_t begin, std::size_t end, bool tangent,
                        double* const* comps);
/// Processes lanes [begin, end) in groups of four; returns the first lane not processed.
std::size_t lanford_rk4_avx2(double a, double dt, int steps, std::size_t begin, std::size_t end, bool tangent,
                             double* const* comps);
}  // namespace detail

}  // namespace resent::kernels
