#pragma once

// Randomized property suite for the SPD geometry and the metric-adapted
// singular values. Every property runs `instances` random instances at each
// dimension in `dims` from one seeded generator.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "resent/spd.hpp"

namespace resent {

struct PropsOptions {
  std::uint64_t seed = 42;
  int instances = 200;
  std::vector<int> dims{1, 2, 3, 5};
  /// Base tolerance for algebraic identities. Finite-difference checks use
  /// 1000 * tol (1e-5 by default).
  double tol = 1e-8;

  /// Throws std::invalid_argument on a nonpositive tolerance, instance count or dimension.
  void validate() const;
};

struct PropertyResult {
  std::string name;
  std::string statement;
  int instances = 0;
  /// Largest error seen over all instances and dimensions.
  double worst = 0.0;
  double tolerance = 0.0;
  bool passed() const { return worst <= tolerance; }
};

std::vector<PropertyResult> run_property_suite(const PropsOptions& options = {});

/// Random generators shared with the tests.
namespace random_matrices {
/// Q diag(2^u) Q^T with Q Haar-orthogonal and u uniform in [-spread, spread].
SpdMatrix spd(std::mt19937_64& rng, int n, double spread = 2.0);
/// Q1 diag(2^u) Q2 with Q1, Q2 orthogonal and u uniform in [-spread, spread].
Matrix invertible(std::mt19937_64& rng, int n, double spread = 1.0);
Matrix gaussian(std::mt19937_64& rng, int rows, int cols);
Matrix symmetric(std::mt19937_64& rng, int n);
Matrix orthogonal(std::mt19937_64& rng, int n);
}  // namespace random_matrices

}  // namespace resent
