#pragma once

#include <cstdint>

namespace mddl {

/// xoshiro256** seeded through splitmix64.
///
/// Uniform doubles use the top 53 bits; normals use the Box-Muller
/// transform and cache the second variate. Both are fully specified so
/// generated instances are reproducible across compilers and languages.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t next();

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer on [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal.
  double normal();

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mddl
