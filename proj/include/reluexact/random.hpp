#pragma once

#include <cstdint>
#include <random>

#include "reluexact/rational.hpp"

namespace reluexact {

/// Seeded generator with platform-independent draws. The standard distributions
/// are implementation-defined, so bounded integers and unit doubles are derived
/// from the raw mt19937_64 stream here instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [lo, hi] by rejection sampling.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform double in [lo, hi).
  double uniform_real(double lo, double hi);

  /// num / den with num uniform in [-num_bound, num_bound], den uniform in [1, den_bound].
  Rational rational(std::int64_t num_bound, std::int64_t den_bound);

  /// Rational uniform on the lattice {lo + (hi-lo) * i / den : i = 1..den-1} (strictly inside).
  Rational rational_between(const Rational& lo, const Rational& hi, std::int64_t den);

 private:
  std::mt19937_64 engine_;
};

}  // namespace reluexact
