#include "reluexact/random.hpp"

#include "reluexact/errors.hpp"

namespace reluexact {

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw ValidationError("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  if (span == UINT64_MAX) return static_cast<std::int64_t>(next());
  const std::uint64_t range = span + 1;
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range);
  std::uint64_t draw = next();
  while (draw >= limit) draw = next();
  return lo + static_cast<std::int64_t>(draw % range);
}

double Rng::uniform_real(double lo, double hi) {
  const double unit = static_cast<double>(next() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

Rational Rng::rational(std::int64_t num_bound, std::int64_t den_bound) {
  const std::int64_t num = uniform_int(-num_bound, num_bound);
  const std::int64_t den = uniform_int(1, den_bound);
  Rational r(static_cast<long>(num), static_cast<unsigned long>(den));
  r.canonicalize();
  return r;
}

Rational Rng::rational_between(const Rational& lo, const Rational& hi, std::int64_t den) {
  if (den < 2) throw ValidationError("rational_between: lattice too coarse");
  const std::int64_t i = uniform_int(1, den - 1);
  Rational t(static_cast<long>(i), static_cast<unsigned long>(den));
  t.canonicalize();
  return Rational(lo + (hi - lo) * t);
}

}  // namespace reluexact
