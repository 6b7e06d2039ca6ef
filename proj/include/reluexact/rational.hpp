#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace reluexact {

/// Exact rational number (GMP). Always canonical: lowest terms, positive denominator.
using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

/// Parses "p/q", an integer, or a decimal such as "-0.125" / "3e-2". Decimals are
/// converted exactly with power-of-ten denominators. Throws ValidationError.
Rational parse_rational(std::string_view text);

/// Canonical "num/den" text; the denominator is always written, even when it is 1.
std::string to_string(const Rational& value);

/// Exact conversion of a finite double (every finite double is a dyadic rational).
Rational from_double(double value);

double to_double(const Rational& value);

/// n/d in lowest terms. Prefer this over the two-argument mpq_class
/// constructor, which does not canonicalize.
inline Rational ratio(long n, long d) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

inline int sign(const Rational& value) { return sgn(value); }

Rational dot(const RationalVector& a, const RationalVector& b);

}  // namespace reluexact
