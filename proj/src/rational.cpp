#include "reluexact/rational.hpp"

#include <cctype>
#include <cmath>

#include "reluexact/errors.hpp"

namespace reluexact {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

mpz_class parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) {
    throw ValidationError("not a rational number: '" + std::string(whole) + "'");
  }
  mpz_class v(std::string(s), 10);
  return negative ? mpz_class(-v) : v;
}

mpz_class pow10(unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  const std::string_view whole = text;
  if (text.empty()) throw ValidationError("empty rational");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    mpz_class num = parse_integer(text.substr(0, slash), whole);
    mpz_class den = parse_integer(text.substr(slash + 1), whole);
    if (den == 0) throw ValidationError("zero denominator: '" + std::string(whole) + "'");
    Rational r(num, den);
    r.canonicalize();
    return r;
  }

  // Decimal with optional exponent.
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mpz_class ev = parse_integer(text.substr(e + 1), whole);
    if (!ev.fits_slong_p() || abs(ev) > 4096) throw ValidationError("exponent out of range: '" + std::string(whole) + "'");
    exponent = ev.get_si();
    text = text.substr(0, e);
  }
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  std::string digits;
  long frac_digits = 0;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view ip = text.substr(0, dot);
    std::string_view fp = text.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp))) {
      throw ValidationError("not a rational number: '" + std::string(whole) + "'");
    }
    digits = std::string(ip) + std::string(fp);
    frac_digits = static_cast<long>(fp.size());
  } else {
    if (!all_digits(text)) throw ValidationError("not a rational number: '" + std::string(whole) + "'");
    digits = std::string(text);
  }
  mpz_class mantissa(digits, 10);
  if (negative) mantissa = -mantissa;
  const long shift = exponent - frac_digits;
  Rational r;
  if (shift >= 0) {
    r = Rational(mantissa * pow10(static_cast<unsigned long>(shift)));
  } else {
    r = Rational(mantissa, pow10(static_cast<unsigned long>(-shift)));
    r.canonicalize();
  }
  return r;
}

std::string to_string(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

Rational from_double(double value) {
  if (!std::isfinite(value)) throw ValidationError("non-finite value cannot be made rational");
  Rational r(value);  // mpq_set_d is exact
  return r;
}

double to_double(const Rational& value) { return value.get_d(); }

Rational dot(const RationalVector& a, const RationalVector& b) {
  if (a.size() != b.size()) throw ValidationError("dot: length mismatch");
  Rational acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace reluexact
