#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace ufh {

using Rational = mpq_class;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  static_assert(sizeof(long) == sizeof(std::int64_t), "LP64 assumed");
  Rational q(mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den)));
  q.canonicalize();
  return q;
}

inline Rational rabs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline double to_double(const Rational& q) { return q.get_d(); }

/// "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Round-trip-safe decimal rendering used by the float output mode.
std::string to_decimal(const Rational& q);

Rational parse_rational(const std::string& text);

}  // namespace ufh
