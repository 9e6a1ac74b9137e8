#include "ufh/rational.hpp"

#include <cctype>
#include <cstdio>

#include "ufh/errors.hpp"

namespace ufh {

std::string to_decimal(const Rational& q) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", q.get_d());
  return buf;
}

Rational parse_rational(const std::string& text) {
  const auto bad = [&] { return InvalidArgument("not a rational number: '" + text + "'"); };
  if (text.empty()) throw bad();
  if (text.find('/') != std::string::npos) {
    Rational q;
    if (q.set_str(text, 10) != 0) throw bad();
    if (q.get_den() == 0) throw bad();
    q.canonicalize();
    return q;
  }
  // Decimal with optional exponent, parsed exactly.
  std::size_t i = 0;
  bool neg = false;
  if (text[i] == '+' || text[i] == '-') neg = text[i++] == '-';
  std::string digits;
  long scale = 0;
  bool seen_digit = false, seen_dot = false;
  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits += ch;
      seen_digit = true;
      if (seen_dot) --scale;
    } else if (ch == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw bad();
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') throw bad();
    try {
      std::size_t used = 0;
      scale += std::stol(text.substr(i + 1), &used);
      if (i + 1 + used != text.size()) throw bad();
    } catch (const std::logic_error&) {
      throw bad();
    }
  }
  if (scale > 4096 || scale < -4096) throw bad();
  mpz_class num(digits, 10);
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  Rational q = scale < 0 ? Rational(num, pow10) : Rational(num * pow10);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

}  // namespace ufh
