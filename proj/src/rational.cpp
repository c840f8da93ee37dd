#include "collatz/rational.hpp"

#include <stdexcept>

namespace collatz {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string s(text);
  if (s.find('.') != std::string::npos)
    throw std::invalid_argument("'" + s +
                                "' is a decimal, not an exact rational; use a "
                                "fraction like 3/5");
  const auto slash = s.find('/');
  if (slash == std::string::npos) {
    if (!all_digits(s))
      throw std::invalid_argument("malformed rational '" + s + "'");
    return Rational(Natural(s, 10));
  }
  const std::string num = s.substr(0, slash);
  const std::string den = s.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den))
    throw std::invalid_argument("malformed rational '" + s + "'");
  Natural d(den, 10);
  if (d == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
  Rational q(Natural(num, 10), d);
  q.canonicalize();
  return q;
}

std::string render_rational(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string decimal_string(const Rational& q, int digits) {
  if (digits < 0) digits = 0;
  Natural num = q.get_num();
  const Natural den = q.get_den();
  const bool negative = num < 0;
  if (negative) num = -num;

  const Natural whole = num / den;
  std::string out = (negative ? "-" : "") + whole.get_str();
  if (digits == 0) return out;

  Natural rem = num % den;
  Natural scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10ul, static_cast<unsigned long>(digits));
  Natural frac = rem * scale / den;  // truncated toward zero

  std::string f = frac.get_str();
  out += "." + std::string(static_cast<std::size_t>(digits) - f.size(), '0') + f;
  return out;
}

}  // namespace collatz
