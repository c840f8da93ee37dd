#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace collatz {

// Arbitrary-precision non-negative integer. Every trajectory value, census
// count and window base is one of these; nothing in the library ever rounds.
using Natural = mpz_class;

inline Natural natural_from_string(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty natural number");
  for (char c : text) {
    if (c < '0' || c > '9')
      throw std::invalid_argument("invalid natural number '" + text + "'");
  }
  return Natural(text, 10);
}

inline Natural pow2(unsigned long exponent) {
  Natural r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2ul, exponent);
  return r;
}

inline Natural natural_pow(const Natural& base, unsigned long exponent) {
  Natural r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exponent);
  return r;
}

inline bool fits_u64(const Natural& n) {
  return mpz_sizeinbase(n.get_mpz_t(), 2) <= 64 && sgn(n) >= 0;
}

inline std::uint64_t to_u64(const Natural& n) {
  if (!fits_u64(n)) throw std::overflow_error("natural does not fit in 64 bits");
  std::uint64_t lo = mpz_getlimbn(n.get_mpz_t(), 0);
  return mpz_size(n.get_mpz_t()) == 0 ? 0 : lo;
}

inline std::string to_string(const Natural& n) { return n.get_str(); }

}  // namespace collatz
