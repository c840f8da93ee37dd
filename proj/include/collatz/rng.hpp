#pragma once

#include <cstdint>
#include <random>

#include "collatz/rational.hpp"

namespace collatz {

// Seeded randomness for sampling experiments. mt19937_64 has a pinned
// sequence in the standard; the bounded draw below uses rejection instead of
// a distribution object, so draws are identical across standard libraries.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n); n >= 1.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
      const std::uint64_t draw = engine_();
      if (draw < limit) return draw % n;
    }
  }

  // Bernoulli with exact rational p in [0, 1]: draws u < num out of den.
  bool bernoulli(const Rational& p) {
    const std::uint64_t den = to_u64(Natural(p.get_den()));
    const std::uint64_t num = to_u64(Natural(p.get_num()));
    return below(den) < num;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace collatz
