#include "collatz/trajectory.hpp"

#include <stdexcept>

namespace collatz {

Natural collatz_step(const Natural& n) {
  Natural r;
  if (mpz_even_p(n.get_mpz_t())) {
    mpz_tdiv_q_2exp(r.get_mpz_t(), n.get_mpz_t(), 1);
  } else {
    r = 3 * n + 1;
    mpz_tdiv_q_2exp(r.get_mpz_t(), r.get_mpz_t(), 1);
  }
  return r;
}

Natural iterate(Natural n, std::uint64_t k) {
  for (std::uint64_t i = 0; i < k; ++i) n = collatz_step(n);
  return n;
}

TrajectoryRecord trajectory(const Natural& n, std::uint64_t cap) {
  if (cap < 1) throw std::invalid_argument("trajectory cap must be >= 1");
  TrajectoryRecord rec;
  rec.start = n;
  rec.iterates.push_back(n);
  while (rec.iterates.back() != 1 && rec.steps < cap) {
    rec.iterates.push_back(collatz_step(rec.iterates.back()));
    ++rec.steps;
  }
  rec.terminated_by =
      rec.iterates.back() == 1 ? Termination::ReachedOne : Termination::CapHit;
  return rec;
}

std::uint64_t ParityVector::sum() const {
  std::uint64_t s = 0;
  for (auto b : bits) s += b;
  return s;
}

std::uint64_t ParityVector::packed() const {
  if (bits.size() > 64) throw std::overflow_error("parity vector too long to pack");
  std::uint64_t code = 0;
  for (std::size_t j = 0; j < bits.size(); ++j)
    if (bits[j]) code |= (std::uint64_t{1} << j);
  return code;
}

ParityVector parity_vector(const Natural& y, std::size_t len) {
  if (len < 1) throw std::invalid_argument("parity vector length must be >= 1");
  ParityVector pv;
  pv.bits.reserve(len);
  Natural v = y;
  for (std::size_t j = 0; j < len; ++j) {
    const bool odd = mpz_odd_p(v.get_mpz_t());
    pv.bits.push_back(odd ? 1 : 0);
    if (j + 1 < len) v = collatz_step(v);
  }
  return pv;
}

std::uint64_t parity_sum(const Natural& y, std::size_t m, ParityVariant variant) {
  if (m < 1) throw std::invalid_argument("parity sum needs m >= 1");
  const std::size_t nbits = variant == ParityVariant::Inclusive ? m + 1 : m;
  std::uint64_t s = 0;
  Natural v = y;
  for (std::size_t j = 0; j < nbits; ++j) {
    if (mpz_odd_p(v.get_mpz_t())) ++s;
    if (j + 1 < nbits) v = collatz_step(v);
  }
  return s;
}

std::optional<std::uint64_t> first_drop(const Natural& y, const BoundFunction& f,
                                        std::uint64_t cap, std::uint64_t min_k) {
  if (y < 1) throw std::invalid_argument("first_drop needs y >= 1");
  if (cap < 1) throw std::invalid_argument("first_drop cap must be >= 1");
  const Natural threshold = f.threshold_below(y);  // v < f(y) <=> v <= threshold
  if (threshold == 0) return std::nullopt;         // trajectory values are >= 1
  Natural v = y;
  for (std::uint64_t k = 0; k <= cap; ++k) {
    if (k >= min_k && v <= threshold) return k;
    if (k < cap) v = collatz_step(v);
  }
  return std::nullopt;
}

}  // namespace collatz
