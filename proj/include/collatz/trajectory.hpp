#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "collatz/bounds.hpp"
#include "collatz/natural.hpp"

namespace collatz {

// One application of the accelerated Collatz map: n/2 for even n,
// (3n+1)/2 for odd n. step(0) == 0.
Natural collatz_step(const Natural& n);

// k-fold application; iterate(n, 0) == n.
Natural iterate(Natural n, std::uint64_t k);

enum class Termination { ReachedOne, CapHit };

struct TrajectoryRecord {
  Natural start;
  std::vector<Natural> iterates;  // iterates[0] == start
  Termination terminated_by = Termination::CapHit;
  std::uint64_t steps = 0;        // iterates.size() - 1
};

// Walks until the value 1 is appended or `cap` steps were taken (cap >= 1).
// Saturation is reported in-band via terminated_by, never as an error.
TrajectoryRecord trajectory(const Natural& n, std::uint64_t cap);

// Whether the parity sum over m steps takes m bits (Exclusive, parities of
// T^0..T^{m-1}) or m+1 bits (Inclusive, parities of T^0..T^m). An Inclusive
// sum of length m equals the Exclusive sum of length m+1.
enum class ParityVariant { Exclusive, Inclusive };

struct ParityVector {
  std::vector<std::uint8_t> bits;  // bits[j] = 1 iff T^j(y) is odd

  std::size_t length() const { return bits.size(); }
  std::uint64_t sum() const;
  // bits[j] -> bit j of the result; requires length() <= 64.
  std::uint64_t packed() const;

  bool operator==(const ParityVector&) const = default;
};

// bits[j] = parity of T^j(y) for j = 0..len-1 (len >= 1).
ParityVector parity_vector(const Natural& y, std::size_t len);

// Exclusive: sum of the first m parities; Inclusive: first m+1. m >= 1.
std::uint64_t parity_sum(const Natural& y, std::size_t m, ParityVariant variant);

// Least k in [min_k, cap] with T^k(y) < f(y), or nullopt if none found
// within the cap. y >= 1, cap >= 1. With min_k == 0 and f(y) > y this is 0.
std::optional<std::uint64_t> first_drop(const Natural& y, const BoundFunction& f,
                                        std::uint64_t cap, std::uint64_t min_k = 0);

}  // namespace collatz
