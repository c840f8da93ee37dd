#pragma once

#include <cstdint>
#include <vector>

#include "collatz/bounds.hpp"
#include "collatz/natural.hpp"
#include "collatz/rational.hpp"

namespace collatz {

// Sorted, deduplicated finite set of naturals with exact membership.
class FiniteSet {
 public:
  FiniteSet() = default;
  static FiniteSet from(std::vector<Natural> values);
  static FiniteSet range_closed(const Natural& lo, const Natural& hi);

  const std::vector<Natural>& elements() const { return elems_; }
  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }
  bool contains(const Natural& v) const;
  bool subset_of(const FiniteSet& other) const;
  // |A ∩ [lo, hi]|
  std::uint64_t count_in_closed(const Natural& lo, const Natural& hi) const;

  bool operator==(const FiniteSet&) const = default;

 private:
  explicit FiniteSet(std::vector<Natural> sorted) : elems_(std::move(sorted)) {}
  std::vector<Natural> elems_;
};

// |A ∩ [1, N]| / N as an exact rational; N >= 1. Truncations run over [1, N]
// rather than [0, n]: 0 is a fixed point of the map and only shifts every
// ratio by at most 1/N.
Rational finite_density(const FiniteSet& A, const Natural& N);

// Finite-scale stand-in for upper/lower density: ratios at increasing
// checkpoints, with sup/inf taken only past a burn-in of the first third.
// These are estimates of limsup/liminf, not the limits themselves; output
// paths label them "finite-scale estimate".
struct DensityProfile {
  std::vector<Natural> checkpoints;
  std::vector<Rational> ratios;
  std::size_t burn_in_index = 0;
  Rational tail_sup;
  Rational tail_inf;
};

// checkpoints strictly increasing, at least 2 entries.
DensityProfile density_profile(const FiniteSet& A, std::vector<Natural> checkpoints);

struct HImageResult {
  FiniteSet image;  // every T^k(n), n in A, with T^k(n) < f(n)
  std::vector<Natural> saturated_sources;  // walks that hit the cap before 1
};

// The trajectory-image operator: walk each n in A until 1 (or cap steps),
// collect every iterate strictly below f(n). After reaching 1 the orbit is
// the 1<->2 cycle, so the value 2 is probed once more; nothing else is
// reachable. All elements of A must be >= 1.
HImageResult h_image(const FiniteSet& A, const BoundFunction& f, std::uint64_t cap,
                     unsigned threads = 1);

struct DropScanReport {
  Natural lo, hi;  // inclusive range scanned
  std::uint64_t cap = 0;
  std::uint64_t min_k = 0;
  std::uint64_t total = 0;
  std::uint64_t excluded = 0;  // f(y) <= 1: no iterate can ever drop below f(y)
  std::uint64_t dropped = 0;   // first_drop found within the cap
  std::vector<Natural> unresolved;  // cap-saturated without a drop
  Rational fraction;  // dropped / (total - excluded); 0 when that is empty
};

// Scans [lo, hi] for membership of the drop set {y : exists k, T^k(y) < f(y)}.
// lo >= 1, hi <= 10^9, cap >= 1. min_k > 0 restricts the witness to k >= min_k.
DropScanReport drop_scan(const BoundFunction& f, const Natural& lo, const Natural& hi,
                         std::uint64_t cap, std::uint64_t min_k = 0,
                         unsigned threads = 1);

struct CardinalityCheck {
  bool holds = false;        // image_size * 2^m >= source_size
  std::size_t source_size = 0;
  std::size_t image_size = 0;
};

// The m-step image of a finite set loses at most a factor 2^m of its size.
CardinalityCheck image_cardinality_check(const FiniteSet& B, unsigned m);

// The even/odd split of one map application: halving doubles density,
// 3n+1 shrinks it by at most 3x, and both halves act injectively. These are
// the exact finite facts behind "one step preserves positive density".
struct ParitySplitReport {
  std::size_t even_count = 0, odd_count = 0;
  bool even_injective = true, odd_injective = true;
  bool even_in_range = true;  // T(E) ⊆ [1, ceil(N/2)]
  bool odd_in_range = true;   // T(O) ⊆ [2, (3N+1)/2]
  std::uint64_t even_image_in_half = 0;  // |T(E) ∩ [1, ceil(N/2)]|
  Natural even_image_max, odd_image_max;
  Rational density_at_half;      // densities of T(A) at three truncations
  Rational density_at_n;
  Rational density_at_expanded;  // at floor((3N+1)/2)
};

// A must be contained in [1, N].
ParitySplitReport parity_split_image_check(const FiniteSet& A, const Natural& N);

struct InclusionReport {
  bool comparison_holds = false;   // H_g(A) ⊆ H_f(A)           (needs g <= f on A)
  bool composition_holds = false;  // H_f(H_g(A)) ⊆ H_{f∘g}(A)
  bool power_holds = false;        // k-fold H_f ⊆ H_{f^k}
  unsigned power_k = 0;
  std::vector<Natural> saturated;  // sources that hit the cap in any walk
  bool verdict_valid = false;      // false when any saturation occurred
};

// The three finite-set inclusion checks, each exact. Throws
// std::invalid_argument when g > f somewhere on A (sub-check (i) would be
// vacuous) or k == 0. Cap saturation voids the verdict in-band.
InclusionReport image_inclusion_check(const FiniteSet& A, const BoundFunction& f,
                                      const BoundFunction& g, unsigned k,
                                      std::uint64_t cap, unsigned threads = 1);

}  // namespace collatz
