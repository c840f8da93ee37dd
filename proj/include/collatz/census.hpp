#pragma once

#include <cstdint>
#include <vector>

#include "collatz/natural.hpp"
#include "collatz/rational.hpp"
#include "collatz/trajectory.hpp"

namespace collatz {

// Strict counts parity sums S < m*d, Weak counts S <= m*d. The comparison is
// done in exact rationals; the two differ only when m*d is an integer.
enum class Comparator { Strict, Weak };

struct CensusParams {
  unsigned m = 1;
  Rational d;
  ParityVariant variant = ParityVariant::Exclusive;
  Comparator cmp = Comparator::Strict;
  Natural window_base = 0;
};

struct CensusResult {
  CensusParams params;
  Natural count;
  Natural total;   // 2^m
  Rational ratio;  // count / total
};

inline constexpr unsigned kCensusMaxM = 28;        // enumeration guard
inline constexpr unsigned kResidueTableMaxK = 20;  // table size guard

// True iff the parity sum s satisfies s ⋈ m*d for the given comparator.
bool sum_passes(std::uint64_t s, unsigned m, const Rational& d, Comparator cmp);

// hist[s] = number of y in [base, base+length) whose parity sum over
// `nbits` bits equals s. The enumeration core: exact, chunked, and
// bit-identical for any thread count.
std::vector<std::uint64_t> parity_sum_histogram(unsigned nbits, const Natural& base,
                                                std::uint64_t length,
                                                unsigned threads = 1);

// Exact count of y in [base, base+length) with parity_sum(y, m, variant) ⋈ m*d.
Natural window_census(unsigned m, const Rational& d, ParityVariant variant,
                      Comparator cmp, const Natural& base, std::uint64_t length,
                      unsigned threads = 1);

// The length-2^m window census with all parameters packaged; rejects m == 0,
// m > max_m and negative d.
CensusResult census(const CensusParams& params, unsigned max_m = kCensusMaxM,
                    unsigned threads = 1);

// Closed-form cross-check over a full period: Exclusive sums each m-bit
// pattern once per 2^m, Inclusive each (m+1)-bit pattern once per 2^{m+1},
// so the census equals a binomial tail sum. m <= 64 per bit-pattern width
// is not required here: binomials are exact at any m.
Natural binomial_census_oracle(unsigned m, const Rational& d, ParityVariant variant,
                               Comparator cmp);

// table[r] = parity_vector(r, k) for r in [0, 2^k); throws if the map fails
// to be a bijection onto {0,1}^k (it cannot, and the test suite leans on
// that), or if k exceeds the size guard.
std::vector<ParityVector> residue_parity_table(unsigned k,
                                               unsigned max_k = kResidueTableMaxK);

// parity_sum(y, m, variant) < m*d, exactly. Membership in the low-parity
// class that guarantees the m-step drop for y >= m*2^m.
bool parity_sum_below(const Natural& y, unsigned m, const Rational& d,
                      ParityVariant variant);

struct DropThreshold {
  double approx = 0.0;       // (M-2)/(M*log2(3)), display only
  Rational witness;          // exact rational strictly below the threshold
  bool joint_with_lemma1 = false;  // threshold > 1/2 (first true at M = 10)
};

// The largest d-range for which the m-step drop guarantee can be proven:
// any 0 < d < (M-2)/(M*log2 3) works for all m > M. Joint use with the
// census convergence additionally needs d > 1/2, possible iff M >= 10.
// M >= 3.
DropThreshold drop_density_threshold(unsigned M);

// Exact test d < (M-2)/(M*log2 3), via 3^(num*M) < 2^(den*(M-2)).
bool below_drop_threshold(const Rational& d, unsigned M);

// How to pick audit points: the whole window [lo, hi], or `sample_count`
// seeded uniform draws from it.
struct AuditSample {
  Natural lo;
  Natural hi;                      // inclusive
  std::uint64_t sample_count = 0;  // 0 = exhaustive
  std::uint64_t seed = 0;
};

struct DropAuditReport {
  unsigned m = 0;
  Rational d;
  ParityVariant variant = ParityVariant::Exclusive;
  std::uint64_t examined = 0;
  std::uint64_t audited = 0;      // low-parity members actually checked
  std::uint64_t not_in_class = 0; // parity sum too large, skipped
  std::uint64_t rejected = 0;     // y < m*2^m, precondition flag
  std::uint64_t floor_violations = 0;  // some T^j(y) < m or 2^j*T^j(y) < y
  std::uint64_t chain_violations = 0;  // T^m(y)*2^(m-1) >= y*3^k
  std::uint64_t final_violations = 0;  // 2*T^m(y) >= y
  std::vector<Natural> witnesses;      // first violating y values (any kind)
  std::uint64_t seed = 0;
};

// Audits the m-step drop guarantee: for every audited y >= m*2^m whose
// parity sum is below m*d, assert (i) T^j(y) >= y/2^j >= m for j <= m,
// (ii) T^m(y) < y*3^k/2^{m-1} with k the number of odd steps among the
// first m, and (iii) T^m(y) < y/2. Requires d < (m-2)/(m*log2 3) exactly.
// Per-item precondition failures are counted, not fatal.
DropAuditReport drop_guarantee_audit(unsigned m, const Rational& d,
                                     const AuditSample& sample,
                                     ParityVariant variant = ParityVariant::Exclusive,
                                     unsigned threads = 1);

}  // namespace collatz
