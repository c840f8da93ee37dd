#include "collatz/census.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "collatz/parallel.hpp"
#include "collatz/rng.hpp"

namespace collatz {

namespace {

// Largest odd value whose 3v+1 still fits: beyond this the walker falls back
// to arbitrary precision for the rest of that residue.
constexpr std::uint64_t kOddGuard = (std::numeric_limits<std::uint64_t>::max() - 1) / 3;

std::uint64_t parity_sum_slow(Natural v, unsigned nbits) {
  std::uint64_t s = 0;
  for (unsigned j = 0; j < nbits; ++j) {
    if (mpz_odd_p(v.get_mpz_t())) {
      ++s;
      v = 3 * v + 1;
    }
    mpz_tdiv_q_2exp(v.get_mpz_t(), v.get_mpz_t(), 1);
  }
  return s;
}

// Parity sum over nbits steps starting at y, 64-bit hot path with an exact
// promotion to mpz on potential overflow.
std::uint64_t parity_sum_fast(std::uint64_t y, unsigned nbits) {
  std::uint64_t v = y, s = 0;
  for (unsigned j = 0; j < nbits; ++j) {
    if (v & 1) {
      if (v > kOddGuard) {
        Natural big = Natural(static_cast<unsigned long>(v));
        return s + parity_sum_slow(big, nbits - j);
      }
      ++s;
      v = (3 * v + 1) >> 1;
    } else {
      v >>= 1;
    }
  }
  return s;
}

struct AuditPart {
  std::uint64_t examined = 0, audited = 0, not_in_class = 0, rejected = 0;
  std::uint64_t floor_violations = 0, chain_violations = 0, final_violations = 0;
  std::vector<Natural> witnesses;
};

}  // namespace

bool sum_passes(std::uint64_t s, unsigned m, const Rational& d, Comparator cmp) {
  // s ⋈ m*d  <=>  s*den ⋈ num*m, in exact integers.
  const Natural lhs = Natural(static_cast<unsigned long>(s)) * d.get_den();
  const Natural rhs = d.get_num() * m;
  return cmp == Comparator::Strict ? lhs < rhs : lhs <= rhs;
}

std::vector<std::uint64_t> parity_sum_histogram(unsigned nbits, const Natural& base,
                                                std::uint64_t length, unsigned threads) {
  if (nbits == 0) throw std::invalid_argument("histogram needs nbits >= 1");
  if (sgn(base) < 0) throw std::invalid_argument("window base must be >= 0");

  const std::size_t buckets = nbits + 1;
  std::vector<std::uint64_t> total(buckets, 0);
  if (length == 0) return total;

  // The whole window fits in 64 bits iff its last element does.
  const bool fast = fits_u64(base + (length - 1));
  const std::uint64_t base64 = fast ? to_u64(base) : 0;

  constexpr std::uint64_t kChunk = 1 << 14;
  auto parts = chunked_map<std::vector<std::uint64_t>>(
      0, length, kChunk, threads, [&](std::uint64_t lo, std::uint64_t hi) {
        std::vector<std::uint64_t> hist(buckets, 0);
        if (fast) {
          for (std::uint64_t i = lo; i < hi; ++i)
            ++hist[parity_sum_fast(base64 + i, nbits)];
        } else {
          for (std::uint64_t i = lo; i < hi; ++i)
            ++hist[parity_sum_slow(base + Natural(static_cast<unsigned long>(i)), nbits)];
        }
        return hist;
      });

  for (const auto& part : parts)
    for (std::size_t s = 0; s < buckets; ++s) total[s] += part[s];
  return total;
}

Natural window_census(unsigned m, const Rational& d, ParityVariant variant,
                      Comparator cmp, const Natural& base, std::uint64_t length,
                      unsigned threads) {
  if (m == 0) throw std::invalid_argument("census needs m >= 1");
  const unsigned nbits = variant == ParityVariant::Inclusive ? m + 1 : m;
  const auto hist = parity_sum_histogram(nbits, base, length, threads);
  Natural count = 0;
  for (std::uint64_t s = 0; s < hist.size(); ++s)
    if (hist[s] != 0 && sum_passes(s, m, d, cmp)) count += hist[s];
  return count;
}

CensusResult census(const CensusParams& params, unsigned max_m, unsigned threads) {
  if (params.m == 0) throw std::invalid_argument("census needs m >= 1");
  if (params.m > max_m)
    throw std::invalid_argument("census m=" + std::to_string(params.m) +
                                " exceeds the enumeration guard " +
                                std::to_string(max_m));
  if (sgn(params.d) < 0) throw std::invalid_argument("census needs d >= 0");
  if (sgn(params.window_base) < 0)
    throw std::invalid_argument("window base must be >= 0");

  CensusResult res;
  res.params = params;
  res.total = pow2(params.m);
  res.count = window_census(params.m, params.d, params.variant, params.cmp,
                            params.window_base, std::uint64_t{1} << params.m, threads);
  res.ratio = Rational(res.count, res.total);
  res.ratio.canonicalize();
  return res;
}

Natural binomial_census_oracle(unsigned m, const Rational& d, ParityVariant variant,
                               Comparator cmp) {
  if (m == 0) throw std::invalid_argument("oracle needs m >= 1");
  if (sgn(d) < 0) throw std::invalid_argument("oracle needs d >= 0");
  // Over a full period every bit pattern occurs exactly once, so the count
  // is a sum of binomials over the passing parity sums.
  const unsigned nbits = variant == ParityVariant::Inclusive ? m + 1 : m;
  Natural total = 0;
  for (unsigned j = 0; j <= nbits; ++j) {
    if (!sum_passes(j, m, d, cmp)) continue;
    Natural b;
    mpz_bin_uiui(b.get_mpz_t(), nbits, j);
    total += b;
  }
  return total;
}

std::vector<ParityVector> residue_parity_table(unsigned k, unsigned max_k) {
  if (k == 0) throw std::invalid_argument("parity table needs k >= 1");
  if (k > max_k)
    throw std::invalid_argument("parity table k=" + std::to_string(k) +
                                " exceeds the size guard " + std::to_string(max_k));
  const std::uint64_t size = std::uint64_t{1} << k;
  std::vector<ParityVector> table;
  table.reserve(size);
  std::vector<bool> seen(size, false);
  for (std::uint64_t r = 0; r < size; ++r) {
    table.push_back(parity_vector(Natural(static_cast<unsigned long>(r)), k));
    const std::uint64_t code = table.back().packed();
    if (seen[code])
      throw std::logic_error("residue parity table failed to be a bijection");
    seen[code] = true;
  }
  return table;
}

bool parity_sum_below(const Natural& y, unsigned m, const Rational& d,
                      ParityVariant variant) {
  if (m == 0) throw std::invalid_argument("parity_sum_below needs m >= 1");
  return sum_passes(parity_sum(y, m, variant), m, d, Comparator::Strict);
}

bool below_drop_threshold(const Rational& d, unsigned M) {
  if (M < 3) throw std::invalid_argument("drop threshold needs M >= 3");
  if (sgn(d) <= 0) return false;
  // d < (M-2)/(M*log2 3)  <=>  d*M*log2(3) < M-2  <=>  3^(num*M) < 2^(den*(M-2))
  const Natural num_m = d.get_num() * M;
  const Natural den_e = d.get_den() * (M - 2);
  if (!num_m.fits_ulong_p() || !den_e.fits_ulong_p())
    throw std::domain_error("d too large for the exact threshold test");
  return natural_pow(3, num_m.get_ui()) < pow2(den_e.get_ui());
}

DropThreshold drop_density_threshold(unsigned M) {
  if (M < 3) throw std::invalid_argument("drop threshold needs M >= 3");
  DropThreshold t;
  t.approx = (static_cast<double>(M) - 2.0) / (static_cast<double>(M) * std::log2(3.0));
  // threshold > 1/2  <=>  2(M-2) bits beat 3^M
  t.joint_with_lemma1 = pow2(2ul * (M - 2)) > natural_pow(3, M);

  // Start just below the double approximation and walk down until the exact
  // test certifies the witness.
  const unsigned long den = 10000;
  long p = static_cast<long>(t.approx * static_cast<double>(den)) - 1;
  if (p < 1) p = 1;
  Rational w(static_cast<unsigned long>(p), den);
  w.canonicalize();
  while (!below_drop_threshold(w, M)) {
    if (--p < 1) throw std::logic_error("no positive witness below drop threshold");
    w = Rational(static_cast<unsigned long>(p), den);
    w.canonicalize();
  }
  t.witness = w;
  return t;
}

DropAuditReport drop_guarantee_audit(unsigned m, const Rational& d,
                                     const AuditSample& sample, ParityVariant variant,
                                     unsigned threads) {
  if (m < 3) throw std::invalid_argument("drop audit needs m >= 3");
  if (!below_drop_threshold(d, m))
    throw std::invalid_argument("d = " + render_rational(d) +
                                " is not strictly below the drop threshold for m = " +
                                std::to_string(m));
  if (sample.hi < sample.lo) throw std::invalid_argument("inverted audit range");

  // Materialize the audit points: a window, or seeded uniform draws from it.
  std::vector<Natural> points;
  if (sample.sample_count == 0) {
    const Natural len_n = sample.hi - sample.lo + 1;
    if (!fits_u64(len_n)) throw std::invalid_argument("audit window too large");
    const std::uint64_t len = to_u64(len_n);
    points.reserve(len);
    for (std::uint64_t i = 0; i < len; ++i)
      points.push_back(sample.lo + Natural(static_cast<unsigned long>(i)));
  } else {
    const Natural len_n = sample.hi - sample.lo + 1;
    if (!fits_u64(len_n)) throw std::invalid_argument("audit window too large");
    const std::uint64_t len = to_u64(len_n);
    SeededRng rng(sample.seed);
    points.reserve(sample.sample_count);
    for (std::uint64_t i = 0; i < sample.sample_count; ++i)
      points.push_back(sample.lo + Natural(static_cast<unsigned long>(rng.below(len))));
  }

  const Natural floor_bound = Natural(m) * pow2(m);  // audit precondition y >= m*2^m
  const Natural chain_pow = pow2(m - 1);

  constexpr std::uint64_t kChunk = 1 << 12;
  auto parts = chunked_map<AuditPart>(
      0, points.size(), kChunk, threads, [&](std::uint64_t lo, std::uint64_t hi) {
        AuditPart part;
        for (std::uint64_t i = lo; i < hi; ++i) {
          const Natural& y = points[static_cast<std::size_t>(i)];
          ++part.examined;
          if (y < floor_bound) {
            ++part.rejected;
            continue;
          }
          // One walk computes the m+1 leading iterates, the exclusive sum k
          // (= number of odd steps among the first m) and all three checks.
          Natural v = y;
          std::uint64_t k_excl = 0;
          bool floor_ok = true;
          Natural pow_j = 1;  // 2^j
          for (unsigned j = 0; j <= m; ++j) {
            if (v < m || pow_j * v < y) floor_ok = false;
            if (j < m) {
              if (mpz_odd_p(v.get_mpz_t())) ++k_excl;
              v = collatz_step(v);
              pow_j <<= 1;
            }
          }
          const std::uint64_t s_var =
              variant == ParityVariant::Inclusive
                  ? k_excl + (mpz_odd_p(v.get_mpz_t()) ? 1 : 0)
                  : k_excl;
          if (!sum_passes(s_var, m, d, Comparator::Strict)) {
            ++part.not_in_class;
            continue;
          }
          ++part.audited;
          bool bad = false;
          if (!floor_ok) {
            ++part.floor_violations;
            bad = true;
          }
          if (!(v * chain_pow < y * natural_pow(3, k_excl))) {
            ++part.chain_violations;
            bad = true;
          }
          if (!(2 * v < y)) {
            ++part.final_violations;
            bad = true;
          }
          if (bad && part.witnesses.size() < 10) part.witnesses.push_back(y);
        }
        return part;
      });

  DropAuditReport report;
  report.m = m;
  report.d = d;
  report.variant = variant;
  report.seed = sample.seed;
  for (const auto& part : parts) {
    report.examined += part.examined;
    report.audited += part.audited;
    report.not_in_class += part.not_in_class;
    report.rejected += part.rejected;
    report.floor_violations += part.floor_violations;
    report.chain_violations += part.chain_violations;
    report.final_violations += part.final_violations;
    for (const auto& w : part.witnesses)
      if (report.witnesses.size() < 10) report.witnesses.push_back(w);
  }
  return report;
}

}  // namespace collatz
