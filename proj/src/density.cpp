#include "collatz/density.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "collatz/parallel.hpp"
#include "collatz/trajectory.hpp"

namespace collatz {

namespace {

constexpr std::uint64_t kOddGuard = (std::numeric_limits<std::uint64_t>::max() - 1) / 3;

void step_inplace(Natural& v) {
  if (mpz_odd_p(v.get_mpz_t())) {
    mpz_mul_ui(v.get_mpz_t(), v.get_mpz_t(), 3);
    mpz_add_ui(v.get_mpz_t(), v.get_mpz_t(), 1);
  }
  mpz_tdiv_q_2exp(v.get_mpz_t(), v.get_mpz_t(), 1);
}

}  // namespace

FiniteSet FiniteSet::from(std::vector<Natural> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return FiniteSet(std::move(values));
}

FiniteSet FiniteSet::range_closed(const Natural& lo, const Natural& hi) {
  if (lo > hi) return FiniteSet();
  const Natural len_n = hi - lo + 1;
  if (!fits_u64(len_n)) throw std::invalid_argument("range too large to materialize");
  const std::uint64_t len = to_u64(len_n);
  std::vector<Natural> values;
  values.reserve(len);
  for (std::uint64_t i = 0; i < len; ++i)
    values.push_back(lo + Natural(static_cast<unsigned long>(i)));
  return FiniteSet(std::move(values));
}

bool FiniteSet::contains(const Natural& v) const {
  return std::binary_search(elems_.begin(), elems_.end(), v);
}

bool FiniteSet::subset_of(const FiniteSet& other) const {
  return std::includes(other.elems_.begin(), other.elems_.end(), elems_.begin(),
                       elems_.end());
}

std::uint64_t FiniteSet::count_in_closed(const Natural& lo, const Natural& hi) const {
  if (lo > hi) return 0;
  auto first = std::lower_bound(elems_.begin(), elems_.end(), lo);
  auto last = std::upper_bound(first, elems_.end(), hi);
  return static_cast<std::uint64_t>(last - first);
}

Rational finite_density(const FiniteSet& A, const Natural& N) {
  if (N < 1) throw std::invalid_argument("density truncation needs N >= 1");
  Rational r(Natural(static_cast<unsigned long>(A.count_in_closed(1, N))), N);
  r.canonicalize();
  return r;
}

DensityProfile density_profile(const FiniteSet& A, std::vector<Natural> checkpoints) {
  if (checkpoints.size() < 2)
    throw std::invalid_argument("density profile needs at least 2 checkpoints");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1)
      throw std::invalid_argument("checkpoints must be >= 1");
    if (i > 0 && !(checkpoints[i - 1] < checkpoints[i]))
      throw std::invalid_argument("checkpoints must be strictly increasing");
  }

  DensityProfile profile;
  profile.ratios.reserve(checkpoints.size());
  for (const auto& n : checkpoints) profile.ratios.push_back(finite_density(A, n));
  profile.checkpoints = std::move(checkpoints);
  profile.burn_in_index = profile.checkpoints.size() / 3;
  profile.tail_sup = profile.ratios[profile.burn_in_index];
  profile.tail_inf = profile.tail_sup;
  for (std::size_t i = profile.burn_in_index + 1; i < profile.ratios.size(); ++i) {
    if (profile.ratios[i] > profile.tail_sup) profile.tail_sup = profile.ratios[i];
    if (profile.ratios[i] < profile.tail_inf) profile.tail_inf = profile.ratios[i];
  }
  return profile;
}

HImageResult h_image(const FiniteSet& A, const BoundFunction& f, std::uint64_t cap,
                     unsigned threads) {
  if (cap == 0) throw std::invalid_argument("h_image needs cap >= 1");
  if (!A.empty() && A.elements().front() < 1)
    throw std::invalid_argument("h_image sources must be >= 1");

  struct Part {
    std::vector<Natural> values;
    std::vector<Natural> saturated;
  };

  const auto& src = A.elements();
  constexpr std::uint64_t kChunk = 64;
  auto parts = chunked_map<Part>(
      0, src.size(), kChunk, threads, [&](std::uint64_t lo, std::uint64_t hi) {
        Part part;
        for (std::uint64_t i = lo; i < hi; ++i) {
          const Natural& n = src[static_cast<std::size_t>(i)];
          const Natural thr = f.threshold_below(n);  // v < f(n) <=> v <= thr
          Natural v = n;
          bool reached_one = false;
          for (std::uint64_t k = 0;; ++k) {
            if (v <= thr) part.values.push_back(v);
            if (v == 1) {
              // Past 1 the orbit is the 1<->2 cycle; 2 is the only new value.
              if (2 <= thr) part.values.push_back(2);
              reached_one = true;
              break;
            }
            if (k == cap) break;
            step_inplace(v);
          }
          if (!reached_one) part.saturated.push_back(n);
        }
        return part;
      });

  std::vector<Natural> values;
  HImageResult res;
  for (auto& part : parts) {
    values.insert(values.end(), part.values.begin(), part.values.end());
    res.saturated_sources.insert(res.saturated_sources.end(), part.saturated.begin(),
                                 part.saturated.end());
  }
  res.image = FiniteSet::from(std::move(values));
  return res;
}

DropScanReport drop_scan(const BoundFunction& f, const Natural& lo, const Natural& hi,
                         std::uint64_t cap, std::uint64_t min_k, unsigned threads) {
  if (lo < 1) throw std::invalid_argument("drop scan needs lo >= 1");
  if (hi < lo) throw std::invalid_argument("inverted scan range");
  if (hi > 1000000000) throw std::invalid_argument("drop scan range capped at 10^9");
  if (cap == 0) throw std::invalid_argument("drop scan needs cap >= 1");

  const std::uint64_t lo64 = to_u64(lo);
  const std::uint64_t length = to_u64(hi) - lo64 + 1;

  struct Part {
    std::uint64_t excluded = 0, dropped = 0;
    std::vector<Natural> unresolved;
  };

  // mpz continuation for walks that outgrow 64 bits.
  auto slow_walk = [&](Natural v, std::uint64_t k, const Natural& thr,
                       std::uint64_t kcap) {
    for (;; ++k) {
      if (k >= min_k && v <= thr) return true;
      if (k == kcap) return false;
      step_inplace(v);
    }
  };

  constexpr std::uint64_t kChunk = 1 << 13;
  auto parts = chunked_map<Part>(
      0, length, kChunk, threads, [&](std::uint64_t clo, std::uint64_t chi) {
        Part part;
        for (std::uint64_t i = clo; i < chi; ++i) {
          const std::uint64_t y = lo64 + i;
          const Natural thr_n = f.threshold_below(y);
          if (thr_n == 0) {
            ++part.excluded;
            continue;
          }
          // Threshold past 2^64 means every 64-bit value qualifies.
          const std::uint64_t thr =
              fits_u64(thr_n) ? to_u64(thr_n)
                              : std::numeric_limits<std::uint64_t>::max();
          std::uint64_t v = y;
          int outcome = -1;
          for (std::uint64_t k = 0;; ++k) {
            if (k >= min_k && v <= thr) {
              outcome = 1;
              break;
            }
            if (k == cap) {
              outcome = 0;
              break;
            }
            if (v & 1) {
              if (v > kOddGuard) {
                outcome = slow_walk(Natural(static_cast<unsigned long>(v)), k,
                                    thr_n, cap)
                              ? 1
                              : 0;
                break;
              }
              v = (3 * v + 1) >> 1;
            } else {
              v >>= 1;
            }
          }
          if (outcome == 1)
            ++part.dropped;
          else
            part.unresolved.push_back(Natural(static_cast<unsigned long>(y)));
        }
        return part;
      });

  DropScanReport report;
  report.lo = lo;
  report.hi = hi;
  report.cap = cap;
  report.min_k = min_k;
  report.total = length;
  for (auto& part : parts) {
    report.excluded += part.excluded;
    report.dropped += part.dropped;
    report.unresolved.insert(report.unresolved.end(), part.unresolved.begin(),
                             part.unresolved.end());
  }
  const std::uint64_t considered = report.total - report.excluded;
  if (considered == 0) {
    report.fraction = Rational(0);
  } else {
    report.fraction = Rational(Natural(static_cast<unsigned long>(report.dropped)),
                               Natural(static_cast<unsigned long>(considered)));
    report.fraction.canonicalize();
  }
  return report;
}

CardinalityCheck image_cardinality_check(const FiniteSet& B, unsigned m) {
  std::vector<Natural> image;
  image.reserve(B.size());
  for (const auto& b : B.elements()) {
    Natural v = b;
    for (unsigned j = 0; j < m; ++j) step_inplace(v);
    image.push_back(std::move(v));
  }
  std::sort(image.begin(), image.end());
  image.erase(std::unique(image.begin(), image.end()), image.end());

  CardinalityCheck check;
  check.source_size = B.size();
  check.image_size = image.size();
  Natural lhs(static_cast<unsigned long>(check.image_size));
  mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), m);
  check.holds = lhs >= Natural(static_cast<unsigned long>(check.source_size));
  return check;
}

ParitySplitReport parity_split_image_check(const FiniteSet& A, const Natural& N) {
  if (N < 1) throw std::invalid_argument("parity split needs N >= 1");
  if (!A.empty() &&
      (A.elements().front() < 1 || A.elements().back() > N))
    throw std::invalid_argument("parity split input must lie in [1, N]");

  Natural half = N + 1;
  mpz_tdiv_q_2exp(half.get_mpz_t(), half.get_mpz_t(), 1);  // ceil(N/2)
  Natural expanded = 3 * N + 1;
  mpz_tdiv_q_2exp(expanded.get_mpz_t(), expanded.get_mpz_t(), 1);  // floor((3N+1)/2)

  ParitySplitReport report;
  std::vector<Natural> even_image, odd_image, union_image;
  for (const auto& y : A.elements()) {
    Natural v = y;
    step_inplace(v);
    if (mpz_even_p(y.get_mpz_t())) {
      ++report.even_count;
      if (v < 1 || v > half) report.even_in_range = false;
      even_image.push_back(v);
    } else {
      ++report.odd_count;
      if (v < 2 || v > expanded) report.odd_in_range = false;
      odd_image.push_back(v);
    }
    union_image.push_back(std::move(v));
  }

  auto distinct = [](std::vector<Natural>& v) {
    const std::size_t n = v.size();
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v.size() == n;
  };
  report.even_injective = distinct(even_image);
  report.odd_injective = distinct(odd_image);
  if (!even_image.empty()) report.even_image_max = even_image.back();
  if (!odd_image.empty()) report.odd_image_max = odd_image.back();

  const FiniteSet even_set = FiniteSet::from(std::move(even_image));
  report.even_image_in_half = even_set.count_in_closed(1, half);

  const FiniteSet image = FiniteSet::from(std::move(union_image));
  report.density_at_half = finite_density(image, half);
  report.density_at_n = finite_density(image, N);
  report.density_at_expanded = finite_density(image, expanded);
  return report;
}

InclusionReport image_inclusion_check(const FiniteSet& A, const BoundFunction& f,
                                      const BoundFunction& g, unsigned k,
                                      std::uint64_t cap, unsigned threads) {
  if (k == 0) throw std::invalid_argument("power check needs k >= 1");
  for (const auto& y : A.elements())
    if (BoundFunction::compare_at(f, g, y) < 0)
      throw std::invalid_argument("comparison precondition failed: g(y) > f(y) at y = " +
                                  to_string(y));

  InclusionReport report;
  report.power_k = k;
  std::vector<Natural> saturated;
  auto walk = [&](const FiniteSet& src, const BoundFunction& bound) {
    HImageResult r = h_image(src, bound, cap, threads);
    saturated.insert(saturated.end(), r.saturated_sources.begin(),
                     r.saturated_sources.end());
    return r.image;
  };

  const FiniteSet under_f = walk(A, f);
  const FiniteSet under_g = walk(A, g);
  report.comparison_holds = under_g.subset_of(under_f);

  const FiniteSet outer = walk(under_g, f);
  const FiniteSet direct = walk(A, compose(f, g));
  report.composition_holds = outer.subset_of(direct);

  FiniteSet chained = A;
  for (unsigned i = 0; i < k; ++i) chained = walk(chained, f);
  const FiniteSet powered = walk(A, f.self_power(k));
  report.power_holds = chained.subset_of(powered);

  std::sort(saturated.begin(), saturated.end());
  saturated.erase(std::unique(saturated.begin(), saturated.end()), saturated.end());
  report.saturated = std::move(saturated);
  report.verdict_valid = report.saturated.empty();
  return report;
}

}  // namespace collatz
