#include "doctest.h"

#include <cstdint>
#include <vector>

#include "collatz/density.hpp"

using namespace collatz;

namespace {

FiniteSet range(unsigned long lo, unsigned long hi) {
  return FiniteSet::range_closed(Natural(lo), Natural(hi));
}

}  // namespace

TEST_CASE("finite set basics") {
  const FiniteSet s = FiniteSet::from({Natural(5), Natural(3), Natural(3), Natural(1)});
  CHECK(s.size() == 3);
  CHECK(s.elements() == std::vector<Natural>{Natural(1), Natural(3), Natural(5)});
  CHECK(s.contains(3));
  CHECK_FALSE(s.contains(4));
  CHECK(s.subset_of(range(1, 5)));
  CHECK_FALSE(range(1, 5).subset_of(s));
  CHECK(s.count_in_closed(2, 5) == 2);
  CHECK(s.count_in_closed(6, 2) == 0);
  CHECK(range(3, 7).size() == 5);
  CHECK(range(7, 3).empty());
}

TEST_CASE("finite density is an exact ratio") {
  const FiniteSet s = range(1, 10);
  CHECK(finite_density(s, 20) == Rational(1, 2));
  CHECK(finite_density(s, 5) == Rational(1));
  CHECK(finite_density(FiniteSet(), 7) == Rational(0));
  CHECK_THROWS_AS(finite_density(s, 0), std::invalid_argument);
}

TEST_CASE("density profile of multiples of three") {
  std::vector<Natural> threes;
  for (unsigned long v = 3; v <= 100; v += 3) threes.push_back(Natural(v));
  const FiniteSet A = FiniteSet::from(std::move(threes));
  const DensityProfile p =
      density_profile(A, {Natural(10), Natural(20), Natural(40), Natural(80)});
  CHECK(p.ratios == std::vector<Rational>{Rational(3, 10), Rational(3, 10),
                                          Rational(13, 40), Rational(13, 40)});
  CHECK(p.burn_in_index == 1);
  CHECK(p.tail_sup == Rational(13, 40));
  CHECK(p.tail_inf == Rational(3, 10));
}

TEST_CASE("density profile validation") {
  const FiniteSet A = range(1, 10);
  CHECK_THROWS_AS(density_profile(A, {Natural(10)}), std::invalid_argument);
  CHECK_THROWS_AS(density_profile(A, {Natural(10), Natural(10)}), std::invalid_argument);
  CHECK_THROWS_AS(density_profile(A, {Natural(0), Natural(10)}), std::invalid_argument);
}

TEST_CASE("trajectory image under the identity bound") {
  const FiniteSet A = FiniteSet::from({Natural(7), Natural(16), Natural(27)});
  const HImageResult r = h_image(A, BoundFunction::identity(), 100000);
  CHECK(r.saturated_sources.empty());
  CHECK(r.image.elements() ==
        std::vector<Natural>{Natural(1), Natural(2), Natural(4), Natural(5), Natural(8),
                             Natural(10), Natural(20), Natural(23)});
}

TEST_CASE("trajectory image probes the 1<->2 cycle once") {
  const HImageResult r =
      h_image(FiniteSet::from({Natural(1)}), BoundFunction::linear(Rational(3)), 10);
  CHECK(r.image.elements() == std::vector<Natural>{Natural(1), Natural(2)});
  CHECK(r.saturated_sources.empty());
}

TEST_CASE("trajectory image saturation stays in-band") {
  const HImageResult r = h_image(FiniteSet::from({Natural(27)}),
                                 BoundFunction::identity(), 5);
  CHECK(r.image.empty());
  CHECK(r.saturated_sources == std::vector<Natural>{Natural(27)});
}

TEST_CASE("trajectory image guards") {
  CHECK(h_image(FiniteSet(), BoundFunction::identity(), 10).image.empty());
  CHECK_THROWS_AS(h_image(FiniteSet::from({Natural(0), Natural(3)}),
                          BoundFunction::identity(), 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(h_image(range(1, 4), BoundFunction::identity(), 0),
                  std::invalid_argument);
}

TEST_CASE("drop scan with a small linear bound excludes tiny y") {
  const DropScanReport r =
      drop_scan(BoundFunction::linear(Rational(1, 8)), 3, 40, 10000);
  CHECK(r.total == 38);
  CHECK(r.excluded == 6);  // y <= 8 have f(y) <= 1
  CHECK(r.dropped == 32);
  CHECK(r.unresolved.empty());
  CHECK(r.fraction == Rational(1));
}

TEST_CASE("drop scan corner reports") {
  const DropScanReport one = drop_scan(BoundFunction::identity(), 1, 1, 10);
  CHECK(one.excluded == 1);
  CHECK(one.dropped == 0);
  CHECK(one.fraction == Rational(0));

  const DropScanReport stuck = drop_scan(BoundFunction::identity(), 27, 27, 3);
  CHECK(stuck.unresolved == std::vector<Natural>{Natural(27)});
  CHECK(stuck.dropped == 0);
  CHECK(stuck.fraction == Rational(0));
}

TEST_CASE("min_k delays the witness and can push it past the cap") {
  // y = 2 under the identity: iterates 2,1,2,1,... and the first index
  // with k >= 3 and value below 2 is k = 3.
  const DropScanReport hit = drop_scan(BoundFunction::identity(), 2, 2, 3, 3);
  CHECK(hit.dropped == 1);
  const DropScanReport miss = drop_scan(BoundFunction::identity(), 2, 2, 2, 3);
  CHECK(miss.dropped == 0);
  CHECK(miss.unresolved == std::vector<Natural>{Natural(2)});
}

TEST_CASE("drop scan guards") {
  const BoundFunction id = BoundFunction::identity();
  CHECK_THROWS_AS(drop_scan(id, 0, 5, 10), std::invalid_argument);
  CHECK_THROWS_AS(drop_scan(id, 5, 4, 10), std::invalid_argument);
  CHECK_THROWS_AS(drop_scan(id, 1, Natural("1000000001"), 10), std::invalid_argument);
  CHECK_THROWS_AS(drop_scan(id, 1, 5, 0), std::invalid_argument);
}

TEST_CASE("drop scan is thread count invariant") {
  const BoundFunction half = BoundFunction::linear(Rational(1, 2));
  const DropScanReport a = drop_scan(half, 3, 5000, 40, 0, 1);
  const DropScanReport b = drop_scan(half, 3, 5000, 40, 0, 4);
  CHECK(a.excluded == b.excluded);
  CHECK(a.dropped == b.dropped);
  CHECK(a.unresolved == b.unresolved);
  CHECK(a.fraction == b.fraction);
}

TEST_CASE("image cardinality floor") {
  // Tight at m = 1: T(3) = T(10) = 5, so two sources collapse onto one image.
  const CardinalityCheck tight =
      image_cardinality_check(FiniteSet::from({Natural(3), Natural(10)}), 1);
  CHECK(tight.holds);
  CHECK(tight.source_size == 2);
  CHECK(tight.image_size == 1);

  const CardinalityCheck r = image_cardinality_check(range(1, 32), 3);
  CHECK(r.image_size == 20);
  CHECK(r.holds);

  for (unsigned m = 0; m <= 8; ++m) CHECK(image_cardinality_check(range(1, 256), m).holds);
  CHECK(image_cardinality_check(FiniteSet(), 4).holds);
  CHECK(image_cardinality_check(range(1, 16), 0).image_size == 16);
}

TEST_CASE("parity split of one map application") {
  const ParitySplitReport r = parity_split_image_check(range(1, 10), 10);
  CHECK(r.even_count == 5);
  CHECK(r.odd_count == 5);
  CHECK(r.even_injective);
  CHECK(r.odd_injective);
  CHECK(r.even_in_range);
  CHECK(r.odd_in_range);
  CHECK(r.even_image_in_half == 5);  // T({2,4,6,8,10}) = {1,2,3,4,5}
  CHECK(r.even_image_max == 5);
  CHECK(r.odd_image_max == 14);      // T(9) = 14
  CHECK(r.density_at_half == Rational(1));
  CHECK(r.density_at_n == Rational(3, 5));
  CHECK(r.density_at_expanded == Rational(8, 15));
}

TEST_CASE("parity split guards") {
  CHECK_THROWS_AS(parity_split_image_check(FiniteSet::from({Natural(11)}), 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(parity_split_image_check(FiniteSet(), 0), std::invalid_argument);
  const ParitySplitReport r = parity_split_image_check(FiniteSet(), 5);
  CHECK(r.even_count == 0);
  CHECK(r.density_at_n == Rational(0));
}

TEST_CASE("image inclusion laws hold on a dense base set") {
  const InclusionReport r =
      image_inclusion_check(range(1, 100), BoundFunction::linear(Rational(1, 2)),
                            BoundFunction::linear(Rational(1, 4)), 2, 100000);
  CHECK(r.comparison_holds);
  CHECK(r.composition_holds);
  CHECK(r.power_holds);
  CHECK(r.power_k == 2);
  CHECK(r.saturated.empty());
  CHECK(r.verdict_valid);
}

TEST_CASE("image inclusion guards") {
  const BoundFunction half = BoundFunction::linear(Rational(1, 2));
  const BoundFunction quarter = BoundFunction::linear(Rational(1, 4));
  CHECK_THROWS_AS(image_inclusion_check(range(1, 10), quarter, half, 2, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS(image_inclusion_check(range(1, 10), half, quarter, 0, 100),
                  std::invalid_argument);
}

TEST_CASE("image inclusion saturation voids the verdict") {
  const InclusionReport r =
      image_inclusion_check(FiniteSet::from({Natural(27)}), BoundFunction::identity(),
                            BoundFunction::identity(), 1, 3);
  CHECK_FALSE(r.verdict_valid);
  CHECK(r.saturated == std::vector<Natural>{Natural(27)});
}

TEST_CASE("image inclusion surfaces irrational compositions") {
  // g <= f on {1..4} but f∘g has coefficient sqrt(1/2).
  const BoundFunction f = BoundFunction::power(Rational(1, 2));
  const BoundFunction g = BoundFunction::linear(Rational(1, 2));
  CHECK_THROWS_AS(image_inclusion_check(range(1, 4), f, g, 1, 100), std::domain_error);
}
