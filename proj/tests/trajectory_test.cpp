#include "doctest.h"

#include "collatz/trajectory.hpp"

using namespace collatz;

TEST_CASE("step halves even and (3n+1)/2's odd") {
  CHECK(collatz_step(0) == 0);
  CHECK(collatz_step(1) == 2);
  CHECK(collatz_step(2) == 1);
  CHECK(collatz_step(3) == 5);
  CHECK(collatz_step(4) == 2);
  CHECK(collatz_step(10) == 5);
  CHECK(collatz_step(27) == 41);
}

TEST_CASE("step crosses 64-bit boundary exactly") {
  const Natural big = (pow2(200) + 1);  // odd
  CHECK(collatz_step(big) == (3 * big + 1) / 2);
  CHECK(collatz_step(pow2(200)) == pow2(199));
}

TEST_CASE("iterate composes step") {
  CHECK(iterate(3, 0) == 3);
  CHECK(iterate(3, 1) == 5);
  CHECK(iterate(3, 2) == 8);
  CHECK(iterate(7, 7) == 5);
  Natural v = 27;
  for (int k = 0; k <= 12; ++k) {
    CHECK(iterate(27, k) == v);
    v = collatz_step(v);
  }
}

TEST_CASE("trajectory of 27 reaches 1 in 70 steps with peak 4616") {
  const TrajectoryRecord rec = trajectory(27, 1000);
  CHECK(rec.terminated_by == Termination::ReachedOne);
  CHECK(rec.steps == 70);
  CHECK(rec.iterates.size() == 71);
  CHECK(rec.iterates.front() == 27);
  CHECK(rec.iterates.back() == 1);
  Natural peak = 0;
  for (const auto& v : rec.iterates)
    if (v > peak) peak = v;
  CHECK(peak == 4616);
}

TEST_CASE("trajectory saturation is reported in-band") {
  const TrajectoryRecord rec = trajectory(27, 10);
  CHECK(rec.terminated_by == Termination::CapHit);
  CHECK(rec.steps == 10);
  CHECK(rec.iterates.size() == 11);
}

TEST_CASE("trajectory of 1 is a single node") {
  const TrajectoryRecord rec = trajectory(1, 5);
  CHECK(rec.terminated_by == Termination::ReachedOne);
  CHECK(rec.steps == 0);
  CHECK(rec.iterates.size() == 1);
}

TEST_CASE("trajectory rejects cap 0; 0 is a fixed point that saturates") {
  CHECK_THROWS_AS(trajectory(1, 0), std::invalid_argument);
  const TrajectoryRecord rec = trajectory(0, 10);
  CHECK(rec.terminated_by == Termination::CapHit);
  CHECK(rec.iterates.back() == 0);
}

TEST_CASE("parity vector of 7") {
  const ParityVector pv = parity_vector(7, 5);
  const std::vector<std::uint8_t> want = {1, 1, 1, 0, 1};
  CHECK(pv.bits == want);
  CHECK(pv.sum() == 4);
  CHECK(pv.packed() == 0b10111);
}

TEST_CASE("parity sum variants differ by the endpoint bit") {
  CHECK(parity_sum(7, 4, ParityVariant::Exclusive) == 3);
  CHECK(parity_sum(7, 4, ParityVariant::Inclusive) == 4);
  for (unsigned long y = 1; y <= 200; ++y) {
    CHECK(parity_vector(y, 12).sum() == parity_sum(y, 12, ParityVariant::Exclusive));
    CHECK(parity_sum(y, 6, ParityVariant::Inclusive) ==
          parity_sum(y, 7, ParityVariant::Exclusive));
  }
}

TEST_CASE("first k parity bits depend only on y mod 2^k") {
  for (unsigned k = 1; k <= 8; ++k) {
    const std::uint64_t period = std::uint64_t{1} << k;
    for (std::uint64_t y = 0; y < period; ++y) {
      CHECK(parity_vector(y + period, k) == parity_vector(y, k));
      CHECK(parity_vector(y + 3 * period, k) == parity_vector(y, k));
    }
  }
}

TEST_CASE("first_drop frozen values") {
  const BoundFunction id = BoundFunction::identity();
  auto fd = first_drop(7, id, 10000);
  REQUIRE(fd.has_value());
  CHECK(*fd == 7);

  fd = first_drop(2, id, 10);
  REQUIRE(fd.has_value());
  CHECK(*fd == 1);

  fd = first_drop(27, id, 10000);
  REQUIRE(fd.has_value());
  CHECK(*fd == 59);

  fd = first_drop(5, BoundFunction::linear(Rational(1, 2)), 10000);
  REQUIRE(fd.has_value());
  CHECK(*fd == 3);
}

TEST_CASE("first_drop is 0 when the bound already exceeds y") {
  auto fd = first_drop(2, BoundFunction::linear(Rational(2)), 10);
  REQUIRE(fd.has_value());
  CHECK(*fd == 0);
  // min_k pushes the witness into the 1<->2 tail.
  fd = first_drop(2, BoundFunction::linear(Rational(2)), 10, 1);
  REQUIRE(fd.has_value());
  CHECK(*fd == 1);
}

TEST_CASE("first_drop returns nullopt when no value can drop") {
  CHECK_FALSE(first_drop(1, BoundFunction::identity(), 10000).has_value());
  CHECK_FALSE(first_drop(27, BoundFunction::linear(Rational(1, 28)), 10000).has_value());
}

TEST_CASE("first_drop respects the cap in-band") {
  CHECK_FALSE(first_drop(27, BoundFunction::identity(), 3).has_value());
  auto fd = first_drop(27, BoundFunction::identity(), 59);
  REQUIRE(fd.has_value());
  CHECK(*fd == 59);
  CHECK_FALSE(first_drop(27, BoundFunction::identity(), 58).has_value());
}

TEST_CASE("parity vector guards") {
  CHECK_THROWS_AS(parity_vector(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(parity_sum(3, 0, ParityVariant::Exclusive), std::invalid_argument);
}
