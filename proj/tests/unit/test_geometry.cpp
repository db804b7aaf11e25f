#include <gtest/gtest.h>

#include <limits>

#include "imp/geometry.hpp"
#include "support.hpp"

using namespace imp;

namespace {

// Exhaustive double loop; strict > keeps the lowest index on ties.
HausdorffResult brute_hausdorff(const PointSet& a, const PointSet& b) {
  HausdorffResult best{-1.0, {}, 0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& q : b) m = std::min(m, distance(a[i], q));
    if (m > best.distance) best = {m, a[i], i};
  }
  return best;
}

}  // namespace

TEST(Distance, Examples) {
  EXPECT_DOUBLE_EQ(distance({0, 0}, {3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(distance({1, 1}, {1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(distance({-2, 0}, {2, 0}), 4.0);
}

TEST(Distance, SymmetricAndZeroOnlyOnIdentity) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Point2 p{rng.uniform(-5, 5), rng.uniform(-5, 5)}, q{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    EXPECT_EQ(distance(p, q), distance(q, p));
    EXPECT_GT(distance(p, q), 0.0);
    EXPECT_EQ(distance(p, p), 0.0);
  }
}

TEST(DiscClearance, Examples) {
  const Disc d{{0, 0}, 0.05};
  EXPECT_NEAR(disc_clearance({0.2, 0}, d), 0.15, 1e-15);
  EXPECT_DOUBLE_EQ(disc_clearance({0, 0}, d), -0.05);
  EXPECT_DOUBLE_EQ(disc_clearance({0.05, 0}, d), 0.0);
}

TEST(SampleBoundary, UnitDiscFourPoints) {
  const PointSet p = sample_boundary({{0, 0}, 1.0}, 4);
  ASSERT_EQ(p.size(), 4u);
  const Point2 want[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(p[i].x, want[i].x, 1e-15);
    EXPECT_NEAR(p[i].y, want[i].y, 1e-15);
  }
}

TEST(SampleBoundary, PointsLieOnTheCircle) {
  for (const auto& [d, n] : {std::pair{Disc{{0.3, -0.2}, 0.7}, 3}, std::pair{Disc{{2, 0}, 0.5}, 8}}) {
    const PointSet p = sample_boundary(d, static_cast<std::size_t>(n));
    ASSERT_EQ(p.size(), static_cast<std::size_t>(n));
    for (const auto& q : p) EXPECT_NEAR(distance(q, d.center), d.radius, 1e-12);
  }
}

TEST(SampleBoundary, RejectsFewerThanThree) {
  EXPECT_THROW(sample_boundary({{0, 0}, 1}, 2), std::invalid_argument);
  EXPECT_THROW(sample_boundary({{0, 0}, 1}, 0), std::invalid_argument);
}

TEST(SampleBoundary, StableAcrossCalls) {
  const Disc d{{0.1, 0.2}, 0.05};
  EXPECT_EQ(sample_boundary(d, 64), sample_boundary(d, 64));
}

TEST(DirectedHausdorff, Examples) {
  const PointSet a1{{0, 0}}, b1{{0, 0}};
  const auto r1 = directed_hausdorff(a1, b1);
  EXPECT_EQ(r1.distance, 0.0);
  EXPECT_EQ(r1.argmax, (Point2{0, 0}));

  const PointSet a2{{0, 0}, {5, 0}}, b2{{1, 0}};
  const auto r2 = directed_hausdorff(a2, b2);
  EXPECT_EQ(r2.distance, 4.0);
  EXPECT_EQ(r2.argmax, (Point2{5, 0}));
  EXPECT_EQ(r2.index, 1u);
}

TEST(DirectedHausdorff, RejectsEmptySets) {
  const PointSet some{{0, 0}}, none;
  EXPECT_THROW(directed_hausdorff(none, some), std::invalid_argument);
  EXPECT_THROW(directed_hausdorff(some, none), std::invalid_argument);
}

TEST(DirectedHausdorff, MatchesExhaustiveOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t na = 1 + rng.below(100), nb = 1 + rng.below(100);
    const PointSet a = test::random_points(rng, trial < 100 ? 20 : na);
    const PointSet b = test::random_points(rng, trial < 100 ? 20 : nb);
    const auto got = directed_hausdorff(a, b);
    const auto want = brute_hausdorff(a, b);
    EXPECT_EQ(got.distance, want.distance);
    EXPECT_EQ(got.index, want.index);
    EXPECT_EQ(got.argmax, want.argmax);
  }
}

TEST(DirectedHausdorff, TiesGoToLowestIndex) {
  // Every boundary sample is equidistant from the center.
  const PointSet ring = sample_boundary({{0.4, -0.1}, 0.05}, 64);
  const PointSet center{{0.4, -0.1}};
  EXPECT_EQ(directed_hausdorff(ring, center).index, 0u);
}

TEST(DirectedHausdorff, ZeroIffSubset) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    PointSet b = test::random_points(rng, 30);
    PointSet a(b.begin(), b.begin() + 10);
    EXPECT_EQ(directed_hausdorff(a, b).distance, 0.0);
    a.push_back({2.0, 2.0});  // outside the sampling box
    EXPECT_GT(directed_hausdorff(a, b).distance, 0.0);
  }
}

TEST(SegmentPointDistance, EndpointsAndInterior) {
  EXPECT_DOUBLE_EQ(segment_point_distance({0, 0}, {1, 0}, {0.5, 0.3}), 0.3);
  EXPECT_DOUBLE_EQ(segment_point_distance({0, 0}, {1, 0}, {2, 0}), 1.0);
  EXPECT_DOUBLE_EQ(segment_point_distance({0, 0}, {0, 0}, {0, 2}), 2.0);
}
