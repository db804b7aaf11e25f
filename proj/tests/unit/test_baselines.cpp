#include <gtest/gtest.h>

#include <cmath>

#include "imp/baselines.hpp"
#include "imp/bench.hpp"
#include "support.hpp"

using namespace imp;
using test::disc_object;

namespace {

WorldState walled_target() {
  WorldState w = test::open_table({0.15, 0.45}, {0.8, 0.45});
  for (int k = 0; k < 16; ++k) {
    const double a = 2 * kPi * k / 16;
    w.objects.push_back(disc_object(k, {0.8 + 0.14 * std::cos(a), 0.45 + 0.14 * std::sin(a)}, true, {}, 0.035));
  }
  return w;
}

}  // namespace

TEST(Apf, EmptyWorldIsPureAttraction) {
  const ApfConfig cfg;
  const Vec2 f = apf_force({0.3, 0.4}, {0.4, 0.4}, {}, 0.02, 0.3, cfg);
  EXPECT_NEAR(f.x, cfg.k_p * 0.1, 1e-12);
  EXPECT_EQ(f.y, 0.0);
}

TEST(Apf, SymmetricPairHasNoLateralForce) {
  const std::vector<Disc> pair{{{0.4, 0.5}, 0.05}, {{0.4, 0.4}, 0.05}};
  const Vec2 f = apf_force({0.35, 0.45}, {0.8, 0.45}, pair, 0.02, 0.3, ApfConfig{});
  EXPECT_NEAR(f.y, 0.0, 1e-12);
  EXPECT_LT(f.x, apf_force({0.35, 0.45}, {0.8, 0.45}, {}, 0.02, 0.3, ApfConfig{}).x);
}

TEST(Apf, StallsOnCorridorWhereImpPushesThrough) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const WorldState w = blocked_corridor(seed);
    ApfPlanner apf;
    ImpPlanner imp;
    const TrialResult a = run_episode(w, apf, SimConfig{}, EpisodeLimits{}, seed);
    const TrialResult b = run_episode(w, imp, SimConfig{}, EpisodeLimits{}, seed);
    EXPECT_FALSE(a.success) << seed;
    EXPECT_TRUE(b.success) << seed;
  }
}

TEST(Roadmap, EmptySpaceIsNearlyStraight) {
  Rng rng(1);
  const auto path = roadmap_path({0.1, 0.1}, {1.0, 0.8}, {}, Table{}, 0.02, rng);
  ASSERT_TRUE(path);
  EXPECT_EQ(path->front(), (Point2{0.1, 0.1}));
  EXPECT_EQ(path->back(), (Point2{1.0, 0.8}));
  const double e = distance({0.1, 0.1}, {1.0, 0.8});
  EXPECT_GE(polyline_length(*path), e - 1e-12);
  EXPECT_LE(polyline_length(*path), 1.05 * e);
}

TEST(Roadmap, PathsAvoidObstaclesAndNeverBeatTheLine) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    std::vector<Disc> obs;
    for (int k = 0; k < 5; ++k) obs.push_back({{rng.uniform(0.3, 0.9), rng.uniform(0.2, 0.7)}, 0.05});
    const Point2 s{0.08, 0.45}, g{1.12, 0.45};
    const auto path = roadmap_path(s, g, obs, Table{}, 0.02, rng);
    if (!path) continue;
    EXPECT_GE(polyline_length(*path), distance(s, g) - 1e-12);
    for (std::size_t i = 0; i + 1 < path->size(); ++i) EXPECT_TRUE(segment_clear((*path)[i], (*path)[i + 1], obs, 0.02));
  }
}

TEST(Roadmap, EnclosedGoalHasNoPath) {
  const WorldState w = walled_target();
  std::vector<Disc> obs;
  for (const auto& o : w.objects) obs.push_back(o.shape);
  Rng rng(3);
  EXPECT_FALSE(roadmap_path(w.robot.position, w.targets[0].g, obs, w.table, 0.02, rng));
}

TEST(SamplingPlanner, WalledGoalEndsWithNoPath) {
  SamplingPlanner p;
  const TrialResult r = run_episode(walled_target(), p, SimConfig{}, EpisodeLimits{}, 1);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.failure_cause, FailureCause::no_path);
}

TEST(SamplingPlanner, EmptyWorldSucceeds) {
  SamplingPlanner p;
  const TrialResult r = run_episode(test::open_table({0.1, 0.1}, {0.9, 0.7}), p, SimConfig{}, EpisodeLimits{}, 1);
  EXPECT_TRUE(r.success);
  EXPECT_LE(r.path_cost, 1.1 * distance({0.1, 0.1}, {0.9, 0.7}));
}

TEST(CubicBSpline, ClampedEndsAndStraightLine) {
  const CubicBSpline s({{0, 0}, {0.25, 0}, {0.5, 0}, {0.75, 0}, {1, 0}});
  EXPECT_EQ(s.at(0.0), (Point2{0, 0}));
  EXPECT_NEAR(s.at(1.0).x, 1.0, 1e-12);
  for (const auto& p : s.sample(20)) EXPECT_NEAR(p.y, 0.0, 1e-15);
}

TEST(PathReference, ConstantSpeed) {
  const PathReference ref({{0, 0}, {0.3, 0}, {0.3, 0.4}}, 0.1, 2.0);
  EXPECT_NEAR(ref.end_time(), 2.0 + 7.0, 1e-12);
  EXPECT_EQ(ref.position(1.0), (Point2{0, 0}));
  EXPECT_NEAR(ref.position(4.0).x, 0.2, 1e-12);
  EXPECT_NEAR(ref.position(6.0).y, 0.1, 1e-12);
  EXPECT_NEAR(norm(ref.velocity(4.0)), 0.1, 1e-12);
  EXPECT_EQ(ref.position(100.0), (Point2{0.3, 0.4}));
}

TEST(BsplinePlanner, EmptyWorldAcceptedOnFirstTry) {
  BsplinePlanner p;
  const TrialResult r = run_episode(test::open_table({0.1, 0.1}, {0.6, 0.5}), p, SimConfig{}, EpisodeLimits{}, 1);
  EXPECT_TRUE(r.success);
  EXPECT_TRUE(p.last_accepted_first_try());
  EXPECT_EQ(p.rollouts(), 1);
}

TEST(BsplinePlanner, RolloutThroughFixedObjectRejected) {
  BsplinePlanner p;
  WorldState w = test::open_table({0.2, 0.45}, {0.7, 0.45});
  p.reset(workspace_of(w, SimConfig{}));
  SensorFrame f;
  f.position = w.robot.position;
  f.proximity = {{5, 0.13, {1, 0}, 0.05}};  // object centered at (0.38, 0.45)
  p.tick(f);  // the rollout world is built from the sensed map
  const PathReference straight({w.robot.position, w.targets[0].g}, 0.05, 0.0);
  double peak = 0.0;
  EXPECT_FALSE(p.rollout(f, straight, w.targets[0], peak));
  EXPECT_GT(peak, 0.0);

  const PathReference around({w.robot.position, {0.38, 0.6}, w.targets[0].g}, 0.05, 0.0);
  peak = 0.0;
  EXPECT_TRUE(p.rollout(f, around, w.targets[0], peak));
  EXPECT_LE(peak, 10.0);
}

TEST(BsplinePlanner, AcceptedRolloutsKeepForcesBelowLimit) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    BsplinePlanner p;
    const WorldState w = approach_fixture(seed);
    const TrialResult r = run_episode(w, p, SimConfig{}, EpisodeLimits{}, seed);
    if (r.success) EXPECT_LE(r.peak_force, 10.0);
    EXPECT_GE(p.rollouts(), 1);
  }
}
