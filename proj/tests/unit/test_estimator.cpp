#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>

#include "imp/estimator.hpp"
#include "imp/rng.hpp"
#include "imp/sim.hpp"

using namespace imp;

namespace {

double rel_err(const OperableVector& a, const OperableVector& b) {
  const double n = std::sqrt(b.K * b.K + b.D * b.D + b.C * b.C);
  return std::sqrt((a.K - b.K) * (a.K - b.K) + (a.D - b.D) * (a.D - b.D) + (a.C - b.C) * (a.C - b.C)) / n;
}

RegressorBuffer planted(const OperableVector& th, int n, Rng& rng, double noise = 0.0) {
  RegressorBuffer buf(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double dx = rng.uniform(0, 0.01), v = rng.uniform(-0.05, 0.05);
    buf.accumulate({dx, v, th.K * dx + th.D * v + th.C + noise * rng.normal()});
  }
  return buf;
}

}  // namespace

TEST(RegressorBuffer, AccumulateAndEvict) {
  RegressorBuffer b(3);
  b.accumulate({0.1, 0.2, 1.0});
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b.rows()[0].h, (std::array<double, 3>{0.1, 0.2, 1.0}));
  EXPECT_EQ(b.rows()[0].y, 1.0);
  for (int i = 2; i <= 4; ++i) b.accumulate({0.1 * i, 0.0, static_cast<double>(i)});
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b.rows().front().y, 2.0);
  EXPECT_EQ(b.rows().back().y, 4.0);
  for (const auto& r : b.rows()) EXPECT_EQ(r.h[2], 1.0);
}

TEST(RegressorBuffer, RejectsNonFinite) {
  RegressorBuffer b;
  EXPECT_THROW(b.accumulate({NAN, 0, 0}), std::invalid_argument);
  EXPECT_THROW(b.accumulate({0, INFINITY, 0}), std::invalid_argument);
  EXPECT_EQ(b.size(), 0u);
  EXPECT_THROW(RegressorBuffer(0), std::invalid_argument);
}

TEST(EstimateTheta, NoiselessRecovery) {
  Rng rng(1);
  const OperableVector th{500, 20, 0.5};
  const auto [est, rep] = estimate_theta(planted(th, 50, rng));
  EXPECT_LE(rel_err(est, th), 1e-6);
  EXPECT_TRUE(rep.confident);
  EXPECT_EQ(rep.sample_count, 50u);
  EXPECT_LT(rep.residual_rms, 1e-9);
}

TEST(EstimateTheta, IdenticalRowsAreRankDeficient) {
  RegressorBuffer b;
  for (int i = 0; i < 40; ++i) b.accumulate({0.003, 0.01, 2.0});
  try {
    estimate_theta(b);
    FAIL();
  } catch (const RankDeficientError& e) {
    EXPECT_GE(e.condition(), 1e12);
  }
  RegressorBuffer tiny;
  tiny.accumulate({0.001, 0.0, 1.0});
  tiny.accumulate({0.002, 0.1, 2.0});
  EXPECT_THROW(estimate_theta(tiny), RankDeficientError);
}

TEST(EstimateTheta, NoisyRecoveryWithinFivePercent) {
  const OperableVector th{500, 20, 0.5};
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const auto [est, rep] = estimate_theta(planted(th, 200, rng, 0.1));
    worst = std::max(worst, rel_err(est, th));
    EXPECT_NEAR(rep.residual_rms, 0.1, 0.03);
  }
  EXPECT_LE(worst, 0.05);
}

TEST(EstimateTheta, ConfidenceGates) {
  Rng rng(2);
  const OperableVector th{500, 20, 0.5};
  EXPECT_FALSE(estimate_theta(planted(th, 20, rng)).second.confident);  // too few samples
  EXPECT_FALSE(estimate_theta(planted(th, 100, rng, 2.0)).second.confident);  // residual too large
  ConfidenceConfig strict;
  strict.condition_ceiling = 10.0;
  EXPECT_FALSE(estimate_theta(planted(th, 100, rng), strict).second.confident);
}

TEST(EstimateTheta, LeastSquaresOptimalAndOrthogonal) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const OperableVector th{rng.uniform(100, 5000), rng.uniform(0, 50), rng.uniform(0, 1)};
    const RegressorBuffer buf = planted(th, 80, rng, 0.2);
    const auto [est, rep] = estimate_theta(buf);
    const double j = least_squares_cost(buf, est);

    // Residual orthogonal to every regressor column.
    double g[3] = {0, 0, 0}, scale[3] = {0, 0, 0};
    for (const auto& r : buf.rows()) {
      const double e = r.y - (r.h[0] * est.K + r.h[1] * est.D + r.h[2] * est.C);
      for (int k = 0; k < 3; ++k) g[k] += r.h[k] * e, scale[k] += std::abs(r.h[k] * r.y);
    }
    for (int k = 0; k < 3; ++k) EXPECT_LE(std::abs(g[k]) / scale[k], 1e-8);

    // Any perturbation raises the cost.
    for (int k = 0; k < 10; ++k) {
      OperableVector p = est;
      p.K += rng.uniform(-1, 1);
      p.D += rng.uniform(-0.1, 0.1);
      p.C += rng.uniform(-0.01, 0.01);
      EXPECT_GE(least_squares_cost(buf, p), j);
    }

    // Independent normal-equations solve.
    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    for (const auto& r : buf.rows()) {
      const Eigen::Vector3d h(r.h[0], r.h[1], r.h[2]);
      A += h * h.transpose();
      b += h * r.y;
    }
    const Eigen::Vector3d ne = A.ldlt().solve(b);
    EXPECT_LE(rel_err(est, {ne(0), ne(1), ne(2)}), 1e-6);
  }
}

TEST(ProbeSchedule, Profile) {
  const double f = 6.0;
  EXPECT_EQ(probe_schedule(0, f), 0.0);
  EXPECT_DOUBLE_EQ(probe_schedule(25, f), 3.0);
  EXPECT_EQ(probe_schedule(50, f), f);
  EXPECT_EQ(probe_schedule(51, f), 3.0);
  EXPECT_EQ(probe_schedule(75, f), 3.0);
  EXPECT_EQ(probe_schedule(76, f), f);
  EXPECT_EQ(probe_schedule(500, f), f);
  EXPECT_EQ(probe_profile_length(), 100);
  for (int s = 0; s < 200; ++s) {
    EXPECT_GE(probe_schedule(s, f), 0.0);
    EXPECT_LE(probe_schedule(s, f), f);
  }
  EXPECT_THROW(probe_schedule(1, 0.0), std::invalid_argument);
}

TEST(ProbeSchedule, ExcitesASpringDamperPlant) {
  // Quasi-static spring-damper-offset plant driven by the profile.
  const OperableVector th{800, 15, 0.3};
  const double dt = 0.02;
  RegressorBuffer buf;
  double dx = 0.0;
  for (int s = 0; s < probe_profile_length(); ++s) {
    const double f = probe_schedule(s, 6.0);
    const double v = f > th.K * dx + th.C ? (f - th.K * dx - th.C) / th.D : 0.0;
    dx += v * dt;
    if (dx > 0.0) buf.accumulate({dx, v, th.K * dx + th.D * v + th.C});
  }
  const auto [est, rep] = estimate_theta(buf);
  EXPECT_LT(rep.condition_estimate, 1e6);
  EXPECT_TRUE(rep.confident);
  EXPECT_LE(rel_err(est, th), 1e-6);
}

TEST(EstimateTheta, RecoversSimulatorContactParameters) {
  // Samples straight from the simulator's contact law identify its parameters.
  const OperableVector th{3000, 35, 0.8};
  RegressorBuffer buf;
  Rng rng(4);
  for (int i = 0; i < 60; ++i) {
    const double pen = rng.uniform(1e-4, 3e-3), v = rng.uniform(0.0, 0.02);
    buf.accumulate({pen, v, contact_response(th, pen, v)});
  }
  EXPECT_LE(rel_err(estimate_theta(buf).first, th), 1e-6);
}

TEST(ClassifyOperability, Examples) {
  ConfidenceReport ok;
  ok.confident = true;
  const OperableVector th{500, 20, 0.5};
  EXPECT_EQ(classify_operability(th, ok, 0.02, 6.0), Operability::operable);
  EXPECT_EQ(classify_operability(th, ok, 0.0, 6.0), Operability::inoperable);
  ConfidenceReport no;
  EXPECT_EQ(classify_operability(th, no, 0.02, 6.0), Operability::unknown);
  EXPECT_EQ(classify_operability(th, no, 0.0, 6.0), Operability::unknown);
  EXPECT_EQ(classify_operability({-5, 20, 0.5}, ok, 0.0, 6.0), Operability::unknown);
  EXPECT_EQ(classify_operability(th, ok, 0.002, 6.0), Operability::operable);
  EXPECT_EQ(classify_operability(th, ok, 0.0019, 6.0), Operability::inoperable);
}
