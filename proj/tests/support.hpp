#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string_view>
#include <vector>

#include "imp/energy.hpp"
#include "imp/geometry.hpp"
#include "imp/planner.hpp"
#include "imp/rng.hpp"
#include "imp/sim.hpp"
#include "imp/world.hpp"

namespace imp::test {

inline ObjectBody disc_object(ObjectId id, Point2 c, bool fixed, OperableVector theta = {4000.0, 40.0, 0.5},
                              double radius = 0.05, double mass = 0.5) {
  ObjectBody o;
  o.id = id;
  o.shape = {c, radius};
  o.class_truth = fixed ? ObjectClass::fixed : ObjectClass::movable;
  o.theta_truth = theta;
  o.mass = mass;
  return o;
}

inline WorldState open_table(Point2 start, Point2 goal) {
  WorldState w;
  w.robot.position = start;
  w.targets = {{goal, 0.01}};
  return w;
}

/// Planner driven by a closure; for exercising the simulator directly.
class ScriptedPlanner final : public Planner {
 public:
  using Policy = std::function<Vec2(const SensorFrame&)>;
  explicit ScriptedPlanner(Policy p) : policy_(std::move(p)) {}
  std::string_view name() const override { return "scripted"; }
  void reset(const Workspace&) override {}
  PlannerCommand tick(const SensorFrame& f) override { return {policy_(f)}; }

 private:
  Policy policy_;
};

/// Velocity-tracking push toward a point, at the given speed and force cap.
inline ScriptedPlanner::Policy rammer(Point2 aim, double speed, double cap, double gain = 200.0) {
  return [=](const SensorFrame& f) {
    const Vec2 want = normalized(aim - f.position) * speed;
    return clamp_magnitude((want - f.velocity) * gain, cap);
  };
}

inline PointSet random_points(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  PointSet p;
  for (std::size_t i = 0; i < n; ++i) p.push_back({rng.uniform(lo, hi), rng.uniform(lo, hi)});
  return p;
}

/// Random convergence domain around a random robot pose, with up to three
/// inoperable objects in range, plus a random intent target near the robot.
struct DomainCase {
  ConvergenceDomain xc;
  MotionIntent intent;
};

inline DomainCase random_domain_case(Rng& rng, bool visible) {
  const Table table;
  const Point2 robot{rng.uniform(0.03, 1.17), rng.uniform(0.03, 0.87)};
  std::vector<ObjectView> objs;
  const int n = static_cast<int>(rng.below(4));
  for (int k = 0; k < n; ++k) {
    ObjectView o;
    o.id = k;
    o.cls = Operability::inoperable;
    const double a = rng.uniform(0, 2 * kPi), d = rng.uniform(0.1, 0.3);
    o.disc = {robot + Vec2{std::cos(a), std::sin(a)} * d, rng.uniform(0.02, 0.08)};
    objs.push_back(o);
  }
  DomainCase c;
  c.xc = convergence_domain(robot, objs, 0.3, 0.02, table, 0.01);
  if (visible) c.xc.viewpoint = robot;
  c.intent.target = robot + Vec2{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
  return c;
}

/// Membership written out independently of ConvergenceDomain::contains.
inline bool oracle_member(const ConvergenceDomain& xc, const Point2& p) {
  const double dx = p.x - xc.base.center.x, dy = p.y - xc.base.center.y;
  if (dx * dx + dy * dy > xc.base.radius * xc.base.radius) return false;
  if (xc.keep_in && (p.x < xc.keep_in->xmin || p.x > xc.keep_in->xmax || p.y < xc.keep_in->ymin || p.y > xc.keep_in->ymax))
    return false;
  for (const auto& d : xc.excluded) {
    const double ex = p.x - d.center.x, ey = p.y - d.center.y;
    if (ex * ex + ey * ey < d.radius * d.radius) return false;
  }
  if (!xc.viewpoint) return true;
  const Point2 v = *xc.viewpoint;
  for (const auto& d : xc.excluded) {
    const double depth = std::min(d.radius, std::hypot(v.x - d.center.x, v.y - d.center.y));
    const double sx = p.x - v.x, sy = p.y - v.y, len2 = sx * sx + sy * sy;
    double t = len2 > 0 ? ((d.center.x - v.x) * sx + (d.center.y - v.y) * sy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    if (std::hypot(v.x + t * sx - d.center.x, v.y + t * sy - d.center.y) < depth - 1e-12) return false;
  }
  return true;
}

/// Distance from t to the nearest member on an n x n grid over the base disc's
/// bounding square; infinity when no grid node is a member.
inline double grid_projection_distance(const ConvergenceDomain& xc, const Point2& t, int n = 200) {
  double best = std::numeric_limits<double>::infinity();
  const double h = 2.0 * xc.base.radius / (n - 1);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Point2 p{xc.base.center.x - xc.base.radius + i * h, xc.base.center.y - xc.base.radius + j * h};
      if (oracle_member(xc, p)) best = std::min(best, std::hypot(p.x - t.x, p.y - t.y));
    }
  return best;
}

/// Worst-case spacing of the polar candidate samples.
inline double sampling_resolution(const ConvergenceDomain& xc, const ProjectionConfig& cfg = {}) {
  return xc.base.radius / cfg.radial + 2.0 * kPi * xc.base.radius / cfg.angular;
}

}  // namespace imp::test
