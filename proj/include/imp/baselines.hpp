#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "imp/geometry.hpp"
#include "imp/rng.hpp"
#include "imp/sim.hpp"

namespace imp {

/// Objects a baseline has sensed so far, by id. Centers come from proximity
/// when available, otherwise from contact geometry.
class SensedMap {
 public:
  /// Returns true when an object was seen for the first time or moved more
  /// than `moved` since it was last stored.
  bool update(const SensorFrame& frame, double robot_radius, double moved = 0.005);
  std::vector<Disc> discs() const;
  void clear() { objects_.clear(); }

 private:
  std::map<ObjectId, Disc> objects_;
};

struct ApfConfig {
  double k_p = 25.0;     ///< N/m
  double eta = 2e-5;     ///< N m^2, repulsive gain
  double rho_0 = 0.1;    ///< m, repulsion influence distance (surface gap)
  double D_o = 5.0;      ///< N s/m
  double v_max = 0.07;   ///< m/s
};

/// Attractive + inverse-distance repulsive force of the classical potential
/// field method. Every sensed object is an obstacle.
Vec2 apf_force(const Point2& x, const Point2& goal, const std::vector<Disc>& obstacles, double robot_radius,
               double r_p, const ApfConfig& cfg);

class ApfPlanner final : public Planner {
 public:
  explicit ApfPlanner(ApfConfig cfg = {}) : cfg_(cfg) {}
  std::string_view name() const override { return "apf"; }
  void reset(const Workspace& ws) override;
  PlannerCommand tick(const SensorFrame& frame) override;

 private:
  ApfConfig cfg_;
  Workspace ws_;
  SensedMap map_;
};

/// Straight segment [a, b] keeps a robot of radius r at least `clear` away
/// from every disc surface, except that a start already closer may not get
/// any closer.
bool segment_clear(const Point2& a, const Point2& b, const std::vector<Disc>& obstacles, double clear);

struct RoadmapConfig {
  int samples = 400;
  double connect_radius = 0.25;  ///< m
  double margin = 0.005;         ///< m beyond robot radius
};

/// Shortest roadmap path start -> goal over uniformly sampled free states, or
/// nullopt when none exists. The path includes both endpoints.
std::optional<std::vector<Point2>> roadmap_path(const Point2& start, const Point2& goal,
                                                const std::vector<Disc>& obstacles, const Table& table,
                                                double robot_radius, Rng& rng, const RoadmapConfig& cfg = {});

double polyline_length(const std::vector<Point2>& path);

/// Compliant tracker: a position loop sets a desired velocity, a velocity
/// loop turns it into a capped force.
struct TrackerConfig {
  double position_gain = 3.0;   ///< 1/s
  double velocity_gain = 25.0;  ///< N s/m
  double force_cap = 8.0;       ///< N, below the 10 N failure level
  double v_max = 0.07;          ///< m/s
  double reach = 0.01;          ///< m, waypoint switching distance
};

struct SamplingConfig {
  RoadmapConfig roadmap;
  TrackerConfig tracker;
};

/// Roadmap baseline: plans in the sensed free space, replans whenever
/// sensing reveals a new or moved obstacle, and tracks waypoints compliantly.
class SamplingPlanner final : public Planner {
 public:
  explicit SamplingPlanner(SamplingConfig cfg = {}) : cfg_(cfg) {}
  std::string_view name() const override { return "sampling"; }
  void reset(const Workspace& ws) override;
  PlannerCommand tick(const SensorFrame& frame) override;

  const std::vector<Point2>& path() const { return path_; }
  int replans() const { return replans_; }

 private:
  SamplingConfig cfg_;
  Workspace ws_;
  SensedMap map_;
  std::vector<Point2> path_;
  std::size_t next_ = 0;
  std::size_t target_ = 0;
  bool need_plan_ = true;
  int replans_ = 0;
};

/// Clamped uniform cubic B-spline over the given control points.
class CubicBSpline {
 public:
  explicit CubicBSpline(std::vector<Point2> control);
  /// u in [0, 1].
  Point2 at(double u) const;
  const std::vector<Point2>& control() const { return control_; }
  /// Dense polyline approximation with n segments.
  std::vector<Point2> sample(int n) const;

 private:
  std::vector<Point2> control_;
  std::vector<double> knots_;
};

/// Constant-speed reference along a polyline.
class PathReference {
 public:
  PathReference() = default;
  PathReference(std::vector<Point2> polyline, double speed, double t0);
  Point2 position(double t) const;
  Vec2 velocity(double t) const;
  double end_time() const { return t0_ + length_ / speed_; }

 private:
  std::vector<Point2> pts_;
  std::vector<double> s_;
  double length_ = 0.0;
  double speed_ = 1.0;
  double t0_ = 0.0;
};

Vec2 track_reference(const Point2& x, const Vec2& v, const Point2& ref, const Vec2& ref_v,
                     const TrackerConfig& cfg);

struct BsplineConfig {
  int via_points = 4;
  int retry_budget = 20;
  double perturb_sigma = 0.05;  ///< m, grows with each retry
  double speed = 0.05;          ///< m/s along the reference
  TrackerConfig tracker;
  OperableVector obstacle_contact{5000.0, 50.0, 0.0};  ///< rollout model of sensed objects
  double rollout_slack = 10.0;  ///< s beyond the nominal reference duration
};

/// Spline baseline: proposes a clamped cubic spline to the target, validates
/// it by rolling it out in a private simulator holding the sensed objects as
/// fixed obstacles, and perturbs control points until a rollout succeeds.
class BsplinePlanner final : public Planner {
 public:
  explicit BsplinePlanner(BsplineConfig cfg = {}, SimConfig sim = {}) : cfg_(cfg), sim_(sim) {}
  std::string_view name() const override { return "bspline"; }
  void reset(const Workspace& ws) override;
  PlannerCommand tick(const SensorFrame& frame) override;

  int rollouts() const { return rollouts_; }
  bool last_accepted_first_try() const { return first_try_; }

  /// Rolls a reference out in a private world; true iff the target is reached
  /// without any contact force above 10 N.
  bool rollout(const SensorFrame& frame, const PathReference& ref, const TargetDomain& target,
               double& peak_force) const;

 private:
  bool plan(const SensorFrame& frame);

  BsplineConfig cfg_;
  SimConfig sim_;
  Workspace ws_;
  SensedMap map_;
  Rng rng_{0};
  PathReference ref_;
  std::size_t target_ = 0;
  bool need_plan_ = true;
  bool failed_ = false;
  int rollouts_ = 0;
  bool first_try_ = false;
};

}  // namespace imp
