#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "imp/energy.hpp"
#include "imp/estimator.hpp"
#include "imp/geometry.hpp"
#include "imp/sim.hpp"
#include "imp/world.hpp"

namespace imp {

struct MotionIntent {
  IntentMode mode = IntentMode::approach;
  Point2 target;  ///< goal for approach, contact point for probe
  std::optional<ObjectId> probe_object;
};

/// Axis-aligned box the robot center must stay in (the table shrunk by the
/// robot radius plus a margin).
struct Box {
  double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

  bool contains(const Point2& p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
  Point2 clamp(const Point2& p) const;
};

/// Base disc minus the open excluded discs, intersected with keep_in. With a
/// viewpoint set, members must also be visible from it: the straight segment
/// may not pass deeper into any excluded disc than the viewpoint already is.
struct ConvergenceDomain {
  Disc base;
  std::vector<Disc> excluded;
  std::optional<Box> keep_in;
  std::optional<Point2> viewpoint;

  bool contains(const Point2& p) const;
};

/// base = disc(robot, r_p); excluded = inoperable object discs inflated by
/// robot_radius + margin; keep_in = table shrunk by robot_radius + margin.
ConvergenceDomain convergence_domain(const Point2& robot, const std::vector<ObjectView>& objects, double r_p,
                                     double robot_radius, const std::optional<Table>& table = std::nullopt,
                                     double margin = 0.0);

/// True when a robot of radius robot_radius moving from `from` straight to
/// `to` would sweep into the disc ahead of it.
bool blocks_corridor(const Point2& from, const Point2& to, const Disc& d, double robot_radius);

struct ProjectionConfig {
  int angular = 64;
  int radial = 32;
};

/// Candidate members in tie-break order: the base center, then polar samples
/// ring by ring (radius r_p (i+1)/radial, angle 2 pi j/angular).
std::vector<Point2> domain_samples(const ConvergenceDomain& xc, const ProjectionConfig& cfg = {});

/// The intent target when it belongs to X_c; otherwise the member closest to
/// it among the exact boundary projections and the polar samples (lowest
/// index on ties). An empty domain yields the base center and sets *degenerate.
Point2 imagine_state(const MotionIntent& s, const ConvergenceDomain& xc, const ProjectionConfig& cfg = {},
                     bool* degenerate = nullptr);

/// Force that makes the point mass reach the terminal velocity of the field,
/// F_c / D, within one planner period when the field alone would overshoot:
/// (F_c - D v) min(1, m / (D T)).
Vec2 low_level_command(const Vec2& conservative, double damping, const Vec2& v, double mass, double period);

/// Geodesic cost-to-go toward a goal over a box with discs cut out, on an
/// 8-connected grid of nodes spaced `cell` apart.
class RouteMap {
 public:
  RouteMap() = default;
  RouteMap(const Box& bounds, std::vector<Disc> excluded, const Point2& goal, double cell);

  /// Cost of the nearest node to p; infinity when blocked or cut off.
  double cost(const Point2& p) const;
  /// Node centers from p down the cost field, ending with the goal itself;
  /// empty when no node next to p reaches the goal.
  std::vector<Point2> descend(const Point2& p) const;
  bool empty() const { return nodes_.empty(); }

 private:
  long index(long i, long j) const { return j * nx_ + i; }
  Point2 node(long i, long j) const;
  std::pair<long, long> nearest(const Point2& p) const;

  Box bounds_;
  Point2 goal_;
  double cell_ = 0.01;
  long nx_ = 0, ny_ = 0;
  std::vector<double> nodes_;  ///< cost per node
};

struct ImpConfig {
  FieldConfig field;
  ProbeConfig probe;
  ConfidenceConfig confidence;
  ProjectionConfig projection;
  double probe_force = 6.0;        ///< N, peak of the probe profile
  int probe_budget_ticks = 250;    ///< 5 s at 50 Hz, approach included
  double probe_approach_speed = 0.002;  ///< m/s when the probed object slips away
  double move_threshold = 0.002;   ///< m, displacement that marks an object operable
  double push_cap = 6.0;           ///< N, command cap while pushing an operable object
  double seat_force = 1.5;         ///< N, least probe push once touching
  double exclusion_margin = 0.01;  ///< m, clearance kept around inoperable objects
  /// Restrict X_c to states visible from the robot, so the imagined state is
  /// never hidden behind an inoperable object.
  bool visible_domain = true;
  int stall_ticks = 50;            ///< pushing window before a stalled object is re-probed
  double stall_progress = 0.002;   ///< m the pushed object must move within the window
  int max_invalidations = 2;
  /// Aim approach motion at the farthest visible point of the shortest route
  /// around known inoperable objects instead of at the goal itself.
  bool route_intent = true;
  double route_cell = 0.01;  ///< m
};

/// The imagination-inspired planner: coordinates intent from contacts,
/// projects it onto the convergence domain, composes the energy landscape and
/// tracks its gradient with a low-level admittance loop.
class ImpPlanner final : public Planner {
 public:
  explicit ImpPlanner(ImpConfig cfg = {});

  std::string_view name() const override { return "imp"; }
  void reset(const Workspace& ws) override;
  PlannerCommand tick(const SensorFrame& frame) override;

  const ImpConfig& config() const { return cfg_; }
  const MotionIntent& intent() const { return intent_; }
  std::optional<Operability> classification(ObjectId id) const;
  std::optional<OperableVector> estimate(ObjectId id) const;
  /// Current object memory in ascending id order.
  std::vector<ObjectView> objects() const;
  const EnergyLandscape& landscape() const { return landscape_; }
  const ConvergenceDomain& domain() const { return domain_; }
  /// Point the last approach tick was steering for (the goal or a route waypoint).
  const Point2& waypoint() const { return waypoint_; }
  long tick_count() const { return ticks_; }
  long degenerate_ticks() const { return degenerate_ticks_; }
  int mode_changes() const { return mode_changes_; }

 private:
  struct Tracked {
    ObjectView view;
    RegressorBuffer buffer;
    int invalidations = 0;
    Point2 probe_origin;
    double displacement = 0.0;
    Point2 push_origin;
    int push_ticks = 0;
  };

  void observe(const SensorFrame& frame);
  MotionIntent coordinate_intent(const SensorFrame& frame);
  void start_probe(Tracked& obj, const SensorFrame& frame);
  Vec2 probe_command(const SensorFrame& frame);
  void track_push(const SensorFrame& frame);
  Point2 active_goal(const SensorFrame& frame) const;
  WorldView view_of(const SensorFrame& frame) const;
  Point2 route_waypoint(const SensorFrame& frame, const Point2& goal);

  ImpConfig cfg_;
  Workspace ws_;
  std::map<ObjectId, Tracked> memory_;
  MotionIntent intent_;
  EnergyLandscape landscape_;
  ConvergenceDomain domain_;
  std::optional<Point2> last_imagined_;
  RouteMap route_;
  std::vector<long> route_key_;
  Point2 waypoint_;
  int probe_step_ = 0;   ///< profile steps applied in contact
  int probe_ticks_ = 0;  ///< ticks since the probe started
  long ticks_ = 0;
  long degenerate_ticks_ = 0;
  int mode_changes_ = 0;
};

}  // namespace imp
