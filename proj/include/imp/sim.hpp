#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "imp/geometry.hpp"
#include "imp/rng.hpp"
#include "imp/world.hpp"

namespace imp {

struct SimConfig {
  double dt = 0.002;              ///< integration step, s
  double planner_period = 0.02;   ///< 50 Hz planning; integer multiple of dt
  double actuation_noise_std = 0.0;  ///< per-axis motor noise, N
  double max_force = 20.0;        ///< actuator saturation, N
  bool proximity_enabled = true;
  bool force_enabled = true;
  double robot_damping = 0.0;     ///< optional viscous term of the robot plant, N s/m
  double slide_damping = 50.0;    ///< quasi-static sliding admittance of objects, N s/m
  double gravity = 9.81;
  OperableVector wall_contact{5000.0, 50.0, 0.0};
  double first_contact_window = 0.1;  ///< s, window for the impact peak after first touch

  int steps_per_tick() const;
};

/// Wall contacts use these ids; objects use non-negative ids.
inline constexpr ObjectId kWallLeft = -4;
inline constexpr ObjectId kWallRight = -3;
inline constexpr ObjectId kWallBottom = -2;
inline constexpr ObjectId kWallTop = -1;

struct ContactEvent {
  ObjectId object_id = 0;
  Vec2 normal;          ///< unit, from the object toward the robot
  double penetration = 0.0;
  Vec2 force;           ///< on the robot
  Vec2 rel_velocity;    ///< robot velocity minus object velocity
  double object_radius = 0.0;  ///< zero for walls

  double magnitude() const { return norm(force); }
  /// Closing speed along the normal (positive while approaching).
  double closing_speed() const { return -dot(rel_velocity, normal); }
};

struct ProximityEntry {
  ObjectId object_id = 0;
  double clearance = 0.0;  ///< robot center to object surface, m
  Vec2 bearing;            ///< unit, toward the object center
  double radius = 0.0;     ///< object outline radius
};

struct SensorFrame {
  double t = 0.0;
  Point2 position;
  Vec2 velocity;
  std::size_t active_target = 0;
  std::vector<ProximityEntry> proximity;
  std::vector<ContactEvent> contacts;
  /// Objects touched at any integration step since the previous frame,
  /// ascending; empty without force sensing. Contacts shorter than a planner
  /// period still register here.
  std::vector<ObjectId> touched;
};

/// Normal force magnitude F = K pen + D max(v, 0) + C for pen > 0, else 0.
double contact_response(const OperableVector& theta, double penetration, double closing_speed);
inline double contact_response(const ObjectBody& obj, double penetration, double closing_speed) {
  return contact_response(obj.theta_truth, penetration, closing_speed);
}

/// Quasi-static sliding update of one object under the force the robot applies.
ObjectBody object_update(ObjectBody obj, const Vec2& applied, double dt, const SimConfig& cfg = {});

/// Semi-implicit Euler step of the point-mass robot. The command is saturated
/// at cfg.max_force before noise and contact forces are added.
RobotBody robot_step(RobotBody robot, const Vec2& command_force, const Vec2& contact_forces,
                     const SimConfig& cfg, Rng* noise = nullptr);

/// All current robot contacts (objects ascending by id, walls first).
std::vector<ContactEvent> compute_contacts(const WorldState& world, const SimConfig& cfg);

SensorFrame sense(const WorldState& world, const SimConfig& cfg);

/// Pushes overlapping objects apart and keeps them on the table.
void resolve_object_overlaps(WorldState& world);

// ---------------------------------------------------------------------------
// Planner interface

enum class IntentMode { approach, probe };
std::string_view to_string(IntentMode m);

enum class PlannerStatus { ok, no_path, infeasible };

struct PlannerCommand {
  Vec2 force;
  PlannerStatus status = PlannerStatus::ok;
  IntentMode mode = IntentMode::approach;
  std::optional<Point2> imagined;
};

/// Static task knowledge handed to a planner before an episode. Carries no
/// object information: planners learn about objects only through frames.
struct Workspace {
  Table table;
  std::vector<TargetDomain> targets;
  double robot_radius = 0.02;
  double robot_mass = 1.0;
  double r_p = 0.3;
  double planner_period = 0.02;
  double max_force = 20.0;
  std::uint64_t seed = 0;
};

Workspace workspace_of(const WorldState& world, const SimConfig& cfg);

class Planner {
 public:
  virtual ~Planner() = default;
  virtual std::string_view name() const = 0;
  virtual void reset(const Workspace& ws) = 0;
  virtual PlannerCommand tick(const SensorFrame& frame) = 0;
};

// ---------------------------------------------------------------------------
// Episodes

/// `infeasible` marks campaign trials skipped because no path exists even with
/// every movable object removed; a planner giving up reports no_path.
enum class FailureCause { none, force, timeout, no_path, planner_fault, infeasible };
std::string_view to_string(FailureCause c);

struct EpisodeLimits {
  double max_time = 90.0;   ///< s
  double force_fail = 10.0; ///< N
};

struct TrajectoryRow {
  double t = 0.0;
  Point2 position;
  Vec2 velocity;
  Vec2 command;
  double contact_force = 0.0;
  IntentMode mode = IntentMode::approach;
  std::optional<Point2> imagined;
};

struct TrialResult {
  bool success = false;
  FailureCause failure_cause = FailureCause::none;
  double path_cost = 0.0;
  double peak_force = 0.0;
  double duration = 0.0;
  /// Peak contact force within SimConfig::first_contact_window of the first
  /// robot-object touch; zero if the robot never touched an object.
  double first_contact_force = 0.0;
  std::optional<ObjectId> first_contact_id;
  std::vector<ObjectId> contacted;  ///< ascending
  std::size_t targets_reached = 0;
  std::vector<TrajectoryRow> trajectory;
};

/// Per-integration-step observation, for tests and diagnostics.
struct StepSample {
  double t = 0.0;
  const RobotBody* robot = nullptr;
  const std::vector<ContactEvent>* contacts = nullptr;
};

struct EpisodeOptions {
  bool record_trajectory = false;
  std::function<void(const StepSample&)> on_step;
  WorldState* final_world = nullptr;
};

/// Runs one trial: plans every planner_period, integrates at dt, and stops on
/// success (all targets visited in order), a contact force above
/// limits.force_fail, a planner failure, or the time limit.
TrialResult run_episode(WorldState world, Planner& planner, const SimConfig& cfg,
                        const EpisodeLimits& limits, std::uint64_t seed,
                        const EpisodeOptions& opts = {});

/// CSV with header t,x,y,vx,vy,Fx_cmd,Fy_cmd,Fcontact,intent_mode,imagined_x,imagined_y.
std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);

}  // namespace imp
