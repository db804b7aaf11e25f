#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "imp/geometry.hpp"
#include "imp/operable_vector.hpp"

namespace imp {

using ObjectId = int;

/// Closed disc {x : |x - g| <= r_g} the robot has to reach.
struct TargetDomain {
  Point2 g;
  double r_g = 0.01;
};

enum class ObjectClass { fixed, movable };

std::string_view to_string(ObjectClass c);
std::optional<ObjectClass> parse_object_class(std::string_view s);

inline constexpr double kNoToppling = std::numeric_limits<double>::infinity();

/// Ground-truth object state. Only the simulator reads class_truth and
/// theta_truth; the planners work from sensor frames.
struct ObjectBody {
  ObjectId id = 0;
  Disc shape;  ///< shape.center is the pose
  Vec2 velocity;
  double z_height = 0.1;
  ObjectClass class_truth = ObjectClass::movable;
  OperableVector theta_truth;
  double mass = 0.5;
  double friction_coeff = 0.5;
  double topple_threshold = kNoToppling;
  bool toppled = false;

  const Point2& pose() const { return shape.center; }
  /// Fixed objects and toppled ones never move.
  bool immobile() const { return class_truth == ObjectClass::fixed || toppled; }
};

struct RobotBody {
  Point2 position;
  Vec2 velocity;
  double radius = 0.02;
  double height = 0.05;
  double mass = 1.0;
};

/// Axis-aligned table [0, width] x [0, height].
struct Table {
  double width = 1.2;
  double height = 0.9;

  bool contains(const Point2& p) const {
    return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
  }
  /// Distance from p to the nearest table edge (negative outside).
  double edge_clearance(const Point2& p) const;
};

struct WorldState {
  Table table;
  RobotBody robot;
  std::vector<ObjectBody> objects;
  /// Targets visited in listed order; at least one.
  std::vector<TargetDomain> targets;
  double r_p = 0.3;
  std::uint64_t seed = 0;

  const ObjectBody* find(ObjectId id) const;
  ObjectBody* find(ObjectId id);
};

/// Proximity disc of radius r_p around the robot. Throws for r_p <= 0.
Disc local_energy_domain(const RobotBody& robot, double r_p);

/// Objects whose disc strictly intersects d, ordered by ascending id.
std::vector<ObjectBody> objects_in_domain(const WorldState& world, const Disc& d);

bool in_target(const Point2& p, const TargetDomain& t);

/// True iff a robot disc centered at p overlaps no object and stays on the
/// table. Throws std::invalid_argument for p outside the table.
bool free_motion_query(const WorldState& world, const Point2& p);

/// Checks the WorldState invariants; returns a description of the first
/// violation, or nullopt when the world is well formed.
std::optional<std::string> validate(const WorldState& world);

}  // namespace imp
