#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "imp/estimator.hpp"
#include "imp/geometry.hpp"
#include "imp/world.hpp"

namespace imp {

struct FieldConfig {
  double k_p = 25.0;       ///< attractive stiffness, N/m
  double k_0 = 50.0;       ///< repulsive stiffness, N/m
  double D_o = 5.0;        ///< free-space viscosity, N s/m
  double v_safe = 0.001;   ///< contact speed with unknown objects, m/s
  double v_max = 0.07;     ///< free-space speed cap, m/s
  /// Surface gap below which the dedicated viscous field starts slowing the
  /// robot toward v_safe.
  double slow_zone = 0.05;
  /// Repulsive window: full strength within this fraction of the support radius.
  double repulsive_inner_fraction = 0.5;
  /// Upper bound on the summed repulsive pull at the robot, as a share of the
  /// attractive pull there.
  double repulsive_share = 0.5;
  /// Corridor stiffness of operable objects relative to k_p before cost scaling.
  double corridor_ratio = 0.5;
  /// Lateral offset of the corridor line from the object center, in object radii.
  double corridor_offset = 0.6;
  /// Lateral margin beyond contact within which an unknown object counts as ahead.
  double heading_margin = 0.02;
  std::size_t boundary_samples = 64;
};

enum class TermKind { attractive, repulsive, dedicated_viscous, operational, free_viscous };

struct FieldTerm {
  TermKind kind = TermKind::attractive;
  Point2 anchor;
  double gain = 0.0;
  std::optional<ObjectId> source_object;
  Vec2 direction;  ///< corridor axis (operational terms)
  double support_inner = std::numeric_limits<double>::infinity();  ///< repulsive window
  double support = std::numeric_limits<double>::infinity();
};

struct EnergyLandscape {
  std::vector<FieldTerm> terms;
  FieldConfig config;
  Disc valid_within;

  std::size_t count(TermKind k) const;
  const FieldTerm* find(TermKind k, ObjectId id) const;
};

/// U = k_p/2 |g* - x|^2; force k_p (g* - x). Throws for k_p <= 0.
FieldTerm attractive_term(const Point2& g_star, double k_p);

/// -D v. Throws for D < 0.
Vec2 viscous_force(const Vec2& v, double D);
/// Dissipated power D |v|^2.
double viscous_power(const Vec2& v, double D);

/// Inner product theta . psi = K dx + D v + C F.
double operational_energy(const OperableVector& theta, const PerceptionSample& psi);

/// Additional damping D_w* such that D_base + D_w* = max(D_base, k_p gap / v_safe):
/// under the first-order closure v = k_p e / (D_base + D_w) the speed equals
/// v_safe when the remaining distance e equals gap. Throws for gap <= 0 or v_safe <= 0.
double critical_damping(double k_p, double gap, double v_safe, double D_base);

/// Hausdorff argmax o* of the sampled object region against B = robot + target.
/// Throws std::invalid_argument for empty sets.
Point2 repulsive_center(std::span<const Point2> obj_samples, std::span<const Point2> b_samples);

/// Force k_0 (x - o*) w(|x - o*|) with a C1 window w: 1 inside support_inner,
/// smoothly 0 at support. Throws for k_0 <= 0.
FieldTerm repulsive_term(const Point2& o_star, double k_0,
                         double support = std::numeric_limits<double>::infinity(),
                         double support_inner = std::numeric_limits<double>::infinity());

/// Corridor potential k/2 |(x - a) perpendicular to axis|^2 for pushing an
/// operable object centrally along axis.
FieldTerm operational_term(const Point2& object_center, const Vec2& axis, double gain, ObjectId id);

/// Planner-side knowledge of one object.
struct ObjectView {
  ObjectId id = 0;
  Disc disc;
  Operability cls = Operability::unknown;
  OperableVector theta;
  PerceptionSample last;
};

struct WorldView {
  Point2 robot;
  Vec2 velocity;
  double robot_radius = 0.02;
  double r_p = 0.3;
  TargetDomain target;
  std::vector<ObjectView> objects;  ///< ascending id
};

/// True when the ray from `from` along dir passes within margin of the disc
/// surface with the disc center ahead of `from`.
bool heading_toward(const Point2& from, const Vec2& dir, const Disc& d, double margin);

/// Dedicated-viscous speed bound at a given surface gap.
double safe_speed_at(double surface_gap, const FieldConfig& cfg);

/// Builds the landscape for one planning tick around the imagined state.
EnergyLandscape compose(const WorldView& view, const Point2& imagined, const FieldConfig& cfg);

struct EnergySample {
  double potential = 0.0;
  Vec2 conservative;  ///< -grad U
  double damping = 0.0;  ///< total viscous gain
  Vec2 force;         ///< conservative - damping * v
};

/// Potential and force at x. Throws std::domain_error outside valid_within.
EnergySample evaluate(const EnergyLandscape& landscape, const Point2& x, const Vec2& v);

/// Potential of a single term at x (viscous terms contribute zero).
double term_potential(const FieldTerm& term, const Point2& x);
/// -grad of a single term's potential at x.
Vec2 term_force(const FieldTerm& term, const Point2& x);

}  // namespace imp
