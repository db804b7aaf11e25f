#include "imp/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace imp {

std::string_view to_string(ObjectClass c) { return c == ObjectClass::fixed ? "fixed" : "movable"; }

std::optional<ObjectClass> parse_object_class(std::string_view s) {
  if (s == "fixed") return ObjectClass::fixed;
  if (s == "movable") return ObjectClass::movable;
  return std::nullopt;
}

double Table::edge_clearance(const Point2& p) const {
  return std::min({p.x, width - p.x, p.y, height - p.y});
}

const ObjectBody* WorldState::find(ObjectId id) const {
  for (const auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

ObjectBody* WorldState::find(ObjectId id) {
  for (auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

Disc local_energy_domain(const RobotBody& robot, double r_p) {
  if (!(r_p > 0.0)) throw std::invalid_argument("local_energy_domain: r_p must be positive");
  return {robot.position, r_p};
}

std::vector<ObjectBody> objects_in_domain(const WorldState& world, const Disc& d) {
  std::vector<ObjectBody> out;
  for (const auto& o : world.objects)
    if (discs_overlap(o.shape, d)) out.push_back(o);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

bool in_target(const Point2& p, const TargetDomain& t) { return distance(p, t.g) <= t.r_g; }

bool free_motion_query(const WorldState& world, const Point2& p) {
  if (!is_finite(p) || !world.table.contains(p))
    throw std::invalid_argument("free_motion_query: point outside the table");
  const double r = world.robot.radius;
  if (world.table.edge_clearance(p) < r) return false;
  const Disc body{p, r};
  return std::none_of(world.objects.begin(), world.objects.end(),
                      [&](const ObjectBody& o) { return discs_overlap(o.shape, body); });
}

std::optional<std::string> validate(const WorldState& world) {
  const auto& t = world.table;
  if (!(t.width > 0.0 && t.height > 0.0)) return "table dimensions must be positive";
  const auto& r = world.robot;
  if (!(r.radius > 0.0)) return "robot radius must be positive";
  if (!(r.mass > 0.0)) return "robot mass must be positive";
  if (!is_finite(r.position) || !t.contains(r.position)) return "robot start outside the table";
  if (!(world.r_p > r.radius)) return "r_p must exceed the robot radius";
  if (world.targets.empty()) return "at least one target is required";
  for (const auto& g : world.targets) {
    if (!(g.r_g > 0.0)) return "target radius must be positive";
    if (!is_finite(g.g) || !t.contains(g.g)) return "target outside the table";
  }
  for (std::size_t i = 0; i < world.objects.size(); ++i) {
    const auto& o = world.objects[i];
    const std::string tag = "object " + std::to_string(o.id) + ": ";
    if (!(o.shape.radius > 0.0)) return tag + "radius must be positive";
    if (!is_finite(o.shape.center) || !t.contains(o.shape.center)) return tag + "center outside the table";
    if (!(o.friction_coeff >= 0.0)) return tag + "friction must be non-negative";
    if (!(o.topple_threshold > 0.0)) return tag + "topple threshold must be positive";
    if (!(o.mass > 0.0)) return tag + "mass must be positive";
    if (!o.theta_truth.finite()) return tag + "contact parameters must be finite";
    for (std::size_t j = 0; j < i; ++j)
      if (world.objects[j].id == o.id) return tag + "duplicate id";
    if (discs_overlap(o.shape, Disc{r.position, r.radius})) return tag + "overlaps the robot start";
  }
  return std::nullopt;
}

}  // namespace imp
