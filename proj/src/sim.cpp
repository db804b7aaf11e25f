#include "imp/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "imp/scenario_io.hpp"

namespace imp {

int SimConfig::steps_per_tick() const {
  if (!(dt > 0.0) || !(planner_period >= dt)) throw std::invalid_argument("SimConfig: bad dt/planner_period");
  const double ratio = planner_period / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * ratio)
    throw std::invalid_argument("SimConfig: planner_period must be an integer multiple of dt");
  return static_cast<int>(rounded);
}

double contact_response(const OperableVector& theta, double penetration, double closing_speed) {
  if (!(penetration > 0.0)) return 0.0;
  const double f = theta.K * penetration + theta.D * std::max(closing_speed, 0.0) + theta.C;
  return std::max(f, 0.0);
}

ObjectBody object_update(ObjectBody obj, const Vec2& applied, double dt, const SimConfig& cfg) {
  if (obj.immobile()) {
    obj.velocity = {};
    return obj;
  }
  const double f = norm(applied);
  if (f > obj.topple_threshold) {
    obj.toppled = true;
    obj.velocity = {};
    return obj;
  }
  const double breakaway = obj.friction_coeff * obj.mass * cfg.gravity;
  if (f <= breakaway) {
    obj.velocity = {};
    return obj;
  }
  obj.velocity = applied * ((f - breakaway) / (f * cfg.slide_damping));
  obj.shape.center += obj.velocity * dt;
  return obj;
}

RobotBody robot_step(RobotBody robot, const Vec2& command_force, const Vec2& contact_forces,
                     const SimConfig& cfg, Rng* noise) {
  Vec2 f = clamp_magnitude(command_force, cfg.max_force) + contact_forces;
  if (noise != nullptr && cfg.actuation_noise_std > 0.0)
    f += Vec2{noise->normal(), noise->normal()} * cfg.actuation_noise_std;
  const double m = robot.mass;
  // Implicit in the optional plant damping so it can only remove energy.
  robot.velocity = (robot.velocity + f * (cfg.dt / m)) / (1.0 + cfg.robot_damping * cfg.dt / m);
  robot.position += robot.velocity * cfg.dt;
  return robot;
}

namespace {

void add_wall_contact(std::vector<ContactEvent>& out, ObjectId id, double pen, Vec2 normal,
                      const RobotBody& robot, const SimConfig& cfg) {
  if (pen <= 0.0) return;
  ContactEvent c;
  c.object_id = id;
  c.normal = normal;
  c.penetration = pen;
  c.rel_velocity = robot.velocity;
  c.force = normal * contact_response(cfg.wall_contact, pen, c.closing_speed());
  out.push_back(c);
}

}  // namespace

std::vector<ContactEvent> compute_contacts(const WorldState& world, const SimConfig& cfg) {
  std::vector<ContactEvent> out;
  const RobotBody& r = world.robot;
  const Table& t = world.table;
  add_wall_contact(out, kWallLeft, r.radius - r.position.x, {1, 0}, r, cfg);
  add_wall_contact(out, kWallRight, r.radius - (t.width - r.position.x), {-1, 0}, r, cfg);
  add_wall_contact(out, kWallBottom, r.radius - r.position.y, {0, 1}, r, cfg);
  add_wall_contact(out, kWallTop, r.radius - (t.height - r.position.y), {0, -1}, r, cfg);

  const std::size_t first_object = out.size();
  for (const auto& o : world.objects) {
    const Vec2 d = r.position - o.shape.center;
    const double dist = norm(d);
    const double pen = r.radius + o.shape.radius - dist;
    if (pen <= 0.0) continue;
    ContactEvent c;
    c.object_id = o.id;
    c.normal = dist > 0.0 ? d / dist : Vec2{1.0, 0.0};
    c.penetration = pen;
    c.rel_velocity = r.velocity - o.velocity;
    c.object_radius = o.shape.radius;
    c.force = c.normal * contact_response(o, pen, c.closing_speed());
    out.push_back(c);
  }
  std::sort(out.begin() + static_cast<std::ptrdiff_t>(first_object), out.end(),
            [](const auto& a, const auto& b) { return a.object_id < b.object_id; });
  return out;
}

SensorFrame sense(const WorldState& world, const SimConfig& cfg) {
  SensorFrame f;
  f.position = world.robot.position;
  f.velocity = world.robot.velocity;
  if (cfg.proximity_enabled) {
    for (const auto& o : world.objects) {
      const double c = disc_clearance(world.robot.position, o.shape);
      if (c < world.r_p)
        f.proximity.push_back({o.id, c, normalized(o.shape.center - world.robot.position), o.shape.radius});
    }
    std::sort(f.proximity.begin(), f.proximity.end(),
              [](const auto& a, const auto& b) { return a.object_id < b.object_id; });
  }
  if (cfg.force_enabled) f.contacts = compute_contacts(world, cfg);
  return f;
}

void resolve_object_overlaps(WorldState& world) {
  auto& objs = world.objects;
  const Table& t = world.table;
  auto keep_on_table = [&](ObjectBody& o) {
    if (o.immobile()) return;
    const double r = o.shape.radius;
    o.shape.center.x = std::clamp(o.shape.center.x, r, t.width - r);
    o.shape.center.y = std::clamp(o.shape.center.y, r, t.height - r);
  };
  for (int pass = 0; pass < 4; ++pass) {
    bool moved = false;
    for (std::size_t i = 0; i < objs.size(); ++i) {
      for (std::size_t j = i + 1; j < objs.size(); ++j) {
        ObjectBody& a = objs[i];
        ObjectBody& b = objs[j];
        if (a.immobile() && b.immobile()) continue;
        const Vec2 d = b.shape.center - a.shape.center;
        const double dist = norm(d);
        const double overlap = a.shape.radius + b.shape.radius - dist;
        if (overlap <= 1e-12) continue;
        const Vec2 n = dist > 0.0 ? d / dist : Vec2{1.0, 0.0};
        if (a.immobile()) {
          b.shape.center += n * overlap;
        } else if (b.immobile()) {
          a.shape.center -= n * overlap;
        } else {
          a.shape.center -= n * (0.5 * overlap);
          b.shape.center += n * (0.5 * overlap);
        }
        moved = true;
      }
    }
    for (auto& o : objs) keep_on_table(o);
    if (!moved) break;
  }
}

std::string_view to_string(IntentMode m) { return m == IntentMode::approach ? "approach" : "probe"; }

std::string_view to_string(FailureCause c) {
  switch (c) {
    case FailureCause::none: return "none";
    case FailureCause::force: return "force";
    case FailureCause::timeout: return "timeout";
    case FailureCause::no_path: return "no_path";
    case FailureCause::planner_fault: return "planner_fault";
    case FailureCause::infeasible: return "infeasible";
  }
  return "unknown";
}

Workspace workspace_of(const WorldState& world, const SimConfig& cfg) {
  Workspace ws;
  ws.table = world.table;
  ws.targets = world.targets;
  ws.robot_radius = world.robot.radius;
  ws.robot_mass = world.robot.mass;
  ws.r_p = world.r_p;
  ws.planner_period = cfg.planner_period;
  ws.max_force = cfg.max_force;
  ws.seed = world.seed;
  return ws;
}

TrialResult run_episode(WorldState world, Planner& planner, const SimConfig& cfg,
                        const EpisodeLimits& limits, std::uint64_t seed, const EpisodeOptions& opts) {
  if (auto err = validate(world)) throw std::invalid_argument("run_episode: " + *err);
  const int steps = cfg.steps_per_tick();
  Rng noise(mix_seed(seed, 0x6e6f697365ULL));
  TrialResult result;
  std::set<ObjectId> contacted;
  std::set<ObjectId> latch;
  std::optional<double> first_touch_t;

  Workspace ws = workspace_of(world, cfg);
  ws.seed = seed;
  planner.reset(ws);

  std::size_t active = 0;
  auto advance_targets = [&] {
    while (active < world.targets.size() && in_target(world.robot.position, world.targets[active])) ++active;
    return active == world.targets.size();
  };

  auto finish = [&](bool success, FailureCause cause, double t) {
    result.success = success;
    result.failure_cause = cause;
    result.duration = t;
    result.targets_reached = active;
    result.contacted.assign(contacted.begin(), contacted.end());
    if (opts.final_world) *opts.final_world = world;
    return result;
  };

  double t = 0.0;
  if (advance_targets()) return finish(true, FailureCause::none, t);

  std::vector<Vec2> applied(world.objects.size());
  const long max_ticks = static_cast<long>(std::ceil(limits.max_time / cfg.planner_period));
  for (long tick = 0; tick < max_ticks; ++tick) {
    t = static_cast<double>(tick) * cfg.planner_period;
    SensorFrame frame = sense(world, cfg);
    frame.t = t;
    frame.active_target = active;
    if (cfg.force_enabled) {
      for (const auto& c : frame.contacts)
        if (c.object_id >= 0) latch.insert(c.object_id);
      frame.touched.assign(latch.begin(), latch.end());
    }
    latch.clear();
    const PlannerCommand cmd = planner.tick(frame);
    if (cmd.status == PlannerStatus::no_path) return finish(false, FailureCause::no_path, t);
    if (cmd.status == PlannerStatus::infeasible) return finish(false, FailureCause::no_path, t);
    if (!is_finite(cmd.force)) return finish(false, FailureCause::planner_fault, t);

    if (opts.record_trajectory) {
      double fc = 0.0;
      for (const auto& c : compute_contacts(world, cfg)) fc += c.magnitude();
      result.trajectory.push_back({t, world.robot.position, world.robot.velocity, cmd.force, fc, cmd.mode, cmd.imagined});
    }

    for (int s = 0; s < steps; ++s) {
      const std::vector<ContactEvent> contacts = compute_contacts(world, cfg);
      Vec2 on_robot;
      std::fill(applied.begin(), applied.end(), Vec2{});
      for (const auto& c : contacts) {
        const double f = c.magnitude();
        result.peak_force = std::max(result.peak_force, f);
        on_robot += c.force;
        if (c.object_id < 0) continue;
        contacted.insert(c.object_id);
        latch.insert(c.object_id);
        if (!first_touch_t) {
          first_touch_t = t;
          result.first_contact_id = c.object_id;
        }
        for (std::size_t i = 0; i < world.objects.size(); ++i)
          if (world.objects[i].id == c.object_id) applied[i] -= c.force;
      }
      if (first_touch_t && t - *first_touch_t <= cfg.first_contact_window + 1e-12)
        for (const auto& c : contacts)
          if (c.object_id >= 0) result.first_contact_force = std::max(result.first_contact_force, c.magnitude());
      if (opts.on_step) opts.on_step({t, &world.robot, &contacts});
      if (result.peak_force > limits.force_fail) return finish(false, FailureCause::force, t);

      const Point2 before = world.robot.position;
      world.robot = robot_step(world.robot, cmd.force, on_robot, cfg, &noise);
      bool any_moved = false;
      for (std::size_t i = 0; i < world.objects.size(); ++i) {
        auto& o = world.objects[i];
        if (o.immobile()) continue;
        o = object_update(o, applied[i], cfg.dt, cfg);
        any_moved = any_moved || squared_norm(o.velocity) > 0.0;
      }
      if (any_moved) resolve_object_overlaps(world);
      result.path_cost += distance(before, world.robot.position);
      t = static_cast<double>(tick) * cfg.planner_period + static_cast<double>(s + 1) * cfg.dt;
      if (!is_finite(world.robot.position)) return finish(false, FailureCause::planner_fault, t);
      if (advance_targets()) return finish(true, FailureCause::none, t);
    }
  }
  return finish(false, FailureCause::timeout, static_cast<double>(max_ticks) * cfg.planner_period);
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows) {
  std::ostringstream out;
  out << "t,x,y,vx,vy,Fx_cmd,Fy_cmd,Fcontact,intent_mode,imagined_x,imagined_y\n";
  for (const auto& r : rows) {
    out << fmt9(r.t) << ',' << fmt9(r.position.x) << ',' << fmt9(r.position.y) << ',' << fmt9(r.velocity.x) << ','
        << fmt9(r.velocity.y) << ',' << fmt9(r.command.x) << ',' << fmt9(r.command.y) << ',' << fmt9(r.contact_force)
        << ',' << to_string(r.mode) << ',';
    if (r.imagined) out << fmt9(r.imagined->x) << ',' << fmt9(r.imagined->y);
    else out << ',';
    out << '\n';
  }
  return out.str();
}

}  // namespace imp
