#include "imp/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "imp/planner.hpp"

namespace imp {

bool SensedMap::update(const SensorFrame& frame, double robot_radius, double moved) {
  bool changed = false;
  auto store = [&](ObjectId id, const Disc& d) {
    auto it = objects_.find(id);
    if (it == objects_.end()) {
      objects_.emplace(id, d);
      changed = true;
    } else if (distance(it->second.center, d.center) > moved) {
      it->second = d;
      changed = true;
    }
  };
  for (const auto& p : frame.proximity)
    store(p.object_id, {frame.position + p.bearing * (p.clearance + p.radius), p.radius});
  for (const auto& c : frame.contacts) {
    if (c.object_id < 0) continue;
    const bool seen = std::any_of(frame.proximity.begin(), frame.proximity.end(),
                                  [&](const ProximityEntry& p) { return p.object_id == c.object_id; });
    if (!seen)
      store(c.object_id, {frame.position - c.normal * (robot_radius + c.object_radius - c.penetration), c.object_radius});
  }
  return changed;
}

std::vector<Disc> SensedMap::discs() const {
  std::vector<Disc> out;
  out.reserve(objects_.size());
  for (const auto& [id, d] : objects_) out.push_back(d);
  return out;
}

// ---------------------------------------------------------------------------

Vec2 apf_force(const Point2& x, const Point2& goal, const std::vector<Disc>& obstacles, double robot_radius,
               double r_p, const ApfConfig& cfg) {
  Vec2 f = clamp_magnitude((goal - x) * cfg.k_p, cfg.k_p * r_p);
  for (const auto& d : obstacles) {
    const double rho = std::max(disc_clearance(x, d) - robot_radius, 1e-3);
    if (rho >= cfg.rho_0) continue;
    const double mag = cfg.eta * (1.0 / rho - 1.0 / cfg.rho_0) / (rho * rho);
    f += normalized(x - d.center) * mag;
  }
  return f;
}

void ApfPlanner::reset(const Workspace& ws) {
  ws_ = ws;
  map_.clear();
}

PlannerCommand ApfPlanner::tick(const SensorFrame& frame) {
  map_.update(frame, ws_.robot_radius);
  const Point2 g = ws_.targets[std::min(frame.active_target, ws_.targets.size() - 1)].g;
  const Vec2 f = apf_force(frame.position, g, map_.discs(), ws_.robot_radius, ws_.r_p, cfg_);
  const double damping = std::max(cfg_.D_o, norm(f) / cfg_.v_max);
  PlannerCommand cmd;
  cmd.force = clamp_magnitude(low_level_command(f, damping, frame.velocity, ws_.robot_mass, ws_.planner_period),
                              ws_.max_force);
  return cmd;
}

// ---------------------------------------------------------------------------

bool segment_clear(const Point2& a, const Point2& b, const std::vector<Disc>& obstacles, double clear) {
  for (const auto& d : obstacles) {
    const double depth = std::min(d.radius + clear, distance(a, d.center));
    if (segment_point_distance(a, b, d.center) < depth - 1e-12) return false;
  }
  return true;
}

double polyline_length(const std::vector<Point2>& path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) len += distance(path[i - 1], path[i]);
  return len;
}

std::optional<std::vector<Point2>> roadmap_path(const Point2& start, const Point2& goal,
                                                const std::vector<Disc>& obstacles, const Table& table,
                                                double robot_radius, Rng& rng, const RoadmapConfig& cfg) {
  const double clear = robot_radius + cfg.margin;
  auto free = [&](const Point2& p) {
    if (p.x < clear || p.y < clear || p.x > table.width - clear || p.y > table.height - clear) return false;
    return std::all_of(obstacles.begin(), obstacles.end(),
                       [&](const Disc& d) { return distance(p, d.center) >= d.radius + clear; });
  };
  if (!free(goal)) return std::nullopt;
  if (segment_clear(start, goal, obstacles, clear)) return std::vector<Point2>{start, goal};

  std::vector<Point2> nodes{start, goal};
  for (int i = 0; i < cfg.samples; ++i) {
    const Point2 p{rng.uniform(clear, table.width - clear), rng.uniform(clear, table.height - clear)};
    if (free(p)) nodes.push_back(p);
  }

  const std::size_t n = nodes.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> prev(n, n);
  std::vector<bool> done(n, false);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[0] = 0.0;
  open.push({0.0, 0});
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (done[u]) continue;
    done[u] = true;
    if (u == 1) break;
    for (std::size_t v = 0; v < n; ++v) {
      if (done[v]) continue;
      const double w = distance(nodes[u], nodes[v]);
      if (w > cfg.connect_radius || d + w >= dist[v]) continue;
      if (!segment_clear(nodes[u], nodes[v], obstacles, clear)) continue;
      dist[v] = d + w;
      prev[v] = u;
      open.push({dist[v], v});
    }
  }
  if (!done[1]) return std::nullopt;
  std::vector<Point2> path;
  for (std::size_t v = 1; v != n; v = prev[v]) path.push_back(nodes[v]);
  std::reverse(path.begin(), path.end());
  return path;
}

Vec2 track_reference(const Point2& x, const Vec2& v, const Point2& ref, const Vec2& ref_v, const TrackerConfig& cfg) {
  const Vec2 v_des = clamp_magnitude(ref_v + (ref - x) * cfg.position_gain, cfg.v_max);
  return clamp_magnitude((v_des - v) * cfg.velocity_gain, cfg.force_cap);
}

void SamplingPlanner::reset(const Workspace& ws) {
  ws_ = ws;
  map_.clear();
  path_.clear();
  next_ = 0;
  target_ = 0;
  need_plan_ = true;
  replans_ = 0;
}

PlannerCommand SamplingPlanner::tick(const SensorFrame& frame) {
  PlannerCommand cmd;
  if (map_.update(frame, ws_.robot_radius)) need_plan_ = true;
  if (frame.active_target != target_) {
    target_ = frame.active_target;
    need_plan_ = true;
  }
  const Point2 g = ws_.targets[std::min(target_, ws_.targets.size() - 1)].g;
  if (need_plan_) {
    Rng rng(mix_seed(ws_.seed, static_cast<std::uint64_t>(replans_)));
    auto path = roadmap_path(frame.position, g, map_.discs(), ws_.table, ws_.robot_radius, rng, cfg_.roadmap);
    ++replans_;
    need_plan_ = false;
    if (!path) {
      cmd.status = PlannerStatus::no_path;
      return cmd;
    }
    path_ = std::move(*path);
    next_ = 1;
  }
  while (next_ + 1 < path_.size() && distance(frame.position, path_[next_]) < cfg_.tracker.reach) ++next_;
  const Point2 w = path_[std::min(next_, path_.size() - 1)];
  cmd.force = track_reference(frame.position, frame.velocity, w, {}, cfg_.tracker);
  cmd.imagined = w;
  return cmd;
}

// ---------------------------------------------------------------------------

CubicBSpline::CubicBSpline(std::vector<Point2> control) : control_(std::move(control)) {
  const int n = static_cast<int>(control_.size());
  if (n < 4) throw std::invalid_argument("CubicBSpline: needs at least 4 control points");
  knots_.assign(4, 0.0);
  const int interior = n - 4;
  for (int i = 1; i <= interior; ++i) knots_.push_back(static_cast<double>(i) / static_cast<double>(interior + 1));
  knots_.insert(knots_.end(), 4, 1.0);
}

Point2 CubicBSpline::at(double u) const {
  const int n = static_cast<int>(control_.size());
  u = std::clamp(u, 0.0, 1.0);
  int k = 3;
  while (k < n - 1 && u >= knots_[static_cast<std::size_t>(k + 1)]) ++k;
  // de Boor recursion on the four active control points.
  std::array<Point2, 4> d;
  for (int j = 0; j < 4; ++j) d[static_cast<std::size_t>(j)] = control_[static_cast<std::size_t>(j + k - 3)];
  for (int r = 1; r <= 3; ++r) {
    for (int j = 3; j >= r; --j) {
      const double lo = knots_[static_cast<std::size_t>(j + k - 3)];
      const double hi = knots_[static_cast<std::size_t>(j + 1 + k - r)];
      const double a = hi > lo ? (u - lo) / (hi - lo) : 0.0;
      d[static_cast<std::size_t>(j)] = d[static_cast<std::size_t>(j - 1)] * (1.0 - a) + d[static_cast<std::size_t>(j)] * a;
    }
  }
  return d[3];
}

std::vector<Point2> CubicBSpline::sample(int n) const {
  std::vector<Point2> out;
  for (int i = 0; i <= n; ++i) out.push_back(at(static_cast<double>(i) / static_cast<double>(n)));
  return out;
}

PathReference::PathReference(std::vector<Point2> polyline, double speed, double t0)
    : pts_(std::move(polyline)), speed_(speed), t0_(t0) {
  if (pts_.empty() || !(speed > 0.0)) throw std::invalid_argument("PathReference: empty path or bad speed");
  s_.push_back(0.0);
  for (std::size_t i = 1; i < pts_.size(); ++i) s_.push_back(s_.back() + distance(pts_[i - 1], pts_[i]));
  length_ = s_.back();
}

Point2 PathReference::position(double t) const {
  if (pts_.empty()) return {};
  const double s = std::clamp((t - t0_) * speed_, 0.0, length_);
  const auto it = std::upper_bound(s_.begin(), s_.end(), s);
  if (it == s_.end()) return pts_.back();
  const std::size_t i = static_cast<std::size_t>(it - s_.begin());
  const double seg = s_[i] - s_[i - 1];
  const double a = seg > 0.0 ? (s - s_[i - 1]) / seg : 0.0;
  return pts_[i - 1] + (pts_[i] - pts_[i - 1]) * a;
}

Vec2 PathReference::velocity(double t) const {
  const double s = (t - t0_) * speed_;
  if (pts_.size() < 2 || s <= 0.0 || s >= length_) return {};
  const auto it = std::upper_bound(s_.begin(), s_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - s_.begin());
  return normalized(pts_[i] - pts_[i - 1]) * speed_;
}

void BsplinePlanner::reset(const Workspace& ws) {
  ws_ = ws;
  map_.clear();
  rng_ = Rng(mix_seed(ws.seed, 0xb5u));
  ref_ = {};
  target_ = 0;
  need_plan_ = true;
  failed_ = false;
  rollouts_ = 0;
  first_try_ = false;
}

bool BsplinePlanner::rollout(const SensorFrame& frame, const PathReference& ref, const TargetDomain& target,
                             double& peak_force) const {
  WorldState w;
  w.table = ws_.table;
  w.robot.position = frame.position;
  w.robot.velocity = frame.velocity;
  w.robot.radius = ws_.robot_radius;
  w.robot.mass = ws_.robot_mass;
  ObjectId id = 0;
  for (const auto& d : map_.discs()) {
    ObjectBody o;
    o.id = id++;
    o.shape = d;
    o.class_truth = ObjectClass::fixed;
    o.theta_truth = cfg_.obstacle_contact;
    w.objects.push_back(o);
  }
  SimConfig sim = sim_;
  sim.actuation_noise_std = 0.0;
  const int steps = sim.steps_per_tick();
  const double horizon = ref.end_time() + cfg_.rollout_slack;
  peak_force = 0.0;
  for (double t = frame.t; t < horizon; t += sim.planner_period) {
    const Vec2 f = track_reference(w.robot.position, w.robot.velocity, ref.position(t), ref.velocity(t), cfg_.tracker);
    for (int s = 0; s < steps; ++s) {
      Vec2 on_robot;
      for (const auto& c : compute_contacts(w, sim)) {
        peak_force = std::max(peak_force, c.magnitude());
        on_robot += c.force;
      }
      if (peak_force > 10.0) return false;
      w.robot = robot_step(w.robot, f, on_robot, sim);
      if (in_target(w.robot.position, target)) return true;
    }
  }
  return false;
}

bool BsplinePlanner::plan(const SensorFrame& frame) {
  const TargetDomain target = ws_.targets[std::min(target_, ws_.targets.size() - 1)];
  const Point2 a = frame.position, b = target.g;
  const int via = std::max(cfg_.via_points, 2);
  std::vector<Point2> line;
  for (int i = 0; i <= via + 1; ++i) line.push_back(a + (b - a) * (static_cast<double>(i) / static_cast<double>(via + 1)));
  for (int attempt = 0; attempt < cfg_.retry_budget; ++attempt) {
    std::vector<Point2> control = line;
    if (attempt > 0) {
      const double sigma = cfg_.perturb_sigma * (1.0 + 0.25 * static_cast<double>(attempt));
      for (std::size_t i = 1; i + 1 < control.size(); ++i) {
        control[i] += Vec2{rng_.normal(), rng_.normal()} * sigma;
        control[i] = Point2{std::clamp(control[i].x, 0.0, ws_.table.width), std::clamp(control[i].y, 0.0, ws_.table.height)};
      }
    }
    const CubicBSpline spline(control);
    PathReference ref(spline.sample(100), cfg_.speed, frame.t);
    double peak = 0.0;
    ++rollouts_;
    if (rollout(frame, ref, target, peak)) {
      ref_ = std::move(ref);
      first_try_ = attempt == 0;
      return true;
    }
  }
  return false;
}

PlannerCommand BsplinePlanner::tick(const SensorFrame& frame) {
  PlannerCommand cmd;
  if (map_.update(frame, ws_.robot_radius)) need_plan_ = true;
  if (frame.active_target != target_) {
    target_ = frame.active_target;
    need_plan_ = true;
  }
  if (need_plan_) {
    need_plan_ = false;
    failed_ = !plan(frame);
  }
  if (failed_) {
    cmd.status = PlannerStatus::infeasible;
    return cmd;
  }
  const Point2 r = ref_.position(frame.t);
  cmd.force = track_reference(frame.position, frame.velocity, r, ref_.velocity(frame.t), cfg_.tracker);
  cmd.imagined = r;
  return cmd;
}

}  // namespace imp
