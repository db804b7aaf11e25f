#include "imp/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace imp {

Point2 Box::clamp(const Point2& p) const { return {std::clamp(p.x, xmin, xmax), std::clamp(p.y, ymin, ymax)}; }

bool ConvergenceDomain::contains(const Point2& p) const {
  if (distance(p, base.center) > base.radius) return false;
  if (keep_in && !keep_in->contains(p)) return false;
  for (const auto& d : excluded)
    if (distance(p, d.center) < d.radius) return false;
  if (viewpoint) {
    for (const auto& d : excluded) {
      const double depth = std::min(d.radius, distance(*viewpoint, d.center));
      if (segment_point_distance(*viewpoint, p, d.center) < depth - 1e-12) return false;
    }
  }
  return true;
}

ConvergenceDomain convergence_domain(const Point2& robot, const std::vector<ObjectView>& objects, double r_p,
                                     double robot_radius, const std::optional<Table>& table, double margin) {
  ConvergenceDomain xc;
  xc.base = local_energy_domain(RobotBody{robot, {}, robot_radius}, r_p);
  for (const auto& o : objects) {
    if (o.cls != Operability::inoperable) continue;
    const Disc inflated{o.disc.center, o.disc.radius + robot_radius + margin};
    if (discs_overlap(inflated, xc.base)) xc.excluded.push_back(inflated);
  }
  if (table) {
    const double m = robot_radius + margin;
    xc.keep_in = Box{m, m, table->width - m, table->height - m};
  }
  return xc;
}

bool blocks_corridor(const Point2& from, const Point2& to, const Disc& d, double robot_radius) {
  const Vec2 path = to - from;
  const double len = norm(path);
  if (len == 0.0) return false;
  const Vec2 u = path / len;
  const Vec2 rel = d.center - from;
  const double along = dot(rel, u);
  const double reach = d.radius + robot_radius;
  if (along <= 0.0 || along > len + reach) return false;
  return std::abs(cross(u, rel)) < reach;
}

namespace {

// Unit directions for the angular samples, reused across ticks.
const std::vector<Vec2>& unit_directions(int angular) {
  thread_local std::vector<Vec2> dirs;
  thread_local int cached = -1;
  if (cached != angular) {
    dirs.clear();
    for (int j = 0; j < angular; ++j) {
      const double a = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(angular);
      dirs.push_back({std::cos(a), std::sin(a)});
    }
    cached = angular;
  }
  return dirs;
}

template <typename Visit>
void for_each_sample(const ConvergenceDomain& xc, const ProjectionConfig& cfg, Visit&& visit) {
  visit(xc.base.center);
  const auto& dirs = unit_directions(cfg.angular);
  for (int i = 0; i < cfg.radial; ++i) {
    // The outer ring sits just inside the circle so rounding cannot put it outside.
    const double r = xc.base.radius * (1.0 - 1e-12) * static_cast<double>(i + 1) / static_cast<double>(cfg.radial);
    for (const Vec2& u : dirs) visit(xc.base.center + u * r);
  }
}

}  // namespace

std::vector<Point2> domain_samples(const ConvergenceDomain& xc, const ProjectionConfig& cfg) {
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(cfg.angular * cfg.radial) + 1);
  for_each_sample(xc, cfg, [&](const Point2& p) { out.push_back(p); });
  return out;
}

Point2 imagine_state(const MotionIntent& s, const ConvergenceDomain& xc, const ProjectionConfig& cfg,
                     bool* degenerate) {
  if (degenerate) *degenerate = false;
  const Point2& t = s.target;
  if (xc.contains(t)) return t;

  std::optional<Point2> best;
  double best_d = std::numeric_limits<double>::infinity();
  // Membership is only checked for candidates that would improve the best,
  // which keeps the lowest-index rule on ties.
  auto consider = [&](const Point2& p) {
    const double d = distance(p, t);
    if (d < best_d && xc.contains(p)) {
      best_d = d;
      best = p;
    }
  };
  auto onto_circle = [&](const Point2& q, const Disc& d, double scale) {
    const Vec2 r = q - d.center;
    const double n = norm(r);
    if (n > 0.0) consider(d.center + r * (d.radius * scale / n));
  };

  // Exact projections onto each boundary piece come first; the polar samples
  // guarantee a member whenever the domain has sampled interior.
  onto_circle(t, xc.base, 1.0 - 1e-12);
  if (xc.keep_in) {
    const Point2 c = xc.keep_in->clamp(t);
    consider(c);
    onto_circle(c, xc.base, 1.0 - 1e-12);
  }
  for (const auto& d : xc.excluded) onto_circle(t, d, 1.0 + 1e-9);
  for_each_sample(xc, cfg, consider);

  if (!best) {
    if (degenerate) *degenerate = true;
    return xc.base.center;
  }
  return *best;
}

Vec2 low_level_command(const Vec2& conservative, double damping, const Vec2& v, double mass, double period) {
  const Vec2 f = conservative - v * damping;
  if (damping * period <= mass) return f;
  return f * (mass / (damping * period));
}

RouteMap::RouteMap(const Box& bounds, std::vector<Disc> excluded, const Point2& goal, double cell)
    : bounds_(bounds), goal_(goal), cell_(cell) {
  if (!(cell > 0.0)) throw std::invalid_argument("RouteMap: cell must be positive");
  nx_ = static_cast<long>(std::floor((bounds.xmax - bounds.xmin) / cell)) + 1;
  ny_ = static_cast<long>(std::floor((bounds.ymax - bounds.ymin) / cell)) + 1;
  if (nx_ <= 0 || ny_ <= 0) {
    nx_ = ny_ = 0;
    return;
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  nodes_.assign(static_cast<std::size_t>(nx_ * ny_), inf);
  std::vector<char> open(nodes_.size(), 1);
  for (long j = 0; j < ny_; ++j)
    for (long i = 0; i < nx_; ++i) {
      const Point2 p = node(i, j);
      for (const auto& d : excluded)
        if (distance(p, d.center) < d.radius) open[static_cast<std::size_t>(index(i, j))] = 0;
    }

  using Item = std::pair<double, long>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  const auto [gi, gj] = nearest(goal);
  for (long j = gj - 1; j <= gj + 1; ++j)
    for (long i = gi - 1; i <= gi + 1; ++i) {
      if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
      const auto k = static_cast<std::size_t>(index(i, j));
      if (!open[k]) continue;
      nodes_[k] = distance(node(i, j), goal);
      queue.push({nodes_[k], index(i, j)});
    }
  const double diag = cell * std::sqrt(2.0);
  while (!queue.empty()) {
    const auto [c, k] = queue.top();
    queue.pop();
    if (c > nodes_[static_cast<std::size_t>(k)]) continue;
    const long i = k % nx_, j = k / nx_;
    for (long dj = -1; dj <= 1; ++dj)
      for (long di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0) continue;
        const long a = i + di, b = j + dj;
        if (a < 0 || b < 0 || a >= nx_ || b >= ny_) continue;
        const auto q = static_cast<std::size_t>(index(a, b));
        if (!open[q]) continue;
        const double next = c + (di != 0 && dj != 0 ? diag : cell);
        if (next < nodes_[q]) {
          nodes_[q] = next;
          queue.push({next, static_cast<long>(q)});
        }
      }
  }
}

Point2 RouteMap::node(long i, long j) const {
  return {std::min(bounds_.xmin + static_cast<double>(i) * cell_, bounds_.xmax),
          std::min(bounds_.ymin + static_cast<double>(j) * cell_, bounds_.ymax)};
}

std::pair<long, long> RouteMap::nearest(const Point2& p) const {
  return {std::clamp(std::lround((p.x - bounds_.xmin) / cell_), 0L, nx_ - 1),
          std::clamp(std::lround((p.y - bounds_.ymin) / cell_), 0L, ny_ - 1)};
}

double RouteMap::cost(const Point2& p) const {
  if (nodes_.empty()) return std::numeric_limits<double>::infinity();
  const auto [i, j] = nearest(p);
  return nodes_[static_cast<std::size_t>(index(i, j))];
}

std::vector<Point2> RouteMap::descend(const Point2& p) const {
  std::vector<Point2> path;
  if (nodes_.empty()) return path;
  const auto [pi, pj] = nearest(p);
  long ci = -1, cj = -1;
  double best = std::numeric_limits<double>::infinity();
  for (long j = pj - 1; j <= pj + 1; ++j)
    for (long i = pi - 1; i <= pi + 1; ++i) {
      if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
      const double c = nodes_[static_cast<std::size_t>(index(i, j))] + distance(p, node(i, j));
      if (c < best) {
        best = c;
        ci = i;
        cj = j;
      }
    }
  if (ci < 0) return path;
  for (;;) {
    path.push_back(node(ci, cj));
    const double here = nodes_[static_cast<std::size_t>(index(ci, cj))];
    long ni = ci, nj = cj;
    double lowest = here;
    for (long j = cj - 1; j <= cj + 1; ++j)
      for (long i = ci - 1; i <= ci + 1; ++i) {
        if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
        const double c = nodes_[static_cast<std::size_t>(index(i, j))];
        if (c < lowest) {
          lowest = c;
          ni = i;
          nj = j;
        }
      }
    if (ni == ci && nj == cj) break;
    ci = ni;
    cj = nj;
  }
  path.push_back(goal_);
  return path;
}

ImpPlanner::ImpPlanner(ImpConfig cfg) : cfg_(std::move(cfg)) {}

void ImpPlanner::reset(const Workspace& ws) {
  if (ws.targets.empty()) throw std::invalid_argument("ImpPlanner: workspace has no target");
  ws_ = ws;
  memory_.clear();
  intent_ = {IntentMode::approach, ws.targets.front().g, std::nullopt};
  landscape_ = {};
  domain_ = {};
  last_imagined_.reset();
  route_ = {};
  route_key_.clear();
  waypoint_ = intent_.target;
  probe_step_ = 0;
  probe_ticks_ = 0;
  ticks_ = 0;
  degenerate_ticks_ = 0;
  mode_changes_ = 0;
}

std::optional<Operability> ImpPlanner::classification(ObjectId id) const {
  const auto it = memory_.find(id);
  if (it == memory_.end()) return std::nullopt;
  return it->second.view.cls;
}

std::optional<OperableVector> ImpPlanner::estimate(ObjectId id) const {
  const auto it = memory_.find(id);
  if (it == memory_.end() || it->second.buffer.size() < 3) return std::nullopt;
  try {
    return estimate_theta(it->second.buffer, cfg_.confidence).first;
  } catch (const RankDeficientError&) {
    return std::nullopt;
  }
}

std::vector<ObjectView> ImpPlanner::objects() const {
  std::vector<ObjectView> out;
  out.reserve(memory_.size());
  for (const auto& [id, t] : memory_) out.push_back(t.view);
  return out;
}

Point2 ImpPlanner::active_goal(const SensorFrame& frame) const {
  const std::size_t i = std::min(frame.active_target, ws_.targets.size() - 1);
  return ws_.targets[i].g;
}

WorldView ImpPlanner::view_of(const SensorFrame& frame) const {
  WorldView v;
  v.robot = frame.position;
  v.velocity = frame.velocity;
  v.robot_radius = ws_.robot_radius;
  v.r_p = ws_.r_p;
  v.target = ws_.targets[std::min(frame.active_target, ws_.targets.size() - 1)];
  v.objects = objects();
  return v;
}

Point2 ImpPlanner::route_waypoint(const SensorFrame& frame, const Point2& goal) {
  if (!cfg_.route_intent || domain_.contains(goal)) return goal;
  std::vector<Disc> blocked;
  std::vector<long> key{std::lround(goal.x * 1e3), std::lround(goal.y * 1e3)};
  const double inflate = ws_.robot_radius + cfg_.exclusion_margin;
  for (const auto& [id, t] : memory_) {
    if (t.view.cls != Operability::inoperable) continue;
    blocked.push_back({t.view.disc.center, t.view.disc.radius + inflate});
    key.insert(key.end(), {id, std::lround(t.view.disc.center.x * 1e3), std::lround(t.view.disc.center.y * 1e3)});
  }
  if (blocked.empty()) return goal;
  if (key != route_key_) {
    const Box box{inflate, inflate, ws_.table.width - inflate, ws_.table.height - inflate};
    route_ = RouteMap(box, std::move(blocked), goal, cfg_.route_cell);
    route_key_ = std::move(key);
  }
  // Farthest visible point of the route's leading stretch.
  std::optional<Point2> aim;
  for (const Point2& p : route_.descend(frame.position)) {
    if (domain_.contains(p)) {
      aim = p;
    } else if (aim) {
      break;
    }
  }
  return aim.value_or(goal);
}

void ImpPlanner::observe(const SensorFrame& frame) {
  auto entry = [&](ObjectId id) -> Tracked& {
    auto it = memory_.find(id);
    if (it == memory_.end()) {
      Tracked t;
      t.view.id = id;
      it = memory_.emplace(id, std::move(t)).first;
    }
    return it->second;
  };
  for (const auto& p : frame.proximity) {
    Tracked& t = entry(p.object_id);
    t.view.disc = {frame.position + p.bearing * (p.clearance + p.radius), p.radius};
  }
  for (const auto& c : frame.contacts) {
    if (c.object_id < 0) continue;
    const bool seen = std::any_of(frame.proximity.begin(), frame.proximity.end(),
                                  [&](const ProximityEntry& p) { return p.object_id == c.object_id; });
    Tracked& t = entry(c.object_id);
    if (!seen)
      t.view.disc = {frame.position - c.normal * (ws_.robot_radius + c.object_radius - c.penetration), c.object_radius};
  }

  if (intent_.mode != IntentMode::probe || !intent_.probe_object) return;
  Tracked& obj = entry(*intent_.probe_object);
  if (obj.view.cls != Operability::unknown) return;
  for (const auto& c : frame.contacts) {
    if (c.object_id != obj.view.id) continue;
    const PerceptionSample s{c.penetration, std::max(c.closing_speed(), 0.0), c.magnitude()};
    obj.buffer.accumulate(s);
    obj.view.last = s;
  }
  obj.displacement = std::max(obj.displacement, distance(obj.view.disc.center, obj.probe_origin));

  if (obj.buffer.size() >= 3) {
    try {
      const auto [theta, report] = estimate_theta(obj.buffer, cfg_.confidence);
      obj.view.theta = theta;
      const Operability c = classify_operability(theta, report, obj.displacement, cfg_.probe_force, cfg_.move_threshold);
      // Stillness only proves inoperability once the full profile was applied.
      if (c == Operability::operable || (c == Operability::inoperable && probe_step_ >= probe_profile_length(cfg_.probe)))
        obj.view.cls = c;
    } catch (const RankDeficientError&) {
    }
  }
  // Out of budget with force data that never settled: treat as an obstacle.
  // Without any force data nothing can be concluded.
  if (obj.view.cls == Operability::unknown && probe_ticks_ >= cfg_.probe_budget_ticks && obj.buffer.size() > 0)
    obj.view.cls = Operability::inoperable;
}

void ImpPlanner::start_probe(Tracked& obj, const SensorFrame&) {
  obj.buffer.clear();
  obj.probe_origin = obj.view.disc.center;
  obj.displacement = 0.0;
  probe_step_ = 0;
  probe_ticks_ = 0;
}

MotionIntent ImpPlanner::coordinate_intent(const SensorFrame& frame) {
  const Point2 g = active_goal(frame);
  auto contact_point = [&](const Disc& d) {
    return d.center + normalized(frame.position - d.center) * d.radius;
  };
  if (intent_.mode == IntentMode::probe && intent_.probe_object) {
    const auto it = memory_.find(*intent_.probe_object);
    if (it != memory_.end() && it->second.view.cls == Operability::unknown)
      return {IntentMode::probe, contact_point(it->second.view.disc), intent_.probe_object};
  }
  const Point2 aim = last_imagined_.value_or(g);
  for (const ObjectId id : frame.touched) {
    const auto it = memory_.find(id);
    if (it == memory_.end()) continue;  // touched between ticks, never located
    Tracked& t = it->second;
    if (t.view.cls != Operability::unknown) continue;
    const Disc& d = t.view.disc;
    if (blocks_corridor(frame.position, aim, d, ws_.robot_radius) ||
        blocks_corridor(frame.position, g, d, ws_.robot_radius)) {
      start_probe(t, frame);
      return {IntentMode::probe, contact_point(d), id};
    }
  }
  return {IntentMode::approach, g, std::nullopt};
}

Vec2 ImpPlanner::probe_command(const SensorFrame& frame) {
  const Tracked& obj = memory_.at(*intent_.probe_object);
  const Vec2 dir = normalized(obj.view.disc.center - frame.position);
  const bool touching = std::binary_search(frame.touched.begin(), frame.touched.end(), obj.view.id);
  ++probe_ticks_;
  if (!touching) {
    // Close the gap slowly; the profile starts at first touch.
    const Vec2 f = (dir * cfg_.probe_approach_speed - frame.velocity) * (ws_.robot_mass / ws_.planner_period);
    return clamp_magnitude(f, cfg_.probe_force);
  }
  // The seat force keeps the robot pressed against a contact offset that
  // would otherwise bounce it clear between ticks.
  const double push = std::max(probe_schedule(probe_step_++, cfg_.probe_force, cfg_.probe), cfg_.seat_force);
  return dir * push - frame.velocity * cfg_.field.D_o;
}

void ImpPlanner::track_push(const SensorFrame& frame) {
  const Vec2 pull = evaluate(landscape_, frame.position, {}).conservative;
  std::optional<ObjectId> pushed;
  for (const auto& c : frame.contacts) {
    if (c.object_id < 0) continue;
    const Tracked& t = memory_.at(c.object_id);
    if (t.view.cls == Operability::operable && dot(pull, c.normal) < 0.0) {
      pushed = c.object_id;
      break;
    }
  }
  for (auto& [id, t] : memory_) {
    if (pushed != id) {
      t.push_ticks = 0;
      continue;
    }
    if (t.push_ticks++ == 0) t.push_origin = t.view.disc.center;
    if (t.push_ticks < cfg_.stall_ticks) continue;
    // A pushed object that stopped moving has toppled or jammed: what was
    // learned about it no longer holds.
    if (distance(t.view.disc.center, t.push_origin) < cfg_.stall_progress) {
      ++t.invalidations;
      t.view.cls = t.invalidations > cfg_.max_invalidations ? Operability::inoperable : Operability::unknown;
      t.buffer.clear();
    }
    t.push_ticks = 0;
  }
}

PlannerCommand ImpPlanner::tick(const SensorFrame& frame) {
  ++ticks_;
  observe(frame);
  const MotionIntent next = coordinate_intent(frame);
  if (next.mode != intent_.mode || next.probe_object != intent_.probe_object) ++mode_changes_;
  intent_ = next;

  PlannerCommand cmd;
  cmd.mode = intent_.mode;
  if (intent_.mode == IntentMode::probe) {
    cmd.force = probe_command(frame);
    cmd.imagined = intent_.target;
    return cmd;
  }

  domain_ = convergence_domain(frame.position, objects(), ws_.r_p, ws_.robot_radius, ws_.table,
                               cfg_.exclusion_margin);
  if (cfg_.visible_domain) domain_.viewpoint = frame.position;
  MotionIntent steer = intent_;
  steer.target = waypoint_ = route_waypoint(frame, intent_.target);
  bool degenerate = false;
  const Point2 x_star = imagine_state(steer, domain_, cfg_.projection, &degenerate);
  if (degenerate) ++degenerate_ticks_;
  last_imagined_ = x_star;
  cmd.imagined = x_star;

  landscape_ = compose(view_of(frame), x_star, cfg_.field);
  const EnergySample e = evaluate(landscape_, frame.position, frame.velocity);
  Vec2 f = low_level_command(e.conservative, e.damping, frame.velocity, ws_.robot_mass, ws_.planner_period);

  // Pushing a confirmed-operable object: feed the measured contact force
  // forward so the push keeps the field's velocity, within the push cap.
  bool pushing = false;
  for (const auto& c : frame.contacts) {
    if (c.object_id < 0) continue;
    if (memory_.at(c.object_id).view.cls != Operability::operable) continue;
    if (dot(e.conservative, c.normal) >= 0.0) continue;
    f -= c.force;
    pushing = true;
  }
  if (pushing) f = clamp_magnitude(f, cfg_.push_cap);
  track_push(frame);

  cmd.force = clamp_magnitude(f, ws_.max_force);
  if (!is_finite(cmd.force)) cmd.force = {std::numeric_limits<double>::quiet_NaN(), 0.0};
  return cmd;
}

}  // namespace imp
