#include "imp/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace imp {

namespace {

FieldTerm make_term(TermKind kind, const Point2& anchor, double gain, std::optional<ObjectId> id) {
  FieldTerm t;
  t.kind = kind;
  t.anchor = anchor;
  t.gain = gain;
  t.source_object = id;
  return t;
}

}  // namespace

std::size_t EnergyLandscape::count(TermKind k) const {
  return static_cast<std::size_t>(std::count_if(terms.begin(), terms.end(), [k](const FieldTerm& t) { return t.kind == k; }));
}

const FieldTerm* EnergyLandscape::find(TermKind k, ObjectId id) const {
  for (const auto& t : terms)
    if (t.kind == k && t.source_object == id) return &t;
  return nullptr;
}

FieldTerm attractive_term(const Point2& g_star, double k_p) {
  if (!(k_p > 0.0)) throw std::invalid_argument("attractive_term: k_p must be positive");
  return make_term(TermKind::attractive, g_star, k_p, std::nullopt);
}

Vec2 viscous_force(const Vec2& v, double D) {
  if (!(D >= 0.0)) throw std::invalid_argument("viscous_force: D must be non-negative");
  return v * (-D);
}

double viscous_power(const Vec2& v, double D) { return D * squared_norm(v); }

double operational_energy(const OperableVector& theta, const PerceptionSample& psi) {
  return theta.K * psi.dx + theta.D * psi.v + theta.C * psi.F;
}

double critical_damping(double k_p, double gap, double v_safe, double D_base) {
  if (!(gap > 0.0) || !(v_safe > 0.0)) throw std::invalid_argument("critical_damping: gap and v_safe must be positive");
  return std::max(0.0, k_p * gap / v_safe - D_base);
}

Point2 repulsive_center(std::span<const Point2> obj_samples, std::span<const Point2> b_samples) {
  return directed_hausdorff(obj_samples, b_samples).argmax;
}

FieldTerm repulsive_term(const Point2& o_star, double k_0, double support, double support_inner) {
  if (!(k_0 > 0.0)) throw std::invalid_argument("repulsive_term: k_0 must be positive");
  FieldTerm t = make_term(TermKind::repulsive, o_star, k_0, std::nullopt);
  t.support = support;
  t.support_inner = std::min(support_inner, support);
  return t;
}

FieldTerm operational_term(const Point2& object_center, const Vec2& axis, double gain, ObjectId id) {
  FieldTerm t = make_term(TermKind::operational, object_center, std::max(gain, 0.0), id);
  t.direction = normalized(axis);
  return t;
}

namespace {

// C1 window: 1 on [0, a], 1 - 3t^2 + 2t^3 on [a, R] with t = (s - a)/(R - a).
double window(double s, double a, double R) {
  if (s <= a) return 1.0;
  if (s >= R) return 0.0;
  const double t = (s - a) / (R - a);
  return 1.0 - t * t * (3.0 - 2.0 * t);
}

// Antiderivative in t of (a + L t)(1 - 3t^2 + 2t^3).
double window_moment(double t, double a, double L) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  return a * (t - t3 + 0.5 * t4) + L * (0.5 * t2 - 0.75 * t4 + 0.4 * t5);
}

// Integral of s w(s) from rho to R, so that -dU/drho = k_0 rho w(rho).
double repulsive_integral(double rho, double a, double R) {
  if (!std::isfinite(R)) return -0.5 * rho * rho;  // unbounded field: U = -k_0 rho^2 / 2
  if (rho >= R) return 0.0;
  const double L = R - a;
  if (L <= 0.0) return 0.5 * (R * R - rho * rho);
  const double tail_from = [&] {
    if (rho <= a) return 0.0;
    return (rho - a) / L;
  }();
  const double tail = L * (window_moment(1.0, a, L) - window_moment(tail_from, a, L));
  return rho <= a ? 0.5 * (a * a - rho * rho) + tail : tail;
}

}  // namespace

double term_potential(const FieldTerm& t, const Point2& x) {
  switch (t.kind) {
    case TermKind::attractive:
      return 0.5 * t.gain * squared_norm(t.anchor - x);
    case TermKind::repulsive:
      return t.gain * repulsive_integral(distance(x, t.anchor), t.support_inner, t.support);
    case TermKind::operational: {
      const Vec2 r = x - t.anchor;
      const Vec2 perp = r - t.direction * dot(r, t.direction);
      return 0.5 * t.gain * squared_norm(perp);
    }
    case TermKind::dedicated_viscous:
    case TermKind::free_viscous:
      return 0.0;
  }
  return 0.0;
}

Vec2 term_force(const FieldTerm& t, const Point2& x) {
  switch (t.kind) {
    case TermKind::attractive:
      return (t.anchor - x) * t.gain;
    case TermKind::repulsive: {
      const Vec2 r = x - t.anchor;
      return r * (t.gain * window(norm(r), t.support_inner, t.support));
    }
    case TermKind::operational: {
      const Vec2 r = x - t.anchor;
      return (r - t.direction * dot(r, t.direction)) * (-t.gain);
    }
    case TermKind::dedicated_viscous:
    case TermKind::free_viscous:
      return {};
  }
  return {};
}

bool heading_toward(const Point2& from, const Vec2& dir, const Disc& d, double margin) {
  if (squared_norm(dir) == 0.0) return false;
  const Vec2 u = normalized(dir);
  const Vec2 rel = d.center - from;
  const double reach = d.radius + margin;
  if (squared_norm(rel) <= reach * reach) return dot(rel, u) > 0.0;
  return dot(rel, u) > 0.0 && std::abs(cross(u, rel)) < reach;
}

double safe_speed_at(double surface_gap, const FieldConfig& cfg) {
  const double s = std::clamp(surface_gap / cfg.slow_zone, 0.0, 1.0);
  return cfg.v_safe + (cfg.v_max - cfg.v_safe) * s;
}

EnergyLandscape compose(const WorldView& view, const Point2& imagined, const FieldConfig& cfg) {
  EnergyLandscape L;
  L.config = cfg;
  L.valid_within = {view.robot, view.r_p};
  L.terms.push_back(attractive_term(imagined, cfg.k_p));

  const Disc robot_disc{view.robot, view.robot_radius};
  PointSet b_samples = sample_boundary(robot_disc, 16);
  b_samples.push_back(view.robot);
  {
    const PointSet g = sample_boundary(Disc{view.target.g, view.target.r_g}, 16);
    b_samples.insert(b_samples.end(), g.begin(), g.end());
    b_samples.push_back(view.target.g);
  }

  std::vector<const ObjectView*> in_range;
  for (const auto& o : view.objects)
    if (discs_overlap(o.disc, L.valid_within)) in_range.push_back(&o);

  const std::size_t first_repulsive = L.terms.size();
  for (const ObjectView* o : in_range) {
    if (o->cls != Operability::inoperable) continue;
    PointSet region;
    for (const Point2& p : sample_boundary(o->disc, cfg.boundary_samples))
      if (distance(p, view.robot) <= view.r_p) region.push_back(p);
    if (region.empty()) continue;
    FieldTerm t = repulsive_term(repulsive_center(region, b_samples), cfg.k_0, view.r_p,
                                 cfg.repulsive_inner_fraction * view.r_p);
    t.source_object = o->id;
    L.terms.push_back(t);
  }
  // Repulsion may bend the approach but never cancel it: its pull at the
  // robot is capped at a share of the attraction, so the only equilibrium is x*.
  {
    const Vec2 attract = term_force(L.terms.front(), view.robot);
    Vec2 repel;
    for (std::size_t i = first_repulsive; i < L.terms.size(); ++i) repel += term_force(L.terms[i], view.robot);
    const double cap = cfg.repulsive_share * norm(attract);
    if (norm(repel) > cap) {
      const double scale = cap / norm(repel);
      for (std::size_t i = first_repulsive; i < L.terms.size(); ++i) L.terms[i].gain *= scale;
    }
  }

  for (const ObjectView* o : in_range) {
    if (o->cls != Operability::operable) continue;
    const double reach = o->disc.radius + view.robot_radius;
    if (segment_point_distance(view.robot, imagined, o->disc.center) >= reach) continue;
    const Vec2 axis = imagined - o->disc.center;
    if (squared_norm(axis) == 0.0) continue;
    const double cost = std::max(0.0, operational_energy(o->theta, o->last));
    // Push off-center, on the side the robot already is, so the object is
    // deflected out of the way instead of carried along.
    const Vec2 u = normalized(axis);
    const double side = cross(u, view.robot - o->disc.center) < 0.0 ? -1.0 : 1.0;
    const Point2 anchor = o->disc.center + Vec2{-u.y, u.x} * (side * cfg.corridor_offset * o->disc.radius);
    L.terms.push_back(operational_term(anchor, axis, cfg.corridor_ratio * cfg.k_p / (1.0 + cost), o->id));
  }

  Vec2 pull;
  for (const auto& t : L.terms) pull += term_force(t, view.robot);
  const double free_gain = std::max(cfg.D_o, norm(pull) / cfg.v_max);

  // Each unknown object ahead of the pull bounds the closing speed by its own
  // gap; the pull is expressed as the equivalent attractor distance |F| / k_p.
  const double equivalent_gap = norm(pull) / cfg.k_p;
  for (const ObjectView* o : in_range) {
    if (o->cls != Operability::unknown) continue;
    FieldTerm t = make_term(TermKind::dedicated_viscous, o->disc.center, 0.0, o->id);
    if (equivalent_gap > 0.0 && heading_toward(view.robot, pull, o->disc, view.robot_radius + cfg.heading_margin)) {
      const double surface_gap = disc_clearance(view.robot, o->disc) - view.robot_radius;
      t.gain = critical_damping(cfg.k_p, equivalent_gap, safe_speed_at(surface_gap, cfg), free_gain);
    }
    L.terms.push_back(t);
  }
  L.terms.push_back(make_term(TermKind::free_viscous, view.robot, free_gain, std::nullopt));
  return L;
}

EnergySample evaluate(const EnergyLandscape& L, const Point2& x, const Vec2& v) {
  if (distance(x, L.valid_within.center) > L.valid_within.radius * (1.0 + 1e-12))
    throw std::domain_error("evaluate: point outside the local energy domain");
  EnergySample s;
  for (const auto& t : L.terms) {
    s.potential += term_potential(t, x);
    s.conservative += term_force(t, x);
    if (t.kind == TermKind::dedicated_viscous || t.kind == TermKind::free_viscous) s.damping += t.gain;
  }
  s.force = s.conservative + viscous_force(v, s.damping);
  return s;
}

}  // namespace imp
