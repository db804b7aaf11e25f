#include "imp/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace imp {

double distance(const Point2& p, const Point2& q) { return norm(p - q); }

double disc_clearance(const Point2& p, const Disc& d) { return distance(p, d.center) - d.radius; }

bool discs_overlap(const Disc& a, const Disc& b) {
  return distance(a.center, b.center) < a.radius + b.radius;
}

PointSet sample_boundary(const Disc& d, std::size_t n) {
  if (n < 3) throw std::invalid_argument("sample_boundary: need at least 3 points");
  PointSet out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
    out.push_back({d.center.x + d.radius * std::cos(a), d.center.y + d.radius * std::sin(a)});
  }
  return out;
}

double segment_point_distance(const Point2& a, const Point2& b, const Point2& p) {
  const Vec2 ab = b - a;
  const double len2 = squared_norm(ab);
  if (len2 == 0.0) return distance(a, p);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(a + ab * t, p);
}

HausdorffResult directed_hausdorff(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("directed_hausdorff: empty point set");
  HausdorffResult best{-1.0, a.front(), 0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    // Rounding noise must not break ties between geometrically equal points.
    const double to_beat = best.distance + kHausdorffTieTolerance * std::max(1.0, best.distance);
    double nearest = std::numeric_limits<double>::infinity();
    for (const Point2& q : b) {
      nearest = std::min(nearest, distance(a[i], q));
      if (nearest <= to_beat) break;
    }
    if (nearest > to_beat) {
      best.distance = nearest;
      best.index = i;
      best.argmax = a[i];
    }
  }
  return best;
}

}  // namespace imp
