#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace imp {

/// Planar vector in meters (or m/s, N when used for rates and forces).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator/(const Vec2& a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

using Point2 = Vec2;
using PointSet = std::vector<Point2>;

inline constexpr double kPi = 3.14159265358979323846;

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
constexpr double squared_norm(const Vec2& v) { return dot(v, v); }
inline bool is_finite(const Vec2& v) { return std::isfinite(v.x) && std::isfinite(v.y); }

/// Unit vector along v; the zero vector maps to zero.
inline Vec2 normalized(const Vec2& v) {
  const double n = norm(v);
  return n > 0.0 ? v / n : Vec2{};
}

/// Rescales v so its magnitude does not exceed limit.
inline Vec2 clamp_magnitude(const Vec2& v, double limit) {
  const double n = norm(v);
  return n > limit && n > 0.0 ? v * (limit / n) : v;
}

struct Disc {
  Point2 center;
  double radius = 0.0;
};

double distance(const Point2& p, const Point2& q);

/// Signed distance from p to the disc boundary; negative inside.
double disc_clearance(const Point2& p, const Disc& d);

bool discs_overlap(const Disc& a, const Disc& b);

/// n points on the circle, counter-clockwise from angle zero. Throws for n < 3.
PointSet sample_boundary(const Disc& d, std::size_t n);

/// Minimum distance from segment [a, b] to point p.
double segment_point_distance(const Point2& a, const Point2& b, const Point2& p);

struct HausdorffResult {
  double distance = 0.0;
  Point2 argmax;
  std::size_t index = 0;
};

/// Relative tolerance under which two candidate distances count as a tie.
inline constexpr double kHausdorffTieTolerance = 1e-12;

/// Directed Hausdorff distance max_{a in A} min_{b in B} |a - b|.
/// The returned argmax is the first point of A (lowest index) attaining the
/// max up to kHausdorffTieTolerance.
/// Throws std::invalid_argument when either set is empty.
HausdorffResult directed_hausdorff(std::span<const Point2> a, std::span<const Point2> b);

}  // namespace imp
