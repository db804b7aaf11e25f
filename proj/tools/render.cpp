#include "render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "imp/scenario_io.hpp"

namespace imp::cli {

namespace {

// Table meters to SVG millimeters with the y axis pointing up.
struct Frame {
  double height = 0.9;
  std::string x(double v) const { return fmt9(v * 1000.0); }
  std::string y(double v) const { return fmt9((height - v) * 1000.0); }
  std::string len(double v) const { return fmt9(v * 1000.0); }
};

std::string open_svg(const Table& t) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt9(t.width * 1000.0) << "mm\" height=\""
    << fmt9(t.height * 1000.0) << "mm\" viewBox=\"0 0 " << fmt9(t.width * 1000.0) << ' ' << fmt9(t.height * 1000.0)
    << "\">\n";
  s << "<g id=\"table\"><rect x=\"0\" y=\"0\" width=\"" << fmt9(t.width * 1000.0) << "\" height=\""
    << fmt9(t.height * 1000.0) << "\" fill=\"#f7f4ee\" stroke=\"#333\" stroke-width=\"2\"/></g>\n";
  return s.str();
}

const char* class_color(const ObjectBody& o) { return o.class_truth == ObjectClass::fixed ? "#4d4d4d" : "#3b7dd8"; }

void objects_layer(std::ostringstream& s, const Frame& f, const WorldState& w, const char* id, bool dashed) {
  s << "<g id=\"" << id << "\">";
  for (const auto& o : w.objects) {
    s << "<circle data-id=\"" << o.id << "\" data-class=\"" << to_string(o.class_truth) << "\" cx=\""
      << f.x(o.shape.center.x) << "\" cy=\"" << f.y(o.shape.center.y) << "\" r=\"" << f.len(o.shape.radius) << '"';
    if (dashed)
      s << " fill=\"none\" stroke=\"" << class_color(o) << "\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"";
    else
      s << " fill=\"" << class_color(o) << "\" fill-opacity=\"0.75\"";
    s << "/>";
  }
  s << "</g>\n";
}

void targets_layer(std::ostringstream& s, const Frame& f, const WorldState& w) {
  s << "<g id=\"targets\">";
  for (std::size_t i = 0; i < w.targets.size(); ++i) {
    const auto& t = w.targets[i];
    s << "<circle cx=\"" << f.x(t.g.x) << "\" cy=\"" << f.y(t.g.y) << "\" r=\"" << f.len(std::max(t.r_g, 0.006))
      << "\" fill=\"#2ca02c\"/><text x=\"" << f.x(t.g.x + 0.012) << "\" y=\"" << f.y(t.g.y + 0.012)
      << "\" font-size=\"18\" fill=\"#2ca02c\">" << i + 1 << "</text>";
  }
  s << "</g>\n";
}

// Viridis-like ramp, t in [0, 1].
std::string heat(double t) {
  static constexpr double stops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double u = t - i;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(stops[i][0] + u * (stops[i + 1][0] - stops[i][0]))),
                static_cast<int>(std::lround(stops[i][1] + u * (stops[i + 1][1] - stops[i][1]))),
                static_cast<int>(std::lround(stops[i][2] + u * (stops[i + 1][2] - stops[i][2]))));
  return buf;
}

struct Cell {
  Point2 p;
  EnergySample e;
};

std::vector<Cell> sample_field(const EnergyLandscape& L, double step) {
  std::vector<Cell> cells;
  const Disc& d = L.valid_within;
  const long n = static_cast<long>(std::floor(d.radius / step));
  for (long j = -n; j <= n; ++j)
    for (long i = -n; i <= n; ++i) {
      const Point2 p{d.center.x + i * step, d.center.y + j * step};
      if (distance(p, d.center) > d.radius) continue;
      cells.push_back({p, evaluate(L, p, {})});
    }
  return cells;
}

}  // namespace

std::string overview_svg(const WorldState& start, const WorldState& end, const std::vector<TrajectoryRow>& rows) {
  const Frame f{start.table.height};
  std::ostringstream s;
  s << open_svg(start.table);
  objects_layer(s, f, start, "objects", false);
  objects_layer(s, f, end, "objects-final", true);
  targets_layer(s, f, start);

  s << "<g id=\"trajectory\"><polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < rows.size(); ++i)
    s << (i ? " " : "") << f.x(rows[i].position.x) << ',' << f.y(rows[i].position.y);
  s << "\"/>";
  s << "<circle cx=\"" << f.x(start.robot.position.x) << "\" cy=\"" << f.y(start.robot.position.y) << "\" r=\""
    << f.len(start.robot.radius) << "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/></g>\n";

  // One marker per distinct imagined state; consecutive repeats within 5 mm are merged.
  s << "<g id=\"imagined\">";
  std::optional<Point2> last;
  for (const auto& r : rows) {
    if (!r.imagined || (last && distance(*last, *r.imagined) < 0.005)) continue;
    last = r.imagined;
    const double a = 0.004;
    const char* color = r.mode == IntentMode::probe ? "#ff7f0e" : "#9467bd";
    s << "<path d=\"M" << f.x(r.imagined->x - a) << ' ' << f.y(r.imagined->y - a) << "L" << f.x(r.imagined->x + a)
      << ' ' << f.y(r.imagined->y + a) << "M" << f.x(r.imagined->x - a) << ' ' << f.y(r.imagined->y + a) << "L"
      << f.x(r.imagined->x + a) << ' ' << f.y(r.imagined->y - a) << "\" stroke=\"" << color
      << "\" stroke-width=\"1.5\"/>";
  }
  s << "</g>\n</svg>\n";
  return s.str();
}

std::string field_csv(const EnergyLandscape& L, const FieldGrid& grid) {
  std::ostringstream s;
  s << "x,y,potential,fx,fy\n";
  for (const auto& c : sample_field(L, grid.step))
    s << fmt9(c.p.x) << ',' << fmt9(c.p.y) << ',' << fmt9(c.e.potential) << ',' << fmt9(c.e.conservative.x) << ','
      << fmt9(c.e.conservative.y) << '\n';
  return s.str();
}

std::string field_svg(const WorldState& world, const EnergyLandscape& L, const FieldGrid& grid) {
  const Frame f{world.table.height};
  const std::vector<Cell> cells = sample_field(L, grid.step);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, fmax = 0.0;
  for (const auto& c : cells) {
    lo = std::min(lo, c.e.potential);
    hi = std::max(hi, c.e.potential);
    fmax = std::max(fmax, norm(c.e.conservative));
  }
  std::ostringstream s;
  s << open_svg(world.table);
  s << "<g id=\"potential\">";
  for (const auto& c : cells) {
    const double t = hi > lo ? (c.e.potential - lo) / (hi - lo) : 0.0;
    s << "<rect x=\"" << f.x(c.p.x - grid.step / 2) << "\" y=\"" << f.y(c.p.y + grid.step / 2) << "\" width=\""
      << f.len(grid.step) << "\" height=\"" << f.len(grid.step) << "\" fill=\"" << heat(t) << "\"/>";
  }
  s << "</g>\n<g id=\"force\" stroke=\"#fff\" stroke-width=\"1.2\">";
  const double stride = grid.step * 6.0, arrow = 0.025;
  for (const auto& c : cells) {
    const double gx = (c.p.x - L.valid_within.center.x) / stride, gy = (c.p.y - L.valid_within.center.y) / stride;
    if (std::abs(gx - std::round(gx)) > 1e-6 || std::abs(gy - std::round(gy)) > 1e-6 || fmax <= 0.0) continue;
    const Point2 tip = c.p + c.e.conservative * (arrow / fmax);
    s << "<line x1=\"" << f.x(c.p.x) << "\" y1=\"" << f.y(c.p.y) << "\" x2=\"" << f.x(tip.x) << "\" y2=\"" << f.y(tip.y)
      << "\"/>";
  }
  s << "</g>\n";
  objects_layer(s, f, world, "objects", false);
  targets_layer(s, f, world);
  s << "<g id=\"terms\">";
  for (const auto& t : L.terms) {
    if (t.kind != TermKind::attractive && t.kind != TermKind::repulsive) continue;
    s << "<circle data-kind=\"" << (t.kind == TermKind::attractive ? "attractive" : "repulsive") << "\" cx=\""
      << f.x(t.anchor.x) << "\" cy=\"" << f.y(t.anchor.y) << "\" r=\"5\" fill=\""
      << (t.kind == TermKind::attractive ? "#9467bd" : "#d62728") << "\"/>";
  }
  s << "</g>\n</svg>\n";
  return s.str();
}

}  // namespace imp::cli
