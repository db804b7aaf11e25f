#include "imp/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>
#include <sstream>
#include <thread>

#include "imp/baselines.hpp"
#include "imp/rng.hpp"
#include "imp/scenario_io.hpp"

namespace imp {

namespace {

constexpr std::uint64_t kToppleStream = 0x746f70706c65ULL;
constexpr std::uint64_t kCorridorStream = 0x636f7272ULL;
constexpr std::uint64_t kApproachStream = 0x61707072ULL;

double draw(Rng& rng, const Range& r) { return round9(rng.uniform(r.lo, r.hi)); }

double path_length(const std::vector<Point2>& pts) {
  double L = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) L += distance(pts[i - 1], pts[i]);
  return L;
}

Point2 round_point(const Point2& p) { return {round9(p.x), round9(p.y)}; }

// Point at arclength s along the polyline plus its unit normal there.
std::pair<Point2, Vec2> along(const std::vector<Point2>& pts, double s) {
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double seg = distance(pts[i - 1], pts[i]);
    if (s <= seg || i + 1 == pts.size()) {
      const Vec2 u = seg > 0.0 ? (pts[i] - pts[i - 1]) * (1.0 / seg) : Vec2{1.0, 0.0};
      return {pts[i - 1] + u * std::min(s, seg), Vec2{-u.y, u.x}};
    }
    s -= seg;
  }
  return {pts.front(), Vec2{0.0, 1.0}};
}

void validate_spec(const ScenarioSpec& s) {
  if (s.n_objects < 0) throw std::invalid_argument("n_objects must be non-negative");
  if (!(s.fixed_ratio >= 0.0 && s.fixed_ratio <= 1.0)) throw std::invalid_argument("fixed_ratio must lie in [0, 1]");
  if (s.n_targets < 1 || s.n_targets > 3) throw std::invalid_argument("n_targets must be 1, 2 or 3");
  if (!(s.table.width > 0.0 && s.table.height > 0.0)) throw std::invalid_argument("table dimensions must be positive");
  if (!(s.object_radius > 0.0)) throw std::invalid_argument("object_radius must be positive");
}

ObjectBody make_object(ObjectId id, const Point2& c, double r, bool fixed, Rng& rng, const GeneratorConfig& cfg) {
  ObjectBody o;
  o.id = id;
  o.shape = {round_point(c), round9(r)};
  o.class_truth = fixed ? ObjectClass::fixed : ObjectClass::movable;
  if (fixed)
    o.theta_truth = {draw(rng, cfg.fixed_K), draw(rng, cfg.fixed_D), draw(rng, cfg.fixed_C)};
  else
    o.theta_truth = {draw(rng, cfg.movable_K), draw(rng, cfg.movable_D), draw(rng, cfg.movable_C)};
  o.mass = draw(rng, cfg.mass);
  o.friction_coeff = round9(cfg.friction);
  return o;
}

}  // namespace

double coverage_level(int n_targets) {
  if (n_targets < 1 || n_targets > 3) throw std::invalid_argument("coverage_level: n_targets must be 1, 2 or 3");
  return kCoverageLevels[static_cast<std::size_t>(n_targets - 1)];
}

WorldState generate_scenario(const ScenarioSpec& spec, const GeneratorConfig& cfg) {
  validate_spec(spec);
  Rng rng(spec.seed);
  const Table& table = spec.table;

  WorldState w;
  w.table = table;
  w.seed = spec.seed;
  w.r_p = round9(cfg.r_p);
  w.robot.radius = round9(cfg.robot_radius);
  w.robot.mass = round9(cfg.robot_mass);

  // Start and targets: a polyline whose swept corridor covers the requested
  // share of the table.
  const double want = coverage_level(spec.n_targets) * table.width * table.height / cfg.corridor_width;
  const double m = cfg.wall_margin;
  if (!(table.width > 2.0 * m && table.height > 2.0 * m)) throw GenerationError("table too small for the wall margin");
  std::vector<Point2> route;
  for (int attempt = 0;; ++attempt) {
    if (attempt >= cfg.placement_budget)
      throw GenerationError("placement budget exhausted: path coverage " + fmt9(coverage_level(spec.n_targets)) +
                            " not realizable on this table");
    route.clear();
    for (int i = 0; i <= spec.n_targets; ++i)
      route.push_back(round_point({rng.uniform(m, table.width - m), rng.uniform(m, table.height - m)}));
    bool spaced = true;
    for (std::size_t i = 1; i < route.size() && spaced; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (distance(route[i], route[j]) < cfg.min_target_spacing) spaced = false;
    if (spaced && std::abs(path_length(route) - want) <= cfg.coverage_tolerance * want) break;
  }
  w.robot.position = route.front();
  for (std::size_t i = 1; i < route.size(); ++i) w.targets.push_back({route[i], round9(cfg.r_g)});

  const double r = spec.object_radius;
  const double L = path_length(route);
  std::vector<Point2> centers;
  for (int i = 0; i < spec.n_objects; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < cfg.placement_budget && !placed; ++attempt) {
      Point2 c;
      if (rng.uniform() < cfg.path_bias) {
        const auto [p, n] = along(route, rng.uniform() * L);
        c = p + n * (cfg.path_spread * rng.normal());
      } else {
        c = {rng.uniform(r, table.width - r), rng.uniform(r, table.height - r)};
      }
      c = round_point(c);
      if (c.x < r || c.x > table.width - r || c.y < r || c.y > table.height - r) continue;
      if (distance(c, w.robot.position) < r + w.robot.radius + cfg.start_clearance) continue;
      bool ok = true;
      for (const auto& t : w.targets)
        if (distance(c, t.g) < r + cfg.target_clearance) ok = false;
      for (const auto& q : centers)
        if (distance(c, q) < 2.0 * r + cfg.object_clearance) ok = false;
      if (!ok) continue;
      centers.push_back(c);
      placed = true;
    }
    if (!placed)
      throw GenerationError("placement budget exhausted: object " + std::to_string(i) + " of " +
                            std::to_string(spec.n_objects) + " violates clearance");
  }

  // Exactly round(n * ratio) fixed objects, chosen by a seeded shuffle.
  const int n_fixed = static_cast<int>(std::lround(spec.n_objects * spec.fixed_ratio));
  std::vector<int> order(static_cast<std::size_t>(spec.n_objects));
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::vector<bool> fixed(order.size(), false);
  for (int k = 0; k < n_fixed; ++k) fixed[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = true;

  Rng topple_rng(mix_seed(spec.seed, kToppleStream));
  for (std::size_t i = 0; i < centers.size(); ++i) {
    ObjectBody o = make_object(static_cast<ObjectId>(i), centers[i], r, fixed[i], rng, cfg);
    if (spec.toppling) o.topple_threshold = draw(topple_rng, cfg.topple);
    w.objects.push_back(o);
  }
  if (auto err = validate(w)) throw GenerationError("generated world invalid: " + *err);
  return w;
}

ScenarioSpec toppling_variant(ScenarioSpec spec) {
  spec.toppling = true;
  return spec;
}

double occupancy(const WorldState& w) {
  double a = 0.0;
  for (const auto& o : w.objects) a += kPi * o.shape.radius * o.shape.radius;
  return a / (w.table.width * w.table.height);
}

namespace {

template <typename T, std::size_t N>
int rank_of(T v, const std::array<T, N>& grid, const char* what) {
  for (std::size_t i = 0; i < N; ++i)
    if (std::abs(static_cast<double>(v) - static_cast<double>(grid[i])) <= 1e-9) return static_cast<int>(i) + 1;
  throw std::invalid_argument(std::string("difficulty: ") + what + " is not a grid level");
}

}  // namespace

double difficulty_score(const DifficultyFactors& f, const DifficultyWeights& w) {
  if (w.w1 < 0.0 || w.w2 < 0.0 || w.w3 < 0.0) throw std::invalid_argument("difficulty: weights must be non-negative");
  const double total = w.w1 + w.w2 + w.w3;
  if (!(total > 0.0)) throw std::invalid_argument("difficulty: weights must not all be zero");
  const double s = w.w1 * rank_of(f.x1, kObjectCountLevels, "x1") + w.w2 * rank_of(f.x2, kFixedRatioLevels, "x2") +
                   w.w3 * rank_of(f.x3, kCoverageLevels, "x3");
  // s spans [total, 3 total].
  return kDifficultyMin + (kDifficultyMax - kDifficultyMin) * (s - total) / (2.0 * total);
}

DifficultyFactors factors_of(const ScenarioSpec& spec) {
  return {spec.n_objects, spec.fixed_ratio, coverage_level(spec.n_targets)};
}

bool feasibility_upper_bound(const WorldState& world, double cell) {
  if (!(cell > 0.0)) throw std::invalid_argument("feasibility_upper_bound: cell must be positive");
  const auto nx = static_cast<long>(std::floor(world.table.width / cell));
  const auto ny = static_cast<long>(std::floor(world.table.height / cell));
  if (nx <= 0 || ny <= 0) return false;
  const double rr = world.robot.radius;
  std::vector<Disc> fixed;
  for (const auto& o : world.objects)
    if (o.class_truth == ObjectClass::fixed) fixed.push_back({o.shape.center, o.shape.radius + rr});

  auto center = [&](long i, long j) { return Point2{(i + 0.5) * cell, (j + 0.5) * cell}; };
  std::vector<char> free(static_cast<std::size_t>(nx * ny), 0);
  for (long j = 0; j < ny; ++j)
    for (long i = 0; i < nx; ++i) {
      const Point2 p = center(i, j);
      bool ok = world.table.edge_clearance(p) >= rr;
      for (const auto& d : fixed)
        if (ok && distance(p, d.center) < d.radius) ok = false;
      free[static_cast<std::size_t>(j * nx + i)] = ok;
    }

  auto cell_of = [&](const Point2& p) {
    return std::pair{std::clamp(static_cast<long>(p.x / cell), 0L, nx - 1),
                     std::clamp(static_cast<long>(p.y / cell), 0L, ny - 1)};
  };
  std::vector<char> seen(free.size(), 0);
  std::deque<long> queue;
  {
    const auto [si, sj] = cell_of(world.robot.position);
    for (long dj = -1; dj <= 1; ++dj)
      for (long di = -1; di <= 1; ++di) {
        const long i = si + di, j = sj + dj;
        if (i < 0 || j < 0 || i >= nx || j >= ny) continue;
        const long k = j * nx + i;
        if (free[static_cast<std::size_t>(k)] && !seen[static_cast<std::size_t>(k)]) {
          seen[static_cast<std::size_t>(k)] = 1;
          queue.push_back(k);
        }
      }
  }
  while (!queue.empty()) {
    const long k = queue.front();
    queue.pop_front();
    const long i = k % nx, j = k / nx;
    const long nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
    for (const auto& n : nb) {
      if (n[0] < 0 || n[1] < 0 || n[0] >= nx || n[1] >= ny) continue;
      const auto q = static_cast<std::size_t>(n[1] * nx + n[0]);
      if (free[q] && !seen[q]) {
        seen[q] = 1;
        queue.push_back(static_cast<long>(q));
      }
    }
  }

  // Connectivity is symmetric, so visiting targets in order only needs each
  // one to share the start's component.
  for (const auto& t : world.targets) {
    const auto [gi, gj] = cell_of(t.g);
    bool reached = seen[static_cast<std::size_t>(gj * nx + gi)];
    const long span = static_cast<long>(std::ceil(t.r_g / cell));
    for (long j = gj - span; j <= gj + span && !reached; ++j)
      for (long i = gi - span; i <= gi + span && !reached; ++i) {
        if (i < 0 || j < 0 || i >= nx || j >= ny) continue;
        if (seen[static_cast<std::size_t>(j * nx + i)] && distance(center(i, j), t.g) <= t.r_g) reached = true;
      }
    if (!reached) return false;
  }
  return true;
}

WorldState blocked_corridor(std::uint64_t seed, const GeneratorConfig& cfg) {
  Rng rng(mix_seed(seed, kCorridorStream));
  WorldState w;
  w.seed = seed;
  w.r_p = round9(cfg.r_p);
  w.robot.radius = round9(cfg.robot_radius);
  w.robot.mass = round9(cfg.robot_mass);
  const double r = 0.05;
  const double pitch = (w.table.height - 2.0 * r) / 6.0;
  const double x_wall = rng.uniform(0.5, 0.7);
  const int door = 2 + static_cast<int>(rng.below(3));
  const double y_cross = r + door * pitch + rng.uniform(-0.02, 0.02);
  Point2 start, goal;
  for (;;) {
    start = {rng.uniform(0.1, 0.25), rng.uniform(0.2, 0.7)};
    const double x_t = rng.uniform(0.95, 1.1);
    const double y_t = y_cross + (y_cross - start.y) * (x_t - x_wall) / (x_wall - start.x);
    goal = {x_t, y_t};
    if (y_t >= 0.1 && y_t <= 0.8) break;
  }
  w.robot.position = round_point(start);
  w.targets = {{round_point(goal), round9(cfg.r_g)}};
  for (int k = 0; k < 7; ++k)
    w.objects.push_back(make_object(k, {x_wall, r + k * pitch}, r, k != door, rng, cfg));
  return w;
}

WorldState approach_fixture(std::uint64_t seed, const GeneratorConfig& cfg) {
  Rng rng(mix_seed(seed, kApproachStream));
  WorldState w;
  w.seed = seed;
  w.r_p = round9(cfg.r_p);
  w.robot.radius = round9(cfg.robot_radius);
  w.robot.mass = round9(cfg.robot_mass);
  const Point2 start{0.1, rng.uniform(0.35, 0.55)};
  const Point2 goal{1.05, start.y + rng.uniform(-0.05, 0.05)};
  const double x_o = rng.uniform(0.45, 0.65);
  const double t = (x_o - start.x) / (goal.x - start.x);
  const Point2 c{x_o, start.y + t * (goal.y - start.y) + rng.uniform(-0.015, 0.015)};
  w.robot.position = round_point(start);
  w.targets = {{round_point(goal), round9(cfg.r_g)}};
  w.objects.push_back(make_object(0, c, 0.05, true, rng, cfg));
  return w;
}

// ---------------------------------------------------------------------------

bool is_planner_name(const std::string& name) {
  return name == "imp" || name == "apf" || name == "sampling" || name == "bspline";
}

std::unique_ptr<Planner> make_planner(const std::string& name, const ImpConfig& imp, const SimConfig& sim) {
  if (name == "imp") return std::make_unique<ImpPlanner>(imp);
  if (name == "apf") return std::make_unique<ApfPlanner>();
  if (name == "sampling") return std::make_unique<SamplingPlanner>();
  if (name == "bspline") return std::make_unique<BsplinePlanner>(BsplineConfig{}, sim);
  throw std::invalid_argument("unknown planner: " + name);
}

WilsonInterval wilson_interval(int k, int n, double z) {
  if (n <= 0 || k < 0 || k > n) throw std::invalid_argument("wilson_interval: need 0 <= k <= n, n > 0");
  const double p = static_cast<double>(k) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

AggregateStats aggregate(const std::string& planner, const std::vector<TrialRecord>& trials) {
  AggregateStats s;
  s.planner = planner;
  s.trials = static_cast<int>(trials.size());
  std::vector<double> costs;
  double peak_sum = 0.0;
  int executed = 0, topple_ok = 0;
  bool toppling = false;
  for (const auto& t : trials) {
    if (t.feasible) ++s.feasible;
    if (t.result.success) {
      ++s.successes;
      costs.push_back(t.result.path_cost);
    }
    if (t.toppling) {
      toppling = true;
      if (t.toppling->success) ++topple_ok;
    }
    switch (t.result.failure_cause) {
      case FailureCause::force: ++s.force_failures; break;
      case FailureCause::timeout: ++s.timeouts; break;
      case FailureCause::no_path: ++s.no_path; break;
      case FailureCause::planner_fault: ++s.planner_faults; break;
      default: break;
    }
    if (t.feasible && t.result.failure_cause != FailureCause::infeasible) {
      ++executed;
      peak_sum += t.result.peak_force;
    }
  }
  if (s.trials == 0) return s;
  s.R_m = round9(static_cast<double>(s.successes) / s.trials);
  s.R_s = round9(static_cast<double>(s.feasible) / s.trials);
  s.gap = round9(static_cast<double>(s.feasible - s.successes) / s.trials);
  s.ci_R_m = wilson_interval(s.successes, s.trials);
  s.ci_R_s = wilson_interval(s.feasible, s.trials);
  if (toppling) {
    s.toppling_successes = topple_ok;
    s.R_k = round9(static_cast<double>(topple_ok) / s.trials);
    s.ci_R_k = wilson_interval(topple_ok, s.trials);
  }
  if (!costs.empty()) {
    s.path_cost_mean = round9(std::accumulate(costs.begin(), costs.end(), 0.0) / costs.size());
    std::sort(costs.begin(), costs.end());
    const std::size_t n = costs.size();
    s.path_cost_median = round9(n % 2 ? costs[n / 2] : 0.5 * (costs[n / 2 - 1] + costs[n / 2]));
  }
  if (executed > 0) s.peak_force_mean = round9(peak_sum / executed);
  return s;
}

namespace {

TrialResult run_one(const WorldState& world, const std::string& planner, const CampaignConfig& cfg,
                    std::uint64_t seed) {
  try {
    auto p = make_planner(planner, cfg.imp, cfg.sim);
    TrialResult r = run_episode(world, *p, cfg.sim, cfg.limits, seed);
    r.trajectory.clear();
    return r;
  } catch (const std::exception&) {
    TrialResult r;
    r.failure_cause = FailureCause::planner_fault;
    return r;
  }
}

TrialResult skipped() {
  TrialResult r;
  r.failure_cause = FailureCause::infeasible;
  return r;
}

struct Drawn {
  std::optional<WorldState> world;
  ScenarioSpec spec;
};

Drawn draw_world(ScenarioSpec spec, std::uint64_t seed, const CampaignConfig& cfg) {
  for (int a = 0; a < std::max(1, cfg.generation_attempts); ++a) {
    spec.seed = a == 0 ? seed : mix_seed(seed, static_cast<std::uint64_t>(a));
    try {
      return {generate_scenario(spec, cfg.generator), spec};
    } catch (const GenerationError&) {
    }
  }
  return {std::nullopt, spec};
}

}  // namespace

CampaignReport run_campaign(const std::vector<ScenarioSpec>& grid, const CampaignConfig& cfg,
                            const ProgressFn& progress) {
  if (cfg.trials_per_cell < 1) throw std::invalid_argument("run_campaign: trials_per_cell must be at least 1");
  for (const auto& p : cfg.planners)
    if (!is_planner_name(p)) throw std::invalid_argument("run_campaign: unknown planner " + p);

  CampaignReport report;
  report.master_seed = cfg.master_seed;
  report.trials_per_cell = cfg.trials_per_cell;
  report.planners = cfg.planners;
  const auto n = static_cast<std::size_t>(cfg.trials_per_cell);
  const std::size_t np = cfg.planners.size();

  for (std::size_t c = 0; c < grid.size(); ++c) {
    CellReport cell;
    cell.spec = grid[c];
    cell.spec.seed = 0;
    try {
      cell.difficulty = round9(difficulty_score(factors_of(grid[c]), cfg.weights));
    } catch (const std::invalid_argument&) {
    }
    cell.seeds.assign(n, 0);
    cell.trials.assign(np, std::vector<TrialRecord>(n));
    std::vector<double> occ(n, 0.0);

    auto work = [&](std::size_t i) {
      const std::uint64_t seed = mix_seed(mix_seed(cfg.master_seed, c), i);
      Drawn d = draw_world(grid[c], seed, cfg);
      cell.seeds[i] = d.spec.seed;
      TrialRecord base;
      base.seed = d.spec.seed;
      if (d.world) {
        // Feasibility is settled once per world and shared by every planner.
        base.feasible = feasibility_upper_bound(*d.world);
        base.occupancy = occupancy(*d.world);
        base.straight_line = round9(distance(d.world->robot.position, d.world->targets.back().g));
        occ[i] = base.occupancy;
      }
      std::optional<WorldState> toppled;
      if (cfg.with_toppling && d.world && base.feasible)
        toppled = generate_scenario(toppling_variant(d.spec), cfg.generator);
      for (std::size_t p = 0; p < np; ++p) {
        TrialRecord rec = base;
        if (!d.world) {
          rec.result.failure_cause = FailureCause::planner_fault;
        } else if (!base.feasible) {
          rec.result = skipped();
          if (cfg.with_toppling) rec.toppling = skipped();
        } else {
          rec.result = run_one(*d.world, cfg.planners[p], cfg, d.spec.seed);
          if (toppled) rec.toppling = run_one(*toppled, cfg.planners[p], cfg, d.spec.seed);
        }
        cell.trials[p][i] = std::move(rec);
      }
    };

    const int threads = std::max(1, cfg.threads);
    if (threads == 1) {
      for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < n; i = next++) work(i);
        });
      for (auto& th : pool) th.join();
    }

    cell.occupancy = round9(std::accumulate(occ.begin(), occ.end(), 0.0) / static_cast<double>(n));
    for (std::size_t p = 0; p < np; ++p) cell.stats.push_back(aggregate(cfg.planners[p], cell.trials[p]));
    report.cells.push_back(std::move(cell));
    if (progress) progress(c + 1, grid.size());
  }
  return report;
}

std::vector<ScenarioSpec> standard_grid() {
  std::vector<ScenarioSpec> g;
  for (int n : kObjectCountLevels)
    for (double f : kFixedRatioLevels)
      for (int t = 1; t <= 3; ++t) {
        ScenarioSpec s;
        s.n_objects = n;
        s.fixed_ratio = f;
        s.n_targets = t;
        g.push_back(s);
      }
  return g;
}

std::vector<ScenarioSpec> stress_grid() {
  std::vector<ScenarioSpec> g;
  for (int n = 6; n <= 15; ++n)
    for (double f : {0.1, 0.2, 0.4, 0.8}) {
      ScenarioSpec s;
      s.n_objects = n;
      s.fixed_ratio = f;
      s.n_targets = 1;
      g.push_back(s);
    }
  return g;
}

CampaignReport stress_suite(std::uint64_t master_seed, CampaignConfig cfg, const ProgressFn& progress) {
  cfg.master_seed = master_seed;
  return run_campaign(stress_grid(), cfg, progress);
}

// ---------------------------------------------------------------------------
// Reports

namespace {

using ojson = nlohmann::ordered_json;

ojson interval_json(const WilsonInterval& w) { return ojson{{"lo", round9(w.lo)}, {"hi", round9(w.hi)}}; }

ojson result_json(const TrialResult& r) {
  return ojson{{"success", r.success},
               {"cause", std::string(to_string(r.failure_cause))},
               {"path_cost", round9(r.path_cost)},
               {"peak_force", round9(r.peak_force)},
               {"duration", round9(r.duration)}};
}

// Occupancy quoted for the object-count levels; 5 cm discs on the default
// table cover less, so both numbers are reported.
std::optional<double> nominal_occupancy(int n) {
  switch (n) {
    case 1: return 0.029;
    case 3: return 0.087;
    case 6: return 0.174;
    default: return std::nullopt;
  }
}

}  // namespace

std::string report_json(const CampaignReport& rep) {
  ojson doc;
  doc["master_seed"] = rep.master_seed;
  doc["trials_per_cell"] = rep.trials_per_cell;
  doc["planners"] = rep.planners;
  ojson cells = ojson::array();
  for (std::size_t c = 0; c < rep.cells.size(); ++c) {
    const auto& cell = rep.cells[c];
    ojson jc;
    jc["cell"] = c;
    jc["n_objects"] = cell.spec.n_objects;
    jc["fixed_ratio"] = round9(cell.spec.fixed_ratio);
    jc["n_targets"] = cell.spec.n_targets;
    jc["coverage"] = round9(coverage_level(cell.spec.n_targets));
    jc["difficulty"] = cell.difficulty ? ojson(*cell.difficulty) : ojson(nullptr);
    jc["occupancy"] = cell.occupancy;
    if (auto nom = nominal_occupancy(cell.spec.n_objects)) jc["occupancy_nominal"] = *nom;
    jc["seeds"] = cell.seeds;
    ojson stats = ojson::array();
    for (std::size_t p = 0; p < cell.stats.size(); ++p) {
      const auto& s = cell.stats[p];
      ojson js{{"planner", s.planner},     {"trials", s.trials},       {"feasible", s.feasible},
               {"successes", s.successes}, {"R_m", s.R_m},             {"R_s", s.R_s},
               {"gap", s.gap},             {"ci_R_m", interval_json(s.ci_R_m)},
               {"ci_R_s", interval_json(s.ci_R_s)}};
      if (s.R_k) {
        js["R_k"] = *s.R_k;
        js["ci_R_k"] = interval_json(*s.ci_R_k);
      }
      js["path_cost_mean"] = s.path_cost_mean;
      js["path_cost_median"] = s.path_cost_median;
      js["peak_force_mean"] = s.peak_force_mean;
      js["failures"] = ojson{{"force", s.force_failures},
                             {"timeout", s.timeouts},
                             {"no_path", s.no_path},
                             {"planner_fault", s.planner_faults}};
      ojson trials = ojson::array();
      for (const auto& t : cell.trials[p]) {
        ojson jt = result_json(t.result);
        jt["seed"] = t.seed;
        jt["feasible"] = t.feasible;
        if (t.toppling) jt["toppling"] = result_json(*t.toppling);
        trials.push_back(jt);
      }
      js["trials"] = trials;
      stats.push_back(js);
    }
    jc["stats"] = stats;
    cells.push_back(jc);
  }
  doc["cells"] = cells;
  return doc.dump(1) + "\n";
}

std::string report_csv(const CampaignReport& rep) {
  std::ostringstream os;
  os << "cell,n_objects,fixed_ratio,n_targets,difficulty,occupancy,planner,trials,feasible,successes,"
        "R_m,R_s,gap,R_k,ci_R_m_lo,ci_R_m_hi,path_cost_mean,path_cost_median,peak_force_mean\n";
  for (std::size_t c = 0; c < rep.cells.size(); ++c) {
    const auto& cell = rep.cells[c];
    for (const auto& s : cell.stats) {
      os << c << ',' << cell.spec.n_objects << ',' << fmt9(cell.spec.fixed_ratio) << ',' << cell.spec.n_targets << ','
         << (cell.difficulty ? fmt9(*cell.difficulty) : std::string()) << ',' << fmt9(cell.occupancy) << ',' << s.planner << ',' << s.trials << ','
         << s.feasible << ',' << s.successes << ',' << fmt9(s.R_m) << ',' << fmt9(s.R_s) << ',' << fmt9(s.gap) << ','
         << (s.R_k ? fmt9(*s.R_k) : std::string()) << ',' << fmt9(s.ci_R_m.lo) << ',' << fmt9(s.ci_R_m.hi) << ','
         << fmt9(s.path_cost_mean) << ',' << fmt9(s.path_cost_median) << ',' << fmt9(s.peak_force_mean) << '\n';
    }
  }
  return os.str();
}

std::string report_table(const CampaignReport& rep) {
  std::ostringstream os;
  char line[200];
  std::snprintf(line, sizeof line, "%4s %3s %5s %2s %6s %-9s %6s %6s %6s %6s %8s\n", "cell", "n", "fixed", "g",
                "diff", "planner", "R_m", "R_s", "gap", "R_k", "cost");
  os << line;
  for (std::size_t c = 0; c < rep.cells.size(); ++c) {
    const auto& cell = rep.cells[c];
    for (const auto& s : cell.stats) {
      std::snprintf(line, sizeof line, "%4zu %3d %5.2f %2d %6s %-9s %6.3f %6.3f %6.3f %6s %8.4f\n", c,
                    cell.spec.n_objects, cell.spec.fixed_ratio, cell.spec.n_targets,
                    cell.difficulty ? fmt9(*cell.difficulty).substr(0, 6).c_str() : "-", s.planner.c_str(), s.R_m, s.R_s, s.gap, s.R_k ? fmt9(*s.R_k).c_str() : "-", s.path_cost_mean);
      os << line;
    }
  }
  return os.str();
}

}  // namespace imp
