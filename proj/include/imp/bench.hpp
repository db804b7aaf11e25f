#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "imp/planner.hpp"
#include "imp/sim.hpp"
#include "imp/world.hpp"

namespace imp {

/// Raised when rejection sampling cannot place the requested scenario. The
/// message names the constraint that could not be met.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

inline constexpr std::array<int, 3> kObjectCountLevels{1, 3, 6};
inline constexpr std::array<double, 3> kFixedRatioLevels{0.0, 0.5, 1.0};
inline constexpr std::array<double, 3> kCoverageLevels{0.15, 0.35, 0.65};

struct ScenarioSpec {
  std::uint64_t seed = 0;
  int n_objects = 6;
  double fixed_ratio = 0.5;
  int n_targets = 1;  ///< 1..3
  Table table;
  double object_radius = 0.05;
  bool toppling = false;
};

struct GeneratorConfig {
  Range movable_K{400.0, 1500.0};
  Range movable_D{5.0, 25.0};
  Range movable_C{0.0, 1.0};
  Range fixed_K{2000.0, 5000.0};
  Range fixed_D{20.0, 50.0};
  Range fixed_C{0.0, 1.0};
  Range mass{0.1, 1.0};
  Range topple{3.0, 9.0};  ///< N
  double friction = 0.5;
  double robot_radius = 0.02;
  double robot_mass = 1.0;
  double r_p = 0.3;
  double r_g = 0.01;
  /// Width swept along the start -> targets polyline when measuring coverage.
  double corridor_width = 0.2;
  double coverage_tolerance = 0.15;  ///< relative
  double wall_margin = 0.05;         ///< start and target distance from the edges
  double min_target_spacing = 0.15;
  double object_clearance = 0.005;   ///< between object surfaces
  double start_clearance = 0.03;     ///< robot surface to object surface at start
  double target_clearance = 0.04;    ///< target center to object surface
  double path_bias = 0.6;            ///< share of objects dropped near the path
  double path_spread = 0.05;         ///< m, lateral std of path-biased drops
  int placement_budget = 20000;
};

/// Path-coverage level the generator realizes for a target count.
double coverage_level(int n_targets);

/// Deterministic from spec.seed. Throws GenerationError when the placement
/// budget runs out and std::invalid_argument for malformed specs.
WorldState generate_scenario(const ScenarioSpec& spec, const GeneratorConfig& cfg = {});

/// Same scenario with finite topple thresholds; nothing else changes.
ScenarioSpec toppling_variant(ScenarioSpec spec);

/// Occupied area fraction of the table.
double occupancy(const WorldState& world);

struct DifficultyFactors {
  int x1 = 1;        ///< object count level
  double x2 = 0.0;   ///< fixed ratio level
  double x3 = 0.15;  ///< path coverage level
};

struct DifficultyWeights {
  double w1 = 1.0, w2 = 1.0, w3 = 1.0;
};

inline constexpr double kDifficultyMin = 1.5;
inline constexpr double kDifficultyMax = 9.0;

/// Weighted sum of level ranks (1..3), mapped linearly onto
/// [kDifficultyMin, kDifficultyMax]. Throws std::invalid_argument for values
/// off the level grids or negative weights.
double difficulty_score(const DifficultyFactors& f, const DifficultyWeights& w = {});

/// Factors of a grid cell (coverage from the target count).
DifficultyFactors factors_of(const ScenarioSpec& spec);

/// Ground-truth reachability: every target lies in the start's component of
/// the free space left after deleting movable objects, on a grid of the given
/// cell size with the robot radius as inflation.
bool feasibility_upper_bound(const WorldState& world, double cell = 0.005);

// ---------------------------------------------------------------------------
// Fixtures

/// A wall of seven discs across the table with one movable "door" where the
/// straight start -> target line crosses it; the rest are fixed.
WorldState blocked_corridor(std::uint64_t seed, const GeneratorConfig& cfg = {});

/// One fixed object between the start and the target, slightly off-axis.
WorldState approach_fixture(std::uint64_t seed, const GeneratorConfig& cfg = {});

// ---------------------------------------------------------------------------
// Campaigns

/// Known planner names: imp, apf, sampling, bspline.
std::unique_ptr<Planner> make_planner(const std::string& name, const ImpConfig& imp = {},
                                      const SimConfig& sim = {});
bool is_planner_name(const std::string& name);

struct CampaignConfig {
  std::uint64_t master_seed = 1;
  int trials_per_cell = 100;
  std::vector<std::string> planners{"imp", "apf", "sampling", "bspline"};
  SimConfig sim;
  EpisodeLimits limits;
  GeneratorConfig generator;
  ImpConfig imp;
  DifficultyWeights weights;
  /// Also run every planner on the toppling variant of each world.
  bool with_toppling = false;
  int threads = 1;
  int generation_attempts = 20;
};

struct WilsonInterval {
  double lo = 0.0;
  double hi = 0.0;
  double half_width() const { return 0.5 * (hi - lo); }
};

/// 95% Wilson score interval for k successes out of n (n > 0).
WilsonInterval wilson_interval(int k, int n, double z = 1.959963984540054);

struct TrialRecord {
  std::uint64_t seed = 0;
  bool feasible = false;
  double occupancy = 0.0;
  double straight_line = 0.0;  ///< start to the last target
  TrialResult result;          ///< without trajectory
  std::optional<TrialResult> toppling;
};

struct AggregateStats {
  std::string planner;
  int trials = 0;
  int feasible = 0;
  int successes = 0;
  std::optional<int> toppling_successes;
  double R_m = 0.0;
  double R_s = 0.0;
  double gap = 0.0;
  std::optional<double> R_k;
  WilsonInterval ci_R_m;
  WilsonInterval ci_R_s;
  std::optional<WilsonInterval> ci_R_k;
  double path_cost_mean = 0.0;    ///< over successes; 0 when none
  double path_cost_median = 0.0;
  double peak_force_mean = 0.0;   ///< over executed trials
  int force_failures = 0;
  int timeouts = 0;
  int no_path = 0;
  int planner_faults = 0;
};

struct CellReport {
  ScenarioSpec spec;  ///< template; seed unused
  std::optional<double> difficulty;  ///< only for cells on the level grids
  double occupancy = 0.0;  ///< mean over trials
  std::vector<std::uint64_t> seeds;
  std::vector<AggregateStats> stats;  ///< in planner order
  /// trials[p][i]: planner p on seed i.
  std::vector<std::vector<TrialRecord>> trials;
};

struct CampaignReport {
  std::uint64_t master_seed = 0;
  int trials_per_cell = 0;
  std::vector<std::string> planners;
  std::vector<CellReport> cells;
};

using ProgressFn = std::function<void(std::size_t cell, std::size_t n_cells)>;

/// Runs every planner on identical seeded worlds per cell. Trial seeds are
/// derived from (master_seed, cell index, trial index); a world whose seed
/// fails generation is redrawn from a derived seed. Infeasible worlds count
/// toward R_s's denominator but are not executed.
CampaignReport run_campaign(const std::vector<ScenarioSpec>& grid, const CampaignConfig& cfg,
                            const ProgressFn& progress = {});

/// 27 cells: object count x fixed ratio x target count levels.
std::vector<ScenarioSpec> standard_grid();
/// 40 cells: 6..15 objects x fixed ratios {0.1, 0.2, 0.4, 0.8}, one target.
std::vector<ScenarioSpec> stress_grid();
CampaignReport stress_suite(std::uint64_t master_seed, CampaignConfig cfg = {}, const ProgressFn& progress = {});

AggregateStats aggregate(const std::string& planner, const std::vector<TrialRecord>& trials);

std::string report_json(const CampaignReport& report);
/// One row per cell and planner.
std::string report_csv(const CampaignReport& report);
/// Fixed-width summary for terminals.
std::string report_table(const CampaignReport& report);

}  // namespace imp
