// imp: scenario generation, single runs with exports, campaigns, and
// offline estimation checks.
//
// Exit codes: 0 success, 1 task failure, 2 usage error, 3 I/O or parse error.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "imp/bench.hpp"
#include "imp/estimator.hpp"
#include "imp/planner.hpp"
#include "imp/scenario_io.hpp"
#include "imp/sim.hpp"
#include "render.hpp"

namespace fs = std::filesystem;
using namespace imp;

namespace {

constexpr int kOk = 0;
constexpr int kTaskFailure = 1;
constexpr int kUsage = 2;
constexpr int kIo = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("IMP_OUT_DIR"); env && *env) return env;
  return ".";
}

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

struct GenerationArgs {
  std::uint64_t seed = 0;
  int objects = 6;
  double fixed_ratio = 0.5;
  int targets = 1;
  bool toppling = false;
  std::string fixture;  ///< corridor | approach
};

void add_generation_flags(CLI::App* cmd, GenerationArgs& g) {
  cmd->add_option("--seed", g.seed, "Scenario seed");
  cmd->add_option("--objects", g.objects, "Object count")->check(CLI::NonNegativeNumber);
  cmd->add_option("--fixed-ratio", g.fixed_ratio, "Share of fixed objects")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--targets", g.targets, "Target count")->check(CLI::Range(1, 3));
  cmd->add_flag("--toppling", g.toppling, "Finite topple thresholds");
  cmd->add_option("--fixture", g.fixture, "Named fixture instead of a random scenario")
      ->check(CLI::IsMember({"corridor", "approach"}));
}

WorldState generate(const GenerationArgs& g) {
  if (g.fixture == "corridor") return blocked_corridor(g.seed);
  if (g.fixture == "approach") return approach_fixture(g.seed);
  ScenarioSpec spec;
  spec.seed = g.seed;
  spec.n_objects = g.objects;
  spec.fixed_ratio = g.fixed_ratio;
  spec.n_targets = g.targets;
  if (g.toppling) spec = toppling_variant(spec);
  return generate_scenario(spec);
}

// ---------------------------------------------------------------------------
// generate

struct GenerateCmd {
  GenerationArgs gen;
  std::string out;
  std::string out_dir;
};

int cmd_generate(const GenerateCmd& c) {
  WorldState w;
  try {
    w = generate(c.gen);
  } catch (const GenerationError& e) {
    std::cerr << "generation failed: " << e.what() << '\n';
    return kTaskFailure;
  }
  fs::path path = c.out.empty() ? output_dir(c.out_dir) / ("scenario_" + std::to_string(c.gen.seed) + ".json") : fs::path(c.out);
  write_text(path, scenario_to_json(w));
  std::cout << "scenario " << path.string() << '\n';
  std::cout << "occupancy " << fmt9(occupancy(w)) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// run

/// Forwards to the wrapped planner and keeps a copy of the I-MP landscape
/// from the requested tick (or the last one before the episode ended).
class FieldCapture final : public Planner {
 public:
  FieldCapture(Planner& inner, long at_tick) : inner_(inner), at_(at_tick) {}
  std::string_view name() const override { return inner_.name(); }
  void reset(const Workspace& ws) override {
    inner_.reset(ws);
    tick_ = 0;
    captured_.reset();
    done_ = false;
  }
  PlannerCommand tick(const SensorFrame& frame) override {
    PlannerCommand cmd = inner_.tick(frame);
    if (!done_)
      if (const auto* imp = dynamic_cast<const ImpPlanner*>(&inner_)) {
        captured_ = imp->landscape();
        done_ = tick_ >= at_;
      }
    ++tick_;
    return cmd;
  }
  const std::optional<EnergyLandscape>& captured() const { return captured_; }

 private:
  Planner& inner_;
  long at_;
  long tick_ = 0;
  bool done_ = false;
  std::optional<EnergyLandscape> captured_;
};

struct RunCmd {
  std::string scenario;
  GenerationArgs gen;
  std::string planner = "imp";
  std::vector<std::string> ablate;
  double k_p = FieldConfig{}.k_p;
  double k_0 = FieldConfig{}.k_0;
  double D_o = FieldConfig{}.D_o;
  double v_max = FieldConfig{}.v_max;
  double max_time = EpisodeLimits{}.max_time;
  double noise = 0.0;
  std::uint64_t run_seed = 0;
  std::string out_dir;
  std::string name = "run";
  bool no_csv = false;
  bool svg = false;
  bool field_dump = false;
  long field_tick = 0;
};

int cmd_run(const RunCmd& c) {
  WorldState world;
  if (!c.scenario.empty()) {
    world = read_scenario(c.scenario);
  } else {
    try {
      world = generate(c.gen);
    } catch (const GenerationError& e) {
      std::cerr << "generation failed: " << e.what() << '\n';
      return kTaskFailure;
    }
  }

  SimConfig sim;
  sim.actuation_noise_std = c.noise;
  for (const auto& a : c.ablate) {
    if (a == "proximity") sim.proximity_enabled = false;
    if (a == "force") sim.force_enabled = false;
  }
  ImpConfig imp;
  imp.field.k_p = c.k_p;
  imp.field.k_0 = c.k_0;
  imp.field.D_o = c.D_o;
  imp.field.v_max = c.v_max;
  EpisodeLimits limits;
  limits.max_time = c.max_time;

  auto planner = make_planner(c.planner, imp, sim);
  FieldCapture capture(*planner, c.field_tick);
  WorldState final_world;
  EpisodeOptions opts;
  opts.record_trajectory = true;
  opts.final_world = &final_world;
  const TrialResult r = run_episode(world, capture, sim, limits, c.run_seed, opts);

  std::cout << "planner " << c.planner << '\n'
            << "success " << (r.success ? "true" : "false") << '\n'
            << "failure_cause " << to_string(r.failure_cause) << '\n'
            << "targets_reached " << r.targets_reached << '/' << world.targets.size() << '\n'
            << "duration " << fmt9(r.duration) << '\n'
            << "path_cost " << fmt9(r.path_cost) << '\n'
            << "peak_force " << fmt9(r.peak_force) << '\n'
            << "first_contact_force " << fmt9(r.first_contact_force) << '\n';

  const fs::path dir = output_dir(c.out_dir);
  if (!c.no_csv) {
    write_text(dir / (c.name + "_trajectory.csv"), trajectory_csv(r.trajectory));
    std::cout << "trajectory " << (dir / (c.name + "_trajectory.csv")).string() << '\n';
  }
  if (c.svg) {
    write_text(dir / (c.name + "_overview.svg"), cli::overview_svg(world, final_world, r.trajectory));
    std::cout << "overview " << (dir / (c.name + "_overview.svg")).string() << '\n';
  }
  if (c.field_dump) {
    if (!capture.captured()) {
      std::cerr << "field dump needs --planner imp and at least one tick\n";
    } else {
      write_text(dir / (c.name + "_field.csv"), cli::field_csv(*capture.captured()));
      write_text(dir / (c.name + "_field.svg"), cli::field_svg(world, *capture.captured()));
      std::cout << "field " << (dir / (c.name + "_field.csv")).string() << '\n';
    }
  }
  return r.success ? kOk : kTaskFailure;
}

// ---------------------------------------------------------------------------
// bench

struct BenchCmd {
  bool stress = false;
  int trials = 100;
  std::uint64_t master_seed = 1;
  std::vector<std::string> planners{"imp", "apf", "sampling", "bspline"};
  bool toppling = false;
  int threads = 1;
  std::string out_dir;
  std::string name = "report";
  std::optional<int> objects;
  std::optional<double> fixed_ratio;
  std::optional<int> targets;
  bool quiet = false;
};

int cmd_bench(const BenchCmd& c) {
  for (const auto& p : c.planners)
    if (!is_planner_name(p)) throw UsageError("unknown planner " + p);
  CampaignConfig cfg;
  cfg.master_seed = c.master_seed;
  cfg.trials_per_cell = c.trials;
  cfg.planners = c.planners;
  cfg.with_toppling = c.toppling;
  cfg.threads = c.threads;

  std::vector<ScenarioSpec> grid;
  const bool single = c.objects || c.fixed_ratio || c.targets;
  if (c.stress && single) throw UsageError("--stress defines its own grid; drop the cell flags");
  if (c.stress) {
    grid = stress_grid();
  } else if (single) {
    ScenarioSpec s;
    s.n_objects = c.objects.value_or(s.n_objects);
    s.fixed_ratio = c.fixed_ratio.value_or(s.fixed_ratio);
    s.n_targets = c.targets.value_or(s.n_targets);
    grid.push_back(s);
  } else {
    grid = standard_grid();
  }

  const ProgressFn progress = [&](std::size_t cell, std::size_t n) {
    if (!c.quiet) std::cerr << "cell " << cell + 1 << '/' << n << '\n';
  };
  const CampaignReport report = run_campaign(grid, cfg, progress);

  const fs::path dir = output_dir(c.out_dir);
  write_text(dir / (c.name + ".json"), report_json(report));
  write_text(dir / (c.name + ".csv"), report_csv(report));
  std::cout << report_table(report);
  std::cout << "report " << (dir / (c.name + ".json")).string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// estimate

std::vector<PerceptionSample> read_samples(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<PerceptionSample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.find_first_not_of("0123456789+-.eE, \t") != std::string::npos) {
      if (line != "dx,v,F") throw IoError("line 1: expected header dx,v,F");
      continue;
    }
    double vals[3];
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k) {
      const std::size_t end = k < 2 ? line.find(',', pos) : line.size();
      if (end == std::string::npos) throw IoError("line " + std::to_string(lineno) + ": expected 3 columns");
      std::string cell = line.substr(pos, end - pos);
      const auto first = cell.find_first_not_of(" \t");
      const auto last = cell.find_last_not_of(" \t");
      cell = first == std::string::npos ? "" : cell.substr(first, last - first + 1);
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), vals[k]);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(vals[k]))
        throw IoError("line " + std::to_string(lineno) + ", column " + std::to_string(k + 1) + ": not a finite number");
      pos = end + 1;
    }
    if (pos <= line.size() && line.find(',', pos) != std::string::npos)
      throw IoError("line " + std::to_string(lineno) + ": expected 3 columns");
    out.push_back({vals[0], vals[1], vals[2]});
  }
  if (out.empty()) throw IoError(path + ": no samples");
  return out;
}

struct EstimateCmd {
  std::string csv;
  std::size_t min_samples = ConfidenceConfig{}.min_samples;
  double condition_ceiling = ConfidenceConfig{}.condition_ceiling;
  double residual_bound = ConfidenceConfig{}.residual_bound;
  std::string out;
};

int cmd_estimate(const EstimateCmd& c) {
  const auto samples = read_samples(c.csv);
  RegressorBuffer buf(samples.size());
  for (const auto& s : samples) buf.accumulate(s);
  ConfidenceConfig cc;
  cc.min_samples = c.min_samples;
  cc.condition_ceiling = c.condition_ceiling;
  cc.residual_bound = c.residual_bound;

  nlohmann::ordered_json doc;
  int code = kOk;
  try {
    const auto [theta, report] = estimate_theta(buf, cc);
    doc["theta"] = {{"K", round9(theta.K)}, {"D", round9(theta.D)}, {"C", round9(theta.C)}};
    doc["residual_rms"] = round9(report.residual_rms);
    doc["condition_estimate"] = round9(report.condition_estimate);
    doc["sample_count"] = report.sample_count;
    doc["confident"] = report.confident;
  } catch (const RankDeficientError& e) {
    doc["error"] = e.what();
    doc["condition_estimate"] = std::isfinite(e.condition()) ? nlohmann::ordered_json(round9(e.condition())) : nullptr;
    doc["sample_count"] = buf.size();
    code = kTaskFailure;
  }
  const std::string text = doc.dump(2) + "\n";
  std::cout << text;
  if (!c.out.empty()) write_text(c.out, text);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive motion planning artifact"};
  app.require_subcommand(1);

  GenerateCmd gen;
  auto* g = app.add_subcommand("generate", "Write a scenario file");
  add_generation_flags(g, gen.gen);
  g->add_option("-o,--out", gen.out, "Scenario path (default <out-dir>/scenario_<seed>.json)");
  g->add_option("--out-dir", gen.out_dir, "Output directory (default $IMP_OUT_DIR or .)");

  RunCmd run;
  auto* r = app.add_subcommand("run", "Simulate one trial");
  r->add_option("--scenario", run.scenario, "Scenario file");
  add_generation_flags(r, run.gen);
  r->add_option("--planner", run.planner, "Planner")->check(CLI::IsMember({"imp", "apf", "sampling", "bspline"}));
  r->add_option("--ablate", run.ablate, "Disable a sensor (repeatable)")->check(CLI::IsMember({"proximity", "force"}));
  r->add_option("--k-p", run.k_p, "Attractive stiffness, N/m")->check(CLI::PositiveNumber);
  r->add_option("--k-0", run.k_0, "Repulsive stiffness, N/m")->check(CLI::PositiveNumber);
  r->add_option("--d-o", run.D_o, "Free-space viscosity, N s/m")->check(CLI::PositiveNumber);
  r->add_option("--v-max", run.v_max, "Cruise speed cap, m/s")->check(CLI::PositiveNumber);
  r->add_option("--max-time", run.max_time, "Time limit, s")->check(CLI::PositiveNumber);
  r->add_option("--noise", run.noise, "Actuation noise std, N")->check(CLI::NonNegativeNumber);
  r->add_option("--run-seed", run.run_seed, "Episode seed (noise and planner sampling)");
  r->add_option("--out-dir", run.out_dir, "Output directory (default $IMP_OUT_DIR or .)");
  r->add_option("--name", run.name, "Output file prefix");
  r->add_flag("--no-csv", run.no_csv, "Skip the trajectory CSV");
  r->add_flag("--svg", run.svg, "Write an SVG overview");
  r->add_flag("--field-dump", run.field_dump, "Write the landscape of one tick as CSV and SVG");
  r->add_option("--field-tick", run.field_tick, "Tick for --field-dump")->check(CLI::NonNegativeNumber);

  BenchCmd bench;
  auto* b = app.add_subcommand("bench", "Run a campaign");
  b->add_flag("--stress", bench.stress, "Stress grid: 6..15 objects x fixed ratios 0.1/0.2/0.4/0.8");
  b->add_option("--trials", bench.trials, "Trials per cell")->check(CLI::PositiveNumber);
  b->add_option("--master-seed", bench.master_seed, "Campaign master seed");
  b->add_option("--planners", bench.planners, "Planners")->delimiter(',');
  b->add_flag("--toppling", bench.toppling, "Also run the toppling variant");
  b->add_option("--threads", bench.threads, "Worker threads")->check(CLI::PositiveNumber);
  b->add_option("--out-dir", bench.out_dir, "Output directory (default $IMP_OUT_DIR or .)");
  b->add_option("--name", bench.name, "Report file stem");
  b->add_option("--objects", bench.objects, "Single cell: object count")->check(CLI::NonNegativeNumber);
  b->add_option("--fixed-ratio", bench.fixed_ratio, "Single cell: fixed ratio")->check(CLI::Range(0.0, 1.0));
  b->add_option("--targets", bench.targets, "Single cell: target count")->check(CLI::Range(1, 3));
  b->add_flag("-q,--quiet", bench.quiet, "No progress lines");

  EstimateCmd est;
  auto* e = app.add_subcommand("estimate", "Fit theta to a dx,v,F CSV");
  e->add_option("csv", est.csv, "Samples")->required();
  e->add_option("--min-samples", est.min_samples, "Confidence: least sample count");
  e->add_option("--condition-ceiling", est.condition_ceiling, "Confidence: largest condition number");
  e->add_option("--residual-bound", est.residual_bound, "Confidence: largest residual RMS, N");
  e->add_option("-o,--out", est.out, "Also write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kUsage;
  }

  try {
    if (g->parsed()) return cmd_generate(gen);
    if (r->parsed()) {
      bool gen_used = false;
      for (const char* f : {"--seed", "--objects", "--fixed-ratio", "--targets", "--toppling", "--fixture"})
        gen_used = gen_used || r->count(f) > 0;
      if (run.scenario.empty() && !gen_used) throw UsageError("give --scenario or generation flags");
      if (!run.scenario.empty() && gen_used) throw UsageError("give either --scenario or generation flags, not both");
      return cmd_run(run);
    }
    if (b->parsed()) return cmd_bench(bench);
    if (e->parsed()) return cmd_estimate(est);
  } catch (const UsageError& ex) {
    std::cerr << "usage error: " << ex.what() << '\n';
    return kUsage;
  } catch (const ScenarioError& ex) {
    std::cerr << "scenario error: " << ex.what() << '\n';
    return kIo;
  } catch (const IoError& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "invalid argument: " << ex.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
