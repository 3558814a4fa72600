#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "evmap/errors.hpp"
#include "evmap/pipeline.hpp"
#include "evmap/planner.hpp"
#include "evmap/pnm.hpp"
#include "evmap/replay.hpp"
#include "evmap/scenario.hpp"
#include "evmap/stats.hpp"

namespace evmap::cli {
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kSweepWorlds = {"urban_1", "urban_2", "urban_3", "highway_1", "highway_2"};

struct Options {
  std::string scenario;
  std::string out{"."};
  bool conventional{false};
  bool render{false};
  std::optional<std::string> error_kind;
  std::optional<double> error_mag;
  std::optional<std::uint64_t> seed;
};

struct Loaded {
  fs::path path;
  std::string hash;
  Scenario sc;
};

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_file(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  return f;
}

Loaded load(const std::string& arg, const Options& o) {
  if (arg.empty()) throw ConfigError("no scenario given");
  const fs::path path = resolve_scenario(arg, bundled_scenario_dir());
  std::ifstream in(path, std::ios::binary);
  if (!in || fs::is_directory(path)) throw ConfigError("scenario file '" + path.string() + "' not found");
  std::ostringstream buf;
  buf << in.rdbuf();
  Loaded l{path, content_hash(buf.str()), parse_scenario(buf.str(), path.string())};
  if (o.error_kind) l.sc.error.kind = parse_error_kind(*o.error_kind);
  if (o.error_mag) l.sc.error.magnitude = *o.error_mag;
  if (o.error_kind && *o.error_kind == "none") l.sc.error.magnitude = 0;
  if (o.seed) l.sc.seed = *o.seed;
  l.sc.validate();
  return l;
}

fs::path prepare_out(const Options& o) {
  const fs::path dir = o.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw ConfigError("output directory '" + dir.string() + "' is not writable");
  return dir;
}

void write_parameters(std::ostream& m, const Scenario& sc) {
  const GridSpec& g = sc.grid;
  m << "scenario_name = " << sc.name << "\n"
    << "grid.resolution = " << exact(g.resolution) << "\n"
    << "grid.size = " << g.width << " " << g.height << "\n"
    << "grid.origin = " << exact(g.origin.x()) << " " << exact(g.origin.y()) << "\n"
    << "vehicle.pose = " << exact(sc.vehicle.x) << " " << exact(sc.vehicle.y) << " " << exact(sc.vehicle.theta) << "\n";
  if (sc.goal) m << "vehicle.goal = " << exact(sc.goal->x) << " " << exact(sc.goal->y) << " " << exact(sc.goal->theta) << "\n";
  for (std::size_t i = 0; i < sc.sensors.size(); ++i) {
    const auto& s = sc.sensors[i];
    m << "sensor" << i << ".mount = " << exact(s.mount.x) << " " << exact(s.mount.y) << " " << exact(s.mount.theta) << "\n"
      << "sensor" << i << ".channels = " << s.channels << "\n"
      << "sensor" << i << ".pps = " << exact(s.points_per_second) << "\n"
      << "sensor" << i << ".rotation_rate = " << exact(s.rotation_rate) << "\n"
      << "sensor" << i << ".beams_per_revolution = " << s.beams_per_revolution() << "\n"
      << "sensor" << i << ".range = " << exact(s.min_range) << " " << exact(s.max_range) << "\n"
      << "sensor" << i << ".noise_std = " << exact(s.range_noise_std) << "\n";
  }
  m << "error.kind = " << to_string(sc.error.kind) << "\n"
    << "error.magnitude = " << exact(sc.error.magnitude) << "\n"
    << "error.sensor = " << sc.error.target_sensor << "\n"
    << "error.direction_deg = " << exact(sc.error.direction_deg) << "\n"
    << "model.lambda_occ = " << exact(sc.model.lambda_occ) << "\n"
    << "model.lambda_free = " << exact(sc.model.lambda_free) << "\n"
    << "model.prior_weight = " << exact(sc.model.prior_weight) << "\n"
    << "model.base_rate = " << exact(sc.base_rate) << "\n"
    << "classify.p_u = " << exact(sc.classify.p_u) << "\n"
    << "classify.p_f = " << exact(sc.classify.p_f) << "\n"
    << "classify.p_c = " << exact(sc.classify.p_c) << "\n"
    << "assess.d_max = " << exact(sc.assess.d_max) << "\n"
    << "assess.alpha_max = " << exact(sc.assess.alpha_max) << "\n"
    << "assess.dilation_radius = " << exact(sc.dilation_radius) << "\n"
    << "assess.proceed_permitted = " << (sc.proceed_permitted ? "true" : "false") << "\n"
    << "planner.c_c = " << exact(sc.planner.c_c) << "\n"
    << "planner.d_c = " << exact(sc.planner.d_c) << "\n"
    << "planner.turning_radius = " << exact(sc.planner.turning_radius) << "\n"
    << "planner.step_length = " << exact(sc.planner.step_length) << "\n"
    << "planner.heading_bins = " << sc.planner.heading_bins << "\n"
    << "planner.base_cost = " << exact(sc.planner.base_cost) << "\n"
    << "planner.goal_tolerance = " << exact(sc.planner.goal_tolerance) << "\n"
    << "planner.goal_heading_tolerance = " << exact(sc.planner.goal_heading_tolerance) << "\n"
    << "planner.shift_radius = " << exact(sc.planner.shift_radius) << "\n"
    << "replay.advance = " << exact(sc.replay.advance) << "\n"
    << "replay.max_steps = " << sc.replay.max_steps << "\n"
    << "baseline.p_free = " << exact(sc.bayes_p_free) << "\n"
    << "baseline.p_occupied = " << exact(sc.bayes_p_occupied) << "\n"
    << "seed = " << sc.seed << "\n";
}

void write_manifest(const fs::path& dir, const std::string& command, const std::vector<const Loaded*>& runs,
                    const Options& o) {
  auto m = open_file(dir / "manifest.txt");
  m << "evmap_version = " << EVMAP_VERSION << "\n"
    << "command = " << command << "\n"
    << "pipeline = " << (o.conventional ? "conventional" : "evidential") << "\n";
  for (const Loaded* l : runs) {
    m << "\n[run]\nscenario_path = " << l->path.string() << "\nscenario_hash = " << l->hash << "\n";
    write_parameters(m, l->sc);
  }
}

const char* kScoreHeader = "scenario_id,error_kind,error_magnitude,alpha,n_conflict_weighted,n_occupied_weighted,action\n";

std::string score_line(const SweepRow& r) {
  return r.scenario_id + "," + std::string(to_string(r.kind)) + "," + num(r.magnitude) + "," +
         (r.score.alpha ? num(*r.score.alpha, 9) : std::string("undefined")) + "," + num(r.score.n_conflict) + "," +
         num(r.score.n_occupied) + "," + std::string(to_string(r.action)) + "\n";
}

void write_path_csv(const fs::path& p, const Path& path) {
  auto f = open_file(p);
  f << "idx,x_m,y_m,theta_rad,conflict_flag,cumulative_cost\n";
  for (std::size_t i = 0; i < path.poses.size(); ++i) {
    const Pose& q = path.poses[i];
    f << i << "," << num(q.x) << "," << num(q.y) << "," << num(q.theta) << ","
      << (path.conflict_flags[i] == PoseFlag::Conflict ? 1 : 0) << "," << num(path.cumulative_cost[i]) << "\n";
  }
}

Pose require_goal(const Loaded& l) {
  if (!l.sc.goal) throw ConfigError("scenario '" + l.path.string() + "' defines no goal");
  return *l.sc.goal;
}

int cmd_map(const Options& o, std::ostream& out) {
  const Loaded l = load(o.scenario, o);
  const fs::path dir = prepare_out(o);
  const Scene scene = build_scene(l.sc);
  const GridSpec& spec = l.sc.grid;
  for (std::size_t i = 0; i < scene.per_sensor.size(); ++i) {
    const std::string name = "sensor" + std::to_string(i) + "_probability";
    write_channel_pgm(dir / (name + ".pgm"), scene.per_sensor[i].projected_probability(), spec, name);
  }
  write_channel_pgm(dir / "fused_probability.pgm",
                    o.conventional ? conventional_map(scene).p : scene.fused.projected_probability(), spec,
                    o.conventional ? "fused_probability_demorgan" : "fused_probability");
  write_channel_pgm(dir / "fused_uncertainty.pgm", scene.fused.uncertainty(), spec, "fused_uncertainty");
  const CategoryGrid cats = categorize(l.sc, scene, o.conventional);
  write_category_pgm(dir / "categories.pgm", cats);
  write_category_ppm(dir / "categories.ppm", cats);
  if (o.render) write_category_ppm(dir / "categories_dilated.ppm", dilate(cats, l.sc.dilation_radius));
  write_manifest(dir, "map", {&l}, o);
  out << "free " << cats.count(CellCategory::Free) << " unknown " << cats.count(CellCategory::Unknown) << " conflict "
      << cats.count(CellCategory::Conflict) << " occupied " << cats.count(CellCategory::Occupied) << "\n";
  return 0;
}

int cmd_assess(const Options& o, std::ostream& out) {
  const Loaded l = load(o.scenario, o);
  const fs::path dir = prepare_out(o);
  const SweepRow row = assess_scenario(l.sc, o.conventional);
  auto f = open_file(dir / "assess.csv");
  f << kScoreHeader << score_line(row);
  write_manifest(dir, "assess", {&l}, o);
  out << kScoreHeader << score_line(row);
  return 0;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  std::vector<Loaded> worlds;
  if (o.scenario.empty()) {
    for (const auto& name : kSweepWorlds) worlds.push_back(load(name, o));
  } else {
    worlds.push_back(load(o.scenario, o));
  }
  std::vector<ErrorKind> kinds{ErrorKind::Rotational, ErrorKind::Translational};
  if (o.error_kind) kinds = {parse_error_kind(*o.error_kind)};
  const fs::path dir = prepare_out(o);

  auto csv = open_file(dir / "sweep.csv");
  auto dat = open_file(dir / "sweep.dat");
  auto summary = open_file(dir / "sweep_summary.csv");
  csv << kScoreHeader;
  summary << "scenario_id,error_kind,spearman\n";
  dat << "# error_magnitude alpha (NaN = undefined); one block per scenario and error kind\n";
  for (const Loaded& l : worlds) {
    for (ErrorKind k : kinds) {
      std::vector<ErrorInjection> errors;
      if (k == ErrorKind::Rotational) errors = rotational_sweep_errors(l.sc.error.target_sensor);
      else if (k == ErrorKind::Translational)
        errors = translational_sweep_errors(l.sc.error.target_sensor, l.sc.error.direction_deg);
      else errors = {ErrorInjection{ErrorKind::None, 0.0, l.sc.error.target_sensor, 90.0}};
      const auto rows = sweep(std::span<const Scenario>(&l.sc, 1), errors, o.conventional);
      std::vector<double> mags, alphas;
      dat << "# " << l.sc.name << " " << to_string(k) << "\n";
      for (const auto& r : rows) {
        csv << score_line(r);
        dat << num(r.magnitude) << " " << (r.score.alpha ? num(*r.score.alpha, 9) : std::string("NaN")) << "\n";
        mags.push_back(r.magnitude);
        alphas.push_back(r.score.alpha.value_or(0.0));  // undefined counts as no degradation
      }
      dat << "\n\n";
      const double rho = spearman(mags, alphas);
      summary << l.sc.name << "," << to_string(k) << "," << num(rho, 4) << "\n";
      out << l.sc.name << " " << to_string(k) << " spearman " << num(rho, 4) << "\n";
    }
  }
  std::vector<const Loaded*> runs;
  for (const auto& l : worlds) runs.push_back(&l);
  write_manifest(dir, "sweep", runs, o);
  return 0;
}

int cmd_plan(const Options& o, std::ostream& out) {
  const Loaded l = load(o.scenario, o);
  const Pose goal = require_goal(l);
  const fs::path dir = prepare_out(o);
  const CategoryGrid dilated = dilate(categorize(l.sc, build_scene(l.sc), o.conventional), l.sc.dilation_radius);
  const PlanOutcome res = plan(l.sc.vehicle, goal, dilated, l.sc.planner);
  write_path_csv(dir / "path.csv", res.path);
  const std::string line = res.summary(goal);
  open_file(dir / "outcome.txt") << line << "\n";
  if (o.render) {
    write_category_ppm(dir / "plan.ppm", apply_proximity_rule(dilated, l.sc.vehicle, l.sc.planner.d_c),
                       res.path.poses, res.path.conflict_flags);
  }
  write_manifest(dir, "plan", {&l}, o);
  out << line << "\n";
  out << "poses " << res.path.poses.size() << " conflict_poses " << res.path.conflict_count() << " cost "
      << num(res.path.total_cost) << "\n";
  return res.kind == PlanOutcome::Kind::Unreachable ? 1 : 0;
}

int cmd_replay(const Options& o, std::ostream& out) {
  const Loaded l = load(o.scenario, o);
  const Pose goal = require_goal(l);
  const fs::path dir = prepare_out(o);
  const auto steps = replan_loop(l.sc.vehicle, goal, make_provider(l.sc, o.conventional), l.sc.planner, l.sc.replay);

  fs::create_directories(dir / "steps");
  auto csv = open_file(dir / "replay.csv");
  csv << "step,x_m,y_m,theta_rad,reason,outcome,conflict_poses,blocked_poses,goal_reached,path_cost\n";
  for (const auto& s : steps) {
    csv << s.step << "," << num(s.ego.x) << "," << num(s.ego.y) << "," << num(s.ego.theta) << "," << to_string(s.reason)
        << "," << s.outcome.summary(goal) << "," << s.conflict_poses << "," << s.blocked_poses << ","
        << (s.goal_reached ? 1 : 0) << "," << num(s.outcome.path.total_cost) << "\n";
    char name[32];
    std::snprintf(name, sizeof name, "step_%03d", s.step);
    write_category_pgm(dir / "steps" / (std::string(name) + ".pgm"), s.effective);
    if (o.render) {
      const auto& poses = s.outcome.path.poses;
      const std::span<const Pose> rest(poses.data() + std::min(s.path_index, poses.size()),
                                       poses.size() - std::min(s.path_index, poses.size()));
      write_category_ppm(dir / "steps" / (std::string(name) + ".ppm"), s.effective, rest, evaluate_path(rest, s.effective));
    }
  }
  const auto& last = steps.back();
  const std::string line = last.outcome.summary(goal);
  open_file(dir / "outcome.txt") << line << "\n" << "goal_reached " << (last.goal_reached ? 1 : 0) << "\n";
  write_manifest(dir, "replay", {&l}, o);
  out << line << "\n" << "steps " << steps.size() << " goal_reached " << (last.goal_reached ? 1 : 0) << "\n";
  return last.outcome.kind == PlanOutcome::Kind::Unreachable ? 1 : 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evidential grid mapping, degradation assessment and conflict-aware planning"};
  app.set_version_flag("--version", EVMAP_VERSION);
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario,--scenario", o.scenario, "scenario file or bundled scenario name");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_flag("--conventional", o.conventional, "use the Bayesian De Morgan baseline instead of the evidential map");
    sub->add_flag("--render", o.render, "write additional colour renderings");
    sub->add_option("--error-kind", o.error_kind, "override the injected error")->check(CLI::IsMember({"rot", "trans", "none"}));
    sub->add_option("--error-mag", o.error_mag, "override the error magnitude (degrees or meters)");
    sub->add_option("--seed", o.seed, "seed for the optional range noise");
  };
  std::map<std::string, int (*)(const Options&, std::ostream&)> commands{
      {"map", cmd_map}, {"assess", cmd_assess}, {"sweep", cmd_sweep}, {"plan", cmd_plan}, {"replay", cmd_replay}};
  const std::map<std::string, std::string> help{
      {"map", "write per-sensor and fused grids, categories and a manifest"},
      {"assess", "score one scenario and write a CSV row"},
      {"sweep", "rotational and translational error sweeps over bundled or given worlds"},
      {"plan", "plan once from the vehicle pose to the goal"},
      {"replay", "drive the replanning loop towards the goal"}};
  for (const auto& [name, fn] : commands) add_common(app.add_subcommand(name, help.at(name)));

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& [name, fn] : commands)
      if (app.got_subcommand(name)) return fn(o, out);
  } catch (const std::exception& e) {
    err << "evmap: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace evmap::cli
