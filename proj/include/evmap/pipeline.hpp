#pragma once

#include <span>
#include <string>
#include <vector>

#include "evmap/assess.hpp"
#include "evmap/bayes.hpp"
#include "evmap/categories.hpp"
#include "evmap/grid.hpp"
#include "evmap/replay.hpp"
#include "evmap/scenario.hpp"

namespace evmap {

struct Scene {
  std::vector<Scan> scans;
  std::vector<EvidentialGrid<double>> per_sensor;
  EvidentialGrid<double> fused;
};

/// Simulates every sensor of the scenario at `vehicle`, integrates each scan
/// into its own grid and fuses the per-sensor grids.
Scene build_scene(const Scenario& sc, const Pose& vehicle);
inline Scene build_scene(const Scenario& sc) { return build_scene(sc, sc.vehicle); }

/// Baseline map: per-sensor projected probabilities fused with De Morgan.
BayesGrid<double> conventional_map(const Scene& scene);

/// Undilated category grid from either pipeline.
CategoryGrid categorize(const Scenario& sc, const Scene& scene, bool conventional = false);

struct SweepRow {
  std::string scenario_id;
  ErrorKind kind{ErrorKind::None};
  double magnitude{0};
  DegradationScore score;
  Action action{Action::Nominal};
};

/// build_scene, categorize, dilate and score at the scenario's vehicle pose.
SweepRow assess_scenario(const Scenario& sc, bool conventional = false);

/// One row per (scenario, error) pair; each error replaces the scenario's own.
std::vector<SweepRow> sweep(std::span<const Scenario> scenarios, std::span<const ErrorInjection> errors,
                            bool conventional = false);

/// 0..15 degrees in 1 degree steps.
std::vector<ErrorInjection> rotational_sweep_errors(int target_sensor = 1);
/// 0..2.34375 m in 0.234375 m steps.
std::vector<ErrorInjection> translational_sweep_errors(int target_sensor = 1, double direction_deg = 90.0);

/// Undilated categories at an arbitrary ego pose, for replan_loop.
GridProvider make_provider(const Scenario& sc, bool conventional = false);

}  // namespace evmap
