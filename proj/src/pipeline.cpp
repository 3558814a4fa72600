#include "evmap/pipeline.hpp"

#include <random>

namespace evmap {

Scene build_scene(const Scenario& sc, const Pose& vehicle) {
  const auto sensors = sc.sensors_with_error();
  Scene scene{{}, {}, EvidentialGrid<double>(sc.grid, sc.base_rate)};
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    std::mt19937_64 rng(sc.seed + i);
    const bool noisy = sensors[i].range_noise_std > 0;
    scene.scans.push_back(simulate_scan(sc.world, vehicle, sensors[i], noisy ? &rng : nullptr));
    scene.per_sensor.push_back(integrate_scan(EvidentialGrid<double>(sc.grid, sc.base_rate), scene.scans.back(), sc.model));
    scene.fused.fuse(scene.per_sensor.back(), sc.model.prior_weight);
  }
  return scene;
}

BayesGrid<double> conventional_map(const Scene& scene) {
  std::vector<BayesGrid<double>> grids;
  for (const auto& g : scene.per_sensor) grids.push_back(to_bayes(g));
  return bayes_fuse_demorgan<double>(grids);
}

CategoryGrid categorize(const Scenario& sc, const Scene& scene, bool conventional) {
  if (conventional) return bayes_categorize(conventional_map(scene), sc.bayes_p_free, sc.bayes_p_occupied);
  return classify_grid(scene.fused, sc.classify);
}

SweepRow assess_scenario(const Scenario& sc, bool conventional) {
  const Scene scene = build_scene(sc);
  const CategoryGrid dilated = dilate(categorize(sc, scene, conventional), sc.dilation_radius);
  SweepRow row{sc.name, sc.error.kind, sc.error.magnitude, degradation_score(dilated, sc.vehicle, sc.assess), {}};
  row.action = recommend_action(row.score.alpha, sc.assess, false, sc.proceed_permitted);
  return row;
}

std::vector<SweepRow> sweep(std::span<const Scenario> scenarios, std::span<const ErrorInjection> errors,
                            bool conventional) {
  std::vector<SweepRow> rows;
  for (const auto& base : scenarios) {
    for (const auto& e : errors) {
      Scenario sc = base;
      sc.error = e;
      sc.validate();
      rows.push_back(assess_scenario(sc, conventional));
    }
  }
  return rows;
}

std::vector<ErrorInjection> rotational_sweep_errors(int target_sensor) {
  std::vector<ErrorInjection> out;
  for (int deg = 0; deg <= 15; ++deg) out.push_back({ErrorKind::Rotational, double(deg), target_sensor, 90.0});
  return out;
}

std::vector<ErrorInjection> translational_sweep_errors(int target_sensor, double direction_deg) {
  std::vector<ErrorInjection> out;
  for (int k = 0; k <= 10; ++k) out.push_back({ErrorKind::Translational, k * 0.234375, target_sensor, direction_deg});
  return out;
}

GridProvider make_provider(const Scenario& sc, bool conventional) {
  return [sc, conventional](const Pose& ego) { return categorize(sc, build_scene(sc, ego), conventional); };
}

}  // namespace evmap
