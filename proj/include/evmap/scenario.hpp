#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evmap/assess.hpp"
#include "evmap/categories.hpp"
#include "evmap/grid.hpp"
#include "evmap/planner.hpp"
#include "evmap/replay.hpp"
#include "evmap/sim.hpp"

namespace evmap {

/// Everything needed to reproduce one experiment. Defaults follow the
/// evaluation setup of the method (base rate 0.5, p_u 0.3, p_f 0.2,
/// p_c 0.8, d_max 15 m, d_c 5 m, c_c 5.0, 32 channels, 1310720 pps).
struct Scenario {
  std::string name{"unnamed"};
  World world;
  GridSpec grid{0.2, 300, 300, Eigen::Vector2d(-30.0, -30.0)};
  Pose vehicle;
  std::optional<Pose> goal;
  std::vector<SensorConfig> sensors;  // believed mounts; see sensors_with_error()
  ErrorInjection error;
  InverseSensorModel model;
  double base_rate{0.5};
  ClassifyThresholds classify;
  AssessParams assess;
  double dilation_radius{1.5};
  bool proceed_permitted{false};
  PlannerParams planner;
  ReplayConfig replay;
  // Bayesian baseline categorization thresholds.
  double bayes_p_free{0.2};
  double bayes_p_occupied{0.8};
  std::uint64_t seed{0};

  /// Sensors with true_mount set from the injected error.
  std::vector<SensorConfig> sensors_with_error() const;
  void validate() const;
};

/// The default two-sensor rig: 1 m apart on the longitudinal axis.
std::vector<SensorConfig> default_sensor_pair();

/// Parses the plain-text scenario format. `source` names the input in
/// diagnostics. Throws ConfigError with a line number on malformed input.
Scenario parse_scenario(std::string_view text, std::string_view source = "<string>");
Scenario load_scenario(const std::filesystem::path& path);

/// 64-bit FNV-1a over the bytes, as 16 hex digits.
std::string content_hash(std::string_view bytes);

/// Resolves a scenario argument: an existing path, or the name of a bundled
/// scenario (with or without the .scn suffix) in `bundled_dir`.
std::filesystem::path resolve_scenario(const std::string& arg, const std::filesystem::path& bundled_dir);

/// Directory of the bundled scenarios (compile-time default, overridable by
/// the EVMAP_SCENARIO_DIR environment variable).
std::filesystem::path bundled_scenario_dir();

}  // namespace evmap
