#pragma once

#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "evmap/grid.hpp"
#include "evmap/pose.hpp"

namespace evmap {

struct Segment {
  Eigen::Vector2d a;
  Eigen::Vector2d b;
};

/// Axis-aligned box, world frame.
struct Box {
  Eigen::Vector2d min;
  Eigen::Vector2d max;
};

struct World {
  std::string name;
  std::vector<Segment> segments;
  std::vector<Box> boxes;

  /// Throws DegenerateWorld on zero-length segments or empty boxes.
  void validate() const;

  /// Distance along `dir` (unit) from `origin` to the first obstacle surface,
  /// or nullopt if nothing lies within `max_range`.
  std::optional<double> cast(const Eigen::Vector2d& origin, const Eigen::Vector2d& dir, double max_range) const;

  /// Euclidean distance from `p` to the nearest obstacle (0 inside a box).
  double distance_to(const Eigen::Vector2d& p) const;

  /// Adds square poles of side `pole_width` every `pitch` meters from a to b.
  void add_fence(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double pitch, double pole_width);
};

struct SensorConfig {
  Pose mount;       // mount pose in the vehicle frame as believed by the mapper
  Pose true_mount;  // actual mount pose, including any injected error
  int channels{32};
  double points_per_second{1310720};
  double rotation_rate{10.0};  // Hz
  double max_range{30.0};
  double min_range{2.0};
  double range_noise_std{0.0};  // off unless a noise source is given

  /// PPS / (channels * rotation_rate): the planar scan keeps the horizontal
  /// angular resolution of the multi-channel sensor.
  int beams_per_revolution() const;
  void validate() const;
};

enum class ErrorKind { None, Rotational, Translational };
std::string_view to_string(ErrorKind k);
ErrorKind parse_error_kind(std::string_view s);

/// Calibration fault on one sensor. Rotational magnitudes are degrees about
/// the sensor z-axis; translational magnitudes are meters along
/// `direction_deg` in the vehicle frame.
struct ErrorInjection {
  ErrorKind kind{ErrorKind::None};
  double magnitude{0.0};
  int target_sensor{1};
  double direction_deg{90.0};

  Pose apply(const Pose& mount) const;
  void validate() const;
};

/// Casts equally spaced beams from the sensor's true world pose. Returns
/// inside (min_range, max_range] are hits; beams blocked at or before
/// min_range are dropped. The scan carries the believed mount pose.
Scan simulate_scan(const World& world, const Pose& vehicle, const SensorConfig& sensor,
                   std::mt19937_64* noise = nullptr);

}  // namespace evmap
