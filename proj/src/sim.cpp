#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "evmap/errors.hpp"
#include "evmap/sim.hpp"

namespace evmap {
namespace {

constexpr double kParallelTol = 1e-12;

std::optional<double> ray_segment(const Eigen::Vector2d& o, const Eigen::Vector2d& dir, const Segment& s) {
  const Eigen::Vector2d e = s.b - s.a;
  const double denom = dir.x() * e.y() - dir.y() * e.x();
  if (std::abs(denom) < kParallelTol) return std::nullopt;
  const Eigen::Vector2d w = s.a - o;
  const double t = (w.x() * e.y() - w.y() * e.x()) / denom;
  const double u = (w.x() * dir.y() - w.y() * dir.x()) / denom;
  if (t < 0 || u < 0 || u > 1) return std::nullopt;
  return t;
}

// Slab test; a ray that only touches an edge or corner does not count.
std::optional<double> ray_box(const Eigen::Vector2d& o, const Eigen::Vector2d& dir, const Box& b) {
  double t_in = -std::numeric_limits<double>::infinity();
  double t_out = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2; ++k) {
    if (dir[k] == 0.0) {
      if (o[k] <= b.min[k] || o[k] >= b.max[k]) return std::nullopt;
      continue;
    }
    double t0 = (b.min[k] - o[k]) / dir[k];
    double t1 = (b.max[k] - o[k]) / dir[k];
    if (t0 > t1) std::swap(t0, t1);
    t_in = std::max(t_in, t0);
    t_out = std::min(t_out, t1);
  }
  constexpr double kGraze = 1e-9;
  if (t_out - t_in <= kGraze || t_out <= 0) return std::nullopt;
  return std::max(t_in, 0.0);
}

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d e = b - a;
  const double t = std::clamp((p - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * e)).norm();
}

}  // namespace

void World::validate() const {
  for (const auto& s : segments)
    if (!((s.b - s.a).norm() > 0) || !s.a.allFinite() || !s.b.allFinite())
      throw DegenerateWorld("world '" + name + "' has a zero-length segment");
  for (const auto& b : boxes)
    if (!(b.max.x() > b.min.x() && b.max.y() > b.min.y()))
      throw DegenerateWorld("world '" + name + "' has an empty box");
}

std::optional<double> World::cast(const Eigen::Vector2d& origin, const Eigen::Vector2d& dir, double max_range) const {
  std::optional<double> best;
  auto take = [&](std::optional<double> t) {
    if (t && *t <= max_range && (!best || *t < *best)) best = t;
  };
  for (const auto& s : segments) take(ray_segment(origin, dir, s));
  for (const auto& b : boxes) take(ray_box(origin, dir, b));
  return best;
}

double World::distance_to(const Eigen::Vector2d& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : segments) best = std::min(best, point_segment_distance(p, s.a, s.b));
  for (const auto& b : boxes) {
    const Eigen::Vector2d q = p.cwiseMax(b.min).cwiseMin(b.max);
    best = std::min(best, (p - q).norm());
  }
  return best;
}

void World::add_fence(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double pitch, double pole_width) {
  const double len = (b - a).norm();
  if (!(pitch > 0) || !(pole_width > 0)) throw DegenerateWorld("fence pitch and pole width must be > 0");
  const int n = static_cast<int>(std::floor(len / pitch + 1e-9));
  const Eigen::Vector2d step = n > 0 ? Eigen::Vector2d((b - a) / len * pitch) : Eigen::Vector2d::Zero();
  const Eigen::Vector2d half = Eigen::Vector2d::Constant(0.5 * pole_width);
  for (int k = 0; k <= n; ++k) {
    const Eigen::Vector2d c = a + k * step;
    boxes.push_back({c - half, c + half});
  }
}

int SensorConfig::beams_per_revolution() const {
  return static_cast<int>(std::floor(points_per_second / (channels * rotation_rate) + 1e-9));
}

void SensorConfig::validate() const {
  if (!(points_per_second > 0) || channels <= 0 || !(rotation_rate > 0))
    throw ConfigError("sensor pps, channels and rotation rate must be > 0");
  if (beams_per_revolution() < 8) throw ConfigError("sensor needs at least 8 beams per revolution");
  if (!(max_range > min_range) || !(min_range >= 0)) throw ConfigError("sensor requires 0 <= min_range < max_range");
  if (!(range_noise_std >= 0)) throw ConfigError("range noise must be >= 0");
}

std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::None: return "none";
    case ErrorKind::Rotational: return "rot";
    case ErrorKind::Translational: return "trans";
  }
  return "?";
}

ErrorKind parse_error_kind(std::string_view s) {
  if (s == "none") return ErrorKind::None;
  if (s == "rot" || s == "rotational") return ErrorKind::Rotational;
  if (s == "trans" || s == "translational") return ErrorKind::Translational;
  throw ConfigError("unknown error kind '" + std::string(s) + "' (expected none, rot or trans)");
}

Pose ErrorInjection::apply(const Pose& mount) const {
  Pose out = mount;
  switch (kind) {
    case ErrorKind::None: break;
    case ErrorKind::Rotational: out.theta = wrap_angle(mount.theta + deg2rad(magnitude)); break;
    case ErrorKind::Translational: {
      const double dir = deg2rad(direction_deg);
      out.x += magnitude * std::cos(dir);
      out.y += magnitude * std::sin(dir);
      break;
    }
  }
  return out;
}

void ErrorInjection::validate() const {
  if (!(magnitude >= 0)) throw ConfigError("error magnitude must be >= 0");
  if (target_sensor < 0) throw ConfigError("error target sensor must be >= 0");
}

Scan simulate_scan(const World& world, const Pose& vehicle, const SensorConfig& sensor, std::mt19937_64* noise) {
  world.validate();
  sensor.validate();
  const Pose truth = compose(vehicle, sensor.true_mount);
  const int n = sensor.beams_per_revolution();

  Scan scan;
  scan.vehicle_pose = vehicle;
  scan.sensor_pose = sensor.mount;
  scan.max_range = sensor.max_range;
  scan.min_range = sensor.min_range;
  scan.beams.reserve(static_cast<std::size_t>(n));

  std::normal_distribution<double> gauss(0.0, sensor.range_noise_std > 0 ? sensor.range_noise_std : 1.0);
  const double step = 2.0 * std::numbers::pi / n;
  for (int k = 0; k < n; ++k) {
    const double azimuth = -std::numbers::pi + k * step;
    const Eigen::Vector2d dir = Eigen::Rotation2Dd(truth.theta + azimuth) * Eigen::Vector2d::UnitX();
    auto t = world.cast(truth.position(), dir, sensor.max_range);
    if (!t) {
      scan.beams.push_back({azimuth, sensor.max_range, false});
      continue;
    }
    double range = *t;
    if (noise && sensor.range_noise_std > 0) range += gauss(*noise);
    if (range <= sensor.min_range) continue;
    scan.beams.push_back({azimuth, std::min(range, sensor.max_range), true});
  }
  return scan;
}

}  // namespace evmap
