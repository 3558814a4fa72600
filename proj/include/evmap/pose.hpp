#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace evmap {

/// Planar pose: position in meters, heading in radians.
struct Pose {
  double x{0};
  double y{0};
  double theta{0};

  Eigen::Vector2d position() const { return {x, y}; }
  Eigen::Vector2d heading_vector() const { return {std::cos(theta), std::sin(theta)}; }

  Eigen::Isometry2d isometry() const {
    Eigen::Isometry2d t = Eigen::Isometry2d::Identity();
    t.translate(position());
    t.rotate(theta);
    return t;
  }

  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Wraps an angle into [-pi, pi).
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a < 0) a += two_pi;
  return a - std::numbers::pi;
}

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Composition: `local` expressed in the frame of `parent`.
inline Pose compose(const Pose& parent, const Pose& local) {
  const Eigen::Vector2d p = parent.isometry() * local.position();
  return {p.x(), p.y(), wrap_angle(parent.theta + local.theta)};
}

}  // namespace evmap
