#include <algorithm>
#include <cmath>
#include <limits>

#include "evmap/grid.hpp"

namespace evmap {
namespace {

// Liang-Barsky clip of p0 + t (p1 - p0) against [lo, hi]. Returns false if
// the segment misses the box.
bool clip_to_box(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1, const Eigen::Vector2d& lo,
                 const Eigen::Vector2d& hi, double& t0, double& t1) {
  t0 = 0.0;
  t1 = 1.0;
  const Eigen::Vector2d d = p1 - p0;
  for (int k = 0; k < 2; ++k) {
    if (d[k] == 0.0) {
      if (p0[k] < lo[k] || p0[k] > hi[k]) return false;
      continue;
    }
    double ta = (lo[k] - p0[k]) / d[k];
    double tb = (hi[k] - p0[k]) / d[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

void traverse_segment(const GridSpec& spec, const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                      const std::function<void(CellIndex, double)>& visit) {
  const Eigen::Vector2d lo = spec.origin;
  const Eigen::Vector2d hi = spec.origin + spec.resolution * Eigen::Vector2d(spec.width, spec.height);
  double t0 = 0, t1 = 1;
  if (!clip_to_box(p0, p1, lo, hi, t0, t1)) return;

  const double length = (p1 - p0).norm();
  const Eigen::Vector2d q0 = (p0 + t0 * (p1 - p0) - spec.origin) / spec.resolution;
  const Eigen::Vector2d q1 = (p0 + t1 * (p1 - p0) - spec.origin) / spec.resolution;
  const Eigen::Vector2d dq = q1 - q0;

  int ix = std::clamp(static_cast<int>(std::floor(q0.x())), 0, spec.width - 1);
  int iy = std::clamp(static_cast<int>(std::floor(q0.y())), 0, spec.height - 1);
  const int sx = dq.x() > 0 ? 1 : (dq.x() < 0 ? -1 : 0);
  const int sy = dq.y() > 0 ? 1 : (dq.y() < 0 ? -1 : 0);

  constexpr double inf = std::numeric_limits<double>::infinity();
  const double delta_x = sx != 0 ? 1.0 / std::abs(dq.x()) : inf;
  const double delta_y = sy != 0 ? 1.0 / std::abs(dq.y()) : inf;
  double next_x = inf, next_y = inf;
  if (sx > 0) next_x = (ix + 1 - q0.x()) / dq.x();
  if (sx < 0) next_x = (ix - q0.x()) / dq.x();
  if (sy > 0) next_y = (iy + 1 - q0.y()) / dq.y();
  if (sy < 0) next_y = (iy - q0.y()) / dq.y();

  auto meters = [&](double t) { return (t0 + t * (t1 - t0)) * length; };
  auto emit = [&](int cx, int cy, double t) {
    const CellIndex c{cy, cx};
    if (spec.in_bounds(c)) visit(c, meters(t));
  };

  emit(ix, iy, 0.0);
  constexpr double kCornerTol = 1e-12;
  while (true) {
    const double t = std::min(next_x, next_y);
    if (!(t <= 1.0)) break;
    if (std::abs(next_x - next_y) <= kCornerTol) {
      // Passing through a cell corner: both side neighbours are touched.
      emit(ix + sx, iy, t);
      emit(ix, iy + sy, t);
      ix += sx;
      iy += sy;
      next_x += delta_x;
      next_y += delta_y;
    } else if (next_x < next_y) {
      ix += sx;
      next_x += delta_x;
    } else {
      iy += sy;
      next_y += delta_y;
    }
    if (ix < 0 || iy < 0 || ix >= spec.width || iy >= spec.height) break;
    emit(ix, iy, t);
  }
}

std::vector<CellIndex> segment_cells(const GridSpec& spec, const Eigen::Vector2d& p0, const Eigen::Vector2d& p1) {
  std::vector<CellIndex> out;
  traverse_segment(spec, p0, p1, [&](CellIndex c, double) { out.push_back(c); });
  return out;
}

std::optional<CellIndex> hit_cell(const GridSpec& spec, const Scan& scan, const Beam& beam) {
  if (!beam.hit) return std::nullopt;
  // Nudged past the surface so a return on a cell boundary lands in the
  // cell behind it (the obstacle side).
  constexpr double kNudge = 1e-6;
  const Pose origin = scan.sensor_world_pose();
  const Eigen::Vector2d dir = Eigen::Rotation2Dd(origin.theta + beam.azimuth) * Eigen::Vector2d::UnitX();
  return spec.cell_of(origin.position() + (beam.range + kNudge) * dir);
}

}  // namespace evmap
