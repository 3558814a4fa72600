#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "evmap/errors.hpp"
#include "evmap/opinion.hpp"
#include "evmap/pose.hpp"

namespace evmap {

/// Row/column address of a grid cell. Rows run along +y, columns along +x.
struct CellIndex {
  int row{0};
  int col{0};
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

/// Fixed-resolution georeferencing of a 2D grid. `origin` is the world
/// position of the outer corner of cell (0, 0).
struct GridSpec {
  double resolution{0.2};
  int width{0};
  int height{0};
  Eigen::Vector2d origin{0.0, 0.0};

  static constexpr std::int64_t kMaxCells = 100'000'000;

  void validate() const {
    if (!(resolution > 0) || !std::isfinite(resolution)) throw ConfigError("grid resolution must be > 0");
    if (width <= 0 || height <= 0) throw ConfigError("grid width and height must be > 0");
    if (std::int64_t(width) * height > kMaxCells) throw ConfigError("grid exceeds 1e8 cells");
  }

  std::int64_t size() const { return std::int64_t(width) * height; }
  bool in_bounds(CellIndex c) const { return c.row >= 0 && c.col >= 0 && c.row < height && c.col < width; }
  std::int64_t linear(CellIndex c) const { return std::int64_t(c.row) * width + c.col; }

  /// Cell containing world point `p`, or nullopt outside the grid.
  std::optional<CellIndex> cell_of(const Eigen::Vector2d& p) const {
    const Eigen::Vector2d rel = (p - origin) / resolution;
    if (!(rel.x() >= 0 && rel.y() >= 0)) return std::nullopt;
    const CellIndex c{static_cast<int>(std::floor(rel.y())), static_cast<int>(std::floor(rel.x()))};
    if (!in_bounds(c)) return std::nullopt;
    return c;
  }

  Eigen::Vector2d cell_center(CellIndex c) const {
    return origin + resolution * Eigen::Vector2d(c.col + 0.5, c.row + 0.5);
  }

  bool contains(const Eigen::Vector2d& p) const { return cell_of(p).has_value(); }

  friend bool operator==(const GridSpec& x, const GridSpec& y) {
    return x.resolution == y.resolution && x.width == y.width && x.height == y.height &&
           x.origin == y.origin;
  }
};

template <typename Scalar>
using GridChannel = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense grid of binomial opinions stored as belief/disbelief/uncertainty
/// channels. All cells share one base rate.
template <typename Scalar>
class EvidentialGrid {
 public:
  using Channel = GridChannel<Scalar>;

  explicit EvidentialGrid(GridSpec spec, Scalar base_rate = Scalar(0.5))
      : spec_(spec),
        b_(Channel::Zero(spec.height, spec.width)),
        d_(Channel::Zero(spec.height, spec.width)),
        u_(Channel::Ones(spec.height, spec.width)),
        a_(base_rate) {
    spec_.validate();
  }

  const GridSpec& spec() const { return spec_; }
  Scalar base_rate() const { return a_; }

  BinomialOpinion<Scalar> at(CellIndex c) const { return {b_(c.row, c.col), d_(c.row, c.col), u_(c.row, c.col), a_}; }

  void set(CellIndex c, const BinomialOpinion<Scalar>& op) {
    if (std::abs(op.a - a_) > Scalar(kBaseRateTolerance)) throw BaseRateMismatch("cell base rate differs from grid");
    b_(c.row, c.col) = op.b;
    d_(c.row, c.col) = op.d;
    u_(c.row, c.col) = op.u;
  }

  const Channel& belief() const { return b_; }
  const Channel& disbelief() const { return d_; }
  const Channel& uncertainty() const { return u_; }

  /// b + a u per cell.
  Channel projected_probability() const { return b_ + a_ * u_; }

  /// Cellwise cumulative fusion with `other`, computed in evidence space.
  EvidentialGrid& fuse(const EvidentialGrid& other, Scalar prior_weight = Scalar(kDefaultPriorWeight));

 private:
  GridSpec spec_;
  Channel b_, d_, u_;
  Scalar a_;
};

namespace detail {

// Evidence channels with the dogmatic clamp applied elementwise.
template <typename Scalar>
void evidence_channels(const GridChannel<Scalar>& b, const GridChannel<Scalar>& d, const GridChannel<Scalar>& u,
                       Scalar prior_weight, GridChannel<Scalar>& r, GridChannel<Scalar>& s) {
  const Scalar eps = Scalar(kDogmaticEpsilon);
  const GridChannel<Scalar> uc = u.max(eps);
  const GridChannel<Scalar> bd = b + d;
  const GridChannel<Scalar> k = (u < eps && bd > Scalar(0)).select((Scalar(1) - eps) / bd, Scalar(1));
  r = prior_weight * b * k / uc;
  s = prior_weight * d * k / uc;
}

}  // namespace detail

template <typename Scalar>
EvidentialGrid<Scalar>& EvidentialGrid<Scalar>::fuse(const EvidentialGrid& other, Scalar prior_weight) {
  if (!(spec_ == other.spec_)) throw SpecMismatch("cannot fuse grids with different specs");
  if (std::abs(a_ - other.a_) > Scalar(kBaseRateTolerance)) throw BaseRateMismatch("grid base rates differ");
  Channel r1, s1, r2, s2;
  detail::evidence_channels(b_, d_, u_, prior_weight, r1, s1);
  detail::evidence_channels(other.b_, other.d_, other.u_, prior_weight, r2, s2);
  const Channel total = prior_weight + (r1 + r2) + (s1 + s2);
  b_ = (r1 + r2) / total;
  d_ = (s1 + s2) / total;
  u_ = Scalar(1) - b_ - d_;
  return *this;
}

template <typename Scalar>
EvidentialGrid<Scalar> fuse_grids(EvidentialGrid<Scalar> a, const EvidentialGrid<Scalar>& b) {
  return a.fuse(b);
}

/// One range reading. `azimuth` is relative to the sensor heading.
struct Beam {
  double azimuth{0};
  double range{0};
  bool hit{false};
};

/// A single planar LiDAR revolution. `sensor_pose` is the mount pose in the
/// vehicle frame as believed by the mapping system.
struct Scan {
  Pose vehicle_pose;
  Pose sensor_pose;
  std::vector<Beam> beams;
  double max_range{30.0};
  double min_range{0.0};

  Pose sensor_world_pose() const { return compose(vehicle_pose, sensor_pose); }
};

/// Measurement opinions of the inverse sensor model.
struct InverseSensorModel {
  double lambda_occ{0.6};
  double lambda_free{0.4};
  double prior_weight{kDefaultPriorWeight};

  template <typename Scalar>
  BinomialOpinion<Scalar> occupied(Scalar a) const {
    return {Scalar(lambda_occ), Scalar(0), Scalar(1 - lambda_occ), a};
  }
  template <typename Scalar>
  BinomialOpinion<Scalar> free(Scalar a) const {
    return {Scalar(0), Scalar(lambda_free), Scalar(1 - lambda_free), a};
  }
};

/// Visits every cell touched by segment p0->p1 (supercover: a corner
/// crossing reports both side cells), clipped to the grid. The callback gets
/// the cell and the distance from p0 at which the segment enters it.
void traverse_segment(const GridSpec& spec, const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                      const std::function<void(CellIndex, double)>& visit);

/// Cells collected by traverse_segment, in visiting order.
std::vector<CellIndex> segment_cells(const GridSpec& spec, const Eigen::Vector2d& p0, const Eigen::Vector2d& p1);

/// Cell receiving the return of `beam`, or nullopt for no-return beams and
/// returns outside the grid.
std::optional<CellIndex> hit_cell(const GridSpec& spec, const Scan& scan, const Beam& beam);

/// Adds one scan to `grid` through the inverse sensor model.
///
/// Cells crossed by a beam between min_range and its return are fused with
/// the free measurement opinion once per beam; the return cell is fused with
/// the occupied opinion. Cells that hold a return of this scan never take
/// free evidence from the same scan. No-return beams clear their full length.
template <typename Scalar>
EvidentialGrid<Scalar> integrate_scan(EvidentialGrid<Scalar> grid, const Scan& scan,
                                      const InverseSensorModel& model = {}) {
  const GridSpec& spec = grid.spec();
  const Pose origin = scan.sensor_world_pose();
  if (!spec.contains(origin.position())) throw OutOfBounds("sensor origin lies outside the grid");

  const Scalar a = grid.base_rate();
  const auto occ = model.occupied(a);
  const auto fre = model.free(a);
  const Scalar w = Scalar(model.prior_weight);

  std::vector<std::uint8_t> is_hit(static_cast<std::size_t>(spec.size()), 0);
  std::vector<CellIndex> hits;
  hits.reserve(scan.beams.size());
  for (const Beam& beam : scan.beams) {
    if (auto c = hit_cell(spec, scan, beam)) {
      is_hit[spec.linear(*c)] = 1;
      hits.push_back(*c);
    }
  }

  constexpr double kEntrySlack = 1e-9;
  for (const Beam& beam : scan.beams) {
    if (beam.range <= scan.min_range) continue;
    const Eigen::Vector2d dir = Eigen::Rotation2Dd(origin.theta + beam.azimuth) * Eigen::Vector2d::UnitX();
    const Eigen::Vector2d p0 = origin.position() + scan.min_range * dir;
    const Eigen::Vector2d p1 = origin.position() + beam.range * dir;
    const double span = beam.range - scan.min_range;
    traverse_segment(spec, p0, p1, [&](CellIndex c, double entry) {
      if (beam.hit && entry >= span - kEntrySlack) return;
      if (is_hit[spec.linear(c)]) return;
      grid.set(c, cumulative_fuse(grid.at(c), fre, w));
    });
  }
  for (const CellIndex& c : hits) grid.set(c, cumulative_fuse(grid.at(c), occ, w));
  return grid;
}

}  // namespace evmap
