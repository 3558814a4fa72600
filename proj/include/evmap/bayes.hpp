#pragma once

#include <span>

#include "evmap/categories.hpp"
#include "evmap/grid.hpp"

namespace evmap {

/// Conventional occupancy grid: one occupancy probability per cell, 0.5 unknown.
template <typename Scalar>
struct BayesGrid {
  GridSpec spec;
  GridChannel<Scalar> p;

  explicit BayesGrid(GridSpec s, Scalar fill = Scalar(0.5))
      : spec(s), p(GridChannel<Scalar>::Constant(s.height, s.width, fill)) {}

  Scalar at(CellIndex c) const { return p(c.row, c.col); }
};

using DrivableGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Per-sensor probability grid taken as the projected probability of an
/// evidential grid.
template <typename Scalar>
BayesGrid<Scalar> to_bayes(const EvidentialGrid<Scalar>& grid) {
  BayesGrid<Scalar> out(grid.spec());
  out.p = grid.projected_probability();
  return out;
}

namespace detail {
template <typename Scalar>
void require_same_specs(std::span<const BayesGrid<Scalar>> grids) {
  if (grids.empty()) throw SpecMismatch("no grids to fuse");
  for (const auto& g : grids)
    if (!(g.spec == grids.front().spec)) throw SpecMismatch("grid specs differ");
}
}  // namespace detail

/// p = 1 - prod_k (1 - p_k)
template <typename Scalar>
BayesGrid<Scalar> bayes_fuse_demorgan(std::span<const BayesGrid<Scalar>> grids) {
  detail::require_same_specs(grids);
  GridChannel<Scalar> keep = GridChannel<Scalar>::Ones(grids.front().spec.height, grids.front().spec.width);
  for (const auto& g : grids) keep *= (Scalar(1) - g.p);
  BayesGrid<Scalar> out(grids.front().spec);
  out.p = Scalar(1) - keep;
  return out;
}

/// p = max_k p_k
template <typename Scalar>
BayesGrid<Scalar> bayes_fuse_max(std::span<const BayesGrid<Scalar>> grids) {
  detail::require_same_specs(grids);
  BayesGrid<Scalar> out(grids.front().spec);
  out.p = grids.front().p;
  for (const auto& g : grids.subspan(1)) out.p = out.p.max(g.p);
  return out;
}

/// Free iff p <= p_f, Occupied iff p >= p_u, Unknown otherwise.
template <typename Scalar>
CategoryGrid bayes_categorize(const BayesGrid<Scalar>& grid, double p_f, double p_u) {
  if (!(0 <= p_f && p_f < p_u && p_u <= 1)) throw BadThresholds("require 0 <= p_f < p_u <= 1");
  CategoryGrid out(grid.spec);
  for (int r = 0; r < grid.spec.height; ++r) {
    for (int c = 0; c < grid.spec.width; ++c) {
      const Scalar p = grid.p(r, c);
      const CellCategory cat = p <= Scalar(p_f)   ? CellCategory::Free
                               : p >= Scalar(p_u) ? CellCategory::Occupied
                                                  : CellCategory::Unknown;
      out.set({r, c}, cat);
    }
  }
  return out;
}

/// Drivable iff p < p_d.
template <typename Scalar>
DrivableGrid bayes_drivable(const BayesGrid<Scalar>& grid, double p_d) {
  if (!(0 <= p_d && p_d <= 1)) throw BadThresholds("require 0 <= p_d <= 1");
  return grid.p < Scalar(p_d);
}

}  // namespace evmap
