#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include <Eigen/Core>

#include "evmap/grid.hpp"
#include "evmap/opinion.hpp"

namespace evmap {

/// Cell classes. The underlying value is the dilation rank:
/// Occupied > Conflict > Unknown > Free.
enum class CellCategory : std::uint8_t { Free = 0, Unknown = 1, Conflict = 2, Occupied = 3 };

inline constexpr std::uint8_t rank(CellCategory c) { return static_cast<std::uint8_t>(c); }

std::string_view to_string(CellCategory c);

struct ClassifyThresholds {
  double p_u{0.3};
  double p_f{0.2};
  double p_c{0.8};

  void validate() const;
};

/// Four-way classification of a single opinion.
///
/// Unknown requires u strictly above p_u; an opinion with u == p_u is judged
/// by its projected probability like any certain opinion.
template <typename Scalar>
CellCategory classify_cell(const BinomialOpinion<Scalar>& op, const ClassifyThresholds& th) {
  if (op.u > Scalar(th.p_u)) return CellCategory::Unknown;
  const Scalar p = projected_probability(op);
  if (p <= Scalar(th.p_f)) return CellCategory::Free;
  if (p >= Scalar(th.p_c)) return CellCategory::Occupied;
  return CellCategory::Conflict;
}

class CategoryGrid {
 public:
  using Ranks = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  explicit CategoryGrid(GridSpec spec, CellCategory fill = CellCategory::Unknown);

  const GridSpec& spec() const { return spec_; }
  CellCategory at(CellIndex c) const { return static_cast<CellCategory>(cells_(c.row, c.col)); }
  void set(CellIndex c, CellCategory v) { cells_(c.row, c.col) = rank(v); }

  /// Category of the cell under a world point; nullopt outside the grid.
  std::optional<CellCategory> at_point(const Eigen::Vector2d& p) const {
    auto c = spec_.cell_of(p);
    if (!c) return std::nullopt;
    return at(*c);
  }

  const Ranks& ranks() const { return cells_; }
  Ranks& ranks() { return cells_; }

  std::int64_t count(CellCategory v) const { return (cells_ == rank(v)).count(); }

  friend bool operator==(const CategoryGrid& x, const CategoryGrid& y) {
    return x.spec_ == y.spec_ && (x.cells_ == y.cells_).all();
  }

 private:
  GridSpec spec_;
  Ranks cells_;
};

template <typename Scalar>
CategoryGrid classify_grid(const EvidentialGrid<Scalar>& grid, const ClassifyThresholds& th) {
  th.validate();
  CategoryGrid out(grid.spec());
  const GridSpec& spec = grid.spec();
  for (int r = 0; r < spec.height; ++r)
    for (int c = 0; c < spec.width; ++c) out.set({r, c}, classify_cell(grid.at({r, c}), th));
  return out;
}

/// Morphological max-by-rank filter with a disk of `radius_m`. A cell is
/// inside the disk when the distance between cell centers is <= radius_m.
CategoryGrid dilate(const CategoryGrid& grid, double radius_m);

/// Half-widths (in cells) of the disk rows for a radius in cells; entry k is
/// the row at vertical offset k, or -1 where the row is empty.
std::vector<int> disk_half_widths(double radius_cells);

}  // namespace evmap
