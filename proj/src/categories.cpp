#include <cmath>
#include <limits>
#include <vector>

#include "evmap/categories.hpp"

namespace evmap {

std::string_view to_string(CellCategory c) {
  switch (c) {
    case CellCategory::Free: return "free";
    case CellCategory::Unknown: return "unknown";
    case CellCategory::Conflict: return "conflict";
    case CellCategory::Occupied: return "occupied";
  }
  return "?";
}

void ClassifyThresholds::validate() const {
  if (!(0 < p_f && p_f < p_c && p_c < 1)) throw BadThresholds("require 0 < p_f < p_c < 1");
  if (!(0 < p_u && p_u < 1)) throw BadThresholds("require 0 < p_u < 1");
}

CategoryGrid::CategoryGrid(GridSpec spec, CellCategory fill)
    : spec_(spec), cells_(Ranks::Constant(spec.height, spec.width, rank(fill))) {
  spec_.validate();
}

std::vector<int> disk_half_widths(double radius_cells) {
  constexpr double kTol = 1e-9;
  const int reach = static_cast<int>(std::floor(radius_cells + kTol));
  std::vector<int> widths(reach + 1, -1);
  for (int k = 0; k <= reach; ++k) {
    const double rem = radius_cells * radius_cells - double(k) * k;
    if (rem < -kTol) continue;
    widths[k] = static_cast<int>(std::floor(std::sqrt(std::max(rem, 0.0)) + kTol));
  }
  return widths;
}

CategoryGrid dilate(const CategoryGrid& grid, double radius_m) {
  const GridSpec& spec = grid.spec();
  if (!(radius_m >= 0)) throw ConfigError("dilation radius must be >= 0");
  const std::vector<int> widths = disk_half_widths(radius_m / spec.resolution);
  const int reach = static_cast<int>(widths.size()) - 1;
  const int h = spec.height, w = spec.width;
  const auto& in = grid.ranks();

  // Per rank level k: horizontal distance to the nearest cell of rank >= k
  // within the same row. The disk max is then a per-row interval test.
  constexpr int kFar = std::numeric_limits<int>::max() / 2;
  std::array<std::vector<int>, 4> hdist;
  for (int k = 1; k <= 3; ++k) {
    auto& dist = hdist[k];
    dist.assign(std::size_t(h) * w, kFar);
    for (int r = 0; r < h; ++r) {
      int* row = dist.data() + std::size_t(r) * w;
      int last = -kFar;
      for (int c = 0; c < w; ++c) {
        if (in(r, c) >= k) last = c;
        row[c] = std::min(row[c], c - last);
      }
      last = kFar;
      for (int c = w - 1; c >= 0; --c) {
        if (in(r, c) >= k) last = c;
        row[c] = std::min(row[c], last - c);
      }
    }
  }

  CategoryGrid out(spec, CellCategory::Free);
  auto& res = out.ranks();
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      std::uint8_t best = 0;
      for (int k = 3; k >= 1 && best == 0; --k) {
        const auto& dist = hdist[k];
        for (int dr = -reach; dr <= reach; ++dr) {
          const int rr = r + dr;
          const int half = widths[std::abs(dr)];
          if (rr < 0 || rr >= h || half < 0) continue;
          if (dist[std::size_t(rr) * w + c] <= half) {
            best = static_cast<std::uint8_t>(k);
            break;
          }
        }
      }
      res(r, c) = best;
    }
  }
  return out;
}

}  // namespace evmap
