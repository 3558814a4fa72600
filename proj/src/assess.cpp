#include <algorithm>
#include <cmath>

#include "evmap/assess.hpp"
#include "evmap/errors.hpp"

namespace evmap {

void AssessParams::validate() const {
  if (!(d_max > 0)) throw ConfigError("d_max must be > 0");
  if (!(alpha_max > 0 && alpha_max < 1)) throw ConfigError("alpha_max must lie in (0, 1)");
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Nominal: return "nominal";
    case Action::AlertAndStop: return "alert_and_stop";
    case Action::AlertAndProceed: return "alert_and_proceed";
  }
  return "?";
}

DegradationScore degradation_score(const CategoryGrid& dilated, const Pose& ego, const AssessParams& params) {
  params.validate();
  const GridSpec& spec = dilated.spec();
  const Eigen::Vector2d center = ego.position();

  // Only the bounding box of the ROI can carry weight.
  const Eigen::Vector2d lo = (center.array() - params.d_max - spec.origin.array()) / spec.resolution;
  const Eigen::Vector2d hi = (center.array() + params.d_max - spec.origin.array()) / spec.resolution;
  const int c0 = std::max(0, static_cast<int>(std::floor(lo.x())));
  const int r0 = std::max(0, static_cast<int>(std::floor(lo.y())));
  const int c1 = std::min(spec.width - 1, static_cast<int>(std::ceil(hi.x())));
  const int r1 = std::min(spec.height - 1, static_cast<int>(std::ceil(hi.y())));

  DegradationScore s;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const CellCategory cat = dilated.at({r, c});
      if (cat != CellCategory::Conflict && cat != CellCategory::Occupied) continue;
      const double g = weight((spec.cell_center({r, c}) - center).norm(), params.d_max);
      (cat == CellCategory::Conflict ? s.n_conflict : s.n_occupied) += g;
    }
  }
  const double denom = s.n_conflict + s.n_occupied;
  if (denom > 0) s.alpha = s.n_conflict / denom;
  return s;
}

Action recommend_action(std::optional<double> alpha, const AssessParams& params, bool path_in_conflict,
                        bool proceed_permitted) {
  if (!alpha || *alpha <= params.alpha_max) return Action::Nominal;
  if (!path_in_conflict || proceed_permitted) return Action::AlertAndProceed;
  return Action::AlertAndStop;
}

std::vector<PoseFlag> evaluate_path(std::span<const Pose> poses, const CategoryGrid& dilated) {
  std::vector<PoseFlag> flags;
  flags.reserve(poses.size());
  for (const Pose& p : poses) {
    const auto cat = dilated.at_point(p.position());
    if (!cat) throw PoseOutOfBounds("path pose lies outside the grid");
    flags.push_back(*cat == CellCategory::Conflict   ? PoseFlag::Conflict
                    : *cat == CellCategory::Occupied ? PoseFlag::Blocked
                                                     : PoseFlag::Clear);
  }
  return flags;
}

}  // namespace evmap
