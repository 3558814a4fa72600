#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "evmap/categories.hpp"
#include "evmap/pose.hpp"

namespace evmap {

struct AssessParams {
  double d_max{15.0};
  double alpha_max{0.1};

  void validate() const;
};

enum class Action { Nominal, AlertAndStop, AlertAndProceed };
std::string_view to_string(Action a);

/// Distance weighting: (d_max - d) / d_max inside the ROI, zero beyond it.
template <typename Scalar>
constexpr Scalar weight(Scalar d, Scalar d_max) {
  return d <= d_max ? (d_max - d) / d_max : Scalar(0);
}

struct DegradationScore {
  std::optional<double> alpha;  // empty when no conflict or occupied mass lies in the ROI
  double n_conflict{0};         // distance-weighted conflict cells
  double n_occupied{0};         // distance-weighted occupied cells
};

/// Degradation score of a dilated category grid seen from `ego`. Distances
/// run from the ego reference point to cell centers.
DegradationScore degradation_score(const CategoryGrid& dilated, const Pose& ego, const AssessParams& params);

/// ODD reaction to a score. `proceed_permitted` is the mission policy that
/// lets a degraded vehicle continue even though its path crosses conflicts.
Action recommend_action(std::optional<double> alpha, const AssessParams& params, bool path_in_conflict,
                        bool proceed_permitted = false);

struct Assessment {
  DegradationScore score;
  Action action{Action::Nominal};
};

enum class PoseFlag : std::uint8_t { Clear, Conflict, Blocked };

/// Flags each pose by the dilated cell under it: Conflict cells flag
/// Conflict, Occupied cells flag Blocked. Throws PoseOutOfBounds.
std::vector<PoseFlag> evaluate_path(std::span<const Pose> poses, const CategoryGrid& dilated);

inline bool any_conflict(std::span<const PoseFlag> flags) {
  for (auto f : flags)
    if (f == PoseFlag::Conflict) return true;
  return false;
}

}  // namespace evmap
