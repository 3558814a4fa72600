#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "evmap/categories.hpp"
#include "evmap/planner.hpp"

namespace evmap {

enum class ReplanReason {
  None,
  Initial,
  PathBlocked,            // a remaining pose now lies on an Occupied cell
  PathBlockedByConflict,  // ... on a Conflict cell converted by the proximity rule
  GoalInvalidated,
  GoalInvalidatedByConflict,
};
std::string_view to_string(ReplanReason r);

inline bool triggered_by_conflict(ReplanReason r) {
  return r == ReplanReason::PathBlockedByConflict || r == ReplanReason::GoalInvalidatedByConflict;
}

struct ReplayConfig {
  double advance{2.0};        // arc length driven per step, meters
  int max_steps{60};
  double dilation_radius{1.5};
};

struct ReplayStep {
  int step{0};
  Pose ego;
  PlanOutcome outcome;            // current plan after this step's check
  ReplanReason reason{ReplanReason::None};
  std::size_t path_index{0};      // ego position on outcome.path
  std::size_t conflict_poses{0};  // Conflict-flagged poses on the remaining path
  std::size_t blocked_poses{0};   // Occupied poses on the remaining path
  bool goal_reached{false};
  CategoryGrid effective;         // dilated grid after the proximity rule
};

/// Classified (undilated) category grid observed from an ego pose.
using GridProvider = std::function<CategoryGrid(const Pose& ego)>;

/// Drives along the current plan, rebuilding the grid every step and
/// replanning when the remaining path or the goal becomes Occupied. Stops
/// when the goal region is reached, the goal is unreachable, or after
/// max_steps.
std::vector<ReplayStep> replan_loop(const Pose& start, const Pose& goal, const GridProvider& provider,
                                    const PlannerParams& params, const ReplayConfig& config);

}  // namespace evmap
