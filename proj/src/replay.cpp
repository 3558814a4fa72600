#include "evmap/replay.hpp"

#include <algorithm>

namespace evmap {

std::string_view to_string(ReplanReason r) {
  switch (r) {
    case ReplanReason::None: return "none";
    case ReplanReason::Initial: return "initial";
    case ReplanReason::PathBlocked: return "path_blocked";
    case ReplanReason::PathBlockedByConflict: return "path_blocked_by_conflict";
    case ReplanReason::GoalInvalidated: return "goal_invalidated";
    case ReplanReason::GoalInvalidatedByConflict: return "goal_invalidated_by_conflict";
  }
  return "?";
}

namespace {

ReplanReason check_validity(const PlanOutcome& current, std::size_t from, const CategoryGrid& dilated,
                            const CategoryGrid& effective) {
  auto converted = [&](const Eigen::Vector2d& p) {
    auto before = dilated.at_point(p);
    return before && *before == CellCategory::Conflict;
  };
  const auto& poses = current.path.poses;
  for (std::size_t i = from; i < poses.size(); ++i) {
    const auto cat = effective.at_point(poses[i].position());
    if (!cat || *cat == CellCategory::Occupied)
      return cat && converted(poses[i].position()) ? ReplanReason::PathBlockedByConflict : ReplanReason::PathBlocked;
  }
  const auto goal_cat = effective.at_point(current.goal.position());
  if (!goal_cat || *goal_cat == CellCategory::Occupied)
    return goal_cat && converted(current.goal.position()) ? ReplanReason::GoalInvalidatedByConflict
                                                          : ReplanReason::GoalInvalidated;
  return ReplanReason::None;
}

std::size_t advance_index(const std::vector<Pose>& poses, std::size_t from, double distance) {
  double travelled = 0;
  std::size_t i = from;
  while (i + 1 < poses.size() && travelled < distance - 1e-9) {
    travelled += (poses[i + 1].position() - poses[i].position()).norm();
    ++i;
  }
  return i;
}

}  // namespace

std::vector<ReplayStep> replan_loop(const Pose& start, const Pose& goal, const GridProvider& provider,
                                    const PlannerParams& params, const ReplayConfig& config) {
  std::vector<ReplayStep> steps;
  Pose ego = start;
  PlanOutcome current;
  std::size_t index = 0;

  for (int step = 0; step <= config.max_steps; ++step) {
    const CategoryGrid dilated = dilate(provider(ego), config.dilation_radius);
    CategoryGrid effective = apply_proximity_rule(dilated, ego, params.d_c);

    ReplanReason reason = step == 0 ? ReplanReason::Initial : check_validity(current, index, dilated, effective);
    if (reason != ReplanReason::None) {
      current = plan(ego, goal, dilated, params);
      index = 0;
    }

    ReplayStep rec{step, ego, current, reason, index, 0, 0, false, std::move(effective)};
    const auto& poses = current.path.poses;
    if (!poses.empty()) {
      const std::span<const Pose> remaining(poses.begin() + static_cast<std::ptrdiff_t>(index), poses.end());
      for (PoseFlag f : evaluate_path(remaining, rec.effective)) {
        rec.conflict_poses += f == PoseFlag::Conflict;
        rec.blocked_poses += f == PoseFlag::Blocked;
      }
      rec.goal_reached = index + 1 == poses.size();
    }
    steps.push_back(std::move(rec));

    if (current.kind == PlanOutcome::Kind::Unreachable || steps.back().goal_reached) break;
    index = advance_index(poses, index, config.advance);
    ego = poses[index];
  }
  return steps;
}

}  // namespace evmap
