#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evmap/assess.hpp"
#include "evmap/categories.hpp"
#include "evmap/pose.hpp"

namespace evmap {

struct PlannerParams {
  double c_c{5.0};             // extra cost per meter over Conflict cells
  double d_c{5.0};             // Conflict cells closer than this become Occupied
  double turning_radius{4.0};
  double step_length{1.0};
  int heading_bins{16};
  double base_cost{1.0};       // cost per meter of any motion
  double goal_tolerance{0.5};  // meters
  double goal_heading_tolerance{deg2rad(15.0)};
  double shift_radius{6.0};    // search radius for goal shifting, meters

  void validate() const;
};

struct Path {
  std::vector<Pose> poses;
  std::vector<PoseFlag> conflict_flags;
  std::vector<double> cumulative_cost;
  double total_cost{0};

  std::size_t conflict_count() const;
  bool empty() const { return poses.empty(); }
};

struct PlanOutcome {
  enum class Kind { Success, GoalShifted, Unreachable };
  Kind kind{Kind::Unreachable};
  Path path;
  Pose goal;  // goal actually planned to (the shifted one for GoalShifted)

  /// "SUCCESS", "GOAL_SHIFTED dx dy" or "UNREACHABLE".
  std::string summary(const Pose& requested_goal) const;
};

std::string_view to_string(PlanOutcome::Kind k);

/// Conflict cells whose centers lie strictly within d_c of `ego` become Occupied.
CategoryGrid apply_proximity_rule(const CategoryGrid& grid, const Pose& ego, double d_c);

/// Nearest non-Occupied cell center within `search_radius` of `goal`,
/// keeping the requested heading. Ties go to the smaller angle between the
/// goal heading and the shift direction, then to the smaller (row, col).
/// A goal whose own cell is valid is returned unchanged.
std::optional<Pose> shift_goal(const Pose& goal, const CategoryGrid& grid, double search_radius);

/// Discrete state of the search lattice: a cell and a heading bin.
struct LatticeState {
  int col{0};
  int row{0};
  int heading{0};
  friend bool operator==(const LatticeState&, const LatticeState&) = default;
};

/// Forward-only motion lattice over an effective category grid. Every
/// state's pose is the cell center with the bin heading; each primitive
/// (straight, left arc, right arc) ends snapped to the lattice.
class Lattice {
 public:
  struct Edge {
    LatticeState to;
    double cost{0};
  };

  Lattice(const CategoryGrid& effective, const PlannerParams& params);

  std::int64_t size() const { return std::int64_t(spec_.width) * spec_.height * bins_; }
  std::int64_t index(const LatticeState& s) const {
    return (std::int64_t(s.row) * spec_.width + s.col) * bins_ + s.heading;
  }
  LatticeState state(std::int64_t index) const;

  Pose pose_of(const LatticeState& s) const;
  std::optional<LatticeState> snap(const Pose& p) const;
  bool traversable(const LatticeState& s) const;

  /// Valid successors of `s`, in the fixed order straight, left, right.
  void successors(const LatticeState& s, std::vector<Edge>& out) const;

  bool in_goal_region(const LatticeState& s, const Pose& goal) const;

  /// Lower bound on the cost from `s` into the goal region.
  double heuristic(const LatticeState& s, const Pose& goal) const;

  const CategoryGrid& grid() const { return grid_; }
  const PlannerParams& params() const { return params_; }

 private:
  CategoryGrid grid_;
  PlannerParams params_;
  GridSpec spec_;
  int bins_;
  double bin_width_;
  double heuristic_scale_;
};

/// Conflict-aware planning on a dilated category grid. The proximity rule is
/// applied around `start` first; Conflict, Unknown and Free cells are
/// traversable and Conflict costs c_c extra per meter. An Occupied goal is
/// shifted. Throws StartBlocked if the start cell is Occupied.
PlanOutcome plan(const Pose& start, const Pose& goal, const CategoryGrid& dilated, const PlannerParams& params);

/// Search only: plans on an already effective grid without shifting.
std::optional<Path> search(const Pose& start, const Pose& goal, const CategoryGrid& effective,
                           const PlannerParams& params);

}  // namespace evmap
