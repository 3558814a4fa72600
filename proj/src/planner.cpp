#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <queue>

#include "evmap/errors.hpp"
#include "evmap/planner.hpp"

namespace evmap {

void PlannerParams::validate() const {
  if (!(c_c >= 0)) throw ConfigError("c_c must be >= 0");
  if (!(d_c >= 0)) throw ConfigError("d_c must be >= 0");
  if (!(step_length > 0)) throw ConfigError("step_length must be > 0");
  if (!(turning_radius > 0)) throw ConfigError("turning_radius must be > 0");
  if (heading_bins < 8) throw ConfigError("heading_bins must be >= 8");
  if (!(base_cost > 0)) throw ConfigError("base_cost must be > 0");
  if (!(goal_tolerance >= 0) || !(goal_heading_tolerance >= 0)) throw ConfigError("goal tolerances must be >= 0");
  if (!(shift_radius >= 0)) throw ConfigError("shift_radius must be >= 0");
}

std::size_t Path::conflict_count() const {
  return static_cast<std::size_t>(std::count(conflict_flags.begin(), conflict_flags.end(), PoseFlag::Conflict));
}

std::string_view to_string(PlanOutcome::Kind k) {
  switch (k) {
    case PlanOutcome::Kind::Success: return "SUCCESS";
    case PlanOutcome::Kind::GoalShifted: return "GOAL_SHIFTED";
    case PlanOutcome::Kind::Unreachable: return "UNREACHABLE";
  }
  return "?";
}

std::string PlanOutcome::summary(const Pose& requested_goal) const {
  if (kind != Kind::GoalShifted) return std::string(to_string(kind));
  char buf[96];
  std::snprintf(buf, sizeof buf, "GOAL_SHIFTED %.3f %.3f", goal.x - requested_goal.x, goal.y - requested_goal.y);
  return buf;
}

CategoryGrid apply_proximity_rule(const CategoryGrid& grid, const Pose& ego, double d_c) {
  CategoryGrid out = grid;
  if (!(d_c > 0)) return out;
  const GridSpec& spec = grid.spec();
  const Eigen::Vector2d center = ego.position();
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      if (grid.at({r, c}) != CellCategory::Conflict) continue;
      if ((spec.cell_center({r, c}) - center).norm() < d_c) out.set({r, c}, CellCategory::Occupied);
    }
  }
  return out;
}

std::optional<Pose> shift_goal(const Pose& goal, const CategoryGrid& grid, double search_radius) {
  const GridSpec& spec = grid.spec();
  if (auto cat = grid.at_point(goal.position()); cat && *cat != CellCategory::Occupied) return goal;

  const Eigen::Vector2d g = goal.position();
  const int reach = static_cast<int>(std::ceil(search_radius / spec.resolution)) + 1;
  const Eigen::Vector2d rel = (g - spec.origin) / spec.resolution;
  const int gc = static_cast<int>(std::floor(rel.x()));
  const int gr = static_cast<int>(std::floor(rel.y()));

  constexpr double kTieTol = 1e-9;
  std::optional<CellIndex> best;
  double best_dist = 0, best_angle = 0;
  for (int r = gr - reach; r <= gr + reach; ++r) {
    for (int c = gc - reach; c <= gc + reach; ++c) {
      const CellIndex idx{r, c};
      if (!spec.in_bounds(idx) || grid.at(idx) == CellCategory::Occupied) continue;
      const Eigen::Vector2d off = spec.cell_center(idx) - g;
      const double dist = off.norm();
      if (dist > search_radius) continue;
      const double angle = dist > 0 ? std::abs(wrap_angle(std::atan2(off.y(), off.x()) - goal.theta)) : 0.0;
      bool better = !best;
      if (!better) {
        if (dist < best_dist - kTieTol) better = true;
        else if (dist <= best_dist + kTieTol) {
          if (angle < best_angle - kTieTol) better = true;
          else if (angle <= best_angle + kTieTol) better = idx < *best;
        }
      }
      if (better) {
        best = idx;
        best_dist = dist;
        best_angle = angle;
      }
    }
  }
  if (!best) return std::nullopt;
  const Eigen::Vector2d p = spec.cell_center(*best);
  return Pose{p.x(), p.y(), goal.theta};
}

// ---------------------------------------------------------------------------

Lattice::Lattice(const CategoryGrid& effective, const PlannerParams& params)
    : grid_(effective),
      params_(params),
      spec_(effective.spec()),
      bins_(params.heading_bins),
      bin_width_(2.0 * std::numbers::pi / params.heading_bins) {
  params_.validate();
  // A primitive of length L moves the snapped pose by at most L plus half a
  // cell diagonal, so this scale keeps the Euclidean bound admissible.
  const double snap = 0.5 * std::sqrt(2.0) * spec_.resolution;
  heuristic_scale_ = params_.base_cost * params_.step_length / (params_.step_length + snap);
}

LatticeState Lattice::state(std::int64_t index) const {
  LatticeState s;
  s.heading = static_cast<int>(index % bins_);
  const std::int64_t cell = index / bins_;
  s.col = static_cast<int>(cell % spec_.width);
  s.row = static_cast<int>(cell / spec_.width);
  return s;
}

Pose Lattice::pose_of(const LatticeState& s) const {
  const Eigen::Vector2d p = spec_.cell_center({s.row, s.col});
  return {p.x(), p.y(), wrap_angle(s.heading * bin_width_)};
}

std::optional<LatticeState> Lattice::snap(const Pose& p) const {
  auto c = spec_.cell_of(p.position());
  if (!c) return std::nullopt;
  int h = static_cast<int>(std::lround(wrap_angle(p.theta) / bin_width_)) % bins_;
  if (h < 0) h += bins_;
  return LatticeState{c->col, c->row, h};
}

bool Lattice::traversable(const LatticeState& s) const {
  return spec_.in_bounds({s.row, s.col}) && grid_.at({s.row, s.col}) != CellCategory::Occupied;
}

void Lattice::successors(const LatticeState& s, std::vector<Edge>& out) const {
  out.clear();
  const Pose from = pose_of(s);
  const double len = params_.step_length;
  const double radius = params_.turning_radius;
  constexpr int kSamples = 4;
  const double ds = len / kSamples;

  for (int turn : {0, 1, -1}) {
    double cost = 0;
    bool ok = true;
    Eigen::Vector2d end;
    for (int k = 1; k <= kSamples && ok; ++k) {
      const double arc = ds * k;
      Eigen::Vector2d p;
      if (turn == 0) {
        p = from.position() + arc * from.heading_vector();
      } else {
        const double phi = turn * arc / radius;
        const Eigen::Vector2d normal(-std::sin(from.theta), std::cos(from.theta));
        const Eigen::Vector2d center = from.position() + turn * radius * normal;
        const double ang = from.theta + phi;
        p = center + turn * radius * Eigen::Vector2d(std::sin(ang), -std::cos(ang));
      }
      const auto cat = grid_.at_point(p);
      if (!cat || *cat == CellCategory::Occupied) {
        ok = false;
        break;
      }
      cost += ds * (params_.base_cost + (*cat == CellCategory::Conflict ? params_.c_c : 0.0));
      end = p;
    }
    if (!ok) continue;
    const auto cell = spec_.cell_of(end);
    if (!cell || (cell->row == s.row && cell->col == s.col)) continue;
    const double heading = from.theta + turn * len / radius;
    int h = static_cast<int>(std::lround(wrap_angle(heading) / bin_width_)) % bins_;
    if (h < 0) h += bins_;
    out.push_back({LatticeState{cell->col, cell->row, h}, cost});
  }
}

bool Lattice::in_goal_region(const LatticeState& s, const Pose& goal) const {
  const Pose p = pose_of(s);
  if ((p.position() - goal.position()).norm() > params_.goal_tolerance + 1e-9) return false;
  return std::abs(wrap_angle(p.theta - goal.theta)) <= params_.goal_heading_tolerance + 1e-9;
}

double Lattice::heuristic(const LatticeState& s, const Pose& goal) const {
  const double dist = (pose_of(s).position() - goal.position()).norm();
  return heuristic_scale_ * std::max(0.0, dist - params_.goal_tolerance);
}

// ---------------------------------------------------------------------------

namespace {

struct OpenEntry {
  double f;
  double h;
  std::uint64_t seq;
  std::int64_t index;
};

struct OpenOrder {
  // std::priority_queue pops the largest; invert so the smallest
  // (f, h, seq) surfaces first.
  bool operator()(const OpenEntry& x, const OpenEntry& y) const {
    if (x.f != y.f) return x.f > y.f;
    if (x.h != y.h) return x.h > y.h;
    return x.seq > y.seq;
  }
};

}  // namespace

std::optional<Path> search(const Pose& start, const Pose& goal, const CategoryGrid& effective,
                           const PlannerParams& params) {
  const Lattice lattice(effective, params);
  const auto start_state = lattice.snap(start);
  if (!start_state) throw PoseOutOfBounds("start lies outside the grid");
  if (!lattice.traversable(*start_state)) throw StartBlocked("start cell is occupied");

  const std::int64_t n = lattice.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> g(static_cast<std::size_t>(n), inf);
  std::vector<std::int64_t> parent(static_cast<std::size_t>(n), -1);
  std::vector<std::uint8_t> closed(static_cast<std::size_t>(n), 0);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;
  std::uint64_t seq = 0;

  const std::int64_t s0 = lattice.index(*start_state);
  g[s0] = 0;
  const double h0 = lattice.heuristic(*start_state, goal);
  open.push({h0, h0, seq++, s0});

  std::vector<Lattice::Edge> edges;
  std::int64_t found = -1;
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    if (closed[top.index]) continue;
    closed[top.index] = 1;
    const LatticeState s = lattice.state(top.index);
    if (lattice.in_goal_region(s, goal)) {
      found = top.index;
      break;
    }
    lattice.successors(s, edges);
    for (const auto& e : edges) {
      const std::int64_t j = lattice.index(e.to);
      if (closed[j]) continue;
      const double cand = g[top.index] + e.cost;
      if (cand < g[j]) {
        g[j] = cand;
        parent[j] = top.index;
        const double h = lattice.heuristic(e.to, goal);
        open.push({cand + h, h, seq++, j});
      }
    }
  }
  if (found < 0) return std::nullopt;

  std::vector<std::int64_t> chain;
  for (std::int64_t i = found; i >= 0; i = parent[i]) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());

  Path path;
  for (std::int64_t i : chain) {
    path.poses.push_back(lattice.pose_of(lattice.state(i)));
    path.cumulative_cost.push_back(g[i]);
  }
  path.total_cost = g[found];
  path.conflict_flags = evaluate_path(path.poses, effective);
  return path;
}

PlanOutcome plan(const Pose& start, const Pose& goal, const CategoryGrid& dilated, const PlannerParams& params) {
  params.validate();
  const CategoryGrid effective = apply_proximity_rule(dilated, start, params.d_c);
  const auto start_cat = effective.at_point(start.position());
  if (!start_cat) throw PoseOutOfBounds("start lies outside the grid");
  if (*start_cat == CellCategory::Occupied) throw StartBlocked("start cell is occupied");
  const auto goal_cat = effective.at_point(goal.position());
  if (!goal_cat) throw PoseOutOfBounds("goal lies outside the grid");

  PlanOutcome out;
  out.goal = goal;
  out.kind = PlanOutcome::Kind::Success;
  if (*goal_cat == CellCategory::Occupied) {
    const auto shifted = shift_goal(goal, effective, params.shift_radius);
    if (!shifted) {
      out.kind = PlanOutcome::Kind::Unreachable;
      return out;
    }
    out.goal = *shifted;
    out.kind = PlanOutcome::Kind::GoalShifted;
  }
  auto path = search(start, out.goal, effective, params);
  if (!path) {
    out.kind = PlanOutcome::Kind::Unreachable;
    return out;
  }
  out.path = std::move(*path);
  return out;
}

}  // namespace evmap
