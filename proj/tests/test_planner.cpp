#include <doctest.h>

#include <limits>
#include <numbers>
#include <queue>
#include <random>

#include "evmap/errors.hpp"
#include "evmap/planner.hpp"
#include "evmap/replay.hpp"

using namespace evmap;

namespace {

// Plain Dijkstra over the same lattice, stopping at the first goal-region
// state popped. No heuristic, no tie-breaking subtleties.
std::optional<double> dijkstra_cost(const CategoryGrid& effective, const PlannerParams& params, const Pose& start,
                                    const Pose& goal) {
  const Lattice lat(effective, params);
  const auto s0 = lat.snap(start);
  if (!s0 || !lat.traversable(*s0)) return std::nullopt;
  std::vector<double> dist(static_cast<std::size_t>(lat.size()), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::int64_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[lat.index(*s0)] = 0;
  pq.push({0, lat.index(*s0)});
  std::vector<Lattice::Edge> edges;
  while (!pq.empty()) {
    const auto [d, i] = pq.top();
    pq.pop();
    if (d > dist[i]) continue;
    const LatticeState s = lat.state(i);
    if (lat.in_goal_region(s, goal)) return d;
    lat.successors(s, edges);
    for (const auto& e : edges) {
      const auto j = lat.index(e.to);
      if (d + e.cost < dist[j]) {
        dist[j] = d + e.cost;
        pq.push({dist[j], j});
      }
    }
  }
  return std::nullopt;
}

CategoryGrid random_world(std::mt19937_64& rng, const GridSpec& spec) {
  std::uniform_int_distribution<int> col(0, spec.width - 1), row(0, spec.height - 1), len(2, 10), kind(0, 2);
  CategoryGrid g(spec, CellCategory::Free);
  for (int k = 0; k < 14; ++k) {
    const int c = col(rng), r = row(rng), w = len(rng), h = len(rng) / 3 + 1;
    const bool horizontal = kind(rng) != 0;
    const CellCategory cat = kind(rng) == 0 ? CellCategory::Conflict : kind(rng) == 1 ? CellCategory::Unknown : CellCategory::Occupied;
    for (int i = 0; i < (horizontal ? w : h); ++i)
      for (int j = 0; j < (horizontal ? h : w); ++j)
        if (spec.in_bounds({r + j, c + i})) g.set({r + j, c + i}, cat);
  }
  return g;
}

void fill(CategoryGrid& g, double x0, double y0, double x1, double y1, CellCategory c) {
  const GridSpec& s = g.spec();
  for (int r = 0; r < s.height; ++r)
    for (int k = 0; k < s.width; ++k) {
      const Eigen::Vector2d p = s.cell_center({r, k});
      if (p.x() >= x0 && p.x() <= x1 && p.y() >= y0 && p.y() <= y1) g.set({r, k}, c);
    }
}

bool path_touches(const Path& p, const CategoryGrid& g, CellCategory c) {
  for (const auto& q : p.poses)
    if (g.at_point(q.position()) == c) return true;
  return false;
}

}  // namespace

TEST_CASE("proximity rule") {
  const GridSpec s{1.0, 21, 21, Eigen::Vector2d(-10.5, -10.5)};
  CategoryGrid g(s, CellCategory::Free);
  g.set(*s.cell_of({3, 0}), CellCategory::Conflict);
  g.set(*s.cell_of({7, 0}), CellCategory::Conflict);
  g.set(*s.cell_of({0, 5}), CellCategory::Conflict);
  const Pose ego{0, 0, 0};
  CHECK(apply_proximity_rule(g, ego, 0.0) == g);
  const auto p = apply_proximity_rule(g, ego, 5.0);
  CHECK(p.at_point({3, 0}) == CellCategory::Occupied);
  CHECK(p.at_point({7, 0}) == CellCategory::Conflict);
  CHECK(p.at_point({0, 5}) == CellCategory::Conflict);  // strictly within only
  CHECK(p.count(CellCategory::Occupied) == 1);
}

TEST_CASE("goal shifting") {
  const GridSpec s{1.0, 21, 21, Eigen::Vector2d(-10.5, -10.5)};
  CategoryGrid g(s, CellCategory::Free);
  const Pose goal{2, 3, 0.3};
  CHECK(*shift_goal(goal, g, 6.0) == goal);

  g.set(*s.cell_of({2, 3}), CellCategory::Occupied);
  const auto moved = shift_goal(goal, g, 6.0);
  REQUIRE(moved);
  // four neighbours at distance 1; the one along the heading (0.3 rad) wins
  CHECK(moved->x == 3.0);
  CHECK(moved->y == 3.0);
  CHECK(moved->theta == 0.3);

  CategoryGrid all(s, CellCategory::Occupied);
  CHECK_FALSE(shift_goal(goal, all, 6.0));

  SUBCASE("nearest valid cell matches brute force") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 30; ++t) {
      CategoryGrid w = random_world(rng, s);
      fill(w, -1.5, -1.5, 1.5 + t % 3, 1.5, CellCategory::Occupied);
      const Pose q{0.2, -0.1, 0.0};
      const auto got = shift_goal(q, w, 6.0);
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < s.height; ++r)
        for (int c = 0; c < s.width; ++c)
          if (w.at({r, c}) != CellCategory::Occupied)
            best = std::min(best, (s.cell_center({r, c}) - q.position()).norm());
      if (best > 6.0) {
        CHECK_FALSE(got);
      } else {
        REQUIRE(got);
        CHECK((got->position() - q.position()).norm() == doctest::Approx(best));
        CHECK(w.at_point(got->position()) != CellCategory::Occupied);
      }
    }
  }
}

TEST_CASE("straight corridor") {
  const GridSpec s{0.5, 60, 20, Eigen::Vector2d(0, -5)};
  CategoryGrid g(s, CellCategory::Free);
  fill(g, 0, -5, 30, -3.6, CellCategory::Occupied);
  fill(g, 0, 3.6, 30, 5, CellCategory::Occupied);
  const Pose start{2.25, 0.25, 0}, goal{22.25, 0.25, 0};
  const auto out = plan(start, goal, g, PlannerParams{});
  REQUIRE(out.kind == PlanOutcome::Kind::Success);
  CHECK(out.path.conflict_count() == 0);
  CHECK(out.path.total_cost == doctest::Approx(20.0));
  for (const auto& p : out.path.poses) CHECK(p.y == doctest::Approx(0.25));
  CHECK(out.summary(goal) == "SUCCESS");
}

TEST_CASE("conflict penalty diverts around a band only when it pays") {
  // Corridor 0..40 m; a Conflict band blocks most of its width close ahead,
  // leaving a lane along the upper wall.
  const GridSpec s{0.5, 80, 40, Eigen::Vector2d(0, -10)};
  CategoryGrid g(s, CellCategory::Free);
  fill(g, 0, -10, 40, -2.1, CellCategory::Occupied);
  fill(g, 0, 6.1, 40, 10, CellCategory::Occupied);
  fill(g, 6, -2.1, 12, 5.0, CellCategory::Conflict);
  const Pose start{2.25, 0.25, 0}, goal{34.25, 0.25, 0};

  PlannerParams with_penalty;
  with_penalty.d_c = 0;
  const auto a = plan(start, goal, g, with_penalty);
  REQUIRE(a.kind == PlanOutcome::Kind::Success);
  CHECK(a.path.conflict_count() == 0);
  CHECK_FALSE(path_touches(a.path, g, CellCategory::Conflict));

  PlannerParams no_penalty = with_penalty;
  no_penalty.c_c = 0;
  const auto b = plan(start, goal, g, no_penalty);
  REQUIRE(b.kind == PlanOutcome::Kind::Success);
  CHECK(b.path.conflict_count() > 0);
  CHECK(b.path.total_cost < a.path.total_cost);

  // Both match the exhaustive oracle on the same lattice.
  CHECK(a.path.total_cost == doctest::Approx(*dijkstra_cost(g, with_penalty, start, goal)).epsilon(1e-9));
  CHECK(b.path.total_cost == doctest::Approx(*dijkstra_cost(g, no_penalty, start, goal)).epsilon(1e-9));
}

TEST_CASE("goal on Conflict cells is accepted with flagged final poses") {
  const GridSpec s{0.5, 60, 20, Eigen::Vector2d(0, -5)};
  CategoryGrid g(s, CellCategory::Free);
  fill(g, 18, -2, 26, 2, CellCategory::Conflict);
  const Pose start{2.25, 0.25, 0}, goal{22.25, 0.25, 0};
  const auto out = plan(start, goal, g, PlannerParams{});
  REQUIRE(out.kind == PlanOutcome::Kind::Success);
  CHECK(out.goal == goal);
  REQUIRE(out.path.poses.size() > 3);
  CHECK(out.path.conflict_flags.back() == PoseFlag::Conflict);
  CHECK(out.path.conflict_flags[out.path.poses.size() - 2] == PoseFlag::Conflict);
  CHECK(out.path.conflict_flags.front() == PoseFlag::Clear);
}

TEST_CASE("Occupied goal is shifted") {
  const GridSpec s{0.5, 60, 20, Eigen::Vector2d(0, -5)};
  CategoryGrid g(s, CellCategory::Free);
  fill(g, 21.5, -0.5, 23, 1, CellCategory::Occupied);
  const Pose start{2.25, 0.25, 0}, goal{22.25, 0.25, 0};
  const auto out = plan(start, goal, g, PlannerParams{});
  CHECK(out.kind == PlanOutcome::Kind::GoalShifted);
  CHECK(g.at_point(out.goal.position()) != CellCategory::Occupied);
  CHECK(out.summary(goal).rfind("GOAL_SHIFTED ", 0) == 0);
  CHECK(out.summary(goal) == "GOAL_SHIFTED 1.000 0.000");
}

TEST_CASE("blocked start and unreachable goal") {
  const GridSpec s{0.5, 40, 20, Eigen::Vector2d(0, -5)};
  CategoryGrid g(s, CellCategory::Free);
  fill(g, 0, -5, 3, 5, CellCategory::Occupied);
  CHECK_THROWS_AS(plan({1.25, 0.25, 0}, {15, 0, 0}, g, PlannerParams{}), StartBlocked);

  CategoryGrid wall(s, CellCategory::Free);
  fill(wall, 10, -5, 11, 5, CellCategory::Occupied);
  const auto out = plan({2.25, 0.25, 0}, {15.25, 0.25, 0}, wall, PlannerParams{});
  CHECK(out.kind == PlanOutcome::Kind::Unreachable);
  CHECK(out.summary({15.25, 0.25, 0}) == "UNREACHABLE");
}

TEST_CASE("a goal reachable only through Conflict beyond d_c is not abandoned") {
  const GridSpec s{0.5, 60, 20, Eigen::Vector2d(0, -5)};
  CategoryGrid g(s, CellCategory::Free);
  fill(g, 12, -5, 14, 5, CellCategory::Conflict);
  const auto out = plan({2.25, 0.25, 0}, {24.25, 0.25, 0}, g, PlannerParams{});
  CHECK(out.kind == PlanOutcome::Kind::Success);
  CHECK(out.path.conflict_count() > 0);
}

TEST_CASE("optimality against exhaustive search on random worlds") {
  std::mt19937_64 rng(2718);
  int solved = 0;
  for (int t = 0; t < 25; ++t) {
    const int w = 30 + t % 21, h = 30 + (t * 7) % 21;
    const GridSpec s{0.5, w, h, Eigen::Vector2d(0, 0)};
    CategoryGrid g = random_world(rng, s);
    std::uniform_int_distribution<int> col(1, w - 2), row(1, h - 2), bin(0, 15);
    Pose start, goal;
    do {
      start = {s.cell_center({row(rng), col(rng)}).x(), s.cell_center({row(rng), col(rng)}).y(), bin(rng) * std::numbers::pi / 8};
    } while (g.at_point(start.position()) == CellCategory::Occupied);
    do {
      goal = {s.cell_center({row(rng), col(rng)}).x(), s.cell_center({row(rng), col(rng)}).y(), wrap_angle(bin(rng) * std::numbers::pi / 8)};
    } while (g.at_point(goal.position()) == CellCategory::Occupied);

    PlannerParams p;
    p.d_c = 0;  // keep the effective grid identical to the input
    const auto got = search(start, goal, g, p);
    const auto want = dijkstra_cost(g, p, start, goal);
    REQUIRE(got.has_value() == want.has_value());
    if (!got) continue;
    ++solved;
    CHECK(std::abs(got->total_cost - *want) <= 1e-6);
    const auto again = search(start, goal, g, p);
    REQUIRE(again);
    CHECK(again->poses == got->poses);
    CHECK(again->total_cost == got->total_cost);
    for (const auto& q : got->poses) CHECK(g.at_point(q.position()) != CellCategory::Occupied);
  }
  CHECK(solved >= 10);
}

TEST_CASE("raising the conflict penalty never adds conflict poses") {
  for (int band = 1; band <= 4; ++band) {
    const GridSpec s{0.5, 80, 40, Eigen::Vector2d(0, -10)};
    CategoryGrid g(s, CellCategory::Free);
    fill(g, 0, -10, 40, -3.1, CellCategory::Occupied);
    fill(g, 0, 3.1 + band, 40, 10, CellCategory::Occupied);
    fill(g, 14, -3.1, 14 + 2 * band, 2.0, CellCategory::Conflict);
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    double prev_cost = 0;
    std::size_t prev_clear = 0;
    for (const double c : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0}) {
      PlannerParams p;
      p.c_c = c;
      const auto out = plan({2.25, 0.25, 0}, {34.25, 0.25, 0}, g, p);
      REQUIRE(out.kind == PlanOutcome::Kind::Success);
      CHECK(out.path.conflict_count() <= prev);
      CHECK(out.path.total_cost >= prev_cost - 1e-9);
      const std::size_t clear = out.path.poses.size() - out.path.conflict_count();
      CHECK(clear >= prev_clear);
      prev_clear = clear;
      prev = out.path.conflict_count();
      prev_cost = out.path.total_cost;
    }
    CHECK(prev == 0);
  }
}

TEST_CASE("replanning when Conflict turns Occupied near the vehicle") {
  const GridSpec s{0.5, 100, 40, Eigen::Vector2d(-5, -10)};
  CategoryGrid g(s, CellCategory::Free);
  fill(g, -5, -10, 45, -3.1, CellCategory::Occupied);
  fill(g, -5, 6.1, 45, 10, CellCategory::Occupied);
  fill(g, 8, -3.1, 8.4, 5.0, CellCategory::Conflict);  // thin band, cheap to cross from afar
  const Pose start{0.25, 0.25, 0}, goal{30.25, 0.25, 0};
  const GridProvider provider = [&](const Pose&) { return g; };
  ReplayConfig cfg;
  cfg.dilation_radius = 0;
  PlannerParams params;
  params.c_c = 1.0;
  const auto steps = replan_loop(start, goal, provider, params, cfg);
  REQUIRE(!steps.empty());
  CHECK(steps.front().reason == ReplanReason::Initial);
  CHECK(steps.front().outcome.path.conflict_count() > 0);
  bool replanned = false;
  for (const auto& st : steps) replanned |= st.reason == ReplanReason::PathBlockedByConflict;
  CHECK(replanned);
  CHECK(steps.back().goal_reached);
  for (const auto& st : steps) CHECK(st.blocked_poses == 0);
  for (const auto& st : steps)
    if (st.reason == ReplanReason::PathBlockedByConflict) CHECK_FALSE(path_touches(st.outcome.path, st.effective, CellCategory::Occupied));
}
