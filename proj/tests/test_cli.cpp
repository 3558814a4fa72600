#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "evmap/categories.hpp"
#include "evmap/pnm.hpp"
#include "evmap/scenario.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "evmap");
  std::ostringstream out, err;
  const int code = evmap::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "evmap_test_cli" / name;
  fs::remove_all(dir);
  return dir;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> v;
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST_CASE("map writes every layer and the manifest") {
  const fs::path dir = fresh("map");
  const Run r = run({"map", "conflict_parking", "--error-kind", "none", "--out", dir.string()});
  REQUIRE(r.code == 0);
  for (const char* f : {"sensor0_probability.pgm", "sensor1_probability.pgm", "fused_probability.pgm",
                        "fused_uncertainty.pgm", "categories.pgm", "categories.ppm", "manifest.txt"})
    CHECK(fs::exists(dir / f));
  CHECK(r.out.find("conflict 0 ") != std::string::npos);
  const auto img = evmap::read_pgm(dir / "categories.pgm");
  for (int v : img.pixels) CHECK(v != evmap::category_gray(evmap::CellCategory::Conflict));

  const auto manifest = lines_of(dir / "manifest.txt");
  bool has_hash = false, has_cc = false;
  for (const auto& l : manifest) {
    has_hash |= l.rfind("scenario_hash = ", 0) == 0;
    has_cc |= l == "planner.c_c = 5";
  }
  CHECK(has_hash);
  CHECK(has_cc);
}

TEST_CASE("rotational error shows up as conflict pixels") {
  const fs::path dir = fresh("map_rot");
  REQUIRE(run({"map", "conflict_parking", "--out", dir.string(), "--render"}).code == 0);
  CHECK(fs::exists(dir / "categories_dilated.ppm"));
  const auto img = evmap::read_pgm(dir / "categories.pgm");
  int n = 0;
  for (int v : img.pixels) n += v == evmap::category_gray(evmap::CellCategory::Conflict);
  CHECK(n > 0);

  const fs::path conv = fresh("map_conv");
  const Run c = run({"map", "conflict_parking", "--conventional", "--out", conv.string()});
  REQUIRE(c.code == 0);
  CHECK(c.out.find("conflict 0 ") != std::string::npos);
}

TEST_CASE("missing scenario and bad options exit with 2") {
  const Run r = run({"assess", "/no/such/file.scn", "--out", fresh("missing").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("/no/such/file.scn") != std::string::npos);
  CHECK(run({"plan", "narrow_passage", "--error-kind", "sideways"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"map", "conflict_parking", "--error-mag", "-1", "--out", fresh("neg").string()}).code == 2);
}

TEST_CASE("assess reports an undefined score for an empty world") {
  const fs::path dir = fresh("assess");
  fs::create_directories(dir);
  const fs::path scn = dir / "empty.scn";
  std::ofstream(scn) << "name = empty\n";
  const Run r = run({"assess", scn.string(), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = lines_of(dir / "assess.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "scenario_id,error_kind,error_magnitude,alpha,n_conflict_weighted,n_occupied_weighted,action");
  CHECK(rows[1].find(",undefined,") != std::string::npos);
  CHECK(rows[1].rfind(",nominal") == rows[1].size() - 8);
}

TEST_CASE("sweep row counts") {
  const fs::path dir = fresh("sweep");
  REQUIRE(run({"sweep", "narrow_passage", "--out", dir.string()}).code == 0);
  int rot = 0, trans = 0;
  for (const auto& l : lines_of(dir / "sweep.csv")) {
    rot += l.find(",rot,") != std::string::npos;
    trans += l.find(",trans,") != std::string::npos;
  }
  CHECK(rot == 16);
  CHECK(trans == 11);
  CHECK(lines_of(dir / "sweep_summary.csv").size() == 3);
  CHECK(fs::exists(dir / "sweep.dat"));
}

TEST_CASE("plan through the narrow passage") {
  const fs::path dir = fresh("plan");
  const Run r = run({"plan", "narrow_passage", "--out", dir.string(), "--render"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("SUCCESS\n", 0) == 0);
  CHECK(fs::exists(dir / "plan.ppm"));
  const auto rows = lines_of(dir / "path.csv");
  REQUIRE(rows.size() > 2);
  int flagged = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) flagged += rows[i].find(",1,") != std::string::npos;
  CHECK(flagged > 0);

  const fs::path conv = fresh("plan_conv");
  const Run c = run({"plan", "narrow_passage", "--conventional", "--out", conv.string()});
  REQUIRE(c.code == 0);
  CHECK(lines_of(conv / "path.csv").size() > rows.size());  // the gap reads as blocked, so it detours
}

TEST_CASE("replay writes one row and one image per step") {
  const fs::path dir = fresh("replay");
  const Run r = run({"replay", "narrow_passage", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("goal_reached 1") != std::string::npos);
  const auto rows = lines_of(dir / "replay.csv");
  REQUIRE(rows.size() > 2);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "step_%03zu.pgm", i - 1);
    CHECK(fs::exists(dir / "steps" / name));
  }
  CHECK(lines_of(dir / "outcome.txt").front() == "SUCCESS");
}
