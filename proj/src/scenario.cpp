#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "evmap/errors.hpp"
#include "evmap/scenario.hpp"

#ifndef EVMAP_SCENARIO_DIR
#define EVMAP_SCENARIO_DIR "scenarios"
#endif

namespace evmap {

std::vector<SensorConfig> default_sensor_pair() {
  SensorConfig front;
  front.mount = {1.5, 0.0, 0.0};
  SensorConfig rear;
  rear.mount = {0.5, 0.0, 0.0};
  front.true_mount = front.mount;
  rear.true_mount = rear.mount;
  return {front, rear};
}

std::vector<SensorConfig> Scenario::sensors_with_error() const {
  std::vector<SensorConfig> out = sensors;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].true_mount = static_cast<int>(i) == error.target_sensor ? error.apply(out[i].mount) : out[i].mount;
  }
  return out;
}

void Scenario::validate() const {
  grid.validate();
  world.validate();
  if (sensors.empty()) throw ConfigError("scenario has no sensors");
  for (const auto& s : sensors) s.validate();
  error.validate();
  if (error.kind != ErrorKind::None && error.target_sensor >= static_cast<int>(sensors.size()))
    throw ConfigError("error targets sensor " + std::to_string(error.target_sensor) + " which does not exist");
  classify.validate();
  assess.validate();
  planner.validate();
  if (!(dilation_radius >= 0)) throw ConfigError("dilation radius must be >= 0");
  if (!(base_rate >= 0 && base_rate <= 1)) throw ConfigError("base rate must lie in [0, 1]");
  if (!(model.lambda_occ > 0 && model.lambda_occ < 1 && model.lambda_free > 0 && model.lambda_free < 1))
    throw ConfigError("inverse sensor model strengths must lie in (0, 1)");
  if (!(0 <= bayes_p_free && bayes_p_free < bayes_p_occupied && bayes_p_occupied <= 1))
    throw BadThresholds("baseline thresholds require 0 <= p_free < p_occupied <= 1");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

class Parser {
 public:
  Parser(std::string_view source) : source_(source) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(std::string(source_) + ":" + std::to_string(line_) + ": " + msg);
  }

  std::vector<double> numbers(const std::string& value, std::size_t n) const {
    std::istringstream in(value);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') fail("'" + tok + "' is not a number");
      out.push_back(v);
    }
    if (out.size() != n) fail("expected " + std::to_string(n) + " number(s), got " + std::to_string(out.size()));
    return out;
  }
  double number(const std::string& value) const { return numbers(value, 1)[0]; }
  int integer(const std::string& value) const {
    const double v = number(value);
    if (v != static_cast<int>(v)) fail("'" + value + "' is not an integer");
    return static_cast<int>(v);
  }
  bool boolean(const std::string& value) const {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    fail("'" + value + "' is not a boolean");
  }
  Pose pose_deg(const std::string& value) const {
    const auto v = numbers(value, 3);
    return {v[0], v[1], wrap_angle(deg2rad(v[2]))};
  }

  Scenario run(std::string_view text) {
    Scenario sc;
    bool custom_sensors = false;
    std::string section;
    std::istringstream lines{std::string(text)};
    std::string raw;
    while (std::getline(lines, raw)) {
      ++line_;
      std::string l = trim(raw.substr(0, raw.find('#')));
      if (l.empty()) continue;
      if (l.front() == '[') {
        if (l.back() != ']') fail("unterminated section header");
        section = trim(std::string_view(l).substr(1, l.size() - 2));
        if (section == "sensor") {
          if (!custom_sensors) sc.sensors.clear();
          custom_sensors = true;
          sc.sensors.emplace_back();
        }
        continue;
      }
      const auto eq = l.find('=');
      if (eq == std::string::npos) fail("expected 'key = value'");
      const std::string key = trim(std::string_view(l).substr(0, eq));
      const std::string value = trim(std::string_view(l).substr(eq + 1));
      apply(sc, section, key, value);
    }
    if (!custom_sensors) sc.sensors = default_sensor_pair();
    for (auto& s : sc.sensors) s.true_mount = s.mount;
    if (sc.world.name.empty()) sc.world.name = sc.name;
    try {
      sc.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string(source_) + ": " + e.what());
    }
    return sc;
  }

 private:
  void apply(Scenario& sc, const std::string& section, const std::string& key, const std::string& value) {
    if (section.empty() || section == "scenario") {
      if (key == "name") sc.name = sc.world.name = value;
      else if (key == "seed") sc.seed = static_cast<std::uint64_t>(integer(value));
      else unknown(section, key);
    } else if (section == "grid") {
      if (key == "resolution") sc.grid.resolution = number(value);
      else if (key == "width") sc.grid.width = integer(value);
      else if (key == "height") sc.grid.height = integer(value);
      else if (key == "origin") {
        const auto v = numbers(value, 2);
        sc.grid.origin = {v[0], v[1]};
      } else unknown(section, key);
    } else if (section == "vehicle") {
      if (key == "pose") sc.vehicle = pose_deg(value);
      else if (key == "goal") sc.goal = pose_deg(value);
      else unknown(section, key);
    } else if (section == "world") {
      if (key == "box") {
        const auto v = numbers(value, 4);
        sc.world.boxes.push_back({{std::min(v[0], v[2]), std::min(v[1], v[3])}, {std::max(v[0], v[2]), std::max(v[1], v[3])}});
      } else if (key == "segment") {
        const auto v = numbers(value, 4);
        sc.world.segments.push_back({{v[0], v[1]}, {v[2], v[3]}});
      } else if (key == "fence") {
        const auto v = numbers(value, 6);
        sc.world.add_fence({v[0], v[1]}, {v[2], v[3]}, v[4], v[5]);
      } else unknown(section, key);
    } else if (section == "sensor") {
      SensorConfig& s = sc.sensors.back();
      if (key == "mount") s.mount = pose_deg(value);
      else if (key == "channels") s.channels = integer(value);
      else if (key == "pps") s.points_per_second = number(value);
      else if (key == "rotation_rate") s.rotation_rate = number(value);
      else if (key == "max_range") s.max_range = number(value);
      else if (key == "min_range") s.min_range = number(value);
      else if (key == "noise_std") s.range_noise_std = number(value);
      else unknown(section, key);
    } else if (section == "error") {
      if (key == "kind") {
        try {
          sc.error.kind = parse_error_kind(value);
        } catch (const ConfigError& e) {
          fail(e.what());
        }
      } else if (key == "magnitude") sc.error.magnitude = number(value);
      else if (key == "sensor") sc.error.target_sensor = integer(value);
      else if (key == "direction_deg") sc.error.direction_deg = number(value);
      else unknown(section, key);
    } else if (section == "model") {
      if (key == "lambda_occ") sc.model.lambda_occ = number(value);
      else if (key == "lambda_free") sc.model.lambda_free = number(value);
      else if (key == "prior_weight") sc.model.prior_weight = number(value);
      else if (key == "base_rate") sc.base_rate = number(value);
      else unknown(section, key);
    } else if (section == "classify") {
      if (key == "p_u") sc.classify.p_u = number(value);
      else if (key == "p_f") sc.classify.p_f = number(value);
      else if (key == "p_c") sc.classify.p_c = number(value);
      else unknown(section, key);
    } else if (section == "assess") {
      if (key == "d_max") sc.assess.d_max = number(value);
      else if (key == "alpha_max") sc.assess.alpha_max = number(value);
      else if (key == "dilation_radius") sc.dilation_radius = number(value);
      else if (key == "proceed_permitted") sc.proceed_permitted = boolean(value);
      else unknown(section, key);
    } else if (section == "planner") {
      PlannerParams& p = sc.planner;
      if (key == "c_c") p.c_c = number(value);
      else if (key == "d_c") p.d_c = number(value);
      else if (key == "turning_radius") p.turning_radius = number(value);
      else if (key == "step_length") p.step_length = number(value);
      else if (key == "heading_bins") p.heading_bins = integer(value);
      else if (key == "base_cost") p.base_cost = number(value);
      else if (key == "goal_tolerance") p.goal_tolerance = number(value);
      else if (key == "goal_heading_tolerance_deg") p.goal_heading_tolerance = deg2rad(number(value));
      else if (key == "shift_radius") p.shift_radius = number(value);
      else unknown(section, key);
    } else if (section == "replay") {
      if (key == "advance") sc.replay.advance = number(value);
      else if (key == "max_steps") sc.replay.max_steps = integer(value);
      else unknown(section, key);
    } else if (section == "baseline") {
      if (key == "p_free") sc.bayes_p_free = number(value);
      else if (key == "p_occupied") sc.bayes_p_occupied = number(value);
      else unknown(section, key);
    } else {
      fail("unknown section [" + section + "]");
    }
  }

  [[noreturn]] void unknown(const std::string& section, const std::string& key) const {
    fail("unknown key '" + key + "' in section [" + (section.empty() ? "scenario" : section) + "]");
  }

  std::string_view source_;
  int line_{0};
};

}  // namespace

Scenario parse_scenario(std::string_view text, std::string_view source) {
  Scenario sc = Parser(source).run(text);
  sc.replay.dilation_radius = sc.dilation_radius;
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

std::filesystem::path resolve_scenario(const std::string& arg, const std::filesystem::path& bundled_dir) {
  namespace fs = std::filesystem;
  if (fs::exists(arg)) return arg;
  for (const fs::path& candidate : {bundled_dir / arg, bundled_dir / (arg + ".scn")})
    if (fs::exists(candidate)) return candidate;
  return arg;
}

std::filesystem::path bundled_scenario_dir() {
  if (const char* env = std::getenv("EVMAP_SCENARIO_DIR")) return env;
  return EVMAP_SCENARIO_DIR;
}

}  // namespace evmap
