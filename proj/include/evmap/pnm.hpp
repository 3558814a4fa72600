#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evmap/assess.hpp"
#include "evmap/categories.hpp"
#include "evmap/grid.hpp"

namespace evmap {

/// 8-bit image, first row is the top of the map (largest y).
struct GrayImage {
  int width{0};
  int height{0};
  std::vector<int> pixels;  // row-major
  std::vector<std::string> comments;
  int at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Writes a channel as plain P2, values in [lo, hi] mapped linearly to 0..255.
void write_channel_pgm(const std::filesystem::path& path, const GridChannel<double>& channel, const GridSpec& spec,
                       std::string_view label, double lo = 0.0, double hi = 1.0);

/// Free=255, Unknown=128, Conflict=64, Occupied=0.
int category_gray(CellCategory c);
void write_category_pgm(const std::filesystem::path& path, const CategoryGrid& grid);

/// Color rendering; optional path overlay with per-pose flags.
void write_category_ppm(const std::filesystem::path& path, const CategoryGrid& grid,
                        std::span<const Pose> path_poses = {}, std::span<const PoseFlag> flags = {});

GrayImage read_pgm(const std::filesystem::path& path);

/// Reads a category P2 back; throws ConfigError on unknown gray levels.
CategoryGrid read_category_pgm(const std::filesystem::path& path, const GridSpec& spec);

}  // namespace evmap
