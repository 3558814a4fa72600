#include "evmap/pnm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "evmap/errors.hpp"

namespace evmap {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out.precision(17);
  return out;
}

void spec_comment(std::ostream& out, const GridSpec& spec) {
  out << "# grid resolution=" << spec.resolution << " origin=" << spec.origin.x() << "," << spec.origin.y()
      << " width=" << spec.width << " height=" << spec.height << "\n";
}

// P2 wants lines of at most 70 characters.
template <typename F>
void write_p2_body(std::ostream& out, const GridSpec& spec, F value) {
  out << spec.width << " " << spec.height << "\n255\n";
  for (int r = spec.height - 1; r >= 0; --r) {
    int col_chars = 0;
    for (int c = 0; c < spec.width; ++c) {
      const std::string v = std::to_string(value(r, c));
      if (col_chars + int(v.size()) + 1 > 70) {
        out << "\n";
        col_chars = 0;
      } else if (c > 0) {
        out << " ";
      }
      out << v;
      col_chars += int(v.size()) + 1;
    }
    out << "\n";
  }
}

struct Rgb {
  int r, g, b;
};

Rgb category_color(CellCategory c) {
  switch (c) {
    case CellCategory::Free: return {255, 255, 255};
    case CellCategory::Unknown: return {160, 160, 160};
    case CellCategory::Conflict: return {214, 39, 40};
    case CellCategory::Occupied: return {0, 0, 0};
  }
  return {0, 0, 0};
}

}  // namespace

void write_channel_pgm(const std::filesystem::path& path, const GridChannel<double>& channel, const GridSpec& spec,
                       std::string_view label, double lo, double hi) {
  auto out = open_out(path);
  out << "P2\n# channel " << label << " range " << lo << ".." << hi << "\n";
  spec_comment(out, spec);
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  write_p2_body(out, spec, [&](int r, int c) {
    return static_cast<int>(std::lround(std::clamp((channel(r, c) - lo) * scale, 0.0, 255.0)));
  });
}

int category_gray(CellCategory c) {
  switch (c) {
    case CellCategory::Free: return 255;
    case CellCategory::Unknown: return 128;
    case CellCategory::Conflict: return 64;
    case CellCategory::Occupied: return 0;
  }
  return 128;
}

void write_category_pgm(const std::filesystem::path& path, const CategoryGrid& grid) {
  auto out = open_out(path);
  out << "P2\n# categories free=255 unknown=128 conflict=64 occupied=0\n";
  spec_comment(out, grid.spec());
  write_p2_body(out, grid.spec(), [&](int r, int c) { return category_gray(grid.at({r, c})); });
}

void write_category_ppm(const std::filesystem::path& path, const CategoryGrid& grid, std::span<const Pose> path_poses,
                        std::span<const PoseFlag> flags) {
  const GridSpec& spec = grid.spec();
  std::vector<Rgb> img(static_cast<std::size_t>(spec.size()));
  auto px = [&](int r, int c) -> Rgb& { return img[static_cast<std::size_t>(r) * spec.width + c]; };
  for (int r = 0; r < spec.height; ++r)
    for (int c = 0; c < spec.width; ++c) px(r, c) = category_color(grid.at({r, c}));
  for (std::size_t i = 0; i < path_poses.size(); ++i) {
    const auto cell = spec.cell_of(path_poses[i].position());
    if (!cell) continue;
    const bool flagged = i < flags.size() && flags[i] != PoseFlag::Clear;
    px(cell->row, cell->col) = flagged ? Rgb{255, 127, 14} : Rgb{31, 119, 180};
  }

  auto out = open_out(path);
  out << "P3\n# conflict=red unknown=gray free=white occupied=black path=blue flagged=orange\n";
  spec_comment(out, spec);
  out << spec.width << " " << spec.height << "\n255\n";
  for (int r = spec.height - 1; r >= 0; --r) {
    for (int c = 0; c < spec.width; ++c) {
      const Rgb& p = px(r, c);
      out << p.r << " " << p.g << " " << p.b << (c + 1 < spec.width ? (c % 5 == 4 ? "\n" : "  ") : "\n");
    }
  }
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  GrayImage img;
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      img.comments.push_back(line.substr(hash + 1));
      line.resize(hash);
    }
    std::istringstream ls(line);
    std::string t;
    while (ls >> t) tokens.push_back(t);
  }
  if (tokens.size() < 4 || tokens[0] != "P2") throw ConfigError("'" + path.string() + "' is not a plain PGM");
  img.width = std::stoi(tokens[1]);
  img.height = std::stoi(tokens[2]);
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  if (tokens.size() != 4 + n) throw ConfigError("'" + path.string() + "' has the wrong pixel count");
  for (std::size_t i = 0; i < n; ++i) img.pixels.push_back(std::stoi(tokens[4 + i]));
  return img;
}

CategoryGrid read_category_pgm(const std::filesystem::path& path, const GridSpec& spec) {
  const GrayImage img = read_pgm(path);
  if (img.width != spec.width || img.height != spec.height) throw ConfigError("category image size mismatch");
  CategoryGrid grid(spec);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const int v = img.at(x, y);
      CellCategory c;
      if (v == 255) c = CellCategory::Free;
      else if (v == 128) c = CellCategory::Unknown;
      else if (v == 64) c = CellCategory::Conflict;
      else if (v == 0) c = CellCategory::Occupied;
      else throw ConfigError("unexpected gray level " + std::to_string(v));
      grid.set({spec.height - 1 - y, x}, c);
    }
  }
  return grid;
}

}  // namespace evmap
