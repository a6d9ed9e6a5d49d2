#include "gradepipe/lbp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace gradepipe {
namespace {

constexpr int kMaxPoints = 24;

void check_points(int points) {
  if (points < 1 || points > kMaxPoints) {
    throw Error(Errc::WrongNeighborCount, "neighbour count must lie in [1, " + std::to_string(kMaxPoints) + "]");
  }
}

void check_pattern(std::uint32_t pattern, int points) {
  check_points(points);
  if (pattern >> points != 0) throw Error(Errc::PatternOutOfRange, "pattern has bits beyond the neighbour count");
}

struct Sample {
  int row0;
  int col0;
  double frac_row;  // weight of row0 + 1
  double frac_col;  // weight of col0 + 1
};

double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < 1e-9 ? r : v;
}

// Offsets for p divisible by 4 are built from the first quadrant by exact
// quarter turns, so a 90-degree image rotation permutes the samples exactly.
std::vector<std::pair<double, double>> sample_offsets(int points, double radius) {
  std::vector<std::pair<double, double>> offsets(points);
  const int base = points % 4 == 0 ? points / 4 : points;
  for (int k = 0; k < base; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / points;
    offsets[k] = {snap(-radius * std::sin(theta)), snap(radius * std::cos(theta))};
  }
  for (int k = base; k < points; ++k) {
    const auto [dy, dx] = offsets[k - base];
    offsets[k] = {-dx, dy};
  }
  return offsets;
}

}  // namespace

std::uint32_t lbp_code(double center, std::span<const double> neighbors) {
  if (neighbors.empty() || neighbors.size() > static_cast<std::size_t>(kMaxPoints)) {
    throw Error(Errc::WrongNeighborCount, "neighbour count must lie in [1, " + std::to_string(kMaxPoints) + "]");
  }
  std::uint32_t code = 0;
  for (std::size_t k = 0; k < neighbors.size(); ++k) {
    if (neighbors[k] - center >= 0.0) code |= 1u << k;
  }
  return code;
}

int uniformity(std::uint32_t pattern, int points) {
  check_pattern(pattern, points);
  const std::uint32_t mask = points == 32 ? ~0u : ((1u << points) - 1u);
  const std::uint32_t rotated = ((pattern >> 1) | (pattern << (points - 1))) & mask;
  return std::popcount(pattern ^ rotated);
}

std::uint32_t riu2_code(std::uint32_t pattern, int points) {
  if (uniformity(pattern, points) <= 2) return static_cast<std::uint32_t>(std::popcount(pattern));
  return static_cast<std::uint32_t>(points + 1);
}

std::uint32_t u2_code(std::uint32_t pattern, int points) {
  check_pattern(pattern, points);
  const auto nonuniform = static_cast<std::uint32_t>(points * (points - 1) + 2);
  if (uniformity(pattern, points) > 2) return nonuniform;
  // Rank among the uniform patterns below this one.
  std::uint32_t rank = 0;
  for (std::uint32_t candidate = 0; candidate < pattern; ++candidate) {
    if (uniformity(candidate, points) <= 2) ++rank;
  }
  return rank;
}

std::size_t lbp_bin_count(LbpMode mode, int points) {
  check_points(points);
  switch (mode) {
    case LbpMode::plain: return std::size_t{1} << points;
    case LbpMode::u2: return static_cast<std::size_t>(points * (points - 1) + 3);
    case LbpMode::riu2: return static_cast<std::size_t>(points + 2);
  }
  return 0;
}

LbpMap lbp_map(const GridF& image, int points, double radius, LbpMode mode) {
  check_points(points);
  if (image.channels() != 1) throw Error(Errc::WrongChannelCount, "LBP expects a gray image");
  if (!(radius > 0.0)) throw Error(Errc::InvalidParameter, "LBP radius must be positive");
  const int margin = static_cast<int>(std::ceil(radius));
  if (image.width() <= 2 * margin + 1 || image.height() <= 2 * margin + 1) {
    throw Error(Errc::ImageTooSmall, "image must exceed 2*ceil(radius)+1 in both dimensions");
  }

  std::vector<Sample> samples;
  for (const auto& [dy, dx] : sample_offsets(points, radius)) {
    const double fy = std::floor(dy);
    const double fx = std::floor(dx);
    samples.push_back({static_cast<int>(fy), static_cast<int>(fx), dy - fy, dx - fx});
  }

  // u2 lookups are precomputed once for the whole pattern range.
  std::vector<std::uint32_t> lookup;
  if (mode != LbpMode::plain) {
    lookup.resize(std::size_t{1} << points);
    std::uint32_t next_uniform = 0;
    const auto nonuniform = static_cast<std::uint32_t>(points * (points - 1) + 2);
    for (std::uint32_t p = 0; p < lookup.size(); ++p) {
      const bool uniform = uniformity(p, points) <= 2;
      if (mode == LbpMode::riu2) {
        lookup[p] = uniform ? static_cast<std::uint32_t>(std::popcount(p)) : static_cast<std::uint32_t>(points + 1);
      } else {
        lookup[p] = uniform ? next_uniform++ : nonuniform;
      }
    }
  }

  LbpMap map;
  map.width = image.width() - 2 * margin;
  map.height = image.height() - 2 * margin;
  map.mode = mode;
  map.points = points;
  map.radius = radius;
  map.codes.resize(static_cast<std::size_t>(map.width) * map.height);

  const int h = image.height();
  const int w = image.width();
  auto pixel = [&](int r, int c) { return image.at(std::min(r, h - 1), std::min(c, w - 1)); };
  std::vector<double> neighbors(points);
  for (int r = 0; r < map.height; ++r) {
    for (int c = 0; c < map.width; ++c) {
      const int cr = r + margin;
      const int cc = c + margin;
      for (int k = 0; k < points; ++k) {
        const Sample& s = samples[k];
        const int r0 = cr + s.row0;
        const int c0 = cc + s.col0;
        if (s.frac_row == 0.0 && s.frac_col == 0.0) {
          neighbors[k] = image.at(r0, c0);
          continue;
        }
        const double w00 = (1.0 - s.frac_row) * (1.0 - s.frac_col);
        const double w11 = s.frac_row * s.frac_col;
        const double w01 = (1.0 - s.frac_row) * s.frac_col;
        const double w10 = s.frac_row * (1.0 - s.frac_col);
        // Diagonal pairs summed first: keeps the result exact under quarter turns.
        neighbors[k] = (w00 * pixel(r0, c0) + w11 * pixel(r0 + 1, c0 + 1)) +
                       (w01 * pixel(r0, c0 + 1) + w10 * pixel(r0 + 1, c0));
      }
      const std::uint32_t code = lbp_code(image.at(cr, cc), neighbors);
      map.codes[static_cast<std::size_t>(r) * map.width + c] = mode == LbpMode::plain ? code : lookup[code];
    }
  }
  return map;
}

std::vector<std::size_t> lbp_histogram(const LbpMap& map) {
  std::vector<std::size_t> bins(lbp_bin_count(map.mode, map.points), 0);
  for (const std::uint32_t code : map.codes) {
    if (code < bins.size()) ++bins[code];
  }
  return bins;
}

GridF lbp_to_grid(const LbpMap& map) {
  GridF grid(map.width, map.height, 1);
  auto dst = grid.samples();
  for (std::size_t i = 0; i < map.codes.size(); ++i) dst[i] = static_cast<double>(map.codes[i]);
  return grid;
}

}  // namespace gradepipe
