#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gradepipe/raster.hpp"

namespace gradepipe {

enum class LbpMode { plain, u2, riu2 };

struct LbpMap {
  int width = 0;
  int height = 0;
  LbpMode mode = LbpMode::plain;
  int points = 8;
  double radius = 1.0;
  std::vector<std::uint32_t> codes;

  std::uint32_t at(int row, int col) const { return codes[static_cast<std::size_t>(row) * width + col]; }
};

/// Sum over k of s(g_k - g_c) * 2^k with s(x) = 1 for x >= 0.
std::uint32_t lbp_code(double center, std::span<const double> neighbors);

/// Circular 0/1 transition count of a p-bit pattern.
int uniformity(std::uint32_t pattern, int points);

/// popcount for uniform patterns, points + 1 otherwise.
std::uint32_t riu2_code(std::uint32_t pattern, int points);

/// Uniform patterns are numbered 0..p(p-1)+1 in increasing pattern order;
/// every non-uniform pattern maps to p(p-1)+2.
std::uint32_t u2_code(std::uint32_t pattern, int points);

std::size_t lbp_bin_count(LbpMode mode, int points);

/// Border pixels within ceil(radius) of the edge are dropped. Neighbour k
/// sits at angle 2*pi*k/points, counterclockwise from east, and off-lattice
/// samples are bilinearly interpolated.
LbpMap lbp_map(const GridF& image, int points = 8, double radius = 1.0, LbpMode mode = LbpMode::plain);

std::vector<std::size_t> lbp_histogram(const LbpMap& map);

GridF lbp_to_grid(const LbpMap& map);

}  // namespace gradepipe
