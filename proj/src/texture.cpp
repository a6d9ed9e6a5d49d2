#include "gradepipe/texture.hpp"

#include <cmath>
#include <span>

namespace gradepipe {
namespace {

// Pairwise summation keeps the rounding error O(log n).
double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 32) {
    double s = 0.0;
    for (const double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace

TextureVector texture_stats(const GridF& subband) {
  const auto values = subband.samples();
  if (values.empty()) throw Error(Errc::EmptyGrid, "statistics of an empty subband");
  const double n = static_cast<double>(values.size());
  const double mean = pairwise_sum(values) / n;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
  return TextureVector{mean, std::sqrt(pairwise_sum(sq) / n)};
}

LbpMap masked_lbp_map(const ImageF& gray, const BinaryMask& mask, const TextureConfig& config) {
  if (gray.channels() != 1) throw Error(Errc::WrongChannelCount, "texture expects a gray image");
  if (gray.width() != mask.width() || gray.height() != mask.height()) {
    throw Error(Errc::DimensionMismatch, "image and mask sizes differ");
  }
  ImageF masked = gray;
  for (int r = 0; r < gray.height(); ++r) {
    for (int c = 0; c < gray.width(); ++c) {
      if (!mask.get(r, c)) masked.at(r, c) = 0.0;
    }
  }
  return lbp_map(masked, config.lbp_points, config.lbp_radius, LbpMode::plain);
}

TextureVector texture_vector(const ImageF& gray, const BinaryMask& mask, const TextureConfig& config) {
  const LbpMap map = masked_lbp_map(gray, mask, config);
  if (map.width < 32 || map.height < 32) {
    throw Error(Errc::ImageTooSmall, "LBP map must be at least 32x32 for the curvelet stage");
  }
  const int n_scales = config.n_scales > 0 ? config.n_scales : default_scale_count(map.height, map.width);
  const CurveletCoeffs coeffs = fdct_wrapping(lbp_to_grid(map), n_scales, config.n_angles_coarse);
  return texture_stats(coarse_subband(coeffs));
}

}  // namespace gradepipe
