#pragma once

#include <array>
#include <utility>

#include "gradepipe/raster.hpp"

namespace gradepipe {

struct Chromaticity {
  std::array<double, 3> sigma{};  // r, g, b fractions
  double min() const noexcept;
  double max() const noexcept;
};

struct DiffuseChromaticity {
  std::array<double, 3> lambda{};
  double lambda_max = 0.0;
};

struct BilateralParams {
  double spatial_sigma = 4.0;
  double range_sigma = 0.1;
  int window_radius = 8;
  int max_iterations = 100;
  double convergence_epsilon = 1e-4;

  /// Rejects non-positive values and windows narrower than ceil(2 * spatial_sigma).
  void validate() const;
};

/// Pixels whose minimum chromaticity is within this distance of 1/3 are
/// treated as achromatic.
inline constexpr double kAchromaticTolerance = 1e-9;

Chromaticity chromaticity(const std::array<double, 3>& rgb);
DiffuseChromaticity diffuse_chromaticity(const Chromaticity& sigma);

/// Joint bilateral filter of the maximum-chromaticity field, guided by the
/// diffuse maximum chromaticity. Pixels with `valid == 0` neither receive
/// nor contribute weight; an empty `valid` span means all pixels take part.
GridF filter_max_chromaticity(const GridF& sigma_max, const GridF& lambda_max, const BilateralParams& params,
                              std::span<const std::uint8_t> valid = {});

struct SpecularResult {
  ImageF diffuse;
  int iterations = 0;
};

SpecularResult remove_specular_detailed(const ImageF& rgb, const BilateralParams& params = {});
ImageF remove_specular(const ImageF& rgb, const BilateralParams& params = {});

/// Otsu threshold over the 256-bin histogram of the (rounded) gray values.
/// Foreground is every pixel strictly below the returned threshold.
int otsu_threshold(const ImageF& gray);
BinaryMask threshold_segment(const ImageF& gray);

BinaryMask largest_component(const BinaryMask& mask);
BinaryMask fill_holes(const BinaryMask& mask);

struct SobelContour {
  Contour contour;
  GridF magnitude;
};

/// 3x3 Sobel response of the 0/1 mask with replicate padding.
std::pair<GridF, GridF> sobel_gradients(const BinaryMask& mask);
SobelContour sobel_contour(const BinaryMask& mask);

/// Moore-neighbour trace (clockwise, Jacob's stopping criterion) of the
/// component containing the topmost-then-leftmost foreground pixel.
Contour trace_boundary(const BinaryMask& mask);

struct Segmentation {
  ImageF diffuse;
  BinaryMask mask;
};

/// Specular removal, gray conversion, Otsu, largest component, hole filling.
Segmentation segment_fruit(const ImageF& rgb, const BilateralParams& params = {});

}  // namespace gradepipe
