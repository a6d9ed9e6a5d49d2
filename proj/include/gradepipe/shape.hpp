#pragma once

#include <array>

#include "gradepipe/raster.hpp"

namespace gradepipe {

struct ShapeVector {
  double area = 0.0;
  double perimeter = 0.0;
  double majl = 0.0;
  double minl = 0.0;
  double eccentricity = 0.0;
  double equidiameter = 0.0;

  /// Fixed order (A, P, MAJL, MINL, E, ED).
  std::array<double, 6> values() const noexcept {
    return {area, perimeter, majl, minl, eccentricity, equidiameter};
  }
};

struct Axes {
  double majl = 0.0;
  double minl = 0.0;
};

/// Foreground pixel count.
double area(const BinaryMask& mask);

/// Foreground pixels with at least one background 4-neighbour; the image
/// edge counts as background.
double perimeter(const BinaryMask& mask);

/// Axes of the ellipse sharing the region's normalized second central
/// moments. Each pixel is a unit square, so 1/12 is added to the two
/// variances before the eigen-decomposition.
Axes fit_axes(const BinaryMask& mask);

double eccentricity(double majl, double minl);
double equidiameter(double area);

ShapeVector shape_vector(const BinaryMask& mask);

}  // namespace gradepipe
