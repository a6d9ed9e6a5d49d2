#include "gradepipe/shape.hpp"

#include <cmath>
#include <numbers>

namespace gradepipe {

double area(const BinaryMask& mask) {
  const auto n = mask.foreground_count();
  if (n == 0) throw Error(Errc::EmptyMask, "area of an empty mask");
  return static_cast<double>(n);
}

double perimeter(const BinaryMask& mask) {
  std::size_t count = 0;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.get(r, c)) continue;
      if (!mask.get_or_background(r - 1, c) || !mask.get_or_background(r + 1, c) ||
          !mask.get_or_background(r, c - 1) || !mask.get_or_background(r, c + 1)) {
        ++count;
      }
    }
  }
  if (count == 0) throw Error(Errc::EmptyMask, "perimeter of an empty mask");
  return static_cast<double>(count);
}

Axes fit_axes(const BinaryMask& mask) {
  // Integer raw moments keep the collinearity test exact.
  long long n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.get(r, c)) continue;
      ++n;
      sx += c;
      sy += r;
      sxx += static_cast<long long>(c) * c;
      syy += static_cast<long long>(r) * r;
      sxy += static_cast<long long>(r) * c;
    }
  }
  if (n < 2) throw Error(Errc::DegenerateShape, "axes need at least two pixels");
  const __int128 cxx = static_cast<__int128>(n) * sxx - static_cast<__int128>(sx) * sx;
  const __int128 cyy = static_cast<__int128>(n) * syy - static_cast<__int128>(sy) * sy;
  const __int128 cxy = static_cast<__int128>(n) * sxy - static_cast<__int128>(sx) * sy;
  if (cxx * cyy - cxy * cxy == 0) throw Error(Errc::DegenerateShape, "foreground pixels are collinear");

  const double nn = static_cast<double>(n) * static_cast<double>(n);
  const double mu20 = static_cast<double>(cxx) / nn + 1.0 / 12.0;
  const double mu02 = static_cast<double>(cyy) / nn + 1.0 / 12.0;
  const double mu11 = static_cast<double>(cxy) / nn;
  const double delta = std::sqrt((mu20 - mu02) * (mu20 - mu02) + 4.0 * mu11 * mu11);
  return Axes{4.0 * std::sqrt((mu20 + mu02 + delta) / 2.0), 4.0 * std::sqrt((mu20 + mu02 - delta) / 2.0)};
}

double eccentricity(double majl, double minl) {
  if (!(minl > 0.0) || !(majl >= minl)) {
    throw Error(Errc::NonPositiveAxis, "eccentricity needs majl >= minl > 0");
  }
  const double a = majl / 2.0;
  const double b = minl / 2.0;
  return std::sqrt(a * a - b * b) / a;
}

double equidiameter(double area) {
  if (!(area > 0.0)) throw Error(Errc::NonPositiveArea, "equidiameter needs a positive area");
  return std::sqrt(4.0 * area / std::numbers::pi);
}

ShapeVector shape_vector(const BinaryMask& mask) {
  ShapeVector v;
  v.area = area(mask);
  v.perimeter = perimeter(mask);
  const Axes axes = fit_axes(mask);
  v.majl = axes.majl;
  v.minl = axes.minl;
  v.eccentricity = eccentricity(axes.majl, axes.minl);
  v.equidiameter = equidiameter(v.area);
  return v;
}

}  // namespace gradepipe
