#include "gradepipe/curvelet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <utility>

namespace gradepipe {
namespace {

double meyer_poly(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * x * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x);
}

// (falling, rising) pair with falling^2 + rising^2 == 1 and exact endpoints.
std::pair<double, double> crossfade(double t) {
  if (t <= 0.0) return {1.0, 0.0};
  if (t >= 1.0) return {0.0, 1.0};
  const double a = 0.5 * std::numbers::pi * meyer_poly(t);
  return {std::cos(a), std::sin(a)};
}

double meyer_lowpass_1d(double u) {
  if (u <= 0.5) return 1.0;
  if (u >= 1.0) return 0.0;
  return crossfade(2.0 * u - 1.0).first;
}

int signed_frequency(int index, int n) { return index <= n - 1 - n / 2 ? index : index - n; }

int positive_mod(int value, int period) {
  const int m = value % period;
  return m < 0 ? m + period : m;
}

// Position on the perimeter of the unit square, in [0, 8): east side first
// (x = 1), then north, west, south, counterclockwise.
double perimeter_coordinate(double y, double x) {
  const double m = std::max(std::abs(x), std::abs(y));
  if (m == 0.0) return 0.0;
  x /= m;
  y /= m;
  if (std::abs(x) >= std::abs(y)) {
    if (x > 0.0) return y + 1.0;
    return 4.0 + (1.0 - y);
  }
  if (y > 0.0) return 2.0 + (1.0 - x);
  return 6.0 + (x + 1.0);
}

struct SignedEntry {
  int k1;
  int k2;
  std::uint32_t freq;
  double weight;
};

}  // namespace

int angles_at_scale(int scale, int n_angles_coarse) {
  if (scale <= 0) return 1;
  return n_angles_coarse << ((scale) / 2);
}

int default_scale_count(int rows, int cols) {
  const int n = std::min(rows, cols);
  const int lg = static_cast<int>(std::ceil(std::log2(static_cast<double>(std::max(n, 1)))));
  return std::max(2, lg - 3);
}

double CurveletCoeffs::energy() const {
  double total = 0.0;
  for (const auto& scale : tiles) {
    for (const auto& tile : scale) {
      for (const Complex& v : tile.samples()) total += std::norm(v);
    }
  }
  return total;
}

CurveletPlan::CurveletPlan(int rows, int cols, int n_scales, int n_angles_coarse)
    : rows_(rows), cols_(cols), n_scales_(n_scales), n_angles_coarse_(n_angles_coarse) {
  if (rows < 32 || cols < 32) throw Error(Errc::ImageTooSmall, "curvelet transform needs at least 32x32");
  if (n_angles_coarse < 8 || n_angles_coarse % 4 != 0) {
    throw Error(Errc::BadAngleCount, "n_angles_coarse must be a multiple of 4 and at least 8");
  }
  const int max_scales = std::bit_width(static_cast<unsigned>(std::min(rows, cols))) - 2;
  if (n_scales < 2 || n_scales > max_scales) {
    throw Error(Errc::BadScaleCount,
                "n_scales must lie in [2, " + std::to_string(max_scales) + "] for this image size");
  }

  const int finest_lowpass = n_scales - 1;
  auto lowpass = [&](int level, double w1, double w2) {
    if (level >= finest_lowpass) return 1.0;
    const double b = std::ldexp(1.0, -(finest_lowpass - level));
    return meyer_lowpass_1d(std::abs(w1) / b) * meyer_lowpass_1d(std::abs(w2) / b);
  };

  std::vector<std::vector<std::vector<SignedEntry>>> raw(n_scales);
  raw[0].resize(1);
  for (int j = 1; j < n_scales; ++j) raw[j].resize(angles_at_scale(j, n_angles_coarse));

  for (int i1 = 0; i1 < rows; ++i1) {
    const int k1 = signed_frequency(i1, rows);
    const double w1 = k1 / (rows / 2.0);
    for (int i2 = 0; i2 < cols; ++i2) {
      const int k2 = signed_frequency(i2, cols);
      const double w2 = k2 / (cols / 2.0);
      const auto freq = static_cast<std::uint32_t>(i1 * cols + i2);

      double below = lowpass(0, w1, w2);
      if (below > 0.0) raw[0][0].push_back({k1, k2, freq, below});
      if (below >= 1.0) continue;  // inside the flat lowpass region, no detail scale sees it

      const double tau = perimeter_coordinate(w1, w2);
      for (int j = 1; j < n_scales; ++j) {
        const double above = lowpass(j, w1, w2);
        const double radial = std::sqrt(std::max(0.0, above * above - below * below));
        below = above;
        if (radial <= 0.0) continue;

        const int n_angles = angles_at_scale(j, n_angles_coarse);
        const double arc = 8.0 / n_angles;
        const double half_fade = arc / 4.0;
        const int l = std::min(static_cast<int>(tau / arc), n_angles - 1);
        const double offset = tau - l * arc;
        auto& wedges = raw[j];
        if (offset < half_fade) {
          const auto [fall, rise] = crossfade((offset + half_fade) / (2.0 * half_fade));
          if (rise > 0.0) wedges[l].push_back({k1, k2, freq, radial * rise});
          if (fall > 0.0) wedges[(l + n_angles - 1) % n_angles].push_back({k1, k2, freq, radial * fall});
        } else if (arc - offset < half_fade) {
          const auto [fall, rise] = crossfade((offset - (arc - half_fade)) / (2.0 * half_fade));
          if (fall > 0.0) wedges[l].push_back({k1, k2, freq, radial * fall});
          if (rise > 0.0) wedges[(l + 1) % n_angles].push_back({k1, k2, freq, radial * rise});
        } else {
          wedges[l].push_back({k1, k2, freq, radial});
        }
        if (above >= 1.0) break;
      }
    }
  }

  // Wrapping periods: radial extent by widest cross-section, shared by every
  // wedge of a scale with the same radial axis.
  struct Extent {
    int radial = 1;
    int cross = 1;
  };
  auto measure = [](const std::vector<SignedEntry>& entries, bool vertical_radial) {
    Extent e;
    if (entries.empty()) return e;
    int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
    std::map<int, std::pair<int, int>> sections;
    for (const auto& s : entries) {
      const int along = vertical_radial ? s.k1 : s.k2;
      const int across = vertical_radial ? s.k2 : s.k1;
      lo = std::min(lo, along);
      hi = std::max(hi, along);
      auto [it, fresh] = sections.try_emplace(along, across, across);
      if (!fresh) {
        it->second.first = std::min(it->second.first, across);
        it->second.second = std::max(it->second.second, across);
      }
    }
    e.radial = hi - lo + 1;
    for (const auto& [along, range] : sections) e.cross = std::max(e.cross, range.second - range.first + 1);
    return e;
  };

  tiles_.resize(n_scales);
  {
    const auto& entries = raw[0][0];
    int r_lo = 0, r_hi = 0, c_lo = 0, c_hi = 0;
    for (const auto& s : entries) {
      r_lo = std::min(r_lo, s.k1);
      r_hi = std::max(r_hi, s.k1);
      c_lo = std::min(c_lo, s.k2);
      c_hi = std::max(c_hi, s.k2);
    }
    Tile coarse;
    coarse.shape = TileShape{0, 0, r_hi - r_lo + 1, c_hi - c_lo + 1};
    for (const auto& s : entries) {
      const auto cell = positive_mod(s.k1, coarse.shape.rows) * coarse.shape.cols + positive_mod(s.k2, coarse.shape.cols);
      coarse.entries.push_back({s.freq, static_cast<std::uint32_t>(cell), s.weight});
    }
    tiles_[0].push_back(std::move(coarse));
  }
  for (int j = 1; j < n_scales; ++j) {
    const int n_angles = static_cast<int>(raw[j].size());
    const double arc = 8.0 / n_angles;
    auto vertical_radial = [&](int l) {
      const int side = static_cast<int>(((l + 0.5) * arc) / 2.0);
      return side == 1 || side == 3;
    };
    Extent vert, horz;
    for (int l = 0; l < n_angles; ++l) {
      const bool v = vertical_radial(l);
      const Extent e = measure(raw[j][l], v);
      Extent& acc = v ? vert : horz;
      acc.radial = std::max(acc.radial, e.radial);
      acc.cross = std::max(acc.cross, e.cross);
    }
    for (int l = 0; l < n_angles; ++l) {
      const bool v = vertical_radial(l);
      Tile tile;
      tile.shape = v ? TileShape{j, l, vert.radial, vert.cross} : TileShape{j, l, horz.cross, horz.radial};
      for (const auto& s : raw[j][l]) {
        const auto cell = positive_mod(s.k1, tile.shape.rows) * tile.shape.cols + positive_mod(s.k2, tile.shape.cols);
        tile.entries.push_back({s.freq, static_cast<std::uint32_t>(cell), s.weight});
      }
      tiles_[j].push_back(std::move(tile));
    }
  }
}

CurveletCoeffs CurveletPlan::forward(const ComplexGrid& image) const {
  if (image.width() != cols_ || image.height() != rows_ || image.channels() != 1) {
    throw Error(Errc::DimensionMismatch, "image size differs from the curvelet plan");
  }
  const ComplexGrid spectrum = fft2(image);
  const auto spec = spectrum.samples();
  const double image_size = static_cast<double>(rows_) * cols_;

  CurveletCoeffs out;
  out.image_rows = rows_;
  out.image_cols = cols_;
  out.n_scales = n_scales_;
  out.n_angles_coarse = n_angles_coarse_;
  out.tiles.resize(tiles_.size());
  out.shapes.resize(tiles_.size());
  for (std::size_t j = 0; j < tiles_.size(); ++j) {
    for (const Tile& tile : tiles_[j]) {
      ComplexGrid wrapped(tile.shape.cols, tile.shape.rows, 1);
      auto cells = wrapped.samples();
      for (const Entry& e : tile.entries) cells[e.cell] += e.weight * spec[e.freq];
      ComplexGrid coeffs = ifft2(wrapped);
      const double scale = std::sqrt(static_cast<double>(tile.shape.rows) * tile.shape.cols / image_size);
      for (Complex& v : coeffs.samples()) v *= scale;
      out.tiles[j].push_back(std::move(coeffs));
      out.shapes[j].push_back(tile.shape);
    }
  }
  return out;
}

CurveletCoeffs CurveletPlan::forward(const GridF& image) const { return forward(to_complex(image)); }

ComplexGrid CurveletPlan::adjoint(const CurveletCoeffs& coeffs) const {
  if (coeffs.image_rows != rows_ || coeffs.image_cols != cols_ || coeffs.tiles.size() != tiles_.size()) {
    throw Error(Errc::DimensionMismatch, "coefficients do not match the curvelet plan");
  }
  const double image_size = static_cast<double>(rows_) * cols_;
  ComplexGrid spectrum(cols_, rows_, 1);
  auto spec = spectrum.samples();
  for (std::size_t j = 0; j < tiles_.size(); ++j) {
    if (coeffs.tiles[j].size() != tiles_[j].size()) {
      throw Error(Errc::DimensionMismatch, "angle count differs from the curvelet plan");
    }
    for (std::size_t l = 0; l < tiles_[j].size(); ++l) {
      const Tile& tile = tiles_[j][l];
      const ComplexGrid& c = coeffs.tiles[j][l];
      if (c.height() != tile.shape.rows || c.width() != tile.shape.cols) {
        throw Error(Errc::DimensionMismatch, "tile size differs from the curvelet plan");
      }
      const double cell_count = static_cast<double>(tile.shape.rows) * tile.shape.cols;
      const ComplexGrid wrapped = fft2(c);
      const auto cells = wrapped.samples();
      const double scale = std::sqrt(cell_count / image_size) / cell_count;
      for (const Entry& e : tile.entries) spec[e.freq] += e.weight * scale * cells[e.cell];
    }
  }
  ComplexGrid image = ifft2(spectrum);
  for (Complex& v : image.samples()) v *= image_size;
  return image;
}

GridF CurveletPlan::window_energy() const {
  GridF energy(cols_, rows_, 1);
  auto e = energy.samples();
  for (const auto& scale : tiles_) {
    for (const Tile& tile : scale) {
      for (const Entry& entry : tile.entries) e[entry.freq] += entry.weight * entry.weight;
    }
  }
  return energy;
}

CurveletCoeffs fdct_wrapping(const GridF& image, int n_scales, int n_angles_coarse) {
  if (image.channels() != 1) throw Error(Errc::WrongChannelCount, "curvelet transform expects a gray image");
  return CurveletPlan(image.height(), image.width(), n_scales, n_angles_coarse).forward(image);
}

GridF ifdct_wrapping(const CurveletCoeffs& coeffs) {
  const CurveletPlan plan(coeffs.image_rows, coeffs.image_cols, coeffs.n_scales, coeffs.n_angles_coarse);
  const ComplexGrid image = plan.adjoint(coeffs);
  GridF out(image.width(), image.height(), 1);
  auto dst = out.samples();
  const auto src = image.samples();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i].real();
  return out;
}

GridF coarse_subband(const CurveletCoeffs& coeffs) {
  const ComplexGrid& tile = coeffs.coarse();
  GridF out(tile.width(), tile.height(), 1);
  auto dst = out.samples();
  const auto src = tile.samples();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i].real();
  return out;
}

}  // namespace gradepipe
