#pragma once

#include <cstdint>
#include <vector>

#include "gradepipe/fft.hpp"

namespace gradepipe {

struct TileShape {
  int scale = 0;
  int angle = 0;
  int rows = 0;  // wrapping period along the vertical frequency axis
  int cols = 0;  // wrapping period along the horizontal frequency axis
};

/// Output of the wrapping curvelet transform. `tiles[0]` holds the single
/// isotropic lowpass tile; `tiles[j][l]` is angle `l` at detail scale `j`.
struct CurveletCoeffs {
  int image_rows = 0;
  int image_cols = 0;
  int n_scales = 0;
  int n_angles_coarse = 0;
  std::vector<std::vector<ComplexGrid>> tiles;
  std::vector<std::vector<TileShape>> shapes;

  const ComplexGrid& coarse() const { return tiles.at(0).at(0); }
  double energy() const;
};

/// Number of angular wedges at `scale` (>= 1): `n_angles_coarse` at the
/// second-coarsest scale, doubling every other scale after that.
int angles_at_scale(int scale, int n_angles_coarse);

/// ceil(log2(min(rows, cols))) - 3, never below 2.
int default_scale_count(int rows, int cols);

/// Precomputed frequency windows and wrapping geometry for one image size.
///
/// Radial windows are differences of separable Meyer lowpass windows
/// w(|w1|/b_j) * w(|w2|/b_j) with b_j = 2^-(J-1-j) in Nyquist units, where
/// w(u) = 1 below 1/2, 0 above 1, and cos(pi/2 * nu(2u - 1)) in between with
/// the Meyer polynomial nu(x) = x^4 (35 - 84x + 70x^2 - 20x^3). The finest
/// lowpass is identically 1, so squared windows telescope to 1. Angular
/// windows partition the perimeter of the normalized frequency square into
/// equal arcs with cos/sin crossfades a quarter arc wide on each side.
///
/// Each windowed wedge is wrapped onto a rows x cols grid whose periods are
/// at least the wedge's radial extent and its widest cross-section, so the
/// wrap never folds two support frequencies onto one cell.
class CurveletPlan {
 public:
  CurveletPlan(int rows, int cols, int n_scales, int n_angles_coarse);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int n_scales() const noexcept { return n_scales_; }
  int n_angles_coarse() const noexcept { return n_angles_coarse_; }

  CurveletCoeffs forward(const ComplexGrid& image) const;
  CurveletCoeffs forward(const GridF& image) const;
  /// Unwrap, multiply by the (real) windows, sum, and inverse transform.
  ComplexGrid adjoint(const CurveletCoeffs& coeffs) const;

  /// Sum over all tiles of the squared window value at each DFT bin.
  GridF window_energy() const;

 private:
  struct Entry {
    std::uint32_t freq;  // row-major index into the image spectrum
    std::uint32_t cell;  // row-major index into the wrapped tile
    double weight;
  };
  struct Tile {
    TileShape shape;
    std::vector<Entry> entries;
  };

  int rows_;
  int cols_;
  int n_scales_;
  int n_angles_coarse_;
  std::vector<std::vector<Tile>> tiles_;
};

CurveletCoeffs fdct_wrapping(const GridF& image, int n_scales, int n_angles_coarse);
/// Adjoint reconstruction, real part.
GridF ifdct_wrapping(const CurveletCoeffs& coeffs);

/// Real part of the lowpass tile.
GridF coarse_subband(const CurveletCoeffs& coeffs);

}  // namespace gradepipe
