#pragma once

#include "gradepipe/curvelet.hpp"
#include "gradepipe/lbp.hpp"
#include "gradepipe/raster.hpp"

namespace gradepipe {

struct TextureVector {
  double mean = 0.0;
  double std = 0.0;
};

struct TextureConfig {
  int lbp_points = 8;
  double lbp_radius = 1.0;
  int n_scales = 0;  // 0 picks default_scale_count() for the LBP map size
  int n_angles_coarse = 16;
};

/// Population mean and standard deviation, two-pass.
TextureVector texture_stats(const GridF& subband);

/// Plain LBP map of the masked image (pixels outside the mask set to 0).
LbpMap masked_lbp_map(const ImageF& gray, const BinaryMask& mask, const TextureConfig& config = {});

/// Masked plain LBP map -> wrapping curvelet transform -> statistics of the
/// real lowpass subband.
TextureVector texture_vector(const ImageF& gray, const BinaryMask& mask, const TextureConfig& config = {});

}  // namespace gradepipe
