#include "gradepipe/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace gradepipe {

double Chromaticity::min() const noexcept { return std::min({sigma[0], sigma[1], sigma[2]}); }
double Chromaticity::max() const noexcept { return std::max({sigma[0], sigma[1], sigma[2]}); }

void BilateralParams::validate() const {
  if (!(spatial_sigma > 0.0) || !(range_sigma > 0.0) || window_radius <= 0 || max_iterations <= 0 ||
      !(convergence_epsilon > 0.0)) {
    throw Error(Errc::InvalidParameter, "bilateral parameters must all be positive");
  }
  if (window_radius < static_cast<int>(std::ceil(2.0 * spatial_sigma))) {
    throw Error(Errc::InvalidParameter, "window_radius must be at least ceil(2 * spatial_sigma)");
  }
}

Chromaticity chromaticity(const std::array<double, 3>& rgb) {
  const double sum = rgb[0] + rgb[1] + rgb[2];
  if (rgb[0] < 0.0 || rgb[1] < 0.0 || rgb[2] < 0.0) {
    throw Error(Errc::InvalidParameter, "negative channel value");
  }
  if (!(sum > 0.0)) throw Error(Errc::BlackPixel, "channel sum is zero");
  return Chromaticity{{rgb[0] / sum, rgb[1] / sum, rgb[2] / sum}};
}

DiffuseChromaticity diffuse_chromaticity(const Chromaticity& sigma) {
  const double lo = sigma.min();
  if (lo >= 1.0 / 3.0 - kAchromaticTolerance) {
    throw Error(Errc::AchromaticPixel, "minimum chromaticity is 1/3");
  }
  const double denom = 1.0 - 3.0 * lo;
  DiffuseChromaticity out;
  for (int c = 0; c < 3; ++c) out.lambda[c] = (sigma.sigma[c] - lo) / denom;
  out.lambda_max = std::max({out.lambda[0], out.lambda[1], out.lambda[2]});
  return out;
}

namespace {

std::vector<double> spatial_weights(const BilateralParams& params) {
  const int radius = params.window_radius;
  const int span = 2 * radius + 1;
  std::vector<double> spatial(static_cast<std::size_t>(span) * span);
  const double inv_s = 1.0 / (2.0 * params.spatial_sigma * params.spatial_sigma);
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      spatial[static_cast<std::size_t>(dy + radius) * span + (dx + radius)] = std::exp(-(dx * dx + dy * dy) * inv_s);
    }
  }
  return spatial;
}

// Joint weights depend only on lambda_max, which stays fixed while sigma_max
// is iterated, so they are computed once. Same expression and summation order
// as filter_max_chromaticity, hence bit-identical output.
class WeightTable {
 public:
  // Above this many stored pairs the caller falls back to the direct filter.
  static constexpr std::size_t kMaxEntries = std::size_t{12} << 20;

  static std::size_t entries_needed(std::span<const std::uint8_t> valid, int radius) {
    const std::size_t n = static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
    const std::size_t span = static_cast<std::size_t>(2 * radius + 1);
    return n * span * span;
  }

  WeightTable(const GridF& lambda_max, const BilateralParams& params, std::span<const std::uint8_t> valid) {
    const int w = lambda_max.width();
    const int h = lambda_max.height();
    const int radius = params.window_radius;
    const int span = 2 * radius + 1;
    const std::vector<double> spatial = spatial_weights(params);
    const double inv_r = 1.0 / (2.0 * params.range_sigma * params.range_sigma);
    const std::size_t bound = entries_needed(valid, radius);
    neighbours_.reserve(bound);
    weights_.reserve(bound);
    start_.push_back(0);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        if (!valid[static_cast<std::size_t>(r) * w + c]) continue;
        pixels_.push_back(static_cast<std::uint32_t>(r * w + c));
        const double guide = lambda_max.at(r, c);
        const int r0 = std::max(0, r - radius), r1 = std::min(h - 1, r + radius);
        const int c0 = std::max(0, c - radius), c1 = std::min(w - 1, c + radius);
        for (int qr = r0; qr <= r1; ++qr) {
          const double* srow = &spatial[static_cast<std::size_t>(qr - r + radius) * span];
          for (int qc = c0; qc <= c1; ++qc) {
            if (!valid[static_cast<std::size_t>(qr) * w + qc]) continue;
            const double d = lambda_max.at(qr, qc) - guide;
            neighbours_.push_back(static_cast<std::uint32_t>(qr * w + qc));
            weights_.push_back(srow[qc - c + radius] * std::exp(-d * d * inv_r));
          }
        }
        start_.push_back(neighbours_.size());
      }
    }
  }

  GridF apply(const GridF& sigma_max) const {
    GridF out = sigma_max;
    const auto in = sigma_max.samples();
    auto dst = out.samples();
    for (std::size_t p = 0; p < pixels_.size(); ++p) {
      double num = 0.0;
      double den = 0.0;
      for (std::size_t e = start_[p]; e < start_[p + 1]; ++e) {
        num += weights_[e] * in[neighbours_[e]];
        den += weights_[e];
      }
      dst[pixels_[p]] = num / den;
    }
    return out;
  }

 private:
  std::vector<std::uint32_t> pixels_;
  std::vector<std::size_t> start_;
  std::vector<std::uint32_t> neighbours_;
  std::vector<double> weights_;
};

}  // namespace

GridF filter_max_chromaticity(const GridF& sigma_max, const GridF& lambda_max, const BilateralParams& params,
                              std::span<const std::uint8_t> valid) {
  if (!sigma_max.same_shape(lambda_max) || sigma_max.channels() != 1) {
    throw Error(Errc::DimensionMismatch, "sigma_max and lambda_max fields differ in shape");
  }
  if (!valid.empty() && valid.size() != sigma_max.pixel_count()) {
    throw Error(Errc::DimensionMismatch, "validity mask differs in shape");
  }
  params.validate();

  const int w = sigma_max.width();
  const int h = sigma_max.height();
  const int radius = params.window_radius;
  const int span = 2 * radius + 1;
  const std::vector<double> spatial = spatial_weights(params);
  const double inv_r = 1.0 / (2.0 * params.range_sigma * params.range_sigma);
  auto is_valid = [&](int r, int c) { return valid.empty() || valid[static_cast<std::size_t>(r) * w + c] != 0; };

  GridF out = sigma_max;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!is_valid(r, c)) continue;
      const double guide = lambda_max.at(r, c);
      double num = 0.0;
      double den = 0.0;
      const int r0 = std::max(0, r - radius), r1 = std::min(h - 1, r + radius);
      const int c0 = std::max(0, c - radius), c1 = std::min(w - 1, c + radius);
      for (int qr = r0; qr <= r1; ++qr) {
        const double* srow = &spatial[static_cast<std::size_t>(qr - r + radius) * span];
        for (int qc = c0; qc <= c1; ++qc) {
          if (!is_valid(qr, qc)) continue;
          const double d = lambda_max.at(qr, qc) - guide;
          const double weight = srow[qc - c + radius] * std::exp(-d * d * inv_r);
          num += weight * sigma_max.at(qr, qc);
          den += weight;
        }
      }
      out.at(r, c) = num / den;  // den >= 1: the centre pixel always contributes
    }
  }
  return out;
}

SpecularResult remove_specular_detailed(const ImageF& rgb, const BilateralParams& params) {
  if (rgb.channels() != 3) throw Error(Errc::NotRgb, "specular removal needs a 3-channel image");
  params.validate();

  const int w = rgb.width();
  const int h = rgb.height();
  GridF sigma_max(w, h, 1);
  GridF lambda_max(w, h, 1);
  std::vector<std::uint8_t> chromatic(rgb.pixel_count(), 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::array<double, 3> px{rgb.at(r, c, 0), rgb.at(r, c, 1), rgb.at(r, c, 2)};
      if (!(px[0] + px[1] + px[2] > 0.0)) continue;
      const Chromaticity sigma = chromaticity(px);
      if (sigma.min() >= 1.0 / 3.0 - kAchromaticTolerance) continue;
      sigma_max.at(r, c) = sigma.max();
      lambda_max.at(r, c) = diffuse_chromaticity(sigma).lambda_max;
      chromatic[static_cast<std::size_t>(r) * w + c] = 1;
    }
  }

  std::optional<WeightTable> table;
  if (WeightTable::entries_needed(chromatic, params.window_radius) <= WeightTable::kMaxEntries) {
    table.emplace(lambda_max, params, chromatic);
  }

  SpecularResult result;
  for (int it = 0; it < params.max_iterations; ++it) {
    const GridF filtered =
        table ? table->apply(sigma_max) : filter_max_chromaticity(sigma_max, lambda_max, params, chromatic);
    double change = 0.0;
    auto cur = sigma_max.samples();
    const auto flt = filtered.samples();
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (!chromatic[i]) continue;
      const double next = std::max(cur[i], flt[i]);
      change = std::max(change, next - cur[i]);
      cur[i] = next;
    }
    result.iterations = it + 1;
    if (change < params.convergence_epsilon) break;
  }

  result.diffuse = rgb;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!chromatic[static_cast<std::size_t>(r) * w + c]) continue;
      const double s_max = sigma_max.at(r, c);
      const double i_max = std::max({rgb.at(r, c, 0), rgb.at(r, c, 1), rgb.at(r, c, 2)});
      const double i_sum = rgb.at(r, c, 0) + rgb.at(r, c, 1) + rgb.at(r, c, 2);
      const double specular = (i_max - s_max * i_sum) / (1.0 - 3.0 * s_max);
      for (int ch = 0; ch < 3; ++ch) {
        result.diffuse.at(r, c, ch) = std::clamp(rgb.at(r, c, ch) - specular, 0.0, 255.0);
      }
    }
  }
  return result;
}

ImageF remove_specular(const ImageF& rgb, const BilateralParams& params) {
  return remove_specular_detailed(rgb, params).diffuse;
}

int otsu_threshold(const ImageF& gray) {
  if (gray.channels() != 1) throw Error(Errc::WrongChannelCount, "thresholding expects a gray image");
  std::array<double, 256> hist{};
  for (const double v : gray.samples()) hist[quantize_sample(v)] += 1.0;

  const double total = static_cast<double>(gray.pixel_count());
  double total_sum = 0.0;
  for (int v = 0; v < 256; ++v) total_sum += v * hist[v];

  // Split {v < t} / {v >= t}; strict improvement keeps the smallest t on ties.
  double n0 = 0.0;
  double s0 = 0.0;
  double best = -1.0;
  int best_t = -1;
  for (int t = 1; t < 256; ++t) {
    n0 += hist[t - 1];
    s0 += (t - 1) * hist[t - 1];
    const double n1 = total - n0;
    if (n0 == 0.0 || n1 == 0.0) continue;
    const double diff = s0 / n0 - (total_sum - s0) / n1;
    const double between = n0 * n1 * diff * diff;
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  if (best_t < 0) throw Error(Errc::ConstantImage, "no threshold separates the image");
  return best_t;
}

BinaryMask threshold_segment(const ImageF& gray) {
  const int t = otsu_threshold(gray);
  BinaryMask mask(gray.width(), gray.height());
  for (int r = 0; r < gray.height(); ++r) {
    for (int c = 0; c < gray.width(); ++c) mask.set(r, c, quantize_sample(gray.at(r, c)) < t);
  }
  return mask;
}

BinaryMask largest_component(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<std::size_t> sizes;
  std::vector<std::pair<int, int>> stack;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask.get(r, c) || label[static_cast<std::size_t>(r) * w + c] >= 0) continue;
      const int id = static_cast<int>(sizes.size());
      std::size_t count = 0;
      stack.assign(1, {r, c});
      label[static_cast<std::size_t>(r) * w + c] = id;
      while (!stack.empty()) {
        const auto [pr, pc] = stack.back();
        stack.pop_back();
        ++count;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int qr = pr + dr, qc = pc + dc;
            if (!mask.contains(qr, qc) || !mask.get(qr, qc)) continue;
            int& l = label[static_cast<std::size_t>(qr) * w + qc];
            if (l >= 0) continue;
            l = id;
            stack.emplace_back(qr, qc);
          }
        }
      }
      sizes.push_back(count);
    }
  }
  BinaryMask out(w, h);
  if (sizes.empty()) return out;
  // First maximum in scan order wins ties.
  const int keep = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) out.set(r, c, label[static_cast<std::size_t>(r) * w + c] == keep);
  }
  return out;
}

BinaryMask fill_holes(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::uint8_t> outside(static_cast<std::size_t>(w) * h, 0);
  std::deque<std::pair<int, int>> queue;
  auto seed = [&](int r, int c) {
    auto& o = outside[static_cast<std::size_t>(r) * w + c];
    if (!mask.get(r, c) && !o) {
      o = 1;
      queue.emplace_back(r, c);
    }
  };
  for (int c = 0; c < w; ++c) {
    seed(0, c);
    seed(h - 1, c);
  }
  for (int r = 0; r < h; ++r) {
    seed(r, 0);
    seed(r, w - 1);
  }
  constexpr int kDr[4] = {-1, 1, 0, 0};
  constexpr int kDc[4] = {0, 0, -1, 1};
  while (!queue.empty()) {
    const auto [r, c] = queue.front();
    queue.pop_front();
    for (int k = 0; k < 4; ++k) {
      const int qr = r + kDr[k], qc = c + kDc[k];
      if (mask.contains(qr, qc)) seed(qr, qc);
    }
  }
  BinaryMask out(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) out.set(r, c, !outside[static_cast<std::size_t>(r) * w + c]);
  }
  return out;
}

std::pair<GridF, GridF> sobel_gradients(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  auto v = [&](int r, int c) {
    return mask.get(std::clamp(r, 0, h - 1), std::clamp(c, 0, w - 1)) ? 1.0 : 0.0;
  };
  GridF gx(w, h, 1);
  GridF gy(w, h, 1);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      gx.at(r, c) = (v(r - 1, c + 1) + 2.0 * v(r, c + 1) + v(r + 1, c + 1)) -
                    (v(r - 1, c - 1) + 2.0 * v(r, c - 1) + v(r + 1, c - 1));
      gy.at(r, c) = (v(r + 1, c - 1) + 2.0 * v(r + 1, c) + v(r + 1, c + 1)) -
                    (v(r - 1, c - 1) + 2.0 * v(r - 1, c) + v(r - 1, c + 1));
    }
  }
  return {std::move(gx), std::move(gy)};
}

namespace {

// Clockwise Moore ring in image coordinates (row grows downward).
constexpr int kRingDr[8] = {0, -1, -1, -1, 0, 1, 1, 1};
constexpr int kRingDc[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

int ring_index(int dr, int dc) {
  for (int k = 0; k < 8; ++k) {
    if (kRingDr[k] == dr && kRingDc[k] == dc) return k;
  }
  return -1;
}

}  // namespace

Contour trace_boundary(const BinaryMask& mask) {
  PixelCoord start{-1, -1};
  for (int r = 0; r < mask.height() && start.row < 0; ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (mask.get(r, c)) {
        start = {r, c};
        break;
      }
    }
  }
  if (start.row < 0) throw Error(Errc::EmptyMask, "no foreground pixel to trace");

  Contour contour;
  contour.points.push_back(start);
  PixelCoord p = start;
  int back = 0;  // ring index of the backtrack pixel seen from p; start is entered from the west
  PixelCoord first_step{-1, -1};
  int first_back = -1;
  bool at_start_again = false;
  const std::size_t limit = 4 * static_cast<std::size_t>(mask.width()) * mask.height() + 8;
  for (std::size_t steps = 0; steps < limit; ++steps) {
    int found = -1;
    for (int k = 1; k <= 8; ++k) {
      const int d = (back + k) % 8;
      if (mask.get_or_background(p.row + kRingDr[d], p.col + kRingDc[d])) {
        found = d;
        break;
      }
    }
    if (found < 0) break;  // isolated pixel
    const int prev = (found + 7) % 8;
    const PixelCoord q{p.row + kRingDr[found], p.col + kRingDc[found]};
    const int back_q = ring_index(p.row + kRingDr[prev] - q.row, p.col + kRingDc[prev] - q.col);
    if (steps == 0) {
      first_step = q;
      first_back = back_q;
    } else if (at_start_again) {
      // Leaving start exactly as on the first step closes the loop.
      if (q == first_step && back_q == first_back) break;
      contour.points.push_back(start);
      at_start_again = false;
    }
    p = q;
    back = back_q;
    if (p == start) {
      if (back == 0) break;  // Jacob's criterion
      at_start_again = true;
      continue;
    }
    contour.points.push_back(p);
  }
  return contour;
}

SobelContour sobel_contour(const BinaryMask& mask) {
  if (mask.foreground_count() == 0) throw Error(Errc::EmptyMask, "mask has no foreground");
  const BinaryMask largest = largest_component(mask);
  for (int c = 0; c < largest.width(); ++c) {
    if (largest.get(0, c) || largest.get(largest.height() - 1, c)) {
      throw Error(Errc::ForegroundTouchesBorder, "foreground reaches the top or bottom edge");
    }
  }
  for (int r = 0; r < largest.height(); ++r) {
    if (largest.get(r, 0) || largest.get(r, largest.width() - 1)) {
      throw Error(Errc::ForegroundTouchesBorder, "foreground reaches the left or right edge");
    }
  }
  auto [gx, gy] = sobel_gradients(mask);
  GridF magnitude(mask.width(), mask.height(), 1);
  auto m = magnitude.samples();
  const auto x = gx.samples();
  const auto y = gy.samples();
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::hypot(x[i], y[i]);
  return SobelContour{trace_boundary(largest), std::move(magnitude)};
}

Segmentation segment_fruit(const ImageF& rgb, const BilateralParams& params) {
  ImageF diffuse = remove_specular(rgb, params);
  const BinaryMask raw = threshold_segment(to_gray(diffuse));
  BinaryMask mask = fill_holes(largest_component(raw));
  return Segmentation{std::move(diffuse), std::move(mask)};
}

}  // namespace gradepipe
