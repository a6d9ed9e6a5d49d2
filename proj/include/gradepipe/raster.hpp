#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "gradepipe/error.hpp"

namespace gradepipe {

/// Row-major pixel grid with interleaved channels. `T` is `std::uint8_t` at
/// file boundaries and `double` for every internal computation.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, int channels = 1, T fill = T{})
      : width_(width), height_(height), channels_(channels),
        data_(static_cast<std::size_t>(width) * height * channels, fill) {
    if (width <= 0 || height <= 0 || (channels != 1 && channels != 3)) {
      throw Error(Errc::DimensionMismatch, "raster dimensions must be positive with 1 or 3 channels");
    }
  }
  Raster(int width, int height, int channels, std::vector<T> data)
      : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    if (width <= 0 || height <= 0 || (channels != 1 && channels != 3)) {
      throw Error(Errc::DimensionMismatch, "raster dimensions must be positive with 1 or 3 channels");
    }
    if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
      throw Error(Errc::DimensionMismatch, "sample count does not match width*height*channels");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
  bool empty() const noexcept { return data_.empty(); }

  T& at(int row, int col, int ch = 0) noexcept {
    return data_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + ch];
  }
  const T& at(int row, int col, int ch = 0) const noexcept {
    return data_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + ch];
  }

  std::span<T> samples() noexcept { return data_; }
  std::span<const T> samples() const noexcept { return data_; }

  bool same_shape(const Raster& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<T> data_;
};

using Image8 = Raster<std::uint8_t>;
using ImageF = Raster<double>;
/// Single-channel real field (chromaticity maps, subbands, gradients).
using GridF = Raster<double>;

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool contains(int row, int col) const noexcept {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }
  bool get(int row, int col) const noexcept {
    return bits_[static_cast<std::size_t>(row) * width_ + col] != 0;
  }
  /// Out-of-bounds reads are background.
  bool get_or_background(int row, int col) const noexcept { return contains(row, col) && get(row, col); }
  void set(int row, int col, bool value) noexcept {
    bits_[static_cast<std::size_t>(row) * width_ + col] = value ? 1 : 0;
  }
  std::size_t foreground_count() const noexcept;
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct PixelCoord {
  int row = 0;
  int col = 0;
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Ordered closed boundary trace.
struct Contour {
  std::vector<PixelCoord> points;
};

/// Reads binary PPM (P6) or PGM (P5) with maxval 255.
Image8 load_image(const std::filesystem::path& path);

/// Writes P5 for one channel, P6 for three.
void save_image(const Image8& image, const std::filesystem::path& path);
/// Real samples are clamped to [0,255] and rounded half-up before writing.
void save_image(const ImageF& image, const std::filesystem::path& path);

ImageF to_real(const Image8& image);
Image8 quantize(const ImageF& image);
std::uint8_t quantize_sample(double value) noexcept;

/// Rec. 601 luma: 0.299 R + 0.587 G + 0.114 B.
ImageF to_gray(const ImageF& rgb);
ImageF to_gray(const Image8& rgb);

Image8 mask_to_image(const BinaryMask& mask);

}  // namespace gradepipe
