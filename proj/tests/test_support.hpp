#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "gradepipe/error.hpp"
#include "gradepipe/raster.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("gradepipe_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline gradepipe::GridF random_grid(int width, int height, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  gradepipe::GridF g(width, height, 1);
  for (auto& v : g.samples()) v = dist(rng);
  return g;
}

/// Pixel (r, c) is foreground when its centre lies inside the ellipse with
/// semi-axes (a, b) rotated by `degrees`, centred at (cy, cx).
inline gradepipe::BinaryMask raster_ellipse(int width, int height, double cy, double cx, double a, double b,
                                            double degrees = 0.0) {
  const double t = degrees * std::acos(-1.0) / 180.0;
  gradepipe::BinaryMask m(width, height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const double dx = c - cx;
      const double dy = r - cy;
      const double u = std::cos(t) * dx + std::sin(t) * dy;
      const double v = -std::sin(t) * dx + std::cos(t) * dy;
      if ((u / a) * (u / a) + (v / b) * (v / b) <= 1.0) m.set(r, c, true);
    }
  }
  return m;
}

template <typename F>
gradepipe::Errc error_code_of(F&& f) {
  try {
    f();
  } catch (const gradepipe::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected a gradepipe::Error");
}

}  // namespace testing
