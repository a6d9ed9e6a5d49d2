#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "gradepipe/preprocess.hpp"
#include "test_support.hpp"

using namespace gradepipe;
using testing::error_code_of;

namespace {

/// Direct evaluation of the joint bilateral sum over the clipped window.
GridF bilateral_oracle(const GridF& s, const GridF& l, double ss, double rs, int radius) {
  GridF out(s.width(), s.height(), 1);
  for (int r = 0; r < s.height(); ++r) {
    for (int c = 0; c < s.width(); ++c) {
      double num = 0.0;
      double den = 0.0;
      for (int qr = r - radius; qr <= r + radius; ++qr) {
        for (int qc = c - radius; qc <= c + radius; ++qc) {
          if (qr < 0 || qc < 0 || qr >= s.height() || qc >= s.width()) continue;
          const double dist2 = (qr - r) * (qr - r) + (qc - c) * (qc - c);
          const double dl = l.at(qr, qc) - l.at(r, c);
          const double w = std::exp(-dist2 / (2 * ss * ss)) * std::exp(-dl * dl / (2 * rs * rs));
          num += w * s.at(qr, qc);
          den += w;
        }
      }
      out.at(r, c) = num / den;
    }
  }
  return out;
}

ImageF gray_image(int w, int h, double v) { return ImageF(w, h, 1, v); }

/// Exhaustive between-class variance maximization over rounded gray values.
int otsu_oracle(const ImageF& gray) {
  std::vector<double> hist(256, 0.0);
  for (const double v : gray.samples()) hist[static_cast<std::size_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0))] += 1;
  double best = -1.0;
  int best_t = -1;
  for (int t = 1; t <= 255; ++t) {
    double n0 = 0, s0 = 0, n1 = 0, s1 = 0;
    for (int k = 0; k < 256; ++k) {
      if (k < t) {
        n0 += hist[k];
        s0 += k * hist[k];
      } else {
        n1 += hist[k];
        s1 += k * hist[k];
      }
    }
    if (n0 == 0 || n1 == 0) continue;
    const double m0 = s0 / n0, m1 = s1 / n1;
    const double between = n0 * n1 * (m0 - m1) * (m0 - m1);
    if (between > best * (1 + 1e-12) + 1e-12) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

/// Background reachable from the border through 4-neighbours stays
/// background; everything else becomes foreground.
BinaryMask holes_oracle(const BinaryMask& m) {
  const int w = m.width(), h = m.height();
  std::vector<char> outside(static_cast<std::size_t>(w) * h, 0);
  std::deque<std::pair<int, int>> q;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if ((r == 0 || c == 0 || r == h - 1 || c == w - 1) && !m.get(r, c)) {
        outside[static_cast<std::size_t>(r) * w + c] = 1;
        q.emplace_back(r, c);
      }
    }
  }
  while (!q.empty()) {
    const auto [r, c] = q.front();
    q.pop_front();
    const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
      const int nr = r + dr[k], nc = c + dc[k];
      if (!m.contains(nr, nc) || m.get(nr, nc) || outside[static_cast<std::size_t>(nr) * w + nc]) continue;
      outside[static_cast<std::size_t>(nr) * w + nc] = 1;
      q.emplace_back(nr, nc);
    }
  }
  BinaryMask out(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) out.set(r, c, m.get(r, c) || !outside[static_cast<std::size_t>(r) * w + c]);
  }
  return out;
}

bool is_boundary(const BinaryMask& m, int r, int c) {
  return m.get(r, c) && (!m.get_or_background(r - 1, c) || !m.get_or_background(r + 1, c) ||
                         !m.get_or_background(r, c - 1) || !m.get_or_background(r, c + 1));
}

ImageF shaded_disk(int size, double radius, std::array<double, 3> color) {
  ImageF img(size, size, 3, 0.0);
  const double cy = (size - 1) / 2.0, cx = cy;
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      const double d2 = ((r - cy) * (r - cy) + (c - cx) * (c - cx)) / (radius * radius);
      double shade = d2 <= 1.0 ? 0.4 + 0.6 * std::sqrt(1.0 - d2) : 0.0;
      for (int ch = 0; ch < 3; ++ch) img.at(r, c, ch) = d2 <= 1.0 ? color[ch] * shade : 230.0;
    }
  }
  return img;
}

}  // namespace

TEST_CASE("chromaticity examples") {
  const auto a = chromaticity({100, 100, 100});
  for (const double s : a.sigma) CHECK(s == doctest::Approx(1.0 / 3.0));
  CHECK(a.min() == doctest::Approx(1.0 / 3.0));
  CHECK(a.max() == doctest::Approx(1.0 / 3.0));
  const auto b = chromaticity({255, 0, 0});
  CHECK(b.sigma[0] == 1.0);
  CHECK(b.min() == 0.0);
  CHECK(b.max() == 1.0);
  const auto c = chromaticity({120, 60, 60});
  CHECK(c.sigma[0] == 0.5);
  CHECK(c.sigma[1] == 0.25);
  CHECK(c.max() == 0.5);
  CHECK(error_code_of([] { chromaticity({0, 0, 0}); }) == Errc::BlackPixel);
}

TEST_CASE("chromaticity components sum to one and bracket 1/3") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  for (int i = 0; i < 2000; ++i) {
    const auto s = chromaticity({u(rng), u(rng), u(rng)});
    CHECK(std::abs(s.sigma[0] + s.sigma[1] + s.sigma[2] - 1.0) < 1e-12);
    CHECK(s.max() >= 1.0 / 3.0 - 1e-15);
    CHECK(s.min() <= 1.0 / 3.0 + 1e-15);
  }
}

TEST_CASE("diffuse chromaticity examples") {
  const auto a = diffuse_chromaticity(Chromaticity{{1.0, 0.0, 0.0}});
  CHECK(a.lambda[0] == 1.0);
  CHECK(a.lambda_max == 1.0);
  const auto b = diffuse_chromaticity(Chromaticity{{0.5, 0.3, 0.2}});
  CHECK(b.lambda[0] == doctest::Approx(0.75));
  CHECK(b.lambda_max == doctest::Approx(0.75));
  CHECK(error_code_of([] { diffuse_chromaticity(Chromaticity{{1.0 / 3, 1.0 / 3, 1.0 / 3}}); }) ==
        Errc::AchromaticPixel);
}

TEST_CASE("bilateral parameters are validated") {
  BilateralParams p;
  CHECK_NOTHROW(p.validate());
  p.window_radius = 7;  // below ceil(2 * 4)
  CHECK(error_code_of([&] { p.validate(); }) == Errc::InvalidParameter);
  p = {};
  p.range_sigma = 0.0;
  CHECK(error_code_of([&] { p.validate(); }) == Errc::InvalidParameter);
}

TEST_CASE("filter of a constant field is constant") {
  const GridF s(20, 15, 1, 0.42);
  const GridF l = testing::random_grid(20, 15, 9, 0.3, 0.9);
  const GridF out = filter_max_chromaticity(s, l, BilateralParams{});
  for (const double v : out.samples()) CHECK(v == doctest::Approx(0.42).epsilon(1e-12));
}

TEST_CASE("a window that only sees its centre is the identity") {
  BilateralParams p;
  p.spatial_sigma = 0.05;
  p.window_radius = 1;
  const GridF s = testing::random_grid(9, 7, 1, 0.4, 0.9);
  const GridF l = testing::random_grid(9, 7, 2, 0.4, 0.9);
  const GridF out = filter_max_chromaticity(s, l, p);
  for (std::size_t i = 0; i < out.samples().size(); ++i) CHECK(out.samples()[i] == s.samples()[i]);
}

TEST_CASE("filter matches a direct evaluation of the weighted sum") {
  SUBCASE("5x5 centre impulse") {
    GridF s(5, 5, 1, 0.4);
    s.at(2, 2) = 0.9;
    const GridF l(5, 5, 1, 0.5);
    BilateralParams p;
    p.spatial_sigma = 1.0;
    p.range_sigma = 100.0;
    p.window_radius = 2;
    const GridF out = filter_max_chromaticity(s, l, p);
    const GridF want = bilateral_oracle(s, l, 1.0, 100.0, 2);
    CHECK(out.at(2, 2) < 0.9);
    CHECK(out.at(2, 2) > 0.4);
    for (std::size_t i = 0; i < 25; ++i) CHECK(out.samples()[i] == doctest::Approx(want.samples()[i]).epsilon(1e-12));
  }
  SUBCASE("random fields with default parameters") {
    const GridF s = testing::random_grid(23, 19, 4, 0.34, 1.0);
    const GridF l = testing::random_grid(23, 19, 5, 0.0, 1.0);
    const GridF out = filter_max_chromaticity(s, l, BilateralParams{});
    const GridF want = bilateral_oracle(s, l, 4.0, 0.1, 8);
    for (std::size_t i = 0; i < out.samples().size(); ++i) {
      CHECK(out.samples()[i] == doctest::Approx(want.samples()[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("filter output stays within its window's range") {
  BilateralParams p;
  p.spatial_sigma = 1.5;
  p.window_radius = 3;
  const GridF s = testing::random_grid(30, 30, 8, 0.34, 1.0);
  const GridF l = testing::random_grid(30, 30, 9, 0.0, 1.0);
  const GridF out = filter_max_chromaticity(s, l, p);
  for (int r = 0; r < 30; ++r) {
    for (int c = 0; c < 30; ++c) {
      double lo = 1e9, hi = -1e9;
      for (int qr = std::max(0, r - 3); qr <= std::min(29, r + 3); ++qr) {
        for (int qc = std::max(0, c - 3); qc <= std::min(29, c + 3); ++qc) {
          lo = std::min(lo, s.at(qr, qc));
          hi = std::max(hi, s.at(qr, qc));
        }
      }
      CHECK(out.at(r, c) >= lo - 1e-12);
      CHECK(out.at(r, c) <= hi + 1e-12);
    }
  }
  CHECK(error_code_of([&] { filter_max_chromaticity(s, GridF(29, 30, 1), p); }) == Errc::DimensionMismatch);
}

TEST_CASE("remove_specular leaves a purely diffuse single-hue image alone") {
  const ImageF img = shaded_disk(48, 20.0, {200.0, 120.0, 60.0});
  const ImageF out = remove_specular(img);
  for (std::size_t i = 0; i < img.samples().size(); ++i) {
    CHECK(std::abs(out.samples()[i] - img.samples()[i]) < 1.0);
  }
}

TEST_CASE("remove_specular reduces a white highlight on a red disk") {
  ImageF img = shaded_disk(64, 26.0, {200.0, 40.0, 30.0});
  const ImageF clean = img;
  std::vector<std::uint8_t> highlight(img.pixel_count(), 0);
  for (int r = 0; r < 64; ++r) {
    for (int c = 0; c < 64; ++c) {
      const double d2 = (r - 26.0) * (r - 26.0) + (c - 28.0) * (c - 28.0);
      const double h = 50.0 * std::exp(-d2 / (2 * 3.0 * 3.0));
      if (h > 5.0) {
        highlight[static_cast<std::size_t>(r) * 64 + c] = 1;
        for (int ch = 0; ch < 3; ++ch) img.at(r, c, ch) += h;
      }
    }
  }
  const ImageF out = remove_specular(img);
  // Direct dichromatic inversion with the known diffuse chromaticity.
  const double true_sigma = 200.0 / 270.0;
  double before = 0.0, after = 0.0, oracle = 0.0;
  int n = 0;
  for (int r = 0; r < 64; ++r) {
    for (int c = 0; c < 64; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * 64 + c;
      const double in_max = std::max({img.at(r, c, 0), img.at(r, c, 1), img.at(r, c, 2)});
      const double out_max = std::max({out.at(r, c, 0), out.at(r, c, 1), out.at(r, c, 2)});
      if (highlight[i]) {
        const double sum = img.at(r, c, 0) + img.at(r, c, 1) + img.at(r, c, 2);
        const double s = (in_max - true_sigma * sum) / (1 - 3 * true_sigma);
        CHECK(out_max < in_max);
        CHECK(out_max >= in_max - s - 1e-9);  // never removes more than the true specular part
        before += in_max;
        after += out_max;
        oracle += in_max - s;
        ++n;
      } else {
        for (int ch = 0; ch < 3; ++ch) CHECK(std::abs(out.at(r, c, ch) - clean.at(r, c, ch)) < 1.0);
      }
    }
  }
  REQUIRE(n > 0);
  // Most of the gap to the oracle is closed.
  CHECK((before - after) > 0.5 * (before - oracle));
}

TEST_CASE("remove_specular copies an achromatic image through") {
  ImageF img(16, 16, 3);
  std::mt19937_64 rng(1);
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) {
      const double v = static_cast<double>(rng() % 256);
      for (int ch = 0; ch < 3; ++ch) img.at(r, c, ch) = v;
    }
  }
  CHECK(remove_specular(img) == img);
  CHECK(error_code_of([] { remove_specular(ImageF(8, 8, 1)); }) == Errc::NotRgb);
}

TEST_CASE("remove_specular stops within the iteration budget") {
  const ImageF img = shaded_disk(32, 12.0, {180.0, 90.0, 50.0});
  BilateralParams p;
  p.max_iterations = 3;
  const auto res = remove_specular_detailed(img, p);
  CHECK(res.iterations >= 1);
  CHECK(res.iterations <= 3);
}

TEST_CASE("remove_specular matches the iterated filter exactly") {
  ImageF img = shaded_disk(40, 16.0, {190.0, 100.0, 45.0});
  std::mt19937_64 rng(3);
  for (auto& v : img.samples()) v = std::min(255.0, v + static_cast<double>(rng() % 7));
  for (int r = 14; r < 22; ++r) {
    for (int c = 16; c < 22; ++c) {
      for (int ch = 0; ch < 3; ++ch) img.at(r, c, ch) = std::min(255.0, img.at(r, c, ch) + 40.0);
    }
  }
  BilateralParams p;
  p.spatial_sigma = 2.0;
  p.window_radius = 4;
  p.max_iterations = 6;
  p.convergence_epsilon = 1e-12;
  const SpecularResult res = remove_specular_detailed(img, p);
  REQUIRE(res.iterations == 6);

  GridF sigma_max(40, 40, 1), lambda_max(40, 40, 1);
  std::vector<std::uint8_t> valid(img.pixel_count(), 0);
  for (int r = 0; r < 40; ++r) {
    for (int c = 0; c < 40; ++c) {
      const std::array<double, 3> px{img.at(r, c, 0), img.at(r, c, 1), img.at(r, c, 2)};
      if (!(px[0] + px[1] + px[2] > 0.0)) continue;
      const Chromaticity s = chromaticity(px);
      if (s.min() >= 1.0 / 3.0 - kAchromaticTolerance) continue;
      sigma_max.at(r, c) = s.max();
      lambda_max.at(r, c) = diffuse_chromaticity(s).lambda_max;
      valid[static_cast<std::size_t>(r) * 40 + c] = 1;
    }
  }
  for (int it = 0; it < 6; ++it) {
    const GridF f = filter_max_chromaticity(sigma_max, lambda_max, p, valid);
    for (std::size_t i = 0; i < valid.size(); ++i) {
      if (valid[i]) sigma_max.samples()[i] = std::max(sigma_max.samples()[i], f.samples()[i]);
    }
  }
  for (int r = 0; r < 40; ++r) {
    for (int c = 0; c < 40; ++c) {
      if (!valid[static_cast<std::size_t>(r) * 40 + c]) continue;
      const double s_max = sigma_max.at(r, c);
      const double i_max = std::max({img.at(r, c, 0), img.at(r, c, 1), img.at(r, c, 2)});
      const double i_sum = img.at(r, c, 0) + img.at(r, c, 1) + img.at(r, c, 2);
      const double spec = (i_max - s_max * i_sum) / (1.0 - 3.0 * s_max);
      for (int ch = 0; ch < 3; ++ch) {
        CHECK(res.diffuse.at(r, c, ch) == std::clamp(img.at(r, c, ch) - spec, 0.0, 255.0));
      }
    }
  }
}

TEST_CASE("Otsu threshold examples") {
  ImageF img = gray_image(20, 20, 200.0);
  for (int r = 5; r < 12; ++r) {
    for (int c = 3; c < 15; ++c) img.at(r, c) = 50.0;
  }
  const BinaryMask m = threshold_segment(img);
  for (int r = 0; r < 20; ++r) {
    for (int c = 0; c < 20; ++c) CHECK(m.get(r, c) == (img.at(r, c) == 50.0));
  }
  CHECK(error_code_of([] { threshold_segment(gray_image(4, 4, 7.0)); }) == Errc::ConstantImage);
  ImageF two(2, 1, 1);
  two.at(0, 1) = 255.0;
  const BinaryMask m2 = threshold_segment(two);
  CHECK(m2.get(0, 0));
  CHECK(!m2.get(0, 1));
}

TEST_CASE("Otsu matches an exhaustive search") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    ImageF img(24, 24, 1);
    const double m0 = 20 + static_cast<double>(rng() % 80), m1 = 140 + static_cast<double>(rng() % 100);
    std::normal_distribution<double> n0(m0, 15.0), n1(m1, 20.0);
    for (auto& v : img.samples()) v = std::clamp(rng() % 3 == 0 ? n0(rng) : n1(rng), 0.0, 255.0);
    CHECK(otsu_threshold(img) == otsu_oracle(img));
  }
}

TEST_CASE("inverting the image complements the mask") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    ImageF img(16, 16, 1);
    for (auto& v : img.samples()) v = static_cast<double>(rng() % 2 ? 30 + rng() % 60 : 150 + rng() % 90);
    ImageF inv = img;
    for (auto& v : inv.samples()) v = 255.0 - v;
    const BinaryMask a = threshold_segment(img);
    const BinaryMask b = threshold_segment(inv);
    for (int r = 0; r < 16; ++r) {
      for (int c = 0; c < 16; ++c) CHECK(a.get(r, c) != b.get(r, c));
    }
  }
}

TEST_CASE("largest_component keeps the biggest 8-connected blob") {
  BinaryMask m(10, 10);
  m.set(1, 1, true);
  m.set(2, 2, true);  // diagonal neighbour: same component
  m.set(3, 3, true);
  m.set(7, 7, true);
  m.set(7, 8, true);
  const BinaryMask out = largest_component(m);
  CHECK(out.foreground_count() == 3);
  CHECK(out.get(2, 2));
  CHECK(!out.get(7, 7));
}

TEST_CASE("fill_holes examples and properties") {
  SUBCASE("ring becomes a disk") {
    BinaryMask ring = testing::raster_ellipse(40, 40, 19.5, 19.5, 15, 15);
    const BinaryMask disk = ring;
    const BinaryMask inner = testing::raster_ellipse(40, 40, 19.5, 19.5, 7, 7);
    for (int r = 0; r < 40; ++r) {
      for (int c = 0; c < 40; ++c) {
        if (inner.get(r, c)) ring.set(r, c, false);
      }
    }
    CHECK(fill_holes(ring) == disk);
    CHECK(fill_holes(disk) == disk);
  }
  SUBCASE("a channel to the border keeps the region open") {
    BinaryMask m(12, 12);
    for (int r = 2; r < 10; ++r) {
      for (int c = 2; c < 10; ++c) m.set(r, c, r < 3 || r > 8 || c < 3 || c > 8);
    }
    for (int c = 0; c < 3; ++c) m.set(5, c, false);  // channel through the left wall
    const BinaryMask out = fill_holes(m);
    CHECK(out == holes_oracle(m));
    CHECK(!out.get(5, 5));
  }
  SUBCASE("random masks agree with the flood-fill oracle") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
      BinaryMask m(15, 13);
      for (int r = 0; r < 13; ++r) {
        for (int c = 0; c < 15; ++c) m.set(r, c, rng() % 100 < 55);
      }
      const BinaryMask out = fill_holes(m);
      CHECK(out == holes_oracle(m));
      CHECK(fill_holes(out) == out);
      for (int r = 0; r < 13; ++r) {
        for (int c = 0; c < 15; ++c) {
          if (m.get(r, c)) CHECK(out.get(r, c));
        }
      }
    }
  }
}

TEST_CASE("Sobel response of a vertical step") {
  BinaryMask m(10, 6);
  for (int r = 0; r < 6; ++r) {
    for (int c = 5; c < 10; ++c) m.set(r, c, true);
  }
  const auto [gx, gy] = sobel_gradients(m);
  for (int r = 0; r < 6; ++r) {
    CHECK(gx.at(r, 4) == 4.0);
    CHECK(gx.at(r, 5) == 4.0);
    CHECK(gx.at(r, 1) == 0.0);
    CHECK(gx.at(r, 8) == 0.0);
    for (int c = 0; c < 10; ++c) CHECK(gy.at(r, c) == 0.0);
  }
}

TEST_CASE("Sobel contour of a disk is a closed loop of boundary pixels") {
  const BinaryMask disk = testing::raster_ellipse(64, 64, 31.5, 31.5, 20, 20);
  const SobelContour sc = sobel_contour(disk);
  const auto& pts = sc.contour.points;
  REQUIRE(pts.size() > 8);
  for (const auto& p : pts) CHECK(is_boundary(disk, p.row, p.col));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& a = pts[i];
    const auto& b = pts[(i + 1) % pts.size()];
    CHECK(std::max(std::abs(a.row - b.row), std::abs(a.col - b.col)) == 1);
  }
  // starts at the topmost, then leftmost, foreground pixel
  int top = 64, left = 64;
  for (int r = 0; r < 64 && top == 64; ++r) {
    for (int c = 0; c < 64; ++c) {
      if (disk.get(r, c)) {
        top = r;
        left = c;
        break;
      }
    }
  }
  CHECK(pts.front().row == top);
  CHECK(pts.front().col == left);
  // gradient vanishes on constant regions
  CHECK(sc.magnitude.at(31, 31) == 0.0);
  CHECK(sc.magnitude.at(0, 0) == 0.0);
  // every 8-connected boundary pixel of a convex disk is visited
  std::size_t boundary = 0;
  for (int r = 0; r < 64; ++r) {
    for (int c = 0; c < 64; ++c) boundary += is_boundary(disk, r, c);
  }
  CHECK(pts.size() == boundary);
}

TEST_CASE("contour tracing handles thin shapes") {
  BinaryMask pair(6, 5);
  pair.set(2, 2, true);
  pair.set(2, 3, true);
  CHECK(trace_boundary(pair).points.size() == 2);
  BinaryMask dot(5, 5);
  dot.set(2, 2, true);
  CHECK(trace_boundary(dot).points.size() == 1);
}

TEST_CASE("Sobel contour errors") {
  CHECK(error_code_of([] { sobel_contour(BinaryMask(8, 8)); }) == Errc::EmptyMask);
  BinaryMask edge(8, 8);
  edge.set(0, 3, true);
  CHECK(error_code_of([&] { sobel_contour(edge); }) == Errc::ForegroundTouchesBorder);
}

TEST_CASE("segment_fruit recovers a dark fruit on a white background") {
  ImageF img(80, 80, 3);
  const BinaryMask truth = testing::raster_ellipse(80, 80, 40, 38, 25, 15, 20);
  std::mt19937_64 rng(2);
  for (int r = 0; r < 80; ++r) {
    for (int c = 0; c < 80; ++c) {
      const double bg = 240.0 + static_cast<double>(rng() % 10);
      const std::array<double, 3> fruit = {120.0, 70.0, 40.0};
      for (int ch = 0; ch < 3; ++ch) img.at(r, c, ch) = truth.get(r, c) ? fruit[ch] : bg;
    }
  }
  img.at(40, 38, 0) = img.at(40, 38, 1) = img.at(40, 38, 2) = 250.0;  // bright speck inside: a hole to fill
  img.at(5, 5, 0) = img.at(5, 5, 1) = img.at(5, 5, 2) = 10.0;         // dark speck outside: a stray component
  const Segmentation seg = segment_fruit(img);
  CHECK(seg.mask == truth);
}
