#include <cmath>
#include <cstdio>
#include <numbers>

#include "gradepipe/error.hpp"
#include "gradepipe/harness.hpp"

namespace gradepipe {

namespace {

constexpr int kSize = 256;
constexpr std::array<double, 3> kBaseColor = {120.0, 70.0, 40.0};
constexpr double kBackground = 245.0;
constexpr double kBackgroundJitter = 5.0;
constexpr double kAxisJitter = 0.05;
constexpr double kCenterJitter = 8.0;
// Wrinkle relief shared by every grade: brightness ramps up along the rows
// within each period and drops at its end. Only the speckle amplitude,
// measured against this fixed ramp, tells the surface classes apart.
constexpr double kReliefDepth = 0.30;
constexpr double kReliefPeriod = 8.0;

struct GradeLook {
  double semi_major;
  double semi_minor;
  double speckle;
};

GradeLook look_for(Grade g) {
  const bool large = grade_index(g) % 2 == 1;
  const int surface = grade_index(g) / 2;  // soft, semi-hard, hard
  constexpr std::array<double, 3> kSpeckle = {0.02, 0.08, 0.16};
  return {large ? 95.0 : 70.0, large ? 55.0 : 40.0, kSpeckle[static_cast<std::size_t>(surface)]};
}

struct Rendered {
  Image8 image;
  Image8 highlight;
};

Rendered render(Grade grade, bool with_highlight, Rng& rng) {
  const GradeLook look = look_for(grade);
  const double scale = rng.uniform(1.0 - kAxisJitter, 1.0 + kAxisJitter);
  const double a = look.semi_major * scale;
  const double b = look.semi_minor * scale;
  const double theta = rng.uniform(0.0, std::numbers::pi);
  const double cx = (kSize - 1) / 2.0 + rng.uniform(-kCenterJitter, kCenterJitter);
  const double cy = (kSize - 1) / 2.0 + rng.uniform(-kCenterJitter, kCenterJitter);
  const double brightness = rng.uniform(0.95, 1.05);
  const double ct = std::cos(theta);
  const double st = std::sin(theta);

  // Highlight centre in the ellipse frame, kept well inside the outline.
  const double hu = rng.uniform(-0.4, 0.4) * a;
  const double hv = rng.uniform(-0.4, 0.4) * b;
  const double h_sigma = rng.uniform(6.0, 9.0);
  const double h_peak = rng.uniform(80.0, 95.0);
  const double relief_phase = rng.uniform(0.0, kReliefPeriod);

  Rendered out{Image8(kSize, kSize, 3), Image8(kSize, kSize, 1)};
  for (int y = 0; y < kSize; ++y) {
    for (int x = 0; x < kSize; ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      const double u = ct * dx + st * dy;
      const double v = -st * dx + ct * dy;
      const double rho2 = (u / a) * (u / a) + (v / b) * (v / b);
      if (rho2 > 1.0) {
        const auto g = quantize_sample(kBackground + rng.uniform(-kBackgroundJitter, kBackgroundJitter));
        for (int c = 0; c < 3; ++c) out.image.at(y, x, c) = g;
        continue;
      }
      // Dome shading, then a grey multiplicative speckle that leaves the
      // chromaticity of the base colour intact.
      const double ramp = (y + relief_phase) / kReliefPeriod;
      const double relief = 1.0 + kReliefDepth * (ramp - std::floor(ramp) - 0.5);
      const double shade = (0.7 + 0.3 * std::sqrt(1.0 - rho2)) * relief;
      const double speckle = 1.0 + look.speckle * rng.uniform(-1.0, 1.0);
      double h = 0.0;
      if (with_highlight) {
        const double du = u - hu;
        const double dv = v - hv;
        h = h_peak * std::exp(-(du * du + dv * dv) / (2.0 * h_sigma * h_sigma));
        if (h > 0.25 * h_peak) out.highlight.at(y, x, 0) = 255;
      }
      for (int c = 0; c < 3; ++c) {
        out.image.at(y, x, c) = quantize_sample(kBaseColor[static_cast<std::size_t>(c)] * brightness * shade * speckle + h);
      }
    }
  }
  return out;
}

}  // namespace

Manifest synth_dataset(int n_per_grade, std::uint64_t seed, const std::filesystem::path& out_dir,
                       std::vector<SynthSample>* samples) {
  if (n_per_grade < 2) throw Error(Errc::InvalidParameter, "n_per_grade must be at least 2");
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "images", ec);
  if (!ec) std::filesystem::create_directories(out_dir / "highlights", ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + out_dir.string() + ": " + ec.message());

  Rng rng(seed);
  Manifest manifest;
  manifest.dataset = "synthetic";
  if (samples) samples->clear();
  for (const Grade g : kAllGrades) {
    for (int i = 0; i < n_per_grade; ++i) {
      const bool with_highlight = i % 2 == 0;
      const Rendered r = render(g, with_highlight, rng);
      char stem[64];
      std::snprintf(stem, sizeof stem, "%s_%03d", std::string(grade_name(g)).c_str(), i);
      const auto image_path = out_dir / "images" / (std::string(stem) + ".ppm");
      const auto mask_path = out_dir / "highlights" / (std::string(stem) + ".pgm");
      save_image(r.image, image_path);
      save_image(r.highlight, mask_path);
      manifest.entries.push_back({image_path, g});
      if (samples) samples->push_back({image_path, mask_path, g, with_highlight});
    }
  }
  save_manifest(manifest, out_dir / "manifest.csv", out_dir);
  return manifest;
}

}  // namespace gradepipe
