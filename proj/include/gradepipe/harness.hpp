#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gradepipe/classify.hpp"
#include "gradepipe/preprocess.hpp"
#include "gradepipe/texture.hpp"

namespace gradepipe {

struct ManifestEntry {
  std::filesystem::path path;
  Grade grade = Grade::SoftSmall;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  /// Taken from a leading `# dataset: <name>` comment, if present.
  std::string dataset;
};

/// Lines are `path,grade`. Blank lines and lines starting with '#' are
/// skipped. Relative paths are resolved against `base`.
Manifest parse_manifest(const std::string& text, const std::filesystem::path& base = {});
/// Relative paths are resolved against the manifest's own directory.
Manifest load_manifest(const std::filesystem::path& path);
/// Paths are written relative to `base` when they lie below it.
void save_manifest(const Manifest& manifest, const std::filesystem::path& path,
                   const std::filesystem::path& base = {});

/// Raw std::mt19937_64 output (fixed by the standard) with conversions done
/// here rather than by std:: distributions, whose algorithms vary between
/// library implementations. A seed gives the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, n) by rejection; n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

struct Split {
  Manifest train;
  Manifest test;
};

/// Per grade, a seeded shuffle sends floor(n/2) samples to train and the
/// rest to test. Train and test never share an entry.
Split split(const Manifest& manifest, std::uint64_t seed);

using ConfusionMatrix = std::array<std::array<int, kGradeCount>, kGradeCount>;

struct RateEntry {
  int count = 0;
  double percent = 0.0;
};

struct EvaluationReport {
  ConfusionMatrix confusion{};  // rows = true grade, cols = predicted
  std::array<double, kGradeCount> per_grade{};
  std::array<RateEntry, kGradeCount> tpr{};
  std::array<RateEntry, kGradeCount> fpr{};
  double average_accuracy = 0.0;
  double average_fpr = 0.0;
};

/// TPR% = diagonal / row sum, FPR% = off-diagonal / row sum, averages are
/// plain means over the grades.
EvaluationReport build_report(const ConfusionMatrix& confusion);

struct PipelineConfig {
  BilateralParams bilateral;
  TextureConfig texture;
  int k = 4;
  bool normalize = true;
  FeatureMode features = FeatureMode::fused;
  /// Overrides the manifest's dataset label when non-empty.
  std::string dataset;
  /// Also run every classifier on every feature subset.
  bool compare = true;
};

/// Full fused feature vector (unnormalized) of one RGB image.
FeatureVector extract_features(const ImageF& rgb, const PipelineConfig& config = {});
/// As above; errors are rethrown with the path prepended.
FeatureVector extract_features(const std::filesystem::path& image, const PipelineConfig& config = {});
/// Fused vectors for every manifest entry, in manifest order.
std::vector<FeatureVector> extract_all(const Manifest& manifest, const PipelineConfig& config = {});

struct ComparisonCell {
  ModelKind classifier = ModelKind::knn;
  FeatureMode features = FeatureMode::fused;
  std::optional<double> average_accuracy;  // empty when training failed
  std::string error;
};

struct Evaluation {
  ModelKind classifier = ModelKind::knn;
  int k = 0;
  std::uint64_t seed = 0;
  std::string dataset;
  FeatureMode features = FeatureMode::fused;
  EvaluationReport report;
  std::vector<ComparisonCell> comparison;
};

/// Grades the test split with a model trained on the train split, using
/// features that were already extracted for every manifest entry.
Evaluation evaluate_features(ModelKind classifier, const Manifest& manifest, const std::vector<FeatureVector>& fused,
                             std::uint64_t seed, const PipelineConfig& config = {});
Evaluation evaluate(ModelKind classifier, const Manifest& manifest, std::uint64_t seed,
                    const PipelineConfig& config = {});

/// Fixed key order, percentages rounded to 4 decimals.
std::string report_json(const Evaluation& evaluation);

struct SynthSample {
  std::filesystem::path image;
  std::filesystem::path highlight_mask;
  Grade grade = Grade::SoftSmall;
  bool has_highlight = false;
};

/// Writes `images/*.ppm`, `highlights/*.pgm` (255 inside the highlight
/// blob) and `manifest.csv` below `out_dir`.
Manifest synth_dataset(int n_per_grade, std::uint64_t seed, const std::filesystem::path& out_dir,
                       std::vector<SynthSample>* samples = nullptr);

}  // namespace gradepipe
