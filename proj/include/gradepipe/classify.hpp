#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gradepipe/shape.hpp"
#include "gradepipe/texture.hpp"

namespace gradepipe {

enum class Grade : int {
  SoftSmall = 0,
  SoftLarge = 1,
  SemiHardSmall = 2,
  SemiHardLarge = 3,
  HardSmall = 4,
  HardLarge = 5,
};

inline constexpr int kGradeCount = 6;
inline constexpr std::array<Grade, kGradeCount> kAllGrades = {Grade::SoftSmall,     Grade::SoftLarge,
                                                              Grade::SemiHardSmall, Grade::SemiHardLarge,
                                                              Grade::HardSmall,     Grade::HardLarge};

std::string_view grade_name(Grade grade) noexcept;
std::optional<Grade> parse_grade(std::string_view name) noexcept;
inline int grade_index(Grade grade) noexcept { return static_cast<int>(grade); }

struct FeatureVector {
  std::vector<double> values;
  bool normalized = false;
};

/// Fused layout: A, P, MAJL, MINL, E, ED, mu, sigma.
inline constexpr std::size_t kFusedLength = 8;

FeatureVector fuse(const ShapeVector& shape, const TextureVector& texture);

enum class FeatureMode { fused, shape, texture };
std::string_view feature_mode_name(FeatureMode mode) noexcept;
std::optional<FeatureMode> parse_feature_mode(std::string_view name) noexcept;
/// Shape-only keeps the first six fused components, texture-only the last two.
FeatureVector select_features(const FeatureVector& fused, FeatureMode mode);

struct NormStats {
  std::vector<double> mean;
  std::vector<double> std;

  FeatureVector apply(const FeatureVector& raw) const;
};

/// Per-feature population z-score over the set.
std::pair<std::vector<FeatureVector>, NormStats> normalize(std::span<const FeatureVector> vectors);

double euclidean(const FeatureVector& t, const FeatureVector& r);

struct LabeledVector {
  FeatureVector features;
  int label = 0;  // class index; grade_index() for the six grades
};

enum class ModelKind { knn, centroid, lda };
std::string_view model_kind_name(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept;

struct TrainOptions {
  int k = 4;
  bool normalize = true;
  /// Off only for toy problems with fewer than six classes.
  bool require_all_grades = true;
};

struct LdaParams {
  std::vector<int> classes;
  std::vector<std::vector<double>> means;
  std::vector<double> inv_cov;  // dim x dim, row-major
  std::vector<double> log_priors;
};

/// Immutable after train(); grade() is safe to call concurrently.
struct TrainedModel {
  std::optional<ModelKind> kind;
  int k = 0;
  std::size_t dim = 0;
  bool normalized = false;
  NormStats stats;
  FeatureMode features = FeatureMode::fused;
  std::vector<LabeledVector> samples;    // knn
  std::vector<LabeledVector> centroids;  // centroid, ascending label
  LdaParams lda;
};

TrainedModel train(ModelKind kind, std::span<const LabeledVector> vectors, const TrainOptions& options = {});

struct Prediction {
  int label = 0;
  /// knn: vote fraction; centroid: negative distance; lda: discriminant.
  double score = 0.0;
};

/// Raw queries are normalized with the model's statistics; queries already
/// flagged as normalized are used as given.
Prediction grade(const TrainedModel& model, const FeatureVector& query);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);
std::string serialize_model(const TrainedModel& model);
TrainedModel parse_model(const std::string& text);

}  // namespace gradepipe
