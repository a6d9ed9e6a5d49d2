#include "gradepipe/classify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "gradepipe/error.hpp"

namespace gradepipe {

namespace {

constexpr std::array<std::string_view, kGradeCount> kGradeNames = {
    "Soft_Small", "Soft_Large", "Semi_Hard_Small", "Semi_Hard_Large", "Hard_Small", "Hard_Large"};

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(Errc::NonFiniteInput, std::string(what) + " component " + std::to_string(i) + " is not finite");
    }
  }
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

FeatureVector prepare_query(const TrainedModel& model, const FeatureVector& query) {
  if (query.values.size() != model.dim) {
    throw Error(Errc::LengthMismatch, "query has " + std::to_string(query.values.size()) + " features, model expects " +
                                          std::to_string(model.dim));
  }
  require_finite(query.values, "query");
  if (model.normalized && !query.normalized) return model.stats.apply(query);
  if (!model.normalized && query.normalized) {
    throw Error(Errc::NormalizationMismatch, "normalized query given to a model trained on raw features");
  }
  return query;
}

Prediction grade_knn(const TrainedModel& model, const FeatureVector& q) {
  struct Neighbor {
    double d2;
    const LabeledVector* v;
  };
  std::vector<Neighbor> all;
  all.reserve(model.samples.size());
  for (const auto& s : model.samples) all.push_back({squared_distance(q.values, s.features.values), &s});
  // Total order so the chosen neighbours do not depend on training order.
  const auto before = [](const Neighbor& a, const Neighbor& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    if (a.v->label != b.v->label) return a.v->label < b.v->label;
    return a.v->features.values < b.v->features.values;
  };
  const auto k = static_cast<std::size_t>(model.k);
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), before);

  std::map<int, int> votes;
  for (std::size_t i = 0; i < k; ++i) ++votes[all[i].v->label];
  int best_votes = 0;
  for (const auto& [label, n] : votes) best_votes = std::max(best_votes, n);
  // Neighbours are sorted, so the first one from a tied class wins; that is
  // the nearest, and equal distances already fall back to the lower label.
  for (std::size_t i = 0; i < k; ++i) {
    const int label = all[i].v->label;
    if (votes[label] == best_votes) {
      return {label, static_cast<double>(best_votes) / static_cast<double>(k)};
    }
  }
  throw Error(Errc::UnfittedModel, "no neighbours");  // unreachable for k >= 1
}

Prediction grade_centroid(const TrainedModel& model, const FeatureVector& q) {
  Prediction best{};
  double best_d2 = 0.0;
  bool first = true;
  for (const auto& c : model.centroids) {
    const double d2 = squared_distance(q.values, c.features.values);
    if (first || d2 < best_d2) {
      best = {c.label, 0.0};
      best_d2 = d2;
      first = false;
    }
  }
  best.score = -std::sqrt(best_d2);
  return best;
}

Prediction grade_lda(const TrainedModel& model, const FeatureVector& q) {
  const std::size_t d = model.dim;
  const LdaParams& p = model.lda;
  Prediction best{};
  bool first = true;
  for (std::size_t c = 0; c < p.classes.size(); ++c) {
    const auto& mu = p.means[c];
    // delta_c(x) = mu' S^-1 x - mu' S^-1 mu / 2 + log prior
    double linear = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double a = 0.0;
      for (std::size_t j = 0; j < d; ++j) a += p.inv_cov[i * d + j] * mu[j];
      linear += a * q.values[i];
      quad += a * mu[i];
    }
    const double delta = linear - 0.5 * quad + p.log_priors[c];
    if (first || delta > best.score) {
      best = {p.classes[c], delta};
      first = false;
    }
  }
  return best;
}

LdaParams fit_lda(const std::map<int, std::vector<const FeatureVector*>>& by_class, std::size_t dim,
                  std::size_t total) {
  LdaParams p;
  const std::size_t n_classes = by_class.size();
  if (total <= n_classes) {
    throw Error(Errc::SingularCovariance, "pooled covariance needs more vectors than classes");
  }
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& [label, members] : by_class) {
    if (members.size() < 2) {
      throw Error(Errc::SingularCovariance, "class " + std::to_string(label) + " has a single vector");
    }
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    for (const auto* v : members) mean += Eigen::Map<const Eigen::VectorXd>(v->values.data(), mean.size());
    mean /= static_cast<double>(members.size());
    for (const auto* v : members) {
      const Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(v->values.data(), mean.size()) - mean;
      scatter.noalias() += r * r.transpose();
    }
    p.classes.push_back(label);
    p.means.emplace_back(mean.data(), mean.data() + mean.size());
  }
  const Eigen::MatrixXd cov = scatter / static_cast<double>(total - n_classes);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  const double scale = cov.diagonal().cwiseAbs().maxCoeff();
  if (llt.info() != Eigen::Success || !(scale > 0.0)) {
    throw Error(Errc::SingularCovariance, "pooled covariance is not positive definite");
  }
  const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
  const double min_pivot = diag.minCoeff();
  if (!(min_pivot * min_pivot > 1e-12 * scale)) {
    throw Error(Errc::SingularCovariance, "pooled covariance is numerically singular");
  }
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(cov.rows(), cov.cols()));
  p.inv_cov.resize(dim * dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      // Symmetrize so the stored inverse is exactly symmetric.
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      p.inv_cov[i * dim + j] = 0.5 * (inv(ii, jj) + inv(jj, ii));
    }
  }
  p.log_priors.assign(n_classes, -std::log(static_cast<double>(n_classes)));
  return p;
}

}  // namespace

std::string_view grade_name(Grade grade) noexcept { return kGradeNames[static_cast<std::size_t>(grade)]; }

std::optional<Grade> parse_grade(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kGradeNames.size(); ++i) {
    if (kGradeNames[i] == name) return static_cast<Grade>(i);
  }
  return std::nullopt;
}

FeatureVector fuse(const ShapeVector& shape, const TextureVector& texture) {
  const auto s = shape.values();
  require_finite(s, "shape");
  const std::array<double, 2> t = {texture.mean, texture.std};
  require_finite(t, "texture");
  FeatureVector out;
  out.values.reserve(kFusedLength);
  out.values.insert(out.values.end(), s.begin(), s.end());
  out.values.insert(out.values.end(), t.begin(), t.end());
  return out;
}

std::string_view feature_mode_name(FeatureMode mode) noexcept {
  switch (mode) {
    case FeatureMode::fused: return "fused";
    case FeatureMode::shape: return "shape";
    case FeatureMode::texture: return "texture";
  }
  return "fused";
}

std::optional<FeatureMode> parse_feature_mode(std::string_view name) noexcept {
  if (name == "fused") return FeatureMode::fused;
  if (name == "shape") return FeatureMode::shape;
  if (name == "texture") return FeatureMode::texture;
  return std::nullopt;
}

FeatureVector select_features(const FeatureVector& fused, FeatureMode mode) {
  if (fused.values.size() != kFusedLength) {
    throw Error(Errc::LengthMismatch, "expected a fused vector of length 8, got " + std::to_string(fused.values.size()));
  }
  FeatureVector out{{}, fused.normalized};
  switch (mode) {
    case FeatureMode::fused: out.values = fused.values; break;
    case FeatureMode::shape: out.values.assign(fused.values.begin(), fused.values.begin() + 6); break;
    case FeatureMode::texture: out.values.assign(fused.values.begin() + 6, fused.values.end()); break;
  }
  return out;
}

FeatureVector NormStats::apply(const FeatureVector& raw) const {
  if (raw.normalized) throw Error(Errc::NormalizationMismatch, "vector is already normalized");
  if (raw.values.size() != mean.size()) {
    throw Error(Errc::LengthMismatch, "vector has " + std::to_string(raw.values.size()) + " features, statistics have " +
                                          std::to_string(mean.size()));
  }
  FeatureVector out{std::vector<double>(raw.values.size()), true};
  for (std::size_t i = 0; i < raw.values.size(); ++i) out.values[i] = (raw.values[i] - mean[i]) / std[i];
  return out;
}

std::pair<std::vector<FeatureVector>, NormStats> normalize(std::span<const FeatureVector> vectors) {
  if (vectors.size() < 2) throw Error(Errc::InvalidParameter, "normalization needs at least 2 vectors");
  const std::size_t dim = vectors.front().values.size();
  for (const auto& v : vectors) {
    if (v.values.size() != dim) throw Error(Errc::LengthMismatch, "vectors differ in length");
    if (v.normalized) throw Error(Errc::NormalizationMismatch, "input vector is already normalized");
    require_finite(v.values, "feature");
  }
  const auto n = static_cast<double>(vectors.size());
  NormStats stats{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  for (std::size_t i = 0; i < dim; ++i) {
    double sum = 0.0;
    for (const auto& v : vectors) sum += v.values[i];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& v : vectors) ss += (v.values[i] - mean) * (v.values[i] - mean);
    const double sd = std::sqrt(ss / n);
    // Identical values can leave rounding residue in the mean.
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      throw Error(Errc::ZeroVarianceFeature, "feature " + std::to_string(i) + " has zero spread");
    }
    stats.mean[i] = mean;
    stats.std[i] = sd;
  }
  std::vector<FeatureVector> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.push_back(stats.apply(v));
  return {std::move(out), std::move(stats)};
}

double euclidean(const FeatureVector& t, const FeatureVector& r) {
  if (t.values.size() != r.values.size()) {
    throw Error(Errc::LengthMismatch,
                std::to_string(t.values.size()) + " vs " + std::to_string(r.values.size()) + " features");
  }
  if (t.normalized != r.normalized) throw Error(Errc::NormalizationMismatch, "one vector is normalized, one is not");
  return std::sqrt(squared_distance(t.values, r.values));
}

std::string_view model_kind_name(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::knn: return "knn";
    case ModelKind::centroid: return "centroid";
    case ModelKind::lda: return "lda";
  }
  return "knn";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept {
  if (name == "knn") return ModelKind::knn;
  if (name == "centroid") return ModelKind::centroid;
  if (name == "lda") return ModelKind::lda;
  return std::nullopt;
}

TrainedModel train(ModelKind kind, std::span<const LabeledVector> vectors, const TrainOptions& options) {
  if (vectors.empty()) throw Error(Errc::MissingClass, "no training vectors");
  const std::size_t dim = vectors.front().features.values.size();
  if (dim == 0) throw Error(Errc::LengthMismatch, "empty feature vectors");
  for (const auto& v : vectors) {
    if (v.features.values.size() != dim) throw Error(Errc::LengthMismatch, "training vectors differ in length");
    if (v.features.normalized) throw Error(Errc::NormalizationMismatch, "training vectors must be raw");
    require_finite(v.features.values, "training vector");
  }
  if (options.require_all_grades) {
    std::set<int> present;
    for (const auto& v : vectors) present.insert(v.label);
    for (const Grade g : kAllGrades) {
      if (!present.count(grade_index(g))) {
        throw Error(Errc::MissingClass, "no training vectors for " + std::string(grade_name(g)));
      }
    }
    for (const int label : present) {
      if (label < 0 || label >= kGradeCount) throw Error(Errc::MissingClass, "label " + std::to_string(label));
    }
  }
  if (kind == ModelKind::knn) {
    if (options.k < 1) throw Error(Errc::InvalidParameter, "k must be at least 1");
    if (static_cast<std::size_t>(options.k) > vectors.size()) {
      throw Error(Errc::KTooLarge,
                  "k=" + std::to_string(options.k) + " exceeds " + std::to_string(vectors.size()) + " training vectors");
    }
  }

  TrainedModel model;
  model.kind = kind;
  model.k = kind == ModelKind::knn ? options.k : 0;
  model.dim = dim;
  model.normalized = options.normalize;

  std::vector<FeatureVector> work;
  work.reserve(vectors.size());
  if (options.normalize) {
    std::vector<FeatureVector> raw;
    raw.reserve(vectors.size());
    for (const auto& v : vectors) raw.push_back(v.features);
    auto [normed, stats] = normalize(raw);
    work = std::move(normed);
    model.stats = std::move(stats);
  } else {
    for (const auto& v : vectors) work.push_back(v.features);
    model.stats = {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
  }

  std::map<int, std::vector<const FeatureVector*>> by_class;
  for (std::size_t i = 0; i < vectors.size(); ++i) by_class[vectors[i].label].push_back(&work[i]);

  switch (kind) {
    case ModelKind::knn:
      for (std::size_t i = 0; i < vectors.size(); ++i) model.samples.push_back({work[i], vectors[i].label});
      break;
    case ModelKind::centroid:
      for (const auto& [label, members] : by_class) {
        FeatureVector c{std::vector<double>(dim, 0.0), options.normalize};
        for (const auto* v : members) {
          for (std::size_t i = 0; i < dim; ++i) c.values[i] += v->values[i];
        }
        for (auto& x : c.values) x /= static_cast<double>(members.size());
        model.centroids.push_back({std::move(c), label});
      }
      break;
    case ModelKind::lda: model.lda = fit_lda(by_class, dim, vectors.size()); break;
  }
  return model;
}

Prediction grade(const TrainedModel& model, const FeatureVector& query) {
  if (!model.kind) throw Error(Errc::UnfittedModel, "model has not been trained");
  const FeatureVector q = prepare_query(model, query);
  switch (*model.kind) {
    case ModelKind::knn: return grade_knn(model, q);
    case ModelKind::centroid: return grade_centroid(model, q);
    case ModelKind::lda: return grade_lda(model, q);
  }
  throw Error(Errc::UnfittedModel, "unknown model kind");
}

}  // namespace gradepipe
