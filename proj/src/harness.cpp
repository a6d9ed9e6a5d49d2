#include "gradepipe/harness.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "gradepipe/error.hpp"
#include "gradepipe/parallel.hpp"
#include "gradepipe/shape.hpp"

namespace gradepipe {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(const Manifest& manifest,
                                                                            std::uint64_t seed) {
  std::array<std::vector<std::size_t>, kGradeCount> by_grade;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    by_grade[static_cast<std::size_t>(grade_index(manifest.entries[i].grade))].push_back(i);
  }
  Rng rng(seed);
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (std::size_t g = 0; g < by_grade.size(); ++g) {
    auto& members = by_grade[g];
    if (members.size() < 2) {
      throw Error(Errc::GradeTooSmall, std::string(grade_name(static_cast<Grade>(g))) + " has " +
                                           std::to_string(members.size()) + " samples, need at least 2");
    }
    for (std::size_t i = members.size() - 1; i > 0; --i) {
      std::swap(members[i], members[rng.below(i + 1)]);
    }
    const std::size_t n_train = members.size() / 2;
    train_idx.insert(train_idx.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
    test_idx.insert(test_idx.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
  }
  return {std::move(train_idx), std::move(test_idx)};
}

double round4(double x) { return std::round(x * 1e4) / 1e4; }

ConfusionMatrix run_condition(ModelKind kind, FeatureMode mode, const Manifest& manifest,
                              const std::vector<FeatureVector>& fused, const std::vector<std::size_t>& train_idx,
                              const std::vector<std::size_t>& test_idx, const PipelineConfig& config) {
  std::vector<LabeledVector> training;
  training.reserve(train_idx.size());
  for (const std::size_t i : train_idx) {
    training.push_back({select_features(fused[i], mode), grade_index(manifest.entries[i].grade)});
  }
  TrainOptions options;
  options.k = config.k;
  options.normalize = config.normalize;
  const TrainedModel model = train(kind, training, options);
  ConfusionMatrix confusion{};
  for (const std::size_t i : test_idx) {
    const Prediction p = grade(model, select_features(fused[i], mode));
    ++confusion[static_cast<std::size_t>(grade_index(manifest.entries[i].grade))][static_cast<std::size_t>(p.label)];
  }
  return confusion;
}

}  // namespace

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(Errc::InvalidParameter, "empty range");
  // Reject the short tail so every residue is equally likely.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = next();
    if (x >= threshold) return x % n;
  }
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

Manifest parse_manifest(const std::string& text, const std::filesystem::path& base) {
  Manifest manifest;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::set<std::filesystem::path> seen;
  bool seen_entry = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view kTag = "dataset:";
      const std::string body = trim(std::string_view(line).substr(1));
      if (!seen_entry && body.rfind(kTag, 0) == 0) manifest.dataset = trim(std::string_view(body).substr(kTag.size()));
      continue;
    }
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw Error(Errc::MalformedLine, "line " + std::to_string(line_no) + ": expected 'path,grade'");
    }
    const std::string path_text = trim(std::string_view(line).substr(0, comma));
    const std::string grade_text = trim(std::string_view(line).substr(comma + 1));
    if (path_text.empty()) throw Error(Errc::MalformedLine, "line " + std::to_string(line_no) + ": empty path");
    const auto g = parse_grade(grade_text);
    if (!g) throw Error(Errc::UnknownGrade, "line " + std::to_string(line_no) + ": '" + grade_text + "'");
    std::filesystem::path p(path_text);
    if (p.is_relative() && !base.empty()) p = base / p;
    p = p.lexically_normal();
    if (!seen.insert(p).second) {
      throw Error(Errc::DuplicatePath, "line " + std::to_string(line_no) + ": " + p.string());
    }
    manifest.entries.push_back({std::move(p), *g});
    seen_entry = true;
  }
  return manifest;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::FileNotFound, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), path.parent_path());
}

void save_manifest(const Manifest& manifest, const std::filesystem::path& path, const std::filesystem::path& base) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoFailure, "cannot open " + path.string() + " for writing");
  if (!manifest.dataset.empty()) out << "# dataset: " << manifest.dataset << "\n";
  for (const auto& e : manifest.entries) {
    std::filesystem::path p = e.path;
    if (!base.empty()) {
      const auto rel = p.lexically_relative(base);
      if (!rel.empty() && *rel.begin() != "..") p = rel;
    }
    out << p.generic_string() << "," << grade_name(e.grade) << "\n";
  }
  if (!out.flush()) throw Error(Errc::IoFailure, "write failed for " + path.string());
}

Split split(const Manifest& manifest, std::uint64_t seed) {
  const auto [train_idx, test_idx] = split_indices(manifest, seed);
  Split out;
  out.train.dataset = manifest.dataset;
  out.test.dataset = manifest.dataset;
  for (const std::size_t i : train_idx) out.train.entries.push_back(manifest.entries[i]);
  for (const std::size_t i : test_idx) out.test.entries.push_back(manifest.entries[i]);
  return out;
}

EvaluationReport build_report(const ConfusionMatrix& confusion) {
  EvaluationReport r;
  r.confusion = confusion;
  for (std::size_t g = 0; g < kGradeCount; ++g) {
    long long row = 0;
    for (const int n : confusion[g]) {
      if (n < 0) throw Error(Errc::InvalidParameter, "negative confusion count");
      row += n;
    }
    if (row == 0) {
      throw Error(Errc::GradeTooSmall, std::string(grade_name(static_cast<Grade>(g))) + " has no test samples");
    }
    const int hit = confusion[g][g];
    const int miss = static_cast<int>(row) - hit;
    r.tpr[g] = {hit, 100.0 * hit / static_cast<double>(row)};
    r.fpr[g] = {miss, 100.0 * miss / static_cast<double>(row)};
    r.per_grade[g] = r.tpr[g].percent;
    r.average_accuracy += r.tpr[g].percent / kGradeCount;
    r.average_fpr += r.fpr[g].percent / kGradeCount;
  }
  return r;
}

FeatureVector extract_features(const ImageF& rgb, const PipelineConfig& config) {
  const Segmentation seg = segment_fruit(rgb, config.bilateral);
  const ShapeVector shape = shape_vector(seg.mask);
  const TextureVector texture = texture_vector(to_gray(seg.diffuse), seg.mask, config.texture);
  return fuse(shape, texture);
}

FeatureVector extract_features(const std::filesystem::path& image, const PipelineConfig& config) {
  try {
    return extract_features(to_real(load_image(image)), config);
  } catch (const Error& e) {
    throw Error(e.code(), image.string() + ": " + e.detail());
  }
}

std::vector<FeatureVector> extract_all(const Manifest& manifest, const PipelineConfig& config) {
  std::vector<FeatureVector> out(manifest.entries.size());
  parallel_for(out.size(), [&](std::size_t i) { out[i] = extract_features(manifest.entries[i].path, config); });
  return out;
}

Evaluation evaluate_features(ModelKind classifier, const Manifest& manifest, const std::vector<FeatureVector>& fused,
                             std::uint64_t seed, const PipelineConfig& config) {
  if (fused.size() != manifest.entries.size()) {
    throw Error(Errc::LengthMismatch, "one feature vector per manifest entry is required");
  }
  const auto [train_idx, test_idx] = split_indices(manifest, seed);
  Evaluation ev;
  ev.classifier = classifier;
  ev.k = config.k;
  ev.seed = seed;
  ev.dataset = !config.dataset.empty() ? config.dataset : !manifest.dataset.empty() ? manifest.dataset : "custom";
  ev.features = config.features;
  ev.report = build_report(run_condition(classifier, config.features, manifest, fused, train_idx, test_idx, config));
  if (config.compare) {
    for (const ModelKind kind : {ModelKind::knn, ModelKind::centroid, ModelKind::lda}) {
      for (const FeatureMode mode : {FeatureMode::shape, FeatureMode::texture, FeatureMode::fused}) {
        ComparisonCell cell{kind, mode, std::nullopt, {}};
        try {
          cell.average_accuracy =
              build_report(run_condition(kind, mode, manifest, fused, train_idx, test_idx, config)).average_accuracy;
        } catch (const Error& e) {
          cell.error = e.what();
        }
        ev.comparison.push_back(std::move(cell));
      }
    }
  }
  return ev;
}

Evaluation evaluate(ModelKind classifier, const Manifest& manifest, std::uint64_t seed, const PipelineConfig& config) {
  // Fail on bad grade counts before the expensive feature pass.
  split_indices(manifest, seed);
  return evaluate_features(classifier, manifest, extract_all(manifest, config), seed, config);
}

std::string report_json(const Evaluation& ev) {
  using nlohmann::ordered_json;
  const EvaluationReport& r = ev.report;
  ordered_json j;
  j["classifier"] = std::string(model_kind_name(ev.classifier));
  j["k"] = ev.k;
  j["seed"] = ev.seed;
  j["dataset"] = ev.dataset;
  j["feature_mode"] = std::string(feature_mode_name(ev.features));
  ordered_json confusion = ordered_json::array();
  for (const auto& row : r.confusion) confusion.push_back(row);
  j["confusion"] = confusion;
  ordered_json per_grade = ordered_json::object();
  ordered_json tpr = ordered_json::object();
  ordered_json fpr = ordered_json::object();
  for (std::size_t g = 0; g < kGradeCount; ++g) {
    const std::string name(grade_name(static_cast<Grade>(g)));
    per_grade[name] = round4(r.per_grade[g]);
    tpr[name] = ordered_json{{"count", r.tpr[g].count}, {"percent", round4(r.tpr[g].percent)}};
    fpr[name] = ordered_json{{"count", r.fpr[g].count}, {"percent", round4(r.fpr[g].percent)}};
  }
  j["per_grade"] = per_grade;
  j["tpr"] = tpr;
  j["fpr"] = fpr;
  j["average_accuracy"] = round4(r.average_accuracy);
  j["average_fpr"] = round4(r.average_fpr);
  if (!ev.comparison.empty()) {
    ordered_json table = ordered_json::object();
    ordered_json errors = ordered_json::object();
    for (const auto& cell : ev.comparison) {
      const std::string kind(model_kind_name(cell.classifier));
      const std::string mode(feature_mode_name(cell.features));
      table[kind][mode] = cell.average_accuracy ? ordered_json(round4(*cell.average_accuracy)) : ordered_json(nullptr);
      if (!cell.error.empty()) errors[kind + "/" + mode] = cell.error;
    }
    j["comparison"] = table;
    if (!errors.empty()) j["comparison_errors"] = errors;
    j["svm"] = "not evaluated: RBF kernel hyperparameters are not specified";
  }
  return j.dump(2) + "\n";
}

}  // namespace gradepipe
