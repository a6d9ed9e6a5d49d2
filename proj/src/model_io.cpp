#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gradepipe/classify.hpp"
#include "gradepipe/error.hpp"

namespace gradepipe {

namespace {

constexpr std::string_view kMagic = "gradepipe-model";
constexpr std::string_view kVersion = "v1";

void put_number(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, " %.12g", x);
  out += buf;
}

void put_values(std::string& out, const std::vector<double>& values) {
  for (const double x : values) put_number(out, x);
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& what) {
  throw Error(Errc::MalformedModel, "line " + std::to_string(line_no) + ": " + what);
}

struct LineReader {
  std::istringstream in;
  std::size_t line_no;

  std::string word() {
    std::string w;
    if (!(in >> w)) malformed(line_no, "missing field");
    return w;
  }

  double number() {
    const std::string w = word();
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), x);
    if (ec != std::errc() || ptr != w.data() + w.size()) malformed(line_no, "bad number '" + w + "'");
    return x;
  }

  long long integer() {
    const std::string w = word();
    long long x = 0;
    const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), x);
    if (ec != std::errc() || ptr != w.data() + w.size()) malformed(line_no, "bad integer '" + w + "'");
    return x;
  }

  std::vector<double> numbers(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = number();
    return v;
  }

  void finish() {
    std::string extra;
    if (in >> extra) malformed(line_no, "trailing field '" + extra + "'");
  }
};

}  // namespace

std::string serialize_model(const TrainedModel& model) {
  if (!model.kind) throw Error(Errc::UnfittedModel, "cannot save an untrained model");
  std::string out;
  out += std::string(kMagic) + " " + std::string(kVersion) + " " + std::string(model_kind_name(*model.kind)) +
         " k=" + std::to_string(model.k) + "\n";
  out += "norm " + std::string(model.normalized ? "on" : "off") + " " + std::to_string(model.dim);
  put_values(out, model.stats.mean);
  put_values(out, model.stats.std);
  out += "\n";
  out += "features " + std::string(feature_mode_name(model.features)) + "\n";
  switch (*model.kind) {
    case ModelKind::knn:
      for (const auto& s : model.samples) {
        out += "vec " + std::to_string(s.label);
        put_values(out, s.features.values);
        out += "\n";
      }
      break;
    case ModelKind::centroid:
      for (const auto& c : model.centroids) {
        out += "centroid " + std::to_string(c.label);
        put_values(out, c.features.values);
        out += "\n";
      }
      break;
    case ModelKind::lda:
      for (std::size_t c = 0; c < model.lda.classes.size(); ++c) {
        out += "class " + std::to_string(model.lda.classes[c]);
        put_number(out, model.lda.log_priors[c]);
        put_values(out, model.lda.means[c]);
        out += "\n";
      }
      for (std::size_t i = 0; i < model.dim; ++i) {
        out += "invcov";
        for (std::size_t j = 0; j < model.dim; ++j) put_number(out, model.lda.inv_cov[i * model.dim + j]);
        out += "\n";
      }
      break;
  }
  return out;
}

TrainedModel parse_model(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  const auto next = [&](bool required) -> std::optional<LineReader> {
    while (std::getline(in, raw)) {
      ++line_no;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      if (raw.find_first_not_of(" \t") == std::string::npos) continue;
      return LineReader{std::istringstream(raw), line_no};
    }
    if (required) malformed(line_no, "unexpected end of model");
    return std::nullopt;
  };

  TrainedModel model;
  {
    auto header = *next(true);
    if (header.word() != kMagic) malformed(header.line_no, "not a gradepipe model");
    if (header.word() != kVersion) malformed(header.line_no, "unsupported version");
    const auto kind = parse_model_kind(header.word());
    if (!kind) malformed(header.line_no, "unknown model kind");
    model.kind = *kind;
    const std::string kfield = header.word();
    if (kfield.rfind("k=", 0) != 0) malformed(header.line_no, "expected k=<k>");
    int k = 0;
    const auto [ptr, ec] = std::from_chars(kfield.data() + 2, kfield.data() + kfield.size(), k);
    if (ec != std::errc() || ptr != kfield.data() + kfield.size() || k < 0) malformed(header.line_no, "bad k");
    model.k = k;
    header.finish();
  }
  {
    auto norm = *next(true);
    if (norm.word() != "norm") malformed(norm.line_no, "expected norm line");
    const std::string flag = norm.word();
    if (flag != "on" && flag != "off") malformed(norm.line_no, "norm flag must be on or off");
    model.normalized = flag == "on";
    const long long dim = norm.integer();
    if (dim < 1 || dim > 4096) malformed(norm.line_no, "bad dimension");
    model.dim = static_cast<std::size_t>(dim);
    model.stats.mean = norm.numbers(model.dim);
    model.stats.std = norm.numbers(model.dim);
    for (const double s : model.stats.std) {
      if (!(s > 0.0)) malformed(norm.line_no, "standard deviations must be positive");
    }
    norm.finish();
  }
  {
    auto feat = *next(true);
    if (feat.word() != "features") malformed(feat.line_no, "expected features line");
    const auto mode = parse_feature_mode(feat.word());
    if (!mode) malformed(feat.line_no, "unknown feature mode");
    model.features = *mode;
    feat.finish();
  }

  std::size_t invcov_rows = 0;
  while (auto line = next(false)) {
    const std::string tag = line->word();
    const auto expect_tag = [&](std::string_view want) {
      if (tag != want) malformed(line->line_no, "unexpected '" + tag + "' in a " +
                                                    std::string(model_kind_name(*model.kind)) + " model");
    };
    switch (*model.kind) {
      case ModelKind::knn: {
        expect_tag("vec");
        const int label = static_cast<int>(line->integer());
        model.samples.push_back({{line->numbers(model.dim), model.normalized}, label});
        break;
      }
      case ModelKind::centroid: {
        expect_tag("centroid");
        const int label = static_cast<int>(line->integer());
        model.centroids.push_back({{line->numbers(model.dim), model.normalized}, label});
        break;
      }
      case ModelKind::lda:
        if (tag == "class") {
          if (invcov_rows > 0) malformed(line->line_no, "class line after invcov");
          model.lda.classes.push_back(static_cast<int>(line->integer()));
          model.lda.log_priors.push_back(line->number());
          model.lda.means.push_back(line->numbers(model.dim));
        } else {
          expect_tag("invcov");
          if (invcov_rows == model.dim) malformed(line->line_no, "too many invcov rows");
          const auto row = line->numbers(model.dim);
          model.lda.inv_cov.insert(model.lda.inv_cov.end(), row.begin(), row.end());
          ++invcov_rows;
        }
        break;
    }
    line->finish();
  }

  switch (*model.kind) {
    case ModelKind::knn:
      if (model.k < 1 || static_cast<std::size_t>(model.k) > model.samples.size()) {
        throw Error(Errc::MalformedModel, "k does not fit the stored vectors");
      }
      break;
    case ModelKind::centroid:
      if (model.centroids.empty()) throw Error(Errc::MalformedModel, "no centroids");
      break;
    case ModelKind::lda:
      if (model.lda.classes.empty() || invcov_rows != model.dim) {
        throw Error(Errc::MalformedModel, "incomplete discriminant parameters");
      }
      break;
  }
  return model;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  const std::string text = serialize_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoFailure, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out.flush()) throw Error(Errc::IoFailure, "write failed for " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::FileNotFound, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace gradepipe
