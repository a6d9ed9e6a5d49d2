#include "gradepipe/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "gradepipe/error.hpp"
#include "gradepipe/harness.hpp"
#include "gradepipe/shape.hpp"

namespace gradepipe {

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Reads `key = value` lines and appends `--key value` for every key the
/// command line did not already set. Booleans become bare flags.
void apply_config(std::vector<std::string>& args) {
  const auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end()) return;
  if (it + 1 == args.end()) throw CLI::ArgumentMismatch("--config needs a file name");
  const std::string file = *(it + 1);
  args.erase(it, it + 2);
  std::ifstream in(file);
  if (!in) throw CLI::ValidationError("--config", "cannot read " + file);
  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos
                                                                                         : a.find('=') - 2));
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw CLI::ValidationError("--config", file + " line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || given.count(key)) continue;
    if (value == "true") {
      args.push_back("--" + key);
    } else if (value != "false") {
      args.push_back("--" + key);
      args.push_back(value);
    }
  }
}

void add_bilateral_options(CLI::App* cmd, BilateralParams& p) {
  cmd->add_option("--spatial-sigma", p.spatial_sigma, "Spatial Gaussian sigma of the bilateral filter (px)");
  cmd->add_option("--range-sigma", p.range_sigma, "Range Gaussian sigma on diffuse max chromaticity");
  cmd->add_option("--window-radius", p.window_radius, "Bilateral window radius (px)");
  cmd->add_option("--max-iter", p.max_iterations, "Maximum filter iterations");
  cmd->add_option("--epsilon", p.convergence_epsilon, "Convergence threshold on max chromaticity change");
}

void add_texture_options(CLI::App* cmd, TextureConfig& t) {
  cmd->add_option("--lbp-points", t.lbp_points, "LBP neighbour count");
  cmd->add_option("--lbp-radius", t.lbp_radius, "LBP radius (px)");
  cmd->add_option("--scales", t.n_scales, "Curvelet scale count (0 = automatic)");
  cmd->add_option("--angles", t.n_angles_coarse, "Curvelet angle count at the coarsest angular scale");
}

ModelKind to_kind(const std::string& s) {
  const auto k = parse_model_kind(s);
  if (!k) throw CLI::ValidationError("--classifier", "expected knn, centroid or lda");
  return *k;
}

FeatureMode to_mode(const std::string& s) {
  const auto m = parse_feature_mode(s);
  if (!m) throw CLI::ValidationError("--features", "expected fused, shape or texture");
  return *m;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoFailure, "cannot open " + path + " for writing");
  out << text;
  if (!out.flush()) throw Error(Errc::IoFailure, "write failed for " + path);
}

constexpr std::array<const char*, kFusedLength> kFeatureNames = {"A", "P", "MAJL", "MINL", "E", "ED", "mu", "sigma"};

std::string feature_row(const FeatureVector& v, std::size_t first, std::size_t last) {
  std::ostringstream s;
  s.precision(6);
  for (std::size_t i = first; i < last; ++i) s << (i > first ? "," : "") << v.values[i];
  return s.str();
}

GridF masked_gray(const ImageF& gray, const BinaryMask& mask) {
  GridF out(gray.width(), gray.height(), 1);
  for (int r = 0; r < gray.height(); ++r) {
    for (int c = 0; c < gray.width(); ++c) out.at(r, c) = mask.get(r, c) ? gray.at(r, c) : 0.0;
  }
  return out;
}

}  // namespace

int cli_main(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Date fruit grading pipeline", "gradepipe"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  app.add_option("--config", "Plain-text key = value file supplying any subcommand flag");

  PipelineConfig config;
  std::string input, output, mask_out, contour_out, manifest_path, model_path, report_path, out_dir;
  std::string dump_lbp, dump_hist;
  std::string classifier = "knn", features = "fused";
  std::uint64_t seed = 7;
  int n_per_grade = 40;
  bool no_normalize = false, no_compare = false, shape_only = false, texture_only = false;

  auto* pre = app.add_subcommand("preprocess", "Remove specular highlights and segment the fruit");
  pre->add_option("--in,--input", input, "Input PPM image")->required();
  pre->add_option("--out", output, "Output diffuse (highlight-free) PPM image");
  pre->add_option("--out-mask", mask_out, "Output PGM mask of the segmented fruit");
  pre->add_option("--out-contour", contour_out, "Output contour CSV, one row,col pair per line in trace order");
  add_bilateral_options(pre, config.bilateral);

  auto* feat = app.add_subcommand("features", "Print fused feature vectors as CSV");
  auto* feat_in = feat->add_option("--in,--input", input, "Single input image");
  auto* feat_manifest = feat->add_option("--manifest", manifest_path, "Manifest CSV (path,grade)");
  feat_in->excludes(feat_manifest);
  feat->add_option("--out,--output", output, "Write CSV here instead of the output stream");
  feat->add_flag("--shape", shape_only, "Only the six shape columns");
  feat->add_flag("--texture", texture_only, "Only the mu,sigma columns");
  feat->add_option("--dump-lbp", dump_lbp, "Write the masked plain LBP map as a PGM (single --in, 8 points)")
      ->needs(feat_in);
  feat->add_option("--dump-hist", dump_hist, "Write the masked riu2 LBP histogram as CSV (single --in)")
      ->needs(feat_in);
  add_bilateral_options(feat, config.bilateral);
  add_texture_options(feat, config.texture);

  auto* trn = app.add_subcommand("train", "Train a grader on every manifest entry");
  trn->add_option("--manifest", manifest_path, "Manifest CSV (path,grade)")->required();
  trn->add_option("--model", model_path, "Output model file")->required();
  trn->add_option("--classifier", classifier, "knn, centroid or lda");
  trn->add_option("--k", config.k, "Neighbour count for knn");
  trn->add_option("--features", features, "fused, shape or texture");
  trn->add_flag("--no-normalize", no_normalize, "Use raw features instead of z-scores");
  add_bilateral_options(trn, config.bilateral);
  add_texture_options(trn, config.texture);

  auto* grd = app.add_subcommand("grade", "Grade one image with a trained model");
  grd->add_option("--model", model_path, "Model file")->required();
  grd->add_option("--in,--input", input, "Input PPM image")->required();
  add_bilateral_options(grd, config.bilateral);
  add_texture_options(grd, config.texture);

  auto* evl = app.add_subcommand("evaluate", "Seeded 50/50 split, train, grade the test half, write a report");
  evl->add_option("--manifest", manifest_path, "Manifest CSV (path,grade)")->required();
  evl->add_option("--classifier", classifier, "knn, centroid or lda");
  evl->add_option("--k", config.k, "Neighbour count for knn");
  evl->add_option("--seed", seed, "Split seed");
  evl->add_option("--features", features, "fused, shape or texture");
  evl->add_option("--dataset", config.dataset, "Dataset label for the report");
  evl->add_option("--report", report_path, "Write the JSON report here instead of the output stream");
  evl->add_flag("--no-normalize", no_normalize, "Use raw features instead of z-scores");
  evl->add_flag("--no-compare", no_compare, "Skip the classifier x feature comparison table");
  add_bilateral_options(evl, config.bilateral);
  add_texture_options(evl, config.texture);

  auto* syn = app.add_subcommand("synth", "Generate a synthetic dataset");
  syn->add_option("--n-per-grade", n_per_grade, "Images per grade");
  syn->add_option("--seed", seed, "Generator seed");
  syn->add_option("--out", out_dir, "Output directory")->required();

  std::vector<std::string> args = raw_args;
  if (!args.empty() && !args.front().empty() && args.front().front() != '-') {
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == args.front();
    if (!known) {
      err << "error: unknown subcommand '" << args.front() << "'\n\n" << app.help();
      return kUsageError;
    }
  }
  try {
    apply_config(args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    config.normalize = !no_normalize;
    config.compare = !no_compare;
    if (*pre) {
      const Segmentation seg = segment_fruit(to_real(load_image(input)), config.bilateral);
      if (!output.empty()) save_image(seg.diffuse, output);
      if (!mask_out.empty()) save_image(mask_to_image(seg.mask), mask_out);
      if (!contour_out.empty()) {
        std::ostringstream csv;
        for (const auto& p : sobel_contour(seg.mask).contour.points) csv << p.row << "," << p.col << "\n";
        write_text(contour_out, csv.str());
      }
    } else if (*feat) {
      std::size_t first = 0;
      std::size_t last = kFusedLength;
      if (shape_only && !texture_only) last = 6;
      if (texture_only && !shape_only) first = 6;
      std::ostringstream csv;
      const auto header = [&] {
        for (std::size_t i = first; i < last; ++i) csv << (i > first ? "," : "") << kFeatureNames[i];
        csv << "\n";
      };
      if (!input.empty()) {
        const ImageF rgb = to_real(load_image(input));
        header();
        csv << feature_row(extract_features(rgb, config), first, last) << "\n";
        if (!dump_lbp.empty() || !dump_hist.empty()) {
          const Segmentation seg = segment_fruit(rgb, config.bilateral);
          const ImageF gray = to_gray(seg.diffuse);
          if (!dump_lbp.empty()) {
            if (config.texture.lbp_points != 8) {
              throw Error(Errc::InvalidParameter, "--dump-lbp needs 8 LBP points so codes fit in 8 bits");
            }
            const LbpMap map = masked_lbp_map(gray, seg.mask, config.texture);
            Image8 img(map.width, map.height, 1);
            for (std::size_t i = 0; i < map.codes.size(); ++i) img.samples()[i] = static_cast<std::uint8_t>(map.codes[i]);
            save_image(img, dump_lbp);
          }
          if (!dump_hist.empty()) {
            const LbpMap map = lbp_map(masked_gray(gray, seg.mask), config.texture.lbp_points,
                                       config.texture.lbp_radius, LbpMode::riu2);
            std::ostringstream hist;
            hist << "code,count\n";
            const auto bins = lbp_histogram(map);
            for (std::size_t b = 0; b < bins.size(); ++b) hist << b << "," << bins[b] << "\n";
            write_text(dump_hist, hist.str());
          }
        }
      } else if (!manifest_path.empty()) {
        const Manifest m = load_manifest(manifest_path);
        const auto vectors = extract_all(m, config);
        csv << "path,grade,";
        header();
        for (std::size_t i = 0; i < vectors.size(); ++i) {
          csv << m.entries[i].path.generic_string() << "," << grade_name(m.entries[i].grade) << ","
              << feature_row(vectors[i], first, last) << "\n";
        }
      } else {
        err << "error: features needs --in or --manifest\n\n" << feat->help();
        return kUsageError;
      }
      if (output.empty()) {
        out << csv.str();
      } else {
        write_text(output, csv.str());
      }
    } else if (*trn) {
      const ModelKind kind = to_kind(classifier);
      const FeatureMode mode = to_mode(features);
      const Manifest m = load_manifest(manifest_path);
      const auto vectors = extract_all(m, config);
      std::vector<LabeledVector> labeled;
      for (std::size_t i = 0; i < vectors.size(); ++i) {
        labeled.push_back({select_features(vectors[i], mode), grade_index(m.entries[i].grade)});
      }
      TrainOptions options;
      options.k = config.k;
      options.normalize = config.normalize;
      TrainedModel model = train(kind, labeled, options);
      model.features = mode;
      save_model(model, model_path);
    } else if (*grd) {
      const TrainedModel model = load_model(model_path);
      const FeatureVector v = select_features(extract_features(std::filesystem::path(input), config), model.features);
      const Prediction p = grade(model, v);
      out << grade_name(static_cast<Grade>(p.label)) << " " << p.score << "\n";
    } else if (*evl) {
      const ModelKind kind = to_kind(classifier);
      config.features = to_mode(features);
      const Evaluation ev = evaluate(kind, load_manifest(manifest_path), seed, config);
      const std::string json = report_json(ev);
      if (report_path.empty()) {
        out << json;
      } else {
        write_text(report_path, json);
      }
    } else if (*syn) {
      const Manifest m = synth_dataset(n_per_grade, seed, out_dir);
      out << "wrote " << m.entries.size() << " images and " << (std::filesystem::path(out_dir) / "manifest.csv").string()
          << "\n";
    }
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return 0;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace gradepipe
