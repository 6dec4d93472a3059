#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tumorcheck/errors.hpp"
#include "tumorcheck/eval.hpp"
#include "tumorcheck/features.hpp"
#include "tumorcheck/image.hpp"
#include "tumorcheck/kfcm.hpp"
#include "tumorcheck/mask.hpp"
#include "tumorcheck/model.hpp"
#include "tumorcheck/parser.hpp"
#include "tumorcheck/preprocess.hpp"
#include "tumorcheck/validate.hpp"

namespace tumorcheck {

enum class SelectorMode { interactive, automatic, index };

struct PipelineConfig {
  int target_width = 256;
  int target_height = 256;
  KfcmParams kfcm;
  SelectorMode selector = SelectorMode::interactive;
  int selector_index = 1;
  std::string spec_path;
  std::string train_path;
  std::string out_dir = ".";
  bool dump_stages = false;
  bool signed_mean = false;
  bool eight_adjacency = false;
  bool print_trace = true;
};

/// Module error annotated with the pipeline stage it surfaced in.
struct StageError : Error {
  std::string stage;
  StageError(std::string st, Errc c, const std::string& msg) : Error(c, msg), stage(std::move(st)) {}
};

namespace detail {

template <typename Fn>
auto with_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e.code, e.what());
  } catch (const std::exception& e) {
    throw StageError(stage, Errc::io_error, e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::io_error, "cannot write " + path);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

inline GrayImage segments_to_image(const SegmentImage& seg) {
  return GrayImage{seg.width, seg.height, seg.labels};
}

}  // namespace detail

/// enhance, resize to the target, collapse color, smooth.
inline GrayImage preprocess_image(const AnyImage& raw, int target_w, int target_h) {
  AnyImage stretched = std::visit([](const auto& img) { return AnyImage(enhance(img)); }, raw);
  AnyImage resized = std::visit(
      [&](const auto& img) { return AnyImage(resize(img, target_w, target_h)); }, stretched);
  return smooth(to_gray(resized));
}

/// Formulas driving validation: phi1 picks the dark surround, phi2 the
/// tissue; a spec file overrides them through bindings named phi1 and phi2.
struct ValidationSpec {
  FormulaPtr phi1;
  FormulaPtr phi2;
  SpecFile file;
};

inline ValidationSpec default_validation_spec() {
  ValidationSpec vs;
  vs.phi1 = f::intensity(CmpOp::lt, 30);
  vs.phi2 = f::intensity(CmpOp::ge, 30);
  return vs;
}

inline ValidationSpec load_validation_spec(const std::string& path) {
  ValidationSpec vs;
  vs.file = parse_spec(detail::read_text_file(path));
  const FormulaPtr* phi1 = vs.file.find("phi1");
  const FormulaPtr* phi2 = vs.file.find("phi2");
  if (!phi1) throw Error(Errc::unknown_identifier, path + ": no binding named phi1");
  if (!phi2) throw Error(Errc::unknown_identifier, path + ": no binding named phi2");
  vs.phi1 = *phi1;
  vs.phi2 = *phi2;
  return vs;
}

struct RunResult {
  GrayImage preprocessed;
  SegmentImage segments;
  RegionSet regions;
  int selected_index = 0;  // 0-based
  BinaryMask candidate;
  FeatureVector features{};
  Classification classification;
  Verdict verdict;
  std::vector<double> objective_trace;
};

namespace detail {

inline void print_objective_trace(const std::vector<double>& trace, std::ostream& out) {
  char buf[64];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6f", trace[i]);
    out << "Iteration count = " << (i + 1) << ", obj. fcn = " << buf << "\n";
  }
}

}  // namespace detail

/// Full single-image pipeline. Interactive selection writes the masked
/// region images to the output directory, prompts on out, and reads a
/// 1-based index from in. A non-null training set overrides the CSV path.
inline RunResult run(const PipelineConfig& cfg, const std::string& image_path,
                     std::istream& in = std::cin, std::ostream& out = std::cout,
                     const TrainingSet* training = nullptr) {
  RunResult r;
  AnyImage raw = detail::with_stage("load", [&] { return load_image(image_path); });
  r.preprocessed = detail::with_stage(
      "preprocess", [&] { return preprocess_image(raw, cfg.target_width, cfg.target_height); });
  ValidationSpec vs = detail::with_stage("spec", [&] {
    return cfg.spec_path.empty() ? default_validation_spec() : load_validation_spec(cfg.spec_path);
  });

  detail::with_stage("segment", [&] {
    FuzzyPartition part = kfcm(r.preprocessed, cfg.kfcm);
    r.objective_trace = part.objective_trace;
    if (cfg.print_trace) detail::print_objective_trace(part.objective_trace, out);
    r.segments = label_segments(part);
    r.regions = split_regions(r.segments, r.preprocessed);
  });

  detail::with_stage("select", [&] {
    Selector sel;
    if (cfg.selector == SelectorMode::automatic) {
      sel = Selector::automatic();
    } else if (cfg.selector == SelectorMode::index) {
      sel = Selector::at(cfg.selector_index);
    } else {
      std::filesystem::create_directories(cfg.out_dir);
      for (std::size_t i = 0; i < r.regions.masked_images.size(); ++i)
        write_pgm(cfg.out_dir + "/region_" + std::to_string(i + 1) + ".pgm",
                  r.regions.masked_images[i], true);
      out << "Enter the Index num :: " << std::flush;
      int idx = 0;
      if (!(in >> idx))
        throw Error(Errc::index_out_of_range, "expected an integer region index on standard input");
      sel = Selector::at(idx);
    }
    r.selected_index = select_region_index(r.regions, sel);
    r.candidate = r.regions.regions[r.selected_index];
  });

  r.features = detail::with_stage(
      "features", [&] { return extract_features(r.preprocessed, r.candidate); });

  r.classification = detail::with_stage("classify", [&] {
    if (training) return classify(r.features, *training, cfg.signed_mean);
    if (cfg.train_path.empty())
      throw Error(Errc::io_error, "no training CSV given (--train)");
    TrainingSet ts = load_training(detail::read_text_file(cfg.train_path));
    return classify(r.features, ts, cfg.signed_mean);
  });

  r.verdict = detail::with_stage("validate", [&] {
    PixelModel m = build_model(r.preprocessed, &r.segments, cfg.eight_adjacency);
    return validate_tumor(m, vs.phi1, vs.phi2, r.candidate);
  });

  if (cfg.dump_stages) {
    detail::with_stage("dump", [&] {
      std::filesystem::create_directories(cfg.out_dir);
      const std::string& d = cfg.out_dir;
      write_pgm(d + "/preprocessed.pgm", r.preprocessed, true);
      write_pgm(d + "/segments.pgm", detail::segments_to_image(r.segments), true);
      for (std::size_t i = 0; i < r.regions.regions.size(); ++i) {
        write_pgm(d + "/region_" + std::to_string(i + 1) + ".pgm", r.regions.masked_images[i],
                  true);
        write_pgm(d + "/region_mask_" + std::to_string(i + 1) + ".pgm",
                  to_image(r.regions.regions[i]), true);
      }
      write_pgm(d + "/candidate.pgm", to_image(r.candidate), true);
      TrainingSet one{{r.features, r.classification.label}};
      detail::write_text_file(d + "/features.csv", save_training(one));
      write_pgm(d + "/background.pgm", to_image(r.verdict.background_mask), true);
      write_pgm(d + "/brain.pgm", to_image(r.verdict.brain_mask), true);
      write_pgm(d + "/final_tumor.pgm", to_image(r.verdict.final_tumor_mask), true);
      return 0;
    });
  }
  return r;
}

struct DatasetEntry {
  std::string path;
  std::string id;
  int label = 1;
};

using DatasetIndex = std::vector<DatasetEntry>;

namespace detail {

inline bool image_file(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  return ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

inline std::vector<DatasetEntry> scan_class(const std::filesystem::path& root, const char* sub,
                                            int label) {
  std::filesystem::path dir = root / sub;
  if (!std::filesystem::is_directory(dir))
    throw Error(Errc::missing_subdirectory, "dataset root lacks a '" + std::string(sub) +
                                                "' subdirectory: " + dir.string());
  std::vector<DatasetEntry> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && image_file(entry.path()))
      out.push_back({entry.path().string(),
                     std::string(sub) + "/" + entry.path().filename().string(), label});
  std::sort(out.begin(), out.end(),
            [](const DatasetEntry& a, const DatasetEntry& b) { return a.id < b.id; });
  return out;
}

}  // namespace detail

/// yes/ holds tumor images (label 2), no/ holds healthy ones (label 1);
/// entries sorted by path within each class, tumor class first.
inline DatasetIndex scan_dataset(const std::string& root) {
  std::filesystem::path r(root);
  DatasetIndex index = detail::scan_class(r, "yes", 2);
  DatasetIndex healthy = detail::scan_class(r, "no", 1);
  index.insert(index.end(), healthy.begin(), healthy.end());
  if (index.empty()) throw Error(Errc::empty_dataset, "no images under " + root);
  return index;
}

namespace detail {

/// Fisher-Yates with the raw engine, identical on every platform.
template <typename T>
inline void deterministic_shuffle(std::vector<T>& v, std::mt19937& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng() % static_cast<std::uint32_t>(i)]);
}

struct Split {
  std::vector<DatasetEntry> train;
  std::vector<DatasetEntry> test;
};

inline Split stratified_split(const DatasetIndex& index, std::uint32_t split_seed) {
  std::mt19937 rng(split_seed);
  Split split;
  for (int label : {2, 1}) {
    std::vector<DatasetEntry> group;
    for (const DatasetEntry& e : index)
      if (e.label == label) group.push_back(e);
    deterministic_shuffle(group, rng);
    std::size_t train_n = static_cast<std::size_t>(0.8 * static_cast<double>(group.size()));
    if (train_n == 0 && !group.empty()) train_n = 1;
    for (std::size_t i = 0; i < group.size(); ++i)
      (i < train_n ? split.train : split.test).push_back(group[i]);
  }
  auto by_id = [](const DatasetEntry& a, const DatasetEntry& b) { return a.id < b.id; };
  std::sort(split.train.begin(), split.train.end(), by_id);
  std::sort(split.test.begin(), split.test.end(), by_id);
  return split;
}

inline std::optional<BinaryMask> load_truth(const std::filesystem::path& root,
                                            const DatasetEntry& entry) {
  std::filesystem::path truth =
      root / "truth" / (std::filesystem::path(entry.path).stem().string() + ".pgm");
  if (!std::filesystem::is_regular_file(truth)) return std::nullopt;
  return mask_from_image(load_gray(truth.string()));
}

}  // namespace detail

/// Feature rows for the images of a dataset slice, labeled by class, with
/// regions chosen by the Auto rule. Images a stage rejects are skipped.
inline TrainingSet build_training_set(const PipelineConfig& cfg,
                                      const std::vector<DatasetEntry>& entries) {
  TrainingSet ts;
  PipelineConfig train_cfg = cfg;
  train_cfg.selector = SelectorMode::automatic;
  train_cfg.print_trace = false;
  train_cfg.dump_stages = false;
  for (const DatasetEntry& e : entries) {
    try {
      AnyImage raw = load_image(e.path);
      GrayImage pre = preprocess_image(raw, cfg.target_width, cfg.target_height);
      FuzzyPartition part = kfcm(pre, cfg.kfcm);
      RegionSet regions = split_regions(label_segments(part), pre);
      BinaryMask region = select_region(regions, Selector::automatic());
      ts.push_back({extract_features(pre, region), e.label});
    } catch (const Error&) {
      continue;
    }
  }
  return ts;
}

/// Stratified 80/20 split, training on the large side, full pipeline with
/// Auto selection on the held-out side; writes train.csv and report.json
/// into out_dir and returns the report.
inline nlohmann::ordered_json eval_dataset(const PipelineConfig& cfg, const std::string& root,
                                           std::uint32_t split_seed) {
  DatasetIndex index = scan_dataset(root);
  detail::Split split = detail::stratified_split(index, split_seed);
  TrainingSet ts = build_training_set(cfg, split.train);
  if (ts.empty()) throw Error(Errc::empty_training_set, "every training image failed the pipeline");

  std::filesystem::create_directories(cfg.out_dir);
  detail::write_text_file(cfg.out_dir + "/train.csv", save_training(ts));

  PipelineConfig test_cfg = cfg;
  test_cfg.selector = SelectorMode::automatic;
  test_cfg.print_trace = false;
  test_cfg.dump_stages = false;

  std::vector<ImageResult> results;
  std::vector<int> pred, truth;
  std::istringstream no_input;
  std::ostringstream no_output;
  for (const DatasetEntry& e : split.test) {
    ImageResult res;
    res.id = e.id;
    res.truth = e.label;
    try {
      RunResult rr = run(test_cfg, e.path, no_input, no_output, &ts);
      res.predicted = rr.classification.label;
      res.verdict = rr.verdict.satisfied;
      res.violations = rr.verdict.violations;
      if (auto tm = detail::load_truth(root, e);
          tm && tm->width == rr.verdict.final_tumor_mask.width &&
          tm->height == rr.verdict.final_tumor_mask.height)
        res.dice = dice(rr.verdict.final_tumor_mask, *tm);
    } catch (const StageError& err) {
      res.predicted = 1;
      res.verdict = false;
      res.violations = {"error at " + err.stage + ": " + err.what()};
    }
    pred.push_back(res.predicted);
    truth.push_back(res.truth);
    results.push_back(std::move(res));
  }

  ConfusionMatrix cm = confusion(pred, truth);
  nlohmann::ordered_json report = make_report(results, cm);
  detail::write_text_file(cfg.out_dir + "/report.json", report.dump(2) + "\n");
  return report;
}

namespace detail {

inline int pick_int(std::mt19937& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint32_t>(hi - lo + 1));
}

struct Ellipse {
  double cx, cy, a, b;
  bool contains(int x, int y) const {
    double dx = (x - cx) / a, dy = (y - cy) / b;
    return dx * dx + dy * dy <= 1.0;
  }
};

inline void synthesize(std::mt19937& rng, bool with_tumor, GrayImage& img, BinaryMask& truth) {
  const int w = 256, h = 256;
  img = GrayImage::filled(w, h, 0);
  truth = BinaryMask::zeros(w, h);
  Ellipse brain{128.0 + pick_int(rng, -6, 6), 128.0 + pick_int(rng, -6, 6),
                85.0 + pick_int(rng, -5, 5), 80.0 + pick_int(rng, -5, 5)};
  Ellipse tumor{0, 0, 0, 0};
  if (with_tumor) {
    double radius = 24.0 + pick_int(rng, -2, 2);
    tumor = Ellipse{brain.cx + pick_int(rng, -14, 14), brain.cy + pick_int(rng, -12, 12), radius,
                    radius};
  }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int value;
      if (with_tumor && tumor.contains(x, y)) {
        value = 235;
        truth.set(x, y, true);
      } else if (brain.contains(x, y)) {
        value = 110 + pick_int(rng, -2, 2);
      } else {
        value = 10;
      }
      img.at(x, y) = static_cast<std::uint8_t>(std::clamp(value, 0, 255));
    }
}

}  // namespace detail

/// Seeded synthetic corpus: yes/ images carry one constant-bright tumor
/// disc inside a flat noisy brain ellipse on a constant dark background,
/// no/ images the brain alone; exact tumor masks land in truth/.
inline void gen_corpus(const std::string& out_dir, int n_tumor, int n_clean, std::uint32_t seed) {
  namespace fs = std::filesystem;
  if (n_tumor < 0 || n_clean < 0)
    throw Error(Errc::degenerate_input, "image counts must be non-negative");
  fs::create_directories(fs::path(out_dir) / "yes");
  fs::create_directories(fs::path(out_dir) / "no");
  fs::create_directories(fs::path(out_dir) / "truth");
  std::mt19937 rng(seed);
  char name[32];
  GrayImage img;
  BinaryMask truth;
  for (int i = 0; i < n_tumor; ++i) {
    detail::synthesize(rng, true, img, truth);
    std::snprintf(name, sizeof(name), "tumor_%03d.pgm", i + 1);
    write_pgm((fs::path(out_dir) / "yes" / name).string(), img, true);
    write_pgm((fs::path(out_dir) / "truth" / name).string(), to_image(truth), true);
  }
  for (int i = 0; i < n_clean; ++i) {
    detail::synthesize(rng, false, img, truth);
    std::snprintf(name, sizeof(name), "clean_%03d.pgm", i + 1);
    write_pgm((fs::path(out_dir) / "no" / name).string(), img, true);
  }
}

}  // namespace tumorcheck
