#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tumorcheck/pipeline.hpp"

namespace {

using namespace tumorcheck;

bool apply_env_seed(std::uint32_t& seed) {
  const char* env = std::getenv("TUMORCHECK_SEED");
  if (!env || !*env) return true;
  char* end = nullptr;
  unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0' || v > 0xffffffffUL) {
    std::cerr << "error: TUMORCHECK_SEED is not a 32-bit unsigned integer: " << env << "\n";
    return false;
  }
  seed = static_cast<std::uint32_t>(v);
  return true;
}

bool parse_selector(const std::string& text, PipelineConfig& cfg) {
  if (text == "auto") {
    cfg.selector = SelectorMode::automatic;
    return true;
  }
  if (text == "interactive") {
    cfg.selector = SelectorMode::interactive;
    return true;
  }
  try {
    std::size_t used = 0;
    int idx = std::stoi(text, &used);
    if (used != text.size()) return false;
    cfg.selector = SelectorMode::index;
    cfg.selector_index = idx;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

void add_common_options(CLI::App* cmd, PipelineConfig& cfg) {
  cmd->add_option("--k", cfg.kfcm.k, "cluster count");
  cmd->add_option("--seed", cfg.kfcm.seed, "clustering seed");
  cmd->add_option("--fuzzifier", cfg.kfcm.fuzzifier, "fuzzy exponent m");
  cmd->add_option("--sigma", cfg.kfcm.kernel_sigma, "Gaussian kernel width");
  cmd->add_option("--tol", cfg.kfcm.tol, "relative objective tolerance");
  cmd->add_option("--max-iter", cfg.kfcm.max_iter, "iteration cap");
  cmd->add_option("--target-size", cfg.target_width, "square resize target");
  cmd->add_flag("--adjacency8", cfg.eight_adjacency, "use 8-connectivity");
  cmd->add_flag("--signed-distance", cfg.signed_mean,
                "classify by signed mean difference instead of absolute");
}

nlohmann::ordered_json run_fragment(const std::string& input, const RunResult& r) {
  return {{"id", input},
          {"predicted", r.classification.label},
          {"message", r.classification.message},
          {"selected_region", r.selected_index + 1},
          {"verdict", r.verdict.satisfied},
          {"violations", r.verdict.violations}};
}

int cmd_run(const PipelineConfig& cfg, const std::string& input) {
  RunResult r = run(cfg, input);
  std::cout << run_fragment(input, r).dump(2) << "\n";
  return r.verdict.satisfied ? 0 : 3;
}

int cmd_eval(const PipelineConfig& cfg, const std::string& dataset, std::uint32_t split_seed) {
  nlohmann::ordered_json report = eval_dataset(cfg, dataset, split_seed);
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_check(const PipelineConfig& cfg, const std::string& input, const std::string& candidate,
              const std::string& out_dir) {
  AnyImage raw = detail::with_stage("load", [&] { return load_image(input); });
  GrayImage pre = detail::with_stage(
      "preprocess", [&] { return preprocess_image(raw, cfg.target_width, cfg.target_height); });
  ValidationSpec vs =
      detail::with_stage("spec", [&] { return load_validation_spec(cfg.spec_path); });
  BinaryMask mask =
      detail::with_stage("load", [&] { return mask_from_image(load_gray(candidate)); });
  PixelModel m = build_model(pre, nullptr, cfg.eight_adjacency);
  Verdict v = detail::with_stage("validate", [&] { return validate_tumor(m, vs.phi1, vs.phi2, mask); });

  nlohmann::ordered_json out{{"satisfied", v.satisfied}, {"violations", v.violations}};
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const std::string& name : vs.file.checks) {
    BinaryMask result = detail::with_stage("check", [&] { return evaluate(m, *vs.file.find(name)); });
    checks.push_back({{"name", name}, {"pixels", result.count()}});
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      write_pgm(out_dir + "/" + name + ".pgm", to_image(result), true);
    }
  }
  out["checks"] = std::move(checks);
  std::cout << out.dump(2) << "\n";
  return v.satisfied ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"segment, classify, and spatially validate tumor regions in brain images"};
  app.require_subcommand(1);

  PipelineConfig cfg;
  std::string input, dataset, candidate, selector = "interactive";
  std::uint32_t split_seed = 1;
  std::uint32_t corpus_seed = 42;
  int n_tumor = 20, n_clean = 20;
  std::string corpus_out;

  CLI::App* run_cmd = app.add_subcommand("run", "full pipeline on one image");
  run_cmd->add_option("--input", input, "input image (PGM/PPM)")->required();
  run_cmd->add_option("--select", selector, "auto, interactive, or a 1-based region index");
  run_cmd->add_option("--spec", cfg.spec_path, "formula spec file");
  run_cmd->add_option("--train", cfg.train_path, "training CSV");
  run_cmd->add_option("--out", cfg.out_dir, "output directory");
  run_cmd->add_flag("--dump-stages", cfg.dump_stages, "write every intermediate artifact");
  add_common_options(run_cmd, cfg);

  CLI::App* eval_cmd = app.add_subcommand("eval", "batch evaluation over a yes/no dataset");
  eval_cmd->add_option("--dataset", dataset, "dataset root with yes/ and no/")->required();
  eval_cmd->add_option("--split-seed", split_seed, "train/test split seed");
  eval_cmd->add_option("--spec", cfg.spec_path, "formula spec file");
  eval_cmd->add_option("--out", cfg.out_dir, "output directory");
  add_common_options(eval_cmd, cfg);

  CLI::App* check_cmd = app.add_subcommand("check", "validate a candidate mask only");
  check_cmd->add_option("--input", input, "input image (PGM/PPM)")->required();
  check_cmd->add_option("--spec", cfg.spec_path, "formula spec file")->required();
  check_cmd->add_option("--candidate", candidate, "candidate mask (PGM, nonzero = in)")->required();
  std::string check_out;
  check_cmd->add_option("--out", check_out, "directory for checked formula masks");
  check_cmd->add_option("--target-size", cfg.target_width, "square resize target");
  check_cmd->add_flag("--adjacency8", cfg.eight_adjacency, "use 8-connectivity");

  CLI::App* gen_cmd = app.add_subcommand("gen-corpus", "generate a synthetic labeled corpus");
  gen_cmd->add_option("--out", corpus_out, "corpus root directory")->required();
  gen_cmd->add_option("--n-tumor", n_tumor, "tumor image count");
  gen_cmd->add_option("--n-clean", n_clean, "clean image count");
  gen_cmd->add_option("--seed", corpus_seed, "generator seed");

  CLI11_PARSE(app, argc, argv);
  cfg.target_height = cfg.target_width;
  if (!apply_env_seed(cfg.kfcm.seed) || !apply_env_seed(corpus_seed)) return 1;

  try {
    if (run_cmd->parsed()) {
      if (!parse_selector(selector, cfg)) {
        std::cerr << "error: --select must be auto, interactive, or an integer\n";
        return 1;
      }
      return cmd_run(cfg, input);
    }
    if (eval_cmd->parsed()) return cmd_eval(cfg, dataset, split_seed);
    if (check_cmd->parsed()) return cmd_check(cfg, input, candidate, check_out);
    if (gen_cmd->parsed()) {
      tumorcheck::gen_corpus(corpus_out, n_tumor, n_clean, corpus_seed);
      return 0;
    }
  } catch (const tumorcheck::StageError& e) {
    std::cerr << "error at " << e.stage << ": " << e.what() << "\n";
    return 1;
  } catch (const tumorcheck::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
