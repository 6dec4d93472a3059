#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tumorcheck/errors.hpp"
#include "tumorcheck/eval.hpp"
#include "tumorcheck/formula.hpp"
#include "tumorcheck/mask.hpp"
#include "tumorcheck/model.hpp"

namespace tumorcheck {

struct ConfusionMatrix {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;
};

inline ConfusionMatrix confusion(const std::vector<int>& pred, const std::vector<int>& truth,
                                 int positive = 2) {
  if (pred.size() != truth.size())
    throw Error(Errc::length_mismatch, "prediction and truth lists differ in length");
  if (pred.empty()) throw Error(Errc::empty_input, "cannot build a confusion matrix from nothing");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    bool p = pred[i] == positive;
    bool t = truth[i] == positive;
    if (p && t)
      ++cm.tp;
    else if (p && !t)
      ++cm.fp;
    else if (!p && t)
      ++cm.fn;
    else
      ++cm.tn;
  }
  return cm;
}

namespace detail {
inline double ratio(long num, long den, const char* name) {
  if (den == 0) throw Error(Errc::undefined_metric, std::string(name) + " undefined: denominator is 0");
  return static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace detail

inline double precision(const ConfusionMatrix& c) {
  return detail::ratio(c.tp, c.tp + c.fp, "precision");
}
inline double recall(const ConfusionMatrix& c) { return detail::ratio(c.tp, c.tp + c.fn, "recall"); }
inline double accuracy(const ConfusionMatrix& c) {
  return detail::ratio(c.tp + c.tn, c.tp + c.fp + c.tn + c.fn, "accuracy");
}
inline double specificity(const ConfusionMatrix& c) {
  return detail::ratio(c.tn, c.tn + c.fp, "specificity");
}
inline double f1(const ConfusionMatrix& c) {
  double p = precision(c);
  double r = recall(c);
  if (p + r == 0.0) throw Error(Errc::undefined_metric, "f1 undefined: precision + recall is 0");
  return 2.0 * p * r / (p + r);
}

/// Spatial validation outcome. satisfied holds exactly when violations is
/// empty; final_tumor_mask is the candidate clipped to the brain region.
struct Verdict {
  bool satisfied = false;
  BinaryMask background_mask;
  BinaryMask brain_mask;
  BinaryMask final_tumor_mask;
  std::vector<std::string> violations;
};

/// Checks the candidate region against the model: it must be non-empty (V1),
/// avoid the border-connected background (V2), stay inside the brain region
/// (V3), and form one 4-connected component (V4). The background is the
/// phi1 satisfaction set flood-connected to the border after re-binarizing
/// its indicator at 0.9.
inline Verdict validate_tumor(const PixelModel& m, const FormulaPtr& phi1, const FormulaPtr& phi2,
                              const BinaryMask& candidate) {
  detail::require_same_dims(m.width, m.height, candidate.width, candidate.height);
  BinaryMask border_mask = border(m);
  BinaryMask phi1_mask = evaluate(m, phi1);
  ScalarField indicator{phi1_mask.width, phi1_mask.height,
                        std::vector<double>(phi1_mask.bits.begin(), phi1_mask.bits.end())};
  Verdict v;
  v.background_mask = connect(m, indicator, 0.9, border_mask);
  v.brain_mask = mask_and(mask_not(v.background_mask), evaluate(m, phi2));
  v.final_tumor_mask = mask_and(candidate, v.brain_mask);
  if (candidate.empty()) {
    v.violations.push_back("V1: no tumor candidate");
  } else {
    if (!disjoint(candidate, v.background_mask))
      v.violations.push_back("V2: candidate overlaps background");
    if (!subset_of(candidate, v.brain_mask))
      v.violations.push_back("V3: candidate extends outside the brain region");
    if (component_count(candidate) != 1)
      v.violations.push_back("V4: candidate is not a single connected region");
  }
  v.satisfied = v.violations.empty();
  return v;
}

struct ImageResult {
  std::string id;
  int predicted = 1;
  int truth = 1;
  bool verdict = false;
  std::vector<std::string> violations;
  std::optional<double> dice;
};

namespace detail {

inline nlohmann::ordered_json metric_or_null(double (*metric)(const ConfusionMatrix&),
                                             const ConfusionMatrix& cm) {
  try {
    return std::round(metric(cm) * 1e6) / 1e6;
  } catch (const Error&) {
    return nullptr;
  }
}

}  // namespace detail

/// Reference scores of the compared techniques, in percent.
inline nlohmann::ordered_json comparison_table() {
  using J = nlohmann::ordered_json;
  auto row = [](const char* technique, double acc, double prec, double rec) {
    return J{{"technique", technique}, {"accuracy", acc}, {"precision", prec}, {"recall", rec}};
  };
  return J::array({row("cnn", 96.17, 96.17, 96.12), row("markov_dtmc", 97.65, 71.65, 99.87),
                   row("cellular_automata", 93.0, 95.0, 90.0),
                   row("model_checking", 98.0, 96.15, 100.0)});
}

inline nlohmann::ordered_json make_report(const std::vector<ImageResult>& results,
                                          const ConfusionMatrix& cm) {
  using J = nlohmann::ordered_json;
  J report;
  report["schema_version"] = 1;
  J images = J::array();
  bool any_dice = false;
  double dice_total = 0.0;
  int dice_count = 0;
  for (const ImageResult& r : results) {
    J entry{{"id", r.id},
            {"predicted", r.predicted},
            {"truth", r.truth},
            {"verdict", r.verdict},
            {"violations", r.violations}};
    if (r.dice) {
      entry["dice"] = std::round(*r.dice * 1e6) / 1e6;
      any_dice = true;
      dice_total += *r.dice;
      ++dice_count;
    }
    images.push_back(std::move(entry));
  }
  report["per_image"] = std::move(images);
  report["confusion"] = J{{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}};
  report["metrics"] = J{{"precision", detail::metric_or_null(precision, cm)},
                        {"recall", detail::metric_or_null(recall, cm)},
                        {"accuracy", detail::metric_or_null(accuracy, cm)},
                        {"f1", detail::metric_or_null(f1, cm)},
                        {"specificity", detail::metric_or_null(specificity, cm)}};
  report["comparison"] = comparison_table();
  if (any_dice) report["mean_dice"] = std::round(dice_total / dice_count * 1e6) / 1e6;
  return report;
}

}  // namespace tumorcheck
