#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "tumorcheck/errors.hpp"
#include "tumorcheck/image.hpp"
#include "tumorcheck/mask.hpp"

namespace tumorcheck {

/// Ordered as: GLCM contrast, correlation, energy, homogeneity, entropy,
/// then region mean, standard deviation, skewness, area fraction.
using FeatureVector = std::array<double, 9>;

inline constexpr int kGlcmLevels = 8;

namespace detail {

using Glcm = std::array<std::array<double, kGlcmLevels>, kGlcmLevels>;

inline int quantize_level(std::uint8_t p) { return p >> 5; }

struct GlcmFeatures {
  double contrast = 0.0;
  double correlation = 0.0;
  double energy = 0.0;
  double homogeneity = 0.0;
  double entropy = 0.0;
};

inline GlcmFeatures glcm_features(const Glcm& p) {
  GlcmFeatures out;
  double mu_i = 0.0, mu_j = 0.0;
  for (int i = 0; i < kGlcmLevels; ++i)
    for (int j = 0; j < kGlcmLevels; ++j) {
      double v = p[i][j];
      out.contrast += (i - j) * (i - j) * v;
      out.energy += v * v;
      out.homogeneity += v / (1.0 + std::abs(i - j));
      if (v > 0.0) out.entropy -= v * std::log2(v);
      mu_i += i * v;
      mu_j += j * v;
    }
  double var_i = 0.0, var_j = 0.0, cov = 0.0;
  for (int i = 0; i < kGlcmLevels; ++i)
    for (int j = 0; j < kGlcmLevels; ++j) {
      double v = p[i][j];
      var_i += (i - mu_i) * (i - mu_i) * v;
      var_j += (j - mu_j) * (j - mu_j) * v;
      cov += (i - mu_i) * (j - mu_j) * v;
    }
  double denom = std::sqrt(var_i * var_j);
  out.correlation = denom > 0.0 ? cov / denom : 1.0;
  return out;
}

}  // namespace detail

/// Texture over the region's co-occurrences at unit offsets in four
/// directions (symmetrized, normalized, averaged over directions that have
/// pairs), plus first-order statistics of the region pixels.
inline FeatureVector extract_features(const GrayImage& img, const BinaryMask& region) {
  detail::require_same_dims(img.width, img.height, region.width, region.height);
  const std::size_t area = region.count();
  if (area == 0) throw Error(Errc::empty_region, "cannot extract features from an empty region");

  constexpr int offsets[4][2] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
  detail::Glcm averaged{};
  int contributing = 0;
  for (auto [dx, dy] : offsets) {
    detail::Glcm counts{};
    double total = 0.0;
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        int nx = x + dx, ny = y + dy;
        if (nx < 0 || nx >= img.width || ny < 0 || ny >= img.height) continue;
        if (!region.at(x, y) || !region.at(nx, ny)) continue;
        int a = detail::quantize_level(img.at(x, y));
        int b = detail::quantize_level(img.at(nx, ny));
        counts[a][b] += 1.0;
        counts[b][a] += 1.0;
        total += 2.0;
      }
    if (total == 0.0) continue;
    ++contributing;
    for (int i = 0; i < kGlcmLevels; ++i)
      for (int j = 0; j < kGlcmLevels; ++j) averaged[i][j] += counts[i][j] / total;
  }
  if (contributing > 0) {
    for (auto& row : averaged)
      for (double& v : row) v /= contributing;
  } else {
    // Pairless region (isolated pixels): each pixel co-occurs with itself.
    for (std::size_t idx = 0; idx < region.bits.size(); ++idx)
      if (region.bits[idx]) {
        int q = detail::quantize_level(img.pixels[idx]);
        averaged[q][q] += 1.0 / static_cast<double>(area);
      }
  }
  detail::GlcmFeatures glcm = detail::glcm_features(averaged);

  double mean = 0.0;
  for (std::size_t idx = 0; idx < region.bits.size(); ++idx)
    if (region.bits[idx]) mean += img.pixels[idx];
  mean /= static_cast<double>(area);
  double var = 0.0, cube = 0.0;
  for (std::size_t idx = 0; idx < region.bits.size(); ++idx)
    if (region.bits[idx]) {
      double d = img.pixels[idx] - mean;
      var += d * d;
      cube += d * d * d;
    }
  var /= static_cast<double>(area);
  cube /= static_cast<double>(area);
  double stddev = std::sqrt(var);
  double skew = stddev > 0.0 ? cube / (stddev * stddev * stddev) : 0.0;
  double area_fraction = static_cast<double>(area) / static_cast<double>(img.size());

  return {glcm.contrast, glcm.correlation, glcm.energy, glcm.homogeneity,
          glcm.entropy,  mean,             stddev,      skew,
          area_fraction};
}

struct TrainingRow {
  FeatureVector features;
  int label = 1;  // 1 = Normal, 2 = Abnormal
};

using TrainingSet = std::vector<TrainingRow>;

struct Classification {
  int label = 1;
  std::string message;
  double distance = 0.0;
  std::size_t row = 0;
};

/// Nearest training row by the mean of per-coordinate absolute differences;
/// signed_mean drops the absolute value, reproducing the source pseudocode
/// where opposite-signed deviations cancel. Ties go to the lowest row.
inline Classification classify(const FeatureVector& test, const TrainingSet& train,
                               bool signed_mean = false) {
  if (train.empty()) throw Error(Errc::empty_training_set, "training set is empty");
  std::size_t best = 0;
  double best_dist = 0.0;
  for (std::size_t r = 0; r < train.size(); ++r) {
    double acc = 0.0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      double diff = train[r].features[i] - test[i];
      acc += signed_mean ? diff : std::abs(diff);
    }
    double dist = acc / static_cast<double>(test.size());
    if (r == 0 || dist < best_dist) {
      best = r;
      best_dist = dist;
    }
  }
  int label = train[best].label;
  return {label, label == 1 ? "Normal" : "Abnormal", best_dist, best};
}

inline constexpr std::string_view kTrainingHeader = "f1,f2,f3,f4,f5,f6,f7,f8,f9,label";

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

inline double parse_field(std::string_view field) {
  double value = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size())
    throw Error(Errc::ragged_row, "unparsable numeric field '" + std::string(field) + "'");
  return value;
}

inline std::string format_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12f", v);
  return buf;
}

}  // namespace detail

inline TrainingSet load_training(std::string_view csv) {
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string_view {
    if (pos >= csv.size()) return {};
    std::size_t eol = csv.find('\n', pos);
    std::string_view line =
        csv.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? csv.size() : eol + 1;
    return line;
  };

  std::string_view header = detail::trim(next_line());
  if (header != kTrainingHeader)
    throw Error(Errc::bad_header, "training CSV must start with '" + std::string(kTrainingHeader) +
                                      "', got '" + std::string(header) + "'");
  TrainingSet out;
  while (pos < csv.size()) {
    std::string_view line = next_line();
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_fields(line);
    if (fields.size() != 10)
      throw Error(Errc::ragged_row,
                  "expected 10 fields, got " + std::to_string(fields.size()));
    TrainingRow row;
    for (int i = 0; i < 9; ++i) row.features[i] = detail::parse_field(fields[i]);
    double label = detail::parse_field(fields[9]);
    if (label != 1.0 && label != 2.0)
      throw Error(Errc::bad_label, "label must be 1 or 2, got '" + std::string(fields[9]) + "'");
    row.label = static_cast<int>(label);
    out.push_back(row);
  }
  if (out.empty()) throw Error(Errc::empty_training_set, "training CSV has no data rows");
  return out;
}

inline std::string save_training(const TrainingSet& ts) {
  std::string out(kTrainingHeader);
  out += '\n';
  for (const TrainingRow& row : ts) {
    for (double v : row.features) {
      out += detail::format_fixed(v);
      out += ',';
    }
    out += std::to_string(row.label);
    out += '\n';
  }
  return out;
}

}  // namespace tumorcheck
