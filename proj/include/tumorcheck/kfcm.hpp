#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "tumorcheck/errors.hpp"
#include "tumorcheck/image.hpp"
#include "tumorcheck/kfcm_types.hpp"
#include "tumorcheck/mask.hpp"

namespace tumorcheck {

struct KfcmParams {
  int k = 4;
  double fuzzifier = 2.0;
  double kernel_sigma = 150.0;
  double tol = 1e-5;
  int max_iter = 100;
  std::uint32_t seed = 42;
};

/// Soft clustering result. memberships is k rows of one value per pixel;
/// centers are unsorted (creation order). max_membership_sum_error is the
/// worst per-pixel deviation of the membership sum from 1 seen on any
/// iteration.
struct FuzzyPartition {
  int k = 0;
  int width = 0;
  int height = 0;
  std::vector<std::vector<double>> memberships;
  std::vector<double> centers;
  std::vector<double> objective_trace;
  double max_membership_sum_error = 0.0;
};

namespace detail {

inline double gaussian_kernel(double x, double v, double sigma) {
  double diff = x - v;
  return std::exp(-(diff * diff) / (sigma * sigma));
}

/// Uniform in (0, 1), identical on every platform for a given seed.
inline double unit_uniform(std::mt19937& rng) {
  return (static_cast<double>(rng()) + 0.5) / 4294967296.0;
}

}  // namespace detail

/// Kernel fuzzy c-means over pixel intensities. Memberships after the first
/// update depend only on the gray level, so the iteration runs on the
/// 256-bin histogram; results are exactly what the per-pixel loop would give.
inline FuzzyPartition kfcm(const GrayImage& img, const KfcmParams& params = {}) {
  const int k = params.k;
  const double m = params.fuzzifier;
  const double sigma = params.kernel_sigma;
  const std::size_t n = img.pixels.size();
  if (k < 1) throw Error(Errc::degenerate_input, "cluster count must be at least 1");
  if (m <= 1.0) throw Error(Errc::degenerate_input, "fuzzifier must exceed 1");
  if (n == 0) throw Error(Errc::degenerate_input, "cannot cluster an empty image");

  std::array<double, 256> hist{};
  for (std::uint8_t p : img.pixels) hist[p] += 1.0;
  int distinct = 0;
  for (double c : hist) distinct += c > 0.0;
  if (k > 1 && distinct < k)
    throw Error(Errc::degenerate_input,
                "need at least as many distinct intensities as clusters");

  FuzzyPartition part;
  part.k = k;
  part.width = img.width;
  part.height = img.height;
  part.centers.assign(k, 0.0);

  // Seeded random memberships, normalized per pixel; they only feed the
  // first center estimate, a plain fuzzy-weighted mean.
  std::mt19937 rng(params.seed);
  std::vector<double> num(k, 0.0), den(k, 0.0), row(k, 0.0);
  double sum_error = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      row[i] = detail::unit_uniform(rng);
      total += row[i];
    }
    double check = 0.0;
    for (int i = 0; i < k; ++i) {
      double u = row[i] / total;
      check += u;
      double w = std::pow(u, m);
      num[i] += w * img.pixels[j];
      den[i] += w;
    }
    sum_error = std::max(sum_error, std::abs(check - 1.0));
  }
  for (int i = 0; i < k; ++i) part.centers[i] = den[i] > 0.0 ? num[i] / den[i] : 127.5;

  // u[i][g]: membership of gray level g in cluster i.
  std::vector<std::array<double, 256>> u(k);
  const double p = 1.0 / (m - 1.0);
  double prev_obj = 0.0;
  for (int iter = 0; iter < params.max_iter; ++iter) {
    std::vector<double> dist(k, 0.0);
    for (int g = 0; g < 256; ++g) {
      if (hist[g] == 0.0) continue;
      int exact = -1;
      for (int i = 0; i < k; ++i) {
        dist[i] = 1.0 - detail::gaussian_kernel(g, part.centers[i], sigma);
        if (dist[i] == 0.0 && exact < 0) exact = i;
      }
      double check = 0.0;
      for (int i = 0; i < k; ++i) {
        double value;
        if (exact >= 0) {
          value = i == exact ? 1.0 : 0.0;
        } else {
          double denom = 0.0;
          for (int l = 0; l < k; ++l) denom += std::pow(dist[i] / dist[l], p);
          value = 1.0 / denom;
        }
        u[i][g] = value;
        check += value;
      }
      sum_error = std::max(sum_error, std::abs(check - 1.0));
    }

    double obj = 0.0;
    for (int i = 0; i < k; ++i) {
      double cnum = 0.0, cden = 0.0;
      for (int g = 0; g < 256; ++g) {
        if (hist[g] == 0.0) continue;
        double w = hist[g] * std::pow(u[i][g], m);
        double kern = detail::gaussian_kernel(g, part.centers[i], sigma);
        cnum += w * kern * g;
        cden += w * kern;
        obj += w * 2.0 * (1.0 - kern);
      }
      if (cden > 0.0) part.centers[i] = cnum / cden;
    }
    part.objective_trace.push_back(obj);
    if (iter > 0 && std::abs(prev_obj - obj) < params.tol * std::max(std::abs(prev_obj), 1.0))
      break;
    prev_obj = obj;
  }

  part.memberships.assign(k, std::vector<double>(n, 0.0));
  for (int i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) part.memberships[i][j] = u[i][img.pixels[j]];
  part.max_membership_sum_error = sum_error;
  return part;
}

/// Hard assignment: argmax membership, ties to the lowest cluster index;
/// clusters take gray levels 25, 50, 100, 150 in ascending-center order.
inline SegmentImage label_segments(const FuzzyPartition& part) {
  if (part.k > 4)
    throw Error(Errc::index_out_of_range, "cluster count exceeds the four segment gray levels");
  std::vector<int> order(part.k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return part.centers[a] < part.centers[b]; });
  std::vector<std::uint8_t> level_of(part.k, 0);
  for (int rank = 0; rank < part.k; ++rank) level_of[order[rank]] = kSegmentLevels[rank];

  SegmentImage seg;
  seg.width = part.width;
  seg.height = part.height;
  seg.levels.assign(kSegmentLevels, kSegmentLevels + part.k);
  const std::size_t n = static_cast<std::size_t>(part.width) * part.height;
  seg.labels.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    int best = 0;
    for (int i = 1; i < part.k; ++i)
      if (part.memberships[i][j] > part.memberships[best][j]) best = i;
    seg.labels[j] = level_of[best];
  }
  return seg;
}

/// One mask and one masked copy of the source per gray level, in level order.
struct RegionSet {
  std::vector<BinaryMask> regions;
  std::vector<GrayImage> masked_images;
  std::vector<std::uint8_t> levels;
};

inline RegionSet split_regions(const SegmentImage& seg, const GrayImage& img) {
  detail::require_same_dims(seg.width, seg.height, img.width, img.height);
  RegionSet rs;
  rs.levels = seg.levels;
  for (std::uint8_t level : seg.levels) {
    BinaryMask mask = BinaryMask::zeros(img.width, img.height);
    GrayImage masked = GrayImage::filled(img.width, img.height, 0);
    for (std::size_t j = 0; j < seg.labels.size(); ++j)
      if (seg.labels[j] == level) {
        mask.bits[j] = 1;
        masked.pixels[j] = img.pixels[j];
      }
    rs.regions.push_back(std::move(mask));
    rs.masked_images.push_back(std::move(masked));
  }
  return rs;
}

struct Selector {
  bool is_auto = true;
  int index = 0;  // 1-based when is_auto is false

  static Selector automatic() { return {}; }
  static Selector at(int i) { return {false, i}; }
};

namespace detail {

inline bool touches_border(const BinaryMask& mask) {
  for (int x = 0; x < mask.width; ++x)
    if (mask.at(x, 0) || mask.at(x, mask.height - 1)) return true;
  for (int y = 0; y < mask.height; ++y)
    if (mask.at(0, y) || mask.at(mask.width - 1, y)) return true;
  return false;
}

inline double region_mean(const RegionSet& rs, std::size_t idx) {
  double total = 0.0;
  for (std::uint8_t p : rs.masked_images[idx].pixels) total += p;
  return total / rs.regions[idx].count();
}

}  // namespace detail

/// Auto rule: highest mean source intensity among non-empty regions free of
/// border pixels; if none qualify, highest mean among non-empty regions.
inline int select_region_index(const RegionSet& rs, const Selector& sel) {
  const int k = static_cast<int>(rs.regions.size());
  if (!sel.is_auto) {
    if (sel.index < 1 || sel.index > k)
      throw Error(Errc::index_out_of_range,
                  "region index " + std::to_string(sel.index) + " outside 1.." + std::to_string(k));
    return sel.index - 1;
  }
  auto pick = [&](bool interior_only) {
    int best = -1;
    double best_mean = 0.0;
    for (int i = 0; i < k; ++i) {
      if (rs.regions[i].empty()) continue;
      if (interior_only && detail::touches_border(rs.regions[i])) continue;
      double mean = detail::region_mean(rs, i);
      if (best < 0 || mean > best_mean) {
        best = i;
        best_mean = mean;
      }
    }
    return best;
  };
  int best = pick(true);
  if (best < 0) best = pick(false);
  if (best < 0) throw Error(Errc::empty_region, "no non-empty region to select");
  return best;
}

inline BinaryMask select_region(const RegionSet& rs, const Selector& sel) {
  return rs.regions[select_region_index(rs, sel)];
}

}  // namespace tumorcheck
