#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "tumorcheck/errors.hpp"
#include "tumorcheck/image.hpp"

namespace tumorcheck {

/// Per-pixel satisfaction set: the points at which a formula holds.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // row-major 0/1

  static BinaryMask zeros(int w, int h) {
    return BinaryMask{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, 0)};
  }
  static BinaryMask ones(int w, int h) {
    return BinaryMask{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, 1)};
  }

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto b : bits) n += b != 0;
    return n;
  }
  bool empty() const { return count() == 0; }
  bool operator==(const BinaryMask&) const = default;
};

/// Per-pixel real map (distances, memberships).
struct ScalarField {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
};

namespace detail {
inline void require_same_dims(int wa, int ha, int wb, int hb) {
  if (wa != wb || ha != hb) throw Error(Errc::dimension_mismatch, "mask/model dimensions differ");
}
}  // namespace detail

inline BinaryMask mask_not(const BinaryMask& a) {
  BinaryMask out{a.width, a.height, a.bits};
  for (auto& b : out.bits) b = b ? 0 : 1;
  return out;
}

inline BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
  detail::require_same_dims(a.width, a.height, b.width, b.height);
  BinaryMask out{a.width, a.height, a.bits};
  for (std::size_t i = 0; i < out.bits.size(); ++i) out.bits[i] = a.bits[i] && b.bits[i];
  return out;
}

inline BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
  detail::require_same_dims(a.width, a.height, b.width, b.height);
  BinaryMask out{a.width, a.height, a.bits};
  for (std::size_t i = 0; i < out.bits.size(); ++i) out.bits[i] = a.bits[i] || b.bits[i];
  return out;
}

inline bool subset_of(const BinaryMask& a, const BinaryMask& b) {
  detail::require_same_dims(a.width, a.height, b.width, b.height);
  for (std::size_t i = 0; i < a.bits.size(); ++i)
    if (a.bits[i] && !b.bits[i]) return false;
  return true;
}

inline bool disjoint(const BinaryMask& a, const BinaryMask& b) {
  detail::require_same_dims(a.width, a.height, b.width, b.height);
  for (std::size_t i = 0; i < a.bits.size(); ++i)
    if (a.bits[i] && b.bits[i]) return false;
  return true;
}

/// Overlap measure 2|A&B| / (|A| + |B|); 1.0 when both masks are empty.
inline double dice(const BinaryMask& a, const BinaryMask& b) {
  detail::require_same_dims(a.width, a.height, b.width, b.height);
  std::size_t inter = 0, total = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    inter += a.bits[i] && b.bits[i];
    total += (a.bits[i] != 0) + (b.bits[i] != 0);
  }
  if (total == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(total);
}

inline GrayImage to_image(const BinaryMask& m) {
  GrayImage out{m.width, m.height, {}};
  out.pixels.reserve(m.bits.size());
  for (auto b : m.bits) out.pixels.push_back(b ? 255 : 0);
  return out;
}

/// Nonzero pixels become mask members.
inline BinaryMask mask_from_image(const GrayImage& img) {
  BinaryMask out{img.width, img.height, {}};
  out.bits.reserve(img.pixels.size());
  for (auto p : img.pixels) out.bits.push_back(p ? 1 : 0);
  return out;
}

/// Min-max normalizes a field to [0, 1], then keeps values >= t.
/// A constant field normalizes to all-ones when positive, all-zeros otherwise.
inline BinaryMask binarize_normalized(const ScalarField& f, double t) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : f.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  BinaryMask out = BinaryMask::zeros(f.width, f.height);
  if (f.values.empty()) return out;
  if (lo == hi) {
    double norm = lo > 0 ? 1.0 : 0.0;
    if (norm >= t) out.bits.assign(out.bits.size(), 1);
    return out;
  }
  double scale = 1.0 / (hi - lo);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    out.bits[i] = (f.values[i] - lo) * scale >= t ? 1 : 0;
  return out;
}

}  // namespace tumorcheck
