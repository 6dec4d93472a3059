#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <vector>

#include "tumorcheck/errors.hpp"
#include "tumorcheck/image.hpp"
#include "tumorcheck/kfcm_types.hpp"
#include "tumorcheck/mask.hpp"

namespace tumorcheck {

/// Grid directions; every undirected 4-adjacency edge carries one action
/// per orientation.
enum class Direction { north, south, east, west };

inline constexpr Direction kAllDirections[4] = {Direction::north, Direction::south, Direction::east,
                                                Direction::west};

/// Pixel-adjacency model: states are pixel coordinates, the valuation is the
/// intensity (plus optional segment labels), transitions are the symmetric
/// 4-adjacency pairs implied by the dimensions.
struct PixelModel {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> intensity;              // per-state valuation
  std::optional<std::vector<std::uint8_t>> labels;  // per-state segment gray-level
  bool eight_adjacency = false;                     // diagonals as extra transitions

  std::uint8_t intensity_at(int x, int y) const {
    return intensity[static_cast<std::size_t>(y) * width + x];
  }

  std::optional<std::pair<int, int>> neighbor(int x, int y, Direction d) const {
    using Coord = std::optional<std::pair<int, int>>;
    switch (d) {
      case Direction::north: return y > 0 ? Coord({x, y - 1}) : std::nullopt;
      case Direction::south: return y + 1 < height ? Coord({x, y + 1}) : std::nullopt;
      case Direction::east: return x + 1 < width ? Coord({x + 1, y}) : std::nullopt;
      case Direction::west: return x > 0 ? Coord({x - 1, y}) : std::nullopt;
    }
    return std::nullopt;
  }

  template <typename Fn>
  void for_each_neighbor(int x, int y, Fn&& fn) const {
    if (y > 0) fn(x, y - 1);
    if (y + 1 < height) fn(x, y + 1);
    if (x + 1 < width) fn(x + 1, y);
    if (x > 0) fn(x - 1, y);
    if (!eight_adjacency) return;
    if (x > 0 && y > 0) fn(x - 1, y - 1);
    if (x + 1 < width && y > 0) fn(x + 1, y - 1);
    if (x > 0 && y + 1 < height) fn(x - 1, y + 1);
    if (x + 1 < width && y + 1 < height) fn(x + 1, y + 1);
  }

  std::size_t num_states() const { return static_cast<std::size_t>(width) * height; }

  std::size_t num_transitions() const {
    std::size_t n = 0;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) for_each_neighbor(x, y, [&](int, int) { ++n; });
    return n;
  }
};

inline PixelModel build_model(const GrayImage& img, const SegmentImage* labels = nullptr,
                              bool eight_adjacency = false) {
  PixelModel m{img.width, img.height, img.pixels, std::nullopt, eight_adjacency};
  if (labels) {
    if (labels->width != img.width || labels->height != img.height)
      throw Error(Errc::dimension_mismatch, "segment labels do not match image dimensions");
    m.labels = labels->labels;
  }
  return m;
}

namespace detail {
inline void require_model_dims(const PixelModel& m, const BinaryMask& phi) {
  require_same_dims(m.width, m.height, phi.width, phi.height);
}
}  // namespace detail

/// EX: states with some 4-neighbor satisfying phi.
inline BinaryMask ex(const PixelModel& m, const BinaryMask& phi) {
  detail::require_model_dims(m, phi);
  BinaryMask out = BinaryMask::zeros(m.width, m.height);
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) {
      bool hit = false;
      m.for_each_neighbor(x, y, [&](int nx, int ny) { hit = hit || phi.at(nx, ny); });
      out.set(x, y, hit);
    }
  return out;
}

/// EX restricted to one action's successor.
inline BinaryMask ex(const PixelModel& m, const BinaryMask& phi, Direction d) {
  detail::require_model_dims(m, phi);
  BinaryMask out = BinaryMask::zeros(m.width, m.height);
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (auto n = m.neighbor(x, y, d)) out.set(x, y, phi.at(n->first, n->second));
  return out;
}

/// EF: least fixpoint of Z = phi | EX Z, via multi-source BFS.
inline BinaryMask ef(const PixelModel& m, const BinaryMask& phi) {
  detail::require_model_dims(m, phi);
  BinaryMask out = phi;
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (phi.at(x, y)) queue.emplace_back(x, y);
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    m.for_each_neighbor(x, y, [&](int nx, int ny) {
      if (!out.at(nx, ny)) {
        out.set(nx, ny, true);
        queue.emplace_back(nx, ny);
      }
    });
  }
  return out;
}

/// EG: greatest fixpoint of Z = phi & EX Z. Deletes phi-states with no
/// remaining successor in the set until stable.
inline BinaryMask eg(const PixelModel& m, const BinaryMask& phi) {
  detail::require_model_dims(m, phi);
  BinaryMask out = phi;
  std::vector<int> inside_degree(m.num_states(), 0);
  std::deque<std::pair<int, int>> dead;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) {
      if (!out.at(x, y)) continue;
      int deg = 0;
      m.for_each_neighbor(x, y, [&](int nx, int ny) { deg += out.at(nx, ny); });
      inside_degree[static_cast<std::size_t>(y) * m.width + x] = deg;
      if (deg == 0) dead.emplace_back(x, y);
    }
  while (!dead.empty()) {
    auto [x, y] = dead.front();
    dead.pop_front();
    if (!out.at(x, y)) continue;
    out.set(x, y, false);
    m.for_each_neighbor(x, y, [&](int nx, int ny) {
      if (!out.at(nx, ny)) return;
      auto idx = static_cast<std::size_t>(ny) * m.width + nx;
      if (--inside_degree[idx] == 0) dead.emplace_back(nx, ny);
    });
  }
  return out;
}

/// Pixels on the outermost rows/columns of the image.
inline BinaryMask border(const PixelModel& m) {
  BinaryMask out = BinaryMask::zeros(m.width, m.height);
  for (int x = 0; x < m.width; ++x) {
    out.set(x, 0, true);
    out.set(x, m.height - 1, true);
  }
  for (int y = 0; y < m.height; ++y) {
    out.set(0, y, true);
    out.set(m.width - 1, y, true);
  }
  return out;
}

/// connect: states satisfying phi1 & !phi2 that reach a 4-neighbor of a
/// phi2-state through phi1 & !phi2. Flood fill seeded at those neighbors.
inline BinaryMask connect(const PixelModel& m, const BinaryMask& phi1, const BinaryMask& phi2) {
  detail::require_model_dims(m, phi1);
  detail::require_model_dims(m, phi2);
  BinaryMask allowed = BinaryMask::zeros(m.width, m.height);
  for (std::size_t i = 0; i < allowed.bits.size(); ++i)
    allowed.bits[i] = phi1.bits[i] && !phi2.bits[i];

  BinaryMask out = BinaryMask::zeros(m.width, m.height);
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) {
      if (!phi2.at(x, y)) continue;
      m.for_each_neighbor(x, y, [&](int nx, int ny) {
        if (allowed.at(nx, ny) && !out.at(nx, ny)) {
          out.set(nx, ny, true);
          queue.emplace_back(nx, ny);
        }
      });
    }
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    m.for_each_neighbor(x, y, [&](int nx, int ny) {
      if (allowed.at(nx, ny) && !out.at(nx, ny)) {
        out.set(nx, ny, true);
        queue.emplace_back(nx, ny);
      }
    });
  }
  return out;
}

/// Threshold form: phi1 given as a scalar field, binarized at t after
/// min-max normalization.
inline BinaryMask connect(const PixelModel& m, const ScalarField& phi1, double t, const BinaryMask& phi2) {
  detail::require_same_dims(m.width, m.height, phi1.width, phi1.height);
  return connect(m, binarize_normalized(phi1, t), phi2);
}

/// Per-pixel 4-adjacency hop distance to the nearest phi pixel;
/// +infinity everywhere when phi is empty.
inline ScalarField distance_transform(const PixelModel& m, const BinaryMask& phi) {
  detail::require_model_dims(m, phi);
  ScalarField out{m.width, m.height,
                  std::vector<double>(m.num_states(), std::numeric_limits<double>::infinity())};
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (phi.at(x, y)) {
        out.at(x, y) = 0;
        queue.emplace_back(x, y);
      }
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    double d = out.at(x, y);
    m.for_each_neighbor(x, y, [&](int nx, int ny) {
      if (out.at(nx, ny) > d + 1) {
        out.at(nx, ny) = d + 1;
        queue.emplace_back(nx, ny);
      }
    });
  }
  return out;
}

/// str: states whose hop distance to phi2 is strictly below d.
inline BinaryMask str(const PixelModel& m, double d, const BinaryMask& phi2) {
  ScalarField dist = distance_transform(m, phi2);
  BinaryMask out = BinaryMask::zeros(m.width, m.height);
  for (std::size_t i = 0; i < out.bits.size(); ++i) out.bits[i] = dist.values[i] < d ? 1 : 0;
  return out;
}

/// increase: region growing inside phi1 from the seeds phi1 & phi2;
/// the union of phi1-components intersecting phi2.
inline BinaryMask increase(const PixelModel& m, const BinaryMask& phi1, const BinaryMask& phi2) {
  detail::require_model_dims(m, phi1);
  detail::require_model_dims(m, phi2);
  BinaryMask out = BinaryMask::zeros(m.width, m.height);
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (phi1.at(x, y) && phi2.at(x, y)) {
        out.set(x, y, true);
        queue.emplace_back(x, y);
      }
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    m.for_each_neighbor(x, y, [&](int nx, int ny) {
      if (phi1.at(nx, ny) && !out.at(nx, ny)) {
        out.set(nx, ny, true);
        queue.emplace_back(nx, ny);
      }
    });
  }
  return out;
}

/// Number of 4-connected components of the mask.
inline int component_count(const BinaryMask& mask) {
  PixelModel grid{mask.width, mask.height, {}, std::nullopt};
  std::vector<std::uint8_t> seen(mask.bits.size(), 0);
  int components = 0;
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) {
      auto idx = static_cast<std::size_t>(y) * mask.width + x;
      if (!mask.bits[idx] || seen[idx]) continue;
      ++components;
      seen[idx] = 1;
      queue.emplace_back(x, y);
      while (!queue.empty()) {
        auto [cx, cy] = queue.front();
        queue.pop_front();
        grid.for_each_neighbor(cx, cy, [&](int nx, int ny) {
          auto nidx = static_cast<std::size_t>(ny) * mask.width + nx;
          if (mask.bits[nidx] && !seen[nidx]) {
            seen[nidx] = 1;
            queue.emplace_back(nx, ny);
          }
        });
      }
    }
  return components;
}

}  // namespace tumorcheck
