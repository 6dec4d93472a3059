#pragma once

#include <cstdint>
#include <vector>

namespace tumorcheck {

/// Gray levels assigned to clusters, brightest cluster last.
inline constexpr std::uint8_t kSegmentLevels[4] = {25, 50, 100, 150};

/// Segmentation output: each pixel carries the gray level assigned to its
/// cluster; levels lists the k levels in use, ascending.
struct SegmentImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> labels;
  std::vector<std::uint8_t> levels;

  std::uint8_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }

  bool operator==(const SegmentImage&) const = default;
};

}  // namespace tumorcheck
