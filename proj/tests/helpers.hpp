#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string_view>
#include <utility>

#include "tumorcheck/errors.hpp"
#include "tumorcheck/image.hpp"
#include "tumorcheck/mask.hpp"

namespace helpers {

using tumorcheck::BinaryMask;
using tumorcheck::Errc;
using tumorcheck::GrayImage;

// Runs fn and reports the library error code it threw, if any.
template <typename Fn>
std::optional<Errc> caught(Fn&& fn) {
  try {
    std::forward<Fn>(fn)();
  } catch (const tumorcheck::Error& e) {
    return e.code;
  }
  return std::nullopt;
}

inline GrayImage gray_of(int w, int h, std::initializer_list<int> px) {
  GrayImage img = GrayImage::filled(w, h, 0);
  int i = 0;
  for (int v : px) img.pixels[static_cast<std::size_t>(i++)] = static_cast<std::uint8_t>(v);
  return img;
}

// '#' marks set pixels; any other character is clear. Rows are separated
// by '|' so fixtures read like little pictures.
inline BinaryMask mask_of(int w, int h, std::string_view rows) {
  BinaryMask m = BinaryMask::zeros(w, h);
  int x = 0, y = 0;
  for (char c : rows) {
    if (c == '|') {
      ++y;
      x = 0;
      continue;
    }
    if (c == '#') m.set(x, y, true);
    ++x;
  }
  return m;
}

// 9x9 image colored by ring depth: ring 0 is the border, ring 4 the
// center pixel.
inline GrayImage ring_image(std::initializer_list<int> value_by_ring) {
  GrayImage img = GrayImage::filled(9, 9, 0);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 9; ++x) {
      int ring = std::min(std::min(x, 8 - x), std::min(y, 8 - y));
      img.at(x, y) = static_cast<std::uint8_t>(*(value_by_ring.begin() + ring));
    }
  return img;
}

inline bool same_mask(const BinaryMask& a, const BinaryMask& b) {
  return a.width == b.width && a.height == b.height && a.bits == b.bits;
}

// Axis-aligned disc mask, handy for planted-blob fixtures.
inline BinaryMask disc_mask(int w, int h, double cx, double cy, double r) {
  BinaryMask m = BinaryMask::zeros(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.set(x, y, true);
  return m;
}

}  // namespace helpers
