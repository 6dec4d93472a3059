#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "tumorcheck/image.hpp"

namespace tumorcheck {

namespace detail {

inline std::uint8_t clamp_round(double v) {
  long r = std::lround(v);
  return static_cast<std::uint8_t>(r < 0 ? 0 : (r > 255 ? 255 : r));
}

// Pixel-center mapping; degenerates to the identity when sizes match.
inline double src_coord(int dst, int dst_size, int src_size) {
  double s = (dst + 0.5) * (static_cast<double>(src_size) / dst_size) - 0.5;
  if (s < 0) s = 0;
  if (s > src_size - 1) s = src_size - 1;
  return s;
}

inline double lerp(double a, double b, double t) { return a + (b - a) * t; }

}  // namespace detail

/// Linear contrast stretch mapping [min, max] onto [0, 255].
/// A constant image is returned unchanged.
inline GrayImage enhance(const GrayImage& img) {
  auto [lo_it, hi_it] = std::minmax_element(img.pixels.begin(), img.pixels.end());
  int lo = *lo_it, hi = *hi_it;
  if (lo == hi) return img;
  GrayImage out{img.width, img.height, {}};
  out.pixels.reserve(img.pixels.size());
  double scale = 255.0 / (hi - lo);
  for (std::uint8_t p : img.pixels) out.pixels.push_back(detail::clamp_round((p - lo) * scale));
  return out;
}

/// Stretch with one joint [min, max] window across all three channels.
inline RgbImage enhance(const RgbImage& img) {
  int lo = 255, hi = 0;
  for (const auto& p : img.pixels)
    for (int c = 0; c < 3; ++c) {
      lo = std::min<int>(lo, p[c]);
      hi = std::max<int>(hi, p[c]);
    }
  if (lo >= hi) return img;
  RgbImage out{img.width, img.height, img.pixels};
  double scale = 255.0 / (hi - lo);
  for (auto& p : out.pixels)
    for (int c = 0; c < 3; ++c) p[c] = detail::clamp_round((p[c] - lo) * scale);
  return out;
}

/// Bilinear resample to out_w x out_h. Identity sizes reproduce the input
/// bit-exactly; constant images stay constant.
inline GrayImage resize(const GrayImage& img, int out_w, int out_h) {
  GrayImage out{out_w, out_h, {}};
  out.pixels.resize(static_cast<std::size_t>(out_w) * out_h);
  for (int y = 0; y < out_h; ++y) {
    double sy = detail::src_coord(y, out_h, img.height);
    int y0 = static_cast<int>(sy);
    int y1 = std::min(y0 + 1, img.height - 1);
    double fy = sy - y0;
    for (int x = 0; x < out_w; ++x) {
      double sx = detail::src_coord(x, out_w, img.width);
      int x0 = static_cast<int>(sx);
      int x1 = std::min(x0 + 1, img.width - 1);
      double fx = sx - x0;
      double top = detail::lerp(img.at(x0, y0), img.at(x1, y0), fx);
      double bot = detail::lerp(img.at(x0, y1), img.at(x1, y1), fx);
      out.at(x, y) = detail::clamp_round(detail::lerp(top, bot, fy));
    }
  }
  return out;
}

inline RgbImage resize(const RgbImage& img, int out_w, int out_h) {
  RgbImage out{out_w, out_h, {}};
  out.pixels.resize(static_cast<std::size_t>(out_w) * out_h);
  for (int y = 0; y < out_h; ++y) {
    double sy = detail::src_coord(y, out_h, img.height);
    int y0 = static_cast<int>(sy);
    int y1 = std::min(y0 + 1, img.height - 1);
    double fy = sy - y0;
    for (int x = 0; x < out_w; ++x) {
      double sx = detail::src_coord(x, out_w, img.width);
      int x0 = static_cast<int>(sx);
      int x1 = std::min(x0 + 1, img.width - 1);
      double fx = sx - x0;
      for (int c = 0; c < 3; ++c) {
        double top = detail::lerp(img.at(x0, y0)[c], img.at(x1, y0)[c], fx);
        double bot = detail::lerp(img.at(x0, y1)[c], img.at(x1, y1)[c], fx);
        out.at(x, y)[c] = detail::clamp_round(detail::lerp(top, bot, fy));
      }
    }
  }
  return out;
}

/// Normalized 3x3 Gaussian weights for sigma = 0.5.
inline const std::array<double, 3>& smooth_kernel_weights() {
  // indexed by squared offset 0, 1, 2; exp(-d^2 / (2 sigma^2)) = exp(-2 d^2)
  static const std::array<double, 3> w = [] {
    std::array<double, 3> raw{1.0, std::exp(-2.0), std::exp(-4.0)};
    double sum = raw[0] + 4 * raw[1] + 4 * raw[2];
    return std::array<double, 3>{raw[0] / sum, raw[1] / sum, raw[2] / sum};
  }();
  return w;
}

/// 3x3 Gaussian smoothing, sigma = 0.5, replicate-border padding.
inline GrayImage smooth(const GrayImage& img) {
  const auto& w = smooth_kernel_weights();
  GrayImage out{img.width, img.height, {}};
  out.pixels.resize(img.pixels.size());
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double acc = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        int sy = std::clamp(y + dy, 0, img.height - 1);
        for (int dx = -1; dx <= 1; ++dx) {
          int sx = std::clamp(x + dx, 0, img.width - 1);
          acc += w[dx * dx + dy * dy] * img.at(sx, sy);
        }
      }
      out.at(x, y) = detail::clamp_round(acc);
    }
  }
  return out;
}

}  // namespace tumorcheck
