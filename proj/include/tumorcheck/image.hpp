#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tumorcheck/errors.hpp"

namespace tumorcheck {

/// 2D grayscale grid, row-major, intensities in [0, 255].
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const { return pixels.size(); }

  static GrayImage filled(int w, int h, std::uint8_t value) {
    return GrayImage{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, value)};
  }
  bool operator==(const GrayImage&) const = default;
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::array<std::uint8_t, 3>> pixels;  // row-major (r, g, b)

  const std::array<std::uint8_t, 3>& at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::array<std::uint8_t, 3>& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  bool operator==(const RgbImage&) const = default;
};

using AnyImage = std::variant<GrayImage, RgbImage>;

namespace detail {

// PNM header scanner: whitespace-separated tokens, '#' starts a comment
// running to end of line.
class PnmScanner {
 public:
  explicit PnmScanner(std::string_view data) : data_(data) {}

  std::string next_token() {
    skip_space_and_comments();
    if (pos_ >= data_.size()) throw Error(Errc::malformed_header, "unexpected end of header");
    std::size_t start = pos_;
    while (pos_ < data_.size() && !is_space(data_[pos_]) && data_[pos_] != '#') ++pos_;
    return std::string(data_.substr(start, pos_ - start));
  }

  int next_int() {
    std::string tok = next_token();
    int v = 0;
    for (char c : tok) {
      if (c < '0' || c > '9') throw Error(Errc::malformed_header, "expected integer, got '" + tok + "'");
      v = v * 10 + (c - '0');
      if (v > 1 << 28) throw Error(Errc::malformed_header, "integer out of range: " + tok);
    }
    if (tok.empty()) throw Error(Errc::malformed_header, "expected integer");
    return v;
  }

  // Raw formats: exactly one whitespace byte separates maxval from data.
  std::size_t raw_data_offset() {
    if (pos_ >= data_.size() || !is_space(data_[pos_]))
      throw Error(Errc::malformed_header, "missing separator before raster data");
    return pos_ + 1;
  }

  std::size_t pos() const { return pos_; }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      if (is_space(data_[pos_])) {
        ++pos_;
      } else if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

inline std::vector<std::uint8_t> read_ascii_samples(PnmScanner& sc, std::size_t count, int maxval) {
  std::vector<std::uint8_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    int v;
    try {
      v = sc.next_int();
    } catch (const Error&) {
      throw Error(Errc::truncated_data, "expected " + std::to_string(count) + " samples, got " + std::to_string(i));
    }
    if (v > maxval) throw Error(Errc::truncated_data, "sample exceeds maxval");
    out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

inline std::vector<std::uint8_t> read_raw_samples(std::string_view data, std::size_t offset, std::size_t count) {
  if (data.size() < offset || data.size() - offset < count)
    throw Error(Errc::truncated_data, "expected " + std::to_string(count) + " raster bytes, got " +
                                          std::to_string(data.size() < offset ? 0 : data.size() - offset));
  const auto* p = reinterpret_cast<const std::uint8_t*>(data.data()) + offset;
  return std::vector<std::uint8_t>(p, p + count);
}

}  // namespace detail

/// Decodes PGM (P2/P5) or PPM (P3/P6) content with maxval <= 255.
inline AnyImage decode_image(std::string_view bytes) {
  detail::PnmScanner sc(bytes);
  std::string magic = sc.next_token();
  if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6")
    throw Error(Errc::malformed_header, "unsupported magic '" + magic + "'");
  int w = sc.next_int();
  int h = sc.next_int();
  if (w < 1 || h < 1) throw Error(Errc::malformed_header, "non-positive dimensions");
  int maxval = sc.next_int();
  if (maxval < 1) throw Error(Errc::malformed_header, "invalid maxval");
  if (maxval > 255) throw Error(Errc::unsupported_maxval, "maxval " + std::to_string(maxval) + " > 255");

  const bool color = magic == "P3" || magic == "P6";
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const std::size_t count = color ? n * 3 : n;

  std::vector<std::uint8_t> samples;
  if (magic == "P2" || magic == "P3") {
    samples = detail::read_ascii_samples(sc, count, maxval);
  } else {
    samples = detail::read_raw_samples(bytes, sc.raw_data_offset(), count);
  }

  if (!color) return GrayImage{w, h, std::move(samples)};
  RgbImage img{w, h, {}};
  img.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    img.pixels[i] = {samples[3 * i], samples[3 * i + 1], samples[3 * i + 2]};
  return img;
}

inline AnyImage load_image(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return decode_image(ss.str());
}

/// Per-pixel luminance round(0.299 R + 0.587 G + 0.114 B), clamped.
inline GrayImage to_grayscale(const RgbImage& img) {
  GrayImage out{img.width, img.height, {}};
  out.pixels.reserve(img.pixels.size());
  for (const auto& p : img.pixels) {
    double y = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    long v = std::lround(y);
    out.pixels.push_back(static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v)));
  }
  return out;
}

inline GrayImage to_gray(const AnyImage& img) {
  if (std::holds_alternative<GrayImage>(img)) return std::get<GrayImage>(img);
  return to_grayscale(std::get<RgbImage>(img));
}

/// P2 when binary is false (human-diffable), P5 otherwise.
inline std::string encode_pgm(const GrayImage& img, bool binary = false) {
  std::ostringstream out;
  out << (binary ? "P5" : "P2") << "\n" << img.width << " " << img.height << "\n255\n";
  if (binary) {
    out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  } else {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        if (x) out << ' ';
        out << static_cast<int>(img.at(x, y));
      }
      out << '\n';
    }
  }
  return out.str();
}

inline void write_pgm(const std::string& path, const GrayImage& img, bool binary = false) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::io_error, "cannot write " + path);
  std::string data = encode_pgm(img, binary);
  f.write(data.data(), static_cast<std::streamsize>(data.size()));
}

inline GrayImage load_gray(const std::string& path) {
  AnyImage img = load_image(path);
  if (!std::holds_alternative<GrayImage>(img))
    throw Error(Errc::malformed_header, path + ": expected grayscale image");
  return std::get<GrayImage>(img);
}

}  // namespace tumorcheck
