#pragma once

// 8-bit PGM/PPM reading (P2, P3, P5, P6) and binary writing (P5, P6).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "assignflow/errors.hpp"
#include "assignflow/features.hpp"

namespace assignflow::pnm {

struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 1;  // 1 (gray) or 3 (rgb)
  std::vector<std::uint8_t> data;

  friend bool operator==(const Image&, const Image&) = default;
};

namespace detail {

inline void skip_space_and_comments(std::istream& in) {
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

inline long read_header_int(std::istream& in) {
  skip_space_and_comments(in);
  long v = -1;
  if (!(in >> v) || v < 0) throw FormatError("pnm: malformed header");
  return v;
}

}  // namespace detail

inline Image read(std::istream& in) {
  char magic[2] = {0, 0};
  if (!in.read(magic, 2) || magic[0] != 'P') throw FormatError("pnm: missing magic number");
  const char kind = magic[1];
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6')
    throw FormatError(std::string("pnm: unsupported format P") + kind);
  Image img;
  img.channels = (kind == '3' || kind == '6') ? 3 : 1;
  img.width = static_cast<std::size_t>(detail::read_header_int(in));
  img.height = static_cast<std::size_t>(detail::read_header_int(in));
  const long maxval = detail::read_header_int(in);
  if (img.width == 0 || img.height == 0) throw FormatError("pnm: empty image");
  if (maxval <= 0 || maxval > 255) throw FormatError("pnm: only 8-bit images are supported");
  const std::size_t count = img.width * img.height * img.channels;
  img.data.resize(count);
  if (kind == '5' || kind == '6') {
    in.get();  // single whitespace after maxval
    if (!in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(count)))
      throw FormatError("pnm: truncated pixel data");
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      const long v = detail::read_header_int(in);
      if (v > maxval) throw FormatError("pnm: sample exceeds maxval");
      img.data[k] = static_cast<std::uint8_t>(v);
    }
  }
  if (maxval != 255)
    for (auto& v : img.data) v = static_cast<std::uint8_t>(std::lround(v * 255.0 / maxval));
  return img;
}

inline Image read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return read(in);
}

inline void write(std::ostream& out, const Image& img) {
  if (img.channels != 1 && img.channels != 3) throw DimensionError("pnm: 1 or 3 channels required");
  out << (img.channels == 3 ? "P6" : "P5") << '\n' << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
}

inline void write_file(const std::string& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  write(out, img);
}

/// Samples scaled to [0, 1].
inline FeatureImage to_features(const Image& img) {
  FeatureImage f(img.height, img.width, img.channels);
  std::transform(img.data.begin(), img.data.end(), f.values.begin(), [](std::uint8_t v) { return v / 255.0; });
  return f;
}

inline std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

/// Rows of `values` are pixels; values are clamped to [0, 1] and quantized.
inline Image from_rows(std::size_t height, std::size_t width, std::size_t channels,
                       const std::vector<double>& values) {
  if (values.size() != height * width * channels) throw DimensionError("pnm: value count mismatch");
  Image img{width, height, channels, std::vector<std::uint8_t>(values.size())};
  std::transform(values.begin(), values.end(), img.data.begin(), to_byte);
  return img;
}

/// Label map as gray levels, label k of n mapped to round(255 k / (n - 1)).
inline Image label_image(std::size_t height, std::size_t width, const std::vector<std::size_t>& labels,
                         std::size_t label_count) {
  Image img{width, height, 1, std::vector<std::uint8_t>(labels.size())};
  const double scale = label_count > 1 ? 255.0 / static_cast<double>(label_count - 1) : 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    img.data[i] = static_cast<std::uint8_t>(std::lround(static_cast<double>(labels[i]) * scale));
  return img;
}

/// Missing-data flags from a gray mask: 0 marks a missing pixel.
inline std::vector<std::uint8_t> mask_from_image(const Image& mask) {
  if (mask.channels != 1) throw FormatError("mask must be a gray image");
  std::vector<std::uint8_t> missing(mask.data.size());
  std::transform(mask.data.begin(), mask.data.end(), missing.begin(),
                 [](std::uint8_t v) { return static_cast<std::uint8_t>(v == 0 ? 1 : 0); });
  return missing;
}

}  // namespace assignflow::pnm
