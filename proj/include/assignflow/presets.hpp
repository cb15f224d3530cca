#pragma once

// Synthetic inputs for the bundled experiments. Every generator is
// deterministic given its seed.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "assignflow/features.hpp"

namespace assignflow::presets {

/// Piecewise-constant label image with label noise. Features are one-hot
/// (vertex-encoded) so that all labels are at unit half-L1 distance.
struct VertexLabelInstance {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t labels = 0;
  std::vector<std::size_t> truth;
  std::vector<std::size_t> observed;
  FeatureImage features;  // one-hot of `observed`
  PriorSet priors;        // unit vectors e_0 ... e_{labels-1}
};

inline std::vector<double> one_hot(std::size_t k, std::size_t n) {
  std::vector<double> v(n, 0.0);
  v[k] = 1.0;
  return v;
}

/// Voronoi partition of `labels` random seeds kept at least `min_spacing`
/// pixels apart, so that no region degenerates into a sliver; a
/// `noise_fraction` share of the pixels is overwritten by uniformly random
/// labels. Throws DomainError when the seeds cannot be placed.
inline VertexLabelInstance vertex_label_instance(std::size_t height = 64, std::size_t width = 64,
                                                 std::size_t labels = 31, double noise_fraction = 0.2,
                                                 std::uint64_t seed = 7, double min_spacing = 9.0) {
  VertexLabelInstance inst;
  inst.height = height;
  inst.width = width;
  inst.labels = labels;
  std::mt19937_64 rng(seed);
  const std::size_t m = height * width;

  std::vector<std::size_t> cells(m);
  for (std::size_t i = 0; i < m; ++i) cells[i] = i;
  std::shuffle(cells.begin(), cells.end(), rng);
  std::vector<std::size_t> seeds;
  for (std::size_t c : cells) {
    if (seeds.size() == labels) break;
    const double y = static_cast<double>(c / width), x = static_cast<double>(c % width);
    const bool near = std::any_of(seeds.begin(), seeds.end(), [&](std::size_t s) {
      return std::hypot(y - static_cast<double>(s / width), x - static_cast<double>(s % width)) < min_spacing;
    });
    if (!near) seeds.push_back(c);
  }
  if (seeds.size() < labels) throw DomainError("vertex_label_instance: seeds do not fit at this spacing");

  inst.truth.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double y = static_cast<double>(i / width), x = static_cast<double>(i % width);
    double best = 1e300;
    for (std::size_t k = 0; k < labels; ++k) {
      const double sy = static_cast<double>(seeds[k] / width), sx = static_cast<double>(seeds[k] % width);
      const double d = (y - sy) * (y - sy) + (x - sx) * (x - sx);
      if (d < best) {
        best = d;
        inst.truth[i] = k;
      }
    }
  }

  inst.observed = inst.truth;
  std::shuffle(cells.begin(), cells.end(), rng);
  const auto noisy = static_cast<std::size_t>(std::lround(noise_fraction * static_cast<double>(m)));
  std::uniform_int_distribution<std::size_t> pick(0, labels - 1);
  for (std::size_t k = 0; k < noisy; ++k) inst.observed[cells[k]] = pick(rng);

  inst.features = FeatureImage(height, width, labels);
  for (std::size_t i = 0; i < m; ++i) inst.features.values[i * labels + inst.observed[i]] = 1.0;
  for (std::size_t k = 0; k < labels; ++k) inst.priors.items.push_back(one_hot(k, labels));
  return inst;
}

/// Distinct 8-bit colors for rendering up to 64 labels (a 4x4x4 cube walk).
inline std::vector<std::array<std::uint8_t, 3>> label_palette(std::size_t n) {
  std::vector<std::array<std::uint8_t, 3>> out;
  const std::uint8_t levels[4] = {0, 85, 170, 255};
  for (std::size_t k = 0; k < 64 && out.size() < n; ++k) {
    const std::size_t j = (k * 37) % 64;  // scramble so neighbors differ strongly
    out.push_back({levels[j / 16], levels[(j / 4) % 4], levels[j % 4]});
  }
  return out;
}

/// Three 120-degree wedges (red, green, blue) meeting at a point inside a
/// disk of missing data.
struct InpaintingInstance {
  FeatureImage image;  // missing pixels carry grey
  std::vector<std::size_t> truth;
  PriorSet priors;
};

inline InpaintingInstance triple_point(std::size_t size = 48, double disk_radius = 10.0) {
  InpaintingInstance inst;
  inst.image = FeatureImage(size, size, 3);
  inst.image.missing.assign(size * size, 0);
  inst.truth.resize(size * size);
  inst.priors.items = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
  // Junction slightly off the pixel lattice so no pixel is equidistant from
  // all three wedges.
  const double cy = size / 2.0 - 0.37, cx = size / 2.0 - 0.21;
  const double sector = 2.0 * std::numbers::pi / 3.0;
  for (std::size_t i = 0; i < size * size; ++i) {
    const double dy = static_cast<double>(i / size) - cy, dx = static_cast<double>(i % size) - cx;
    double a = std::atan2(dy, dx) + std::numbers::pi / 2.0;
    a = std::fmod(a + 2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
    const auto k = std::min<std::size_t>(2, static_cast<std::size_t>(a / sector));
    inst.truth[i] = k;
    auto px = inst.image.pixel(i);
    if (std::hypot(dy, dx) <= disk_radius) {
      inst.image.missing[i] = 1;
      std::fill(px.begin(), px.end(), 0.5);
    } else {
      std::copy(inst.priors.items[k].begin(), inst.priors.items[k].end(), px.begin());
    }
  }
  return inst;
}

/// RGB image of independent uniform 8-bit samples, scaled to [0, 1].
inline FeatureImage uniform_noise(std::size_t height = 64, std::size_t width = 64, std::uint64_t seed = 3) {
  FeatureImage f(height, width, 3);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> byte(0, 255);
  for (double& v : f.values) v = byte(rng) / 255.0;
  return f;
}

/// Scalar patch dictionary together with an image it is meant to explain.
struct PatchInstance {
  FeatureImage image;
  PriorSet priors;
  PatchDistanceOptions options;
  std::vector<std::string> class_names;
};

/// Tile pattern: bright tiles separated by dark grout lines, rows of tiles
/// shifted by half a tile. The dictionary holds every translation of one
/// binary template; distances adapt its two levels to the data.
inline PatchInstance roof(std::size_t height = 40, std::size_t width = 40, int radius = 2,
                          std::uint64_t seed = 11) {
  constexpr int kRow = 5, kCol = 8;
  auto grout = [](long y, long x) {
    const long band = ((y % kRow) + kRow) % kRow;
    const long shift = (((y / kRow) % 2) + 2) % 2 ? kCol / 2 : 0;
    const long col = (((x + shift) % kCol) + kCol) % kCol;
    return band == 0 || col == 0;
  };
  PatchInstance inst;
  inst.options.adaptation = PatchAdaptation::two_value;
  inst.priors.patch_radius = radius;
  inst.priors.channels = 1;
  std::set<std::vector<double>> seen;
  for (int ty = 0; ty < 2 * kRow; ++ty)
    for (int tx = 0; tx < kCol; ++tx) {
      std::vector<double> t;
      for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) t.push_back(grout(ty + dy, tx + dx) ? 0.0 : 1.0);
      if (seen.insert(t).second) inst.priors.items.push_back(std::move(t));
    }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.06);
  std::uniform_int_distribution<int> jitter(-1, 1);
  inst.image = FeatureImage(height, width, 1);
  std::vector<int> row_jitter((height + kRow - 1) / kRow + 1);
  for (auto& j : row_jitter) j = jitter(rng);
  for (std::size_t i = 0; i < height * width; ++i) {
    const long y = static_cast<long>(i / width), x = static_cast<long>(i % width);
    const double light = 0.35 + 0.3 * static_cast<double>(x + y) / static_cast<double>(height + width);
    const double level = grout(y, x + row_jitter[static_cast<std::size_t>(y / kRow)]) ? light - 0.25 : light + 0.25;
    inst.image.values[i] = std::clamp(level + noise(rng), 0.0, 1.0);
  }
  return inst;
}

/// Concentric ridge pattern with a dictionary of 12 oriented bright-to-dark
/// transitions (each class holds its translations) and one constant class.
inline PatchInstance fingerprint(std::size_t height = 48, std::size_t width = 48, int radius = 1,
                                 std::uint64_t seed = 5) {
  PatchInstance inst;
  inst.options = {PatchAdaptation::fingerprint, 0.2, 0.8};
  inst.priors.patch_radius = radius;
  inst.priors.channels = 1;
  const double dark = inst.options.f_dark, bright = inst.options.f_bright;
  for (std::size_t c = 0; c < 12; ++c) {
    const double th = static_cast<double>(c) * std::numbers::pi / 6.0;
    std::set<std::vector<double>> seen;
    for (int step = -2 * radius; step <= 2 * radius; ++step) {
      const double t = 0.5 * step;
      std::vector<double> patch;
      for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
          patch.push_back(dx * std::cos(th) + dy * std::sin(th) < t ? bright : dark);
      if (is_constant(patch) || !seen.insert(patch).second) continue;
      inst.priors.items.push_back(std::move(patch));
      inst.priors.class_of.push_back(c);
    }
    inst.class_names.push_back(std::to_string(30 * c) + "deg");
  }
  const std::size_t side = static_cast<std::size_t>(2 * radius + 1);
  inst.priors.items.emplace_back(side * side, 1.0);
  inst.priors.class_of.push_back(12);
  inst.class_names.push_back("constant");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.05);
  inst.image = FeatureImage(height, width, 1);
  const double cy = 0.45 * static_cast<double>(height), cx = 0.55 * static_cast<double>(width);
  for (std::size_t i = 0; i < height * width; ++i) {
    const double y = static_cast<double>(i / width), x = static_cast<double>(i % width);
    const double r = std::hypot(y - cy, (x - cx) * 0.8);
    const double ridge = std::sin(2.0 * std::numbers::pi * r / 7.0);
    const double level = ridge > 0 ? bright : dark;
    inst.image.values[i] = std::clamp(0.85 * level + 0.15 * 0.5 * (1.0 + ridge) + noise(rng), 0.0, 1.0);
  }
  return inst;
}

}  // namespace assignflow::presets
