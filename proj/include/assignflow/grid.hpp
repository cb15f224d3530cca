#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "assignflow/errors.hpp"

namespace assignflow {

/// Pixel grid with square averaging windows of side 2 * window_radius + 1,
/// clipped at the image border. Nodes are numbered row-major.
class GridGraph {
 public:
  GridGraph(std::size_t height, std::size_t width, std::size_t window_radius = 0)
      : height_(height), width_(width), radius_(window_radius) {
    if (height == 0 || width == 0) throw DomainError("GridGraph: empty grid");
  }

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t window_radius() const noexcept { return radius_; }
  std::size_t size() const noexcept { return height_ * width_; }

  std::size_t index(std::size_t y, std::size_t x) const noexcept { return y * width_ + x; }

  /// {i} plus its window neighbors, sorted row-major.
  std::vector<std::size_t> neighborhood(std::size_t i) const {
    if (i >= size()) throw DomainError("neighborhood: node index out of range");
    const std::size_t y = i / width_, x = i % width_;
    const std::size_t y0 = y >= radius_ ? y - radius_ : 0;
    const std::size_t x0 = x >= radius_ ? x - radius_ : 0;
    const std::size_t y1 = std::min(height_ - 1, y + radius_);
    const std::size_t x1 = std::min(width_ - 1, x + radius_);
    std::vector<std::size_t> out;
    out.reserve((y1 - y0 + 1) * (x1 - x0 + 1));
    for (std::size_t yy = y0; yy <= y1; ++yy)
      for (std::size_t xx = x0; xx <= x1; ++xx) out.push_back(index(yy, xx));
    return out;
  }

 private:
  std::size_t height_;
  std::size_t width_;
  std::size_t radius_;
};

/// Window side length (the odd number users pass, e.g. 5 for 5x5) to radius.
inline std::size_t radius_from_side(std::size_t side) {
  if (side == 0 || side % 2 == 0)
    throw DomainError("window side length must be odd, got " + std::to_string(side));
  return side / 2;
}

/// Square patch of radius r with one weight per offset, stored row-major over
/// (dy, dx) in [-r, r]^2.
struct PatchSupport {
  int radius = 0;
  std::vector<double> weights{1.0};

  int side() const noexcept { return 2 * radius + 1; }
  std::size_t size() const noexcept { return weights.size(); }
  std::size_t offset_index(int dy, int dx) const noexcept {
    return static_cast<std::size_t>((dy + radius) * side() + (dx + radius));
  }
  double weight(int dy, int dx) const noexcept { return weights[offset_index(dy, dx)]; }
};

/// Sampled Gaussian with sigma = (radius + 0.5) / 2, normalized to unit sum.
inline PatchSupport gaussian_patch_weights(int radius) {
  if (radius < 0) throw DomainError("gaussian_patch_weights: negative radius");
  PatchSupport s;
  s.radius = radius;
  s.weights.assign(static_cast<std::size_t>(s.side() * s.side()), 0.0);
  const double sigma = (radius + 0.5) / 2.0;
  double total = 0.0;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx) {
      const double w = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      s.weights[s.offset_index(dy, dx)] = w;
      total += w;
    }
  for (double& w : s.weights) w /= total;
  return s;
}

/// Weights of the patch centered at node i with offsets leaving the image
/// set to zero and the rest rescaled to unit sum.
inline std::vector<double> boundary_renormalize(const PatchSupport& support, std::size_t i,
                                                const GridGraph& g) {
  const long y = static_cast<long>(i / g.width());
  const long x = static_cast<long>(i % g.width());
  const long h = static_cast<long>(g.height()), w = static_cast<long>(g.width());
  if (y >= support.radius && y + support.radius < h && x >= support.radius &&
      x + support.radius < w)
    return support.weights;
  std::vector<double> out(support.size(), 0.0);
  double total = 0.0;
  for (int dy = -support.radius; dy <= support.radius; ++dy)
    for (int dx = -support.radius; dx <= support.radius; ++dx) {
      if (y + dy < 0 || y + dy >= h || x + dx < 0 || x + dx >= w) continue;
      const auto k = support.offset_index(dy, dx);
      out[k] = support.weights[k];
      total += out[k];
    }
  if (total > 0.0)
    for (double& v : out) v /= total;
  return out;
}

}  // namespace assignflow
