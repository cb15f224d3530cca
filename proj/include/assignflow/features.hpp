#pragma once

// Feature images, prior sets and the distance functions that feed the
// distance matrix D_ij = d(f_i, f*_j) / rho.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "assignflow/errors.hpp"
#include "assignflow/grid.hpp"
#include "assignflow/matrix.hpp"

namespace assignflow {

/// Per-pixel feature vectors (row-major pixels, interleaved channels) with an
/// optional missing-data mask for inpainting.
struct FeatureImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> missing;  // empty, or one flag per pixel

  FeatureImage() = default;
  FeatureImage(std::size_t h, std::size_t w, std::size_t c, double fill = 0.0)
      : height(h), width(w), channels(c), values(h * w * c, fill) {}

  std::size_t pixels() const noexcept { return height * width; }
  std::span<const double> pixel(std::size_t i) const { return {values.data() + i * channels, channels}; }
  std::span<double> pixel(std::size_t i) { return {values.data() + i * channels, channels}; }
  bool is_missing(std::size_t i) const { return !missing.empty() && missing[i] != 0; }

  void validate() const {
    if (values.size() != height * width * channels)
      throw DimensionError("FeatureImage: value count does not match dimensions");
    if (!missing.empty() && missing.size() != height * width)
      throw DimensionError("FeatureImage: mask size does not match image");
  }
};

/// Ordered prior features. Items are plain vectors, or square patches of
/// radius patch_radius (row-major offsets, interleaved channels) when
/// patch_radius >= 0. class_of optionally groups items into labels.
struct PriorSet {
  std::vector<std::vector<double>> items;
  std::vector<std::size_t> class_of;
  int patch_radius = -1;
  std::size_t channels = 0;

  std::size_t size() const noexcept { return items.size(); }
  bool is_patch_set() const noexcept { return patch_radius >= 0; }
  std::size_t dimension() const { return items.empty() ? 0 : items.front().size(); }

  std::size_t class_count() const {
    if (class_of.empty()) return items.size();
    return *std::max_element(class_of.begin(), class_of.end()) + 1;
  }

  std::vector<std::size_t> members(std::size_t c) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < items.size(); ++k)
      if ((class_of.empty() ? k : class_of[k]) == c) out.push_back(k);
    return out;
  }

  void validate() const {
    if (items.empty()) throw DomainError("PriorSet: no items");
    const std::size_t d = items.front().size();
    for (const auto& it : items)
      if (it.size() != d) throw DimensionError("PriorSet: items differ in dimension");
    if (is_patch_set()) {
      const std::size_t side = static_cast<std::size_t>(2 * patch_radius + 1);
      if (channels == 0 || d != side * side * channels)
        throw DimensionError("PriorSet: patch size does not match radius and channels");
    }
    if (!class_of.empty()) {
      if (class_of.size() != items.size())
        throw DimensionError("PriorSet: one class index per item required");
      for (std::size_t c = 0; c < class_count(); ++c)
        if (members(c).empty()) throw DomainError("PriorSet: class indices must be contiguous");
    }
  }
};

using VectorMetric = std::function<double(std::span<const double>, std::span<const double>)>;

inline void require_equal_dims(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DimensionError(std::string(what) + ": dimension mismatch");
}

/// (1/d) ||f - f*||_1.
inline double scaled_l1_distance(std::span<const double> f, std::span<const double> f_star) {
  require_equal_dims(f.size(), f_star.size(), "scaled_l1_distance");
  if (f.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += std::abs(f[k] - f_star[k]);
  return s / static_cast<double>(f.size());
}

/// (1/2) ||f - f*||_1. On one-hot encoded labels this is the discrete metric:
/// 0 for equal labels, 1 otherwise.
inline double half_l1_distance(std::span<const double> f, std::span<const double> f_star) {
  require_equal_dims(f.size(), f_star.size(), "half_l1_distance");
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += std::abs(f[k] - f_star[k]);
  return s / 2.0;
}

/// D_ij = metric(f_i, f*_j) / rho. Missing pixels get a constant (zero) row,
/// which the likelihood map turns into L_i = W_i.
inline DistanceMatrix build_distance_matrix(const FeatureImage& img, const PriorSet& priors,
                                            const VectorMetric& metric, double rho) {
  if (!(rho > 0.0)) throw DomainError("build_distance_matrix: rho must be positive");
  img.validate();
  priors.validate();
  if (priors.is_patch_set()) throw DomainError("build_distance_matrix: expects vector priors");
  DistanceMatrix D(img.pixels(), priors.size(), 0.0);
  for (std::size_t i = 0; i < img.pixels(); ++i) {
    if (img.is_missing(i)) continue;
    for (std::size_t j = 0; j < priors.size(); ++j) D(i, j) = metric(img.pixel(i), priors.items[j]) / rho;
  }
  return D;
}

/// Uniform grid of steps^3 colors in [0,1]^3, blue varying fastest.
inline PriorSet color_cube_priors(int steps) {
  if (steps < 2) throw DomainError("color_cube_priors: steps must be >= 2");
  PriorSet p;
  const double h = 1.0 / (steps - 1);
  for (int r = 0; r < steps; ++r)
    for (int g = 0; g < steps; ++g)
      for (int b = 0; b < steps; ++b) p.items.push_back({r * h, g * h, b * h});
  return p;
}

// ---------------------------------------------------------------------------
// Patches

/// Square image patch; offsets outside the image are flagged invalid.
struct Patch {
  int radius = 0;
  std::size_t channels = 1;
  std::vector<double> values;       // side^2 * channels
  std::vector<std::uint8_t> valid;  // side^2

  std::size_t offsets() const noexcept { return valid.size(); }
  std::size_t valid_count() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
  }
};

/// Full-support patch from raw values (prior items).
inline Patch make_patch(std::vector<double> values, int radius, std::size_t channels) {
  const std::size_t side = static_cast<std::size_t>(2 * radius + 1);
  if (values.size() != side * side * channels) throw DimensionError("make_patch: size mismatch");
  Patch p;
  p.radius = radius;
  p.channels = channels;
  p.values = std::move(values);
  p.valid.assign(side * side, 1);
  return p;
}

inline Patch extract_patch(const FeatureImage& img, std::size_t i, int radius) {
  const std::size_t side = static_cast<std::size_t>(2 * radius + 1);
  Patch p;
  p.radius = radius;
  p.channels = img.channels;
  p.values.assign(side * side * img.channels, 0.0);
  p.valid.assign(side * side, 0);
  const long y = static_cast<long>(i / img.width), x = static_cast<long>(i % img.width);
  std::size_t k = 0;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx, ++k) {
      const long yy = y + dy, xx = x + dx;
      if (yy < 0 || xx < 0 || yy >= static_cast<long>(img.height) || xx >= static_cast<long>(img.width))
        continue;
      p.valid[k] = 1;
      const auto px = img.pixel(static_cast<std::size_t>(yy) * img.width + static_cast<std::size_t>(xx));
      std::copy(px.begin(), px.end(), p.values.begin() + static_cast<long>(k * img.channels));
    }
  return p;
}

/// Mean absolute deviation over the offsets valid in the image patch.
inline double patch_l1_distance(const Patch& img_patch, std::span<const double> prior_values) {
  if (prior_values.size() != img_patch.values.size())
    throw DimensionError("patch_l1_distance: support mismatch");
  double s = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < img_patch.offsets(); ++k) {
    if (!img_patch.valid[k]) continue;
    for (std::size_t c = 0; c < img_patch.channels; ++c) {
      const std::size_t idx = k * img_patch.channels + c;
      s += std::abs(img_patch.values[idx] - prior_values[idx]);
      ++count;
    }
  }
  return count == 0 ? 0.0 : s / static_cast<double>(count);
}

inline double patch_l1_distance(const Patch& a, const Patch& b) {
  if (a.valid != b.valid) throw DimensionError("patch_l1_distance: support mismatch");
  return patch_l1_distance(a, std::span<const double>(b.values));
}

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) throw DomainError("median of empty set");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline std::vector<double> valid_scalar_values(const Patch& p, const char* what) {
  if (p.channels != 1) throw DimensionError(std::string(what) + ": scalar patches required");
  std::vector<double> out;
  for (std::size_t k = 0; k < p.offsets(); ++k)
    if (p.valid[k]) out.push_back(p.values[k]);
  return out;
}

}  // namespace detail

struct TwoValueLevels {
  double low = 0.0;
  double high = 0.0;
};

/// Median of the values below the patch median, and of the values at or
/// above it. A side with no values falls back to the patch median, so a
/// constant patch gives low == high == that constant.
inline TwoValueLevels two_value_levels(const Patch& img_patch) {
  const auto vals = detail::valid_scalar_values(img_patch, "two_value_levels");
  const double med = detail::median(vals);
  std::vector<double> lo, hi;
  for (double v : vals) (v < med ? lo : hi).push_back(v);
  return {lo.empty() ? med : detail::median(lo), hi.empty() ? med : detail::median(hi)};
}

/// Binary template (entries <= 0.5 select the low slot) filled with levels.
inline std::vector<double> adapt_two_value_template(std::span<const double> binary_template,
                                                    TwoValueLevels levels) {
  std::vector<double> out(binary_template.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = binary_template[k] <= 0.5 ? levels.low : levels.high;
  return out;
}

inline double two_value_adapted_distance(const Patch& img_patch,
                                         std::span<const double> binary_template) {
  const auto adapted = adapt_two_value_template(binary_template, two_value_levels(img_patch));
  return patch_l1_distance(img_patch, std::span<const double>(adapted));
}

/// Constant level for the constant prior patch: dark if the patch median is
/// at most the midpoint of the two levels, bright otherwise.
inline double fingerprint_level(const Patch& img_patch, double f_dark, double f_bright) {
  const double med = detail::median(detail::valid_scalar_values(img_patch, "fingerprint_level"));
  return med <= 0.5 * (f_dark + f_bright) ? f_dark : f_bright;
}

inline double fingerprint_constant_distance(const Patch& img_patch, double f_dark, double f_bright) {
  if (!(f_dark < f_bright)) throw DomainError("fingerprint_constant_distance: need f_dark < f_bright");
  const double level = fingerprint_level(img_patch, f_dark, f_bright);
  const std::vector<double> constant(img_patch.values.size(), level);
  return patch_l1_distance(img_patch, std::span<const double>(constant));
}

/// How prior patches are matched to image patches.
enum class PatchAdaptation {
  none,        // plain mean absolute deviation
  two_value,   // binary templates filled with the patch's low/high levels
  fingerprint  // constant priors snap to the dark or bright level
};

struct PatchDistanceOptions {
  PatchAdaptation adaptation = PatchAdaptation::none;
  double f_dark = 0.0;
  double f_bright = 1.0;
};

inline bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

/// Prior item as it is compared against img_patch, after adaptation.
inline std::vector<double> effective_prior(const Patch& img_patch, std::span<const double> prior,
                                           const PatchDistanceOptions& opts) {
  switch (opts.adaptation) {
    case PatchAdaptation::two_value:
      return adapt_two_value_template(prior, two_value_levels(img_patch));
    case PatchAdaptation::fingerprint:
      if (is_constant(prior))
        return std::vector<double>(prior.size(), fingerprint_level(img_patch, opts.f_dark, opts.f_bright));
      break;
    case PatchAdaptation::none:
      break;
  }
  return {prior.begin(), prior.end()};
}

inline double adapted_patch_distance(const Patch& img_patch, std::span<const double> prior,
                                     const PatchDistanceOptions& opts) {
  const auto eff = effective_prior(img_patch, prior, opts);
  return patch_l1_distance(img_patch, std::span<const double>(eff));
}

struct ClassMatch {
  double distance = 0.0;
  std::size_t item = 0;  // member attaining the minimum (smallest index on ties)
};

/// Minimum distance over the members of class class_id.
inline ClassMatch class_distance(const Patch& img_patch, const PriorSet& priors, std::size_t class_id,
                                 const PatchDistanceOptions& opts = {}) {
  const auto mem = priors.members(class_id);
  if (mem.empty()) throw DomainError("class_distance: empty class");
  ClassMatch best{std::numeric_limits<double>::infinity(), mem.front()};
  for (std::size_t k : mem) {
    const double d = adapted_patch_distance(img_patch, priors.items[k], opts);
    if (d < best.distance) best = {d, k};
  }
  return best;
}

/// Distances over patch labels (classes, or items when ungrouped) plus the
/// best-matching item per (pixel, label), needed to synthesize outputs.
struct PatchDistances {
  DistanceMatrix D;
  std::vector<std::size_t> representative;  // pixels x labels, row-major
};

inline PatchDistances build_patch_distance_matrix(const FeatureImage& img, const PriorSet& priors,
                                                  const PatchDistanceOptions& opts, double rho) {
  if (!(rho > 0.0)) throw DomainError("build_patch_distance_matrix: rho must be positive");
  img.validate();
  priors.validate();
  if (!priors.is_patch_set()) throw DomainError("build_patch_distance_matrix: expects patch priors");
  if (priors.channels != img.channels)
    throw DimensionError("build_patch_distance_matrix: channel count mismatch");
  const std::size_t labels = priors.class_count();
  PatchDistances out{DistanceMatrix(img.pixels(), labels), std::vector<std::size_t>(img.pixels() * labels)};
  for (std::size_t i = 0; i < img.pixels(); ++i) {
    const Patch p = extract_patch(img, i, priors.patch_radius);
    for (std::size_t c = 0; c < labels; ++c) {
      const auto m = class_distance(p, priors, c, opts);
      out.D(i, c) = m.distance / rho;
      out.representative[i * labels + c] = m.item;
    }
  }
  return out;
}

}  // namespace assignflow
