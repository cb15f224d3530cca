#pragma once

// Synthesis of an output image from an assignment: expectation of prior
// vectors, Gaussian-weighted fusion of overlapping prior patches, and the
// residual f - u.

#include <functional>
#include <span>
#include <vector>

#include "assignflow/errors.hpp"
#include "assignflow/features.hpp"
#include "assignflow/grid.hpp"
#include "assignflow/matrix.hpp"

namespace assignflow {

/// u_i = sum_j W_ij f*_j. Rows of the result are pixels.
inline Matrix vector_assignment(const AssignmentMatrix& W, const PriorSet& priors) {
  if (priors.is_patch_set()) throw DomainError("vector_assignment: expects vector priors");
  if (W.cols() != priors.size()) throw DimensionError("vector_assignment: one column per prior required");
  const std::size_t d = priors.dimension();
  Matrix u(W.rows(), d);
  for (std::size_t i = 0; i < W.rows(); ++i)
    for (std::size_t j = 0; j < W.cols(); ++j) {
      const double w = W(i, j);
      const auto& f = priors.items[j];
      for (std::size_t k = 0; k < d; ++k) u(i, k) += w * f[k];
    }
  return u;
}

/// Values of the prior patch that label `label` stands for at pixel `pixel`
/// (side^2 * channels, row-major offsets).
using PriorPatchLookup = std::function<std::span<const double>(std::size_t pixel, std::size_t label)>;

/// Fuses, at every pixel i, the expected prior patches of all patches
/// covering i, weighted by the patch support weight of i's position inside
/// each patch. Weights are renormalized over the patches that exist near the
/// image border; in the interior the normalization is exactly one.
inline Matrix patch_assignment(const AssignmentMatrix& W, const GridGraph& g, const PatchSupport& support,
                               std::size_t channels, const PriorPatchLookup& prior_patch) {
  if (W.rows() != g.size()) throw DimensionError("patch_assignment: rows must match grid nodes");
  const int r = support.radius;
  const long h = static_cast<long>(g.height()), w = static_cast<long>(g.width());
  Matrix u(W.rows(), channels);
  for (std::size_t i = 0; i < W.rows(); ++i) {
    const auto weights = boundary_renormalize(support, i, g);
    const long y = static_cast<long>(i / g.width()), x = static_cast<long>(i % g.width());
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        const double wo = weights[support.offset_index(dy, dx)];
        if (wo == 0.0) continue;
        const long yy = y + dy, xx = x + dx;
        if (yy < 0 || xx < 0 || yy >= h || xx >= w) continue;
        const std::size_t j = static_cast<std::size_t>(yy * w + xx);
        // pixel i sits at offset (-dy, -dx) of the patch centered at j
        const std::size_t at = support.offset_index(-dy, -dx) * channels;
        for (std::size_t k = 0; k < W.cols(); ++k) {
          const double wjk = W(j, k);
          const auto patch = prior_patch(j, k);
          for (std::size_t c = 0; c < channels; ++c) u(i, c) += wo * wjk * patch[at + c];
        }
      }
  }
  return u;
}

/// Plain patch dictionary: label k is prior item k everywhere.
inline Matrix patch_assignment(const AssignmentMatrix& W, const PriorSet& priors, const GridGraph& g,
                               const PatchSupport& support) {
  if (!priors.is_patch_set()) throw DomainError("patch_assignment: expects patch priors");
  if (priors.patch_radius != support.radius) throw DimensionError("patch_assignment: support radius mismatch");
  if (W.cols() != priors.size()) throw DimensionError("patch_assignment: one column per prior required");
  return patch_assignment(W, g, support, priors.channels, [&](std::size_t, std::size_t k) {
    return std::span<const double>(priors.items[k]);
  });
}

/// v = f - u; zero at missing pixels.
inline Matrix decompose(const FeatureImage& f, const Matrix& u) {
  if (u.rows() != f.pixels() || u.cols() != f.channels) throw DimensionError("decompose: shape mismatch");
  Matrix v(u.rows(), u.cols());
  for (std::size_t i = 0; i < u.rows(); ++i) {
    if (f.is_missing(i)) continue;
    const auto fi = f.pixel(i);
    for (std::size_t c = 0; c < u.cols(); ++c) v(i, c) = fi[c] - u(i, c);
  }
  return v;
}

}  // namespace assignflow
