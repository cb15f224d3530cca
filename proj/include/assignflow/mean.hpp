#pragma once

// Riemannian (Karcher) means on the simplex and the normalized geometric mean
// that approximates them.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "assignflow/errors.hpp"
#include "assignflow/simplex.hpp"

namespace assignflow {

struct MeanConfig {
  double tolerance = 1e-3;  // sup-norm of the averaged tangent vector
  int max_iterations = 100;
  std::optional<std::vector<double>> weights;  // uniform when absent
  std::optional<std::vector<double>> initial;  // barycenter when absent
};

namespace detail {

inline std::vector<double> resolve_weights(std::size_t count,
                                           const std::optional<std::vector<double>>& weights) {
  if (!weights) return std::vector<double>(count, 1.0 / static_cast<double>(count));
  if (weights->size() != count) throw DimensionError("mean: one weight per point required");
  double total = 0.0;
  for (double w : *weights) {
    if (w < 0.0) throw DomainError("mean: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("mean: weights must sum to 1");
  return *weights;
}

template <typename Points>
std::size_t common_dimension(const Points& points) {
  if (points.empty()) throw DimensionError("mean: at least one point required");
  const std::size_t n = std::size(points[0]);
  for (const auto& p : points)
    if (std::size(p) != n) throw DimensionError("mean: points differ in dimension");
  return n;
}

/// exp(acc) normalized to unit sum, shifted by max(acc) first. Overwrites acc.
inline void normalize_log_weights(std::span<double> acc) {
  const double shift = *std::max_element(acc.begin(), acc.end());
  double total = 0.0;
  for (double& x : acc) {
    x = std::exp(x - shift);
    total += x;
  }
  for (double& x : acc) x /= total;
}

}  // namespace detail

/// Exact Riemannian mean by the fixed-point iteration
///   v = sum_i w_i Exp_p^{-1}(p_i),  p <- Exp_p(v),
/// started at the barycenter. A step whose geodesic would leave the simplex
/// is halved until it stays inside. Returns the first iterate p at which
/// ||v||_inf <= tolerance, so the optimality residual is bounded at the
/// returned point. Throws NonConvergenceError after max_iterations.
template <typename Points>
simplex::Vector karcher_mean(const Points& points, const MeanConfig& cfg = {}) {
  const std::size_t n = detail::common_dimension(points);
  const auto w = detail::resolve_weights(std::size(points), cfg.weights);
  if (cfg.tolerance <= 0.0) throw DomainError("karcher_mean: tolerance must be positive");

  simplex::Vector p = cfg.initial ? *cfg.initial : simplex::barycenter(n);
  if (p.size() != n) throw DimensionError("karcher_mean: initial point has wrong dimension");
  simplex::Vector v(n);
  for (int it = 0; it <= cfg.max_iterations; ++it) {
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t k = 0; k < std::size(points); ++k) {
      if (w[k] == 0.0) continue;
      const auto log = simplex::inverse_exp_map(p, points[k]);
      for (std::size_t j = 0; j < n; ++j) v[j] += w[k] * log[j];
    }
    double sup = 0.0;
    for (double x : v) sup = std::max(sup, std::abs(x));
    if (sup <= cfg.tolerance) return p;
    if (it == cfg.max_iterations) break;
    for (int halvings = 0;; ++halvings) {
      try {
        p = simplex::exp_map(p, v);
        break;
      } catch (const DomainError&) {
        if (halvings == 60) throw NonConvergenceError("karcher_mean: step cannot stay in the simplex", std::move(p));
        for (double& x : v) x *= 0.5;
      }
    }
  }
  throw NonConvergenceError("karcher_mean: no convergence within max_iterations", std::move(p));
}

/// Componentwise weighted geometric mean, normalized to unit sum. Evaluated in
/// the log domain with a fixed summation order.
template <typename Points>
simplex::Vector geometric_mean_approx(const Points& points,
                                      const std::optional<std::vector<double>>& weights = {}) {
  const std::size_t n = detail::common_dimension(points);
  const auto w = detail::resolve_weights(std::size(points), weights);
  for (std::size_t k = 0; k < w.size(); ++k)
    if (w[k] == 1.0) return simplex::Vector(std::begin(points[k]), std::end(points[k]));
  simplex::Vector acc(n, 0.0);
  for (std::size_t k = 0; k < std::size(points); ++k) {
    if (w[k] == 0.0) continue;
    const auto& p = points[k];
    for (std::size_t j = 0; j < n; ++j) acc[j] += w[k] * std::log(p[j]);
  }
  detail::normalize_log_weights(acc);
  return acc;
}

}  // namespace assignflow
