#pragma once

// Fisher-Rao geometry of the open probability simplex.
//
// Points are strictly positive vectors with unit sum, tangent vectors have
// zero sum. The sphere map p -> 2 sqrt(p) is an isometry onto part of the
// radius-2 sphere; distances and geodesics below are its pull-backs.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "assignflow/errors.hpp"

namespace assignflow::simplex {

using Vector = std::vector<double>;
using ConstView = std::span<const double>;

/// Below this value of 1 - <sqrt p, sqrt q> the inverse exponential map
/// switches to its Taylor expansion.
inline constexpr double kLogTaylorThreshold = 1e-3;

namespace detail {

inline void require_same_size(ConstView a, ConstView b, const char* what) {
  if (a.size() != b.size())
    throw DimensionError(std::string(what) + ": size " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
}

inline void require_positive(ConstView p, const char* what) {
  for (double x : p)
    if (!(x > 0.0)) throw DomainError(std::string(what) + ": point has a non-positive entry");
}

// <sqrt p, sqrt q>, the cosine of half the Fisher-Rao distance.
inline double bhattacharyya(ConstView p, ConstView q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::sqrt(p[i] * q[i]);
  return s;
}

}  // namespace detail

inline Vector barycenter(std::size_t n) { return Vector(n, 1.0 / static_cast<double>(n)); }

/// <u, v>_p = sum u_i v_i / p_i.
inline double fisher_rao_inner(ConstView p, ConstView u, ConstView v) {
  detail::require_same_size(p, u, "fisher_rao_inner");
  detail::require_same_size(p, v, "fisher_rao_inner");
  detail::require_positive(p, "fisher_rao_inner");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += u[i] * v[i] / p[i];
  return s;
}

inline double fisher_rao_norm(ConstView p, ConstView v) {
  return std::sqrt(std::max(0.0, fisher_rao_inner(p, v, v)));
}

inline Vector sphere_map(ConstView p) {
  Vector s(p.size());
  std::transform(p.begin(), p.end(), s.begin(), [](double x) { return 2.0 * std::sqrt(x); });
  return s;
}

inline Vector sphere_map_inv(ConstView s) {
  detail::require_positive(s, "sphere_map_inv");
  Vector p(s.size());
  std::transform(s.begin(), s.end(), p.begin(), [](double x) { return x * x / 4.0; });
  return p;
}

/// 2 arccos(sum sqrt(p_i q_i)). Valid on the closed simplex, so vertices with
/// disjoint supports are at distance pi. Near zero, where arccos loses
/// precision, the equal chord form 4 arcsin(|sqrt p - sqrt q| / 2) is used.
inline double riemannian_distance(ConstView p, ConstView q) {
  detail::require_same_size(p, q, "riemannian_distance");
  const double c = std::clamp(detail::bhattacharyya(p, q), -1.0, 1.0);
  if (c > 0.9) {
    double chord2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
      chord2 += d * d;
    }
    return 4.0 * std::asin(std::min(1.0, std::sqrt(chord2) / 2.0));
  }
  return std::clamp(2.0 * std::acos(c), 0.0, std::numbers::pi);
}

/// p (g - <p, g> 1): the tangent vector representing the Euclidean gradient g.
inline Vector riemannian_gradient(ConstView p, ConstView euclid_grad) {
  detail::require_same_size(p, euclid_grad, "riemannian_gradient");
  const double mean = std::inner_product(p.begin(), p.end(), euclid_grad.begin(), 0.0);
  Vector out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] * (euclid_grad[i] - mean);
  return out;
}

/// Closed-form geodesic gamma_v(t) through p with initial velocity v.
///
/// No feasibility pre-check is made. If the curve leaves the open simplex on
/// [0, t] a DomainError is raised.
inline Vector geodesic(ConstView p, ConstView v, double t) {
  detail::require_same_size(p, v, "geodesic");
  detail::require_positive(p, "geodesic");
  const std::size_t n = p.size();
  Vector vp(n);
  double norm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    vp[i] = v[i] / std::sqrt(p[i]);
    norm2 += vp[i] * vp[i];
  }
  if (norm2 == 0.0 || t == 0.0) return Vector(p.begin(), p.end());

  const double norm = std::sqrt(norm2);
  const double angle = norm * t;
  // gamma is the square of a great-circle arc sqrt(p) cos(a/2) + b sin(a/2);
  // the curve stays in the open simplex iff that arc stays positive.
  if (std::abs(angle) >= std::numbers::pi)
    throw DomainError("geodesic: curve leaves the simplex (length >= pi)");
  const double half = angle / 2.0;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dir = vp[i] / norm;
    const double arc = std::sqrt(p[i]) * std::cos(half) + dir * std::sin(half);
    if (!(arc > 0.0)) throw DomainError("geodesic: curve leaves the simplex");
    out[i] = 0.5 * (p[i] + dir * dir) + 0.5 * (p[i] - dir * dir) * c + dir * std::sqrt(p[i]) * s;
    if (!(out[i] > 0.0)) throw DomainError("geodesic: curve leaves the simplex");
  }
  return out;
}

inline Vector exp_map(ConstView p, ConstView v) { return geodesic(p, v, 1.0); }

/// Tangent vector at p pointing to q with Fisher-Rao length d(p, q).
/// Uses a Taylor expansion of the prefactor when p and q nearly coincide.
inline Vector inverse_exp_map(ConstView p, ConstView q) {
  detail::require_same_size(p, q, "inverse_exp_map");
  const double c = std::min(1.0, detail::bhattacharyya(p, q));
  if (c <= 0.0) throw DomainError("inverse_exp_map: points have disjoint supports");
  const double eps = 1.0 - c;
  double factor;
  double shrink;
  if (eps < kLogTaylorThreshold) {
    factor = (9.0 * eps * eps + 40.0 * eps + 480.0) / (240.0 * std::sqrt(1.0 - eps / 2.0));
    shrink = 1.0 - eps;
  } else {
    factor = 2.0 * std::acos(c) / std::sqrt(1.0 - c * c);
    shrink = c;
  }
  Vector out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = factor * (std::sqrt(p[i] * q[i]) - shrink * p[i]);
  return out;
}

/// p e^u / <p, e^u>. Defined for every u; at the barycenter this is softmax.
inline Vector lifting_map(ConstView p, ConstView u) {
  detail::require_same_size(p, u, "lifting_map");
  Vector out(p.size());
  if (p.empty()) return out;
  const double shift = *std::max_element(u.begin(), u.end());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] = p[i] * std::exp(u[i] - shift);
    total += out[i];
  }
  for (double& x : out) x /= total;
  return out;
}

/// Mean-free u with lifting_map(p, u) == q.
inline Vector inverse_lifting_map(ConstView p, ConstView q) {
  detail::require_same_size(p, q, "inverse_lifting_map");
  const std::size_t n = p.size();
  Vector out(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::log(q[i]) - std::log(p[i]);
    mean += out[i];
  }
  mean /= static_cast<double>(n);
  for (double& x : out) x -= mean;
  return out;
}

/// (Diag(p) - p p^T) u, the velocity of t -> lifting_map(p, t u) at t = 0.
inline Vector lift_velocity(ConstView p, ConstView u) {
  detail::require_same_size(p, u, "lift_velocity");
  const double pu = std::inner_product(p.begin(), p.end(), u.begin(), 0.0);
  Vector out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] * u[i] - pu * p[i];
  return out;
}

}  // namespace assignflow::simplex
