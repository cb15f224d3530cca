#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "assignflow/simplex.hpp"

namespace testing_support {

using Vec = std::vector<double>;

/// Interior point of the simplex, entries bounded away from zero by `floor`.
inline Vec random_point(std::mt19937_64& rng, std::size_t n, double floor = 1e-3) {
  std::gamma_distribution<double> g(1.0, 1.0);
  Vec p(n);
  double s = 0.0;
  for (double& x : p) s += (x = g(rng));
  for (double& x : p) x = floor + (1.0 - n * floor) * x / s;
  return p;
}

/// Tangent vector (zero-sum) with entries drawn from [-scale, scale].
inline Vec random_tangent(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vec v(n);
  double s = 0.0;
  for (double& x : v) s += (x = u(rng));
  for (double& x : v) x -= s / static_cast<double>(n);
  return v;
}

inline Vec random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vec v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double sum(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

/// Point on the simplex at Fisher-Rao distance `radius` from p in a random
/// direction, via the sphere embedding.
inline Vec point_at_distance(std::mt19937_64& rng, const Vec& p, double radius) {
  auto v = random_tangent(rng, p.size());
  const double norm = assignflow::simplex::fisher_rao_norm(p, v);
  for (double& x : v) x *= radius / norm;
  return assignflow::simplex::exp_map(p, v);
}

}  // namespace testing_support
