#pragma once

// Recognition of non-intersecting rectangles from a point pattern. Candidate
// rectangles sit on a grid of centroids, one label per orientation plus a
// trailing "none" label. The distance matrix depends on the assignment
// through a pairwise intersection penalty between neighboring centroids.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "assignflow/errors.hpp"
#include "assignflow/grid.hpp"
#include "assignflow/matrix.hpp"

namespace assignflow::rectangles {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Rectangle {
  Point center;
  double length = 1.0;
  double width = 1.0;
  double angle = 0.0;  // radians, orientation of the long side

  std::array<Point, 4> corners() const {
    const double c = std::cos(angle), s = std::sin(angle);
    const double a = length / 2.0, b = width / 2.0;
    std::array<Point, 4> out;
    const double sx[4] = {-1, 1, 1, -1}, sy[4] = {-1, -1, 1, 1};
    for (int k = 0; k < 4; ++k)
      out[k] = {center.x + sx[k] * a * c - sy[k] * b * s, center.y + sx[k] * a * s + sy[k] * b * c};
    return out;
  }

  bool contains(Point p) const {
    const double c = std::cos(angle), s = std::sin(angle);
    const double dx = p.x - center.x, dy = p.y - center.y;
    return std::abs(dx * c + dy * s) <= length / 2.0 && std::abs(-dx * s + dy * c) <= width / 2.0;
  }

  double area() const { return length * width; }
};

/// Separating-axis test on the four edge normals. Touching is not overlap.
inline bool intersects(const Rectangle& a, const Rectangle& b) {
  const auto ca = a.corners(), cb = b.corners();
  for (const Rectangle* r : {&a, &b}) {
    for (double ang : {r->angle, r->angle + std::numbers::pi / 2.0}) {
      const double ax = std::cos(ang), ay = std::sin(ang);
      double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
      for (const auto& p : ca) {
        const double t = p.x * ax + p.y * ay;
        amin = std::min(amin, t);
        amax = std::max(amax, t);
      }
      for (const auto& p : cb) {
        const double t = p.x * ax + p.y * ay;
        bmin = std::min(bmin, t);
        bmax = std::max(bmax, t);
      }
      if (amax <= bmin + 1e-12 || bmax <= amin + 1e-12) return false;
    }
  }
  return true;
}

struct ScenarioParams {
  std::size_t grid_height = 10;
  std::size_t grid_width = 10;
  double spacing = 1.0;
  double length = 1.6;  // diagonal must stay below 2 * spacing
  double width = 0.6;
  std::size_t orientations = 6;
  std::size_t foreground = 12;
  std::size_t background = 20;
  double foreground_density = 40.0;  // points per unit area
  double background_density = 20.0;
  double lambda = 16.0;
  double sigma = 3.9;
  double rho = 1.0;
  std::uint64_t seed = 1;
};

/// Pairwise intersection pattern between the candidates at two neighboring
/// centroids i and j: conflict(k, l) == 1 iff rectangle k at i meets
/// rectangle l at j.
struct Conflict {
  std::size_t neighbor = 0;
  std::vector<std::uint8_t> pattern;  // orientations x orientations
};

struct Candidate {
  std::size_t position = 0;
  std::size_t orientation = 0;
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct RectangleScenario {
  ScenarioParams params;
  Matrix coverage;                               // positions x orientations
  std::vector<std::vector<Conflict>> conflicts;  // per position, its 8-neighbors
  std::vector<Candidate> foreground;
  std::vector<Candidate> background;
  std::vector<Point> points;

  std::size_t positions() const { return params.grid_height * params.grid_width; }
  std::size_t orientations() const { return params.orientations; }
  std::size_t labels() const { return params.orientations + 1; }
  std::size_t none_label() const { return params.orientations; }

  Rectangle rectangle(Candidate c) const {
    const std::size_t y = c.position / params.grid_width, x = c.position % params.grid_width;
    return {{(static_cast<double>(x) + 0.5) * params.spacing, (static_cast<double>(y) + 0.5) * params.spacing},
            params.length,
            params.width,
            static_cast<double>(c.orientation) * std::numbers::pi / static_cast<double>(params.orientations)};
  }

  GridGraph grid() const { return GridGraph(params.grid_height, params.grid_width, 1); }
};

inline std::vector<std::vector<Conflict>> compute_conflicts(const RectangleScenario& scn) {
  const GridGraph g = scn.grid();
  const std::size_t K = scn.orientations();
  std::vector<std::vector<Conflict>> out(scn.positions());
  for (std::size_t i = 0; i < scn.positions(); ++i)
    for (std::size_t j : g.neighborhood(i)) {
      if (j == i) continue;
      Conflict c{j, std::vector<std::uint8_t>(K * K, 0)};
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t l = 0; l < K; ++l)
          c.pattern[k * K + l] = intersects(scn.rectangle({i, k}), scn.rectangle({j, l})) ? 1 : 0;
      out[i].push_back(std::move(c));
    }
  return out;
}

/// Samples a non-intersecting foreground and an overlapping background from
/// the candidate set, draws uniform points in every sampled rectangle, and
/// scores each candidate by coverage = observed / expected-foreground point
/// count - 1. Deterministic given params.seed.
inline RectangleScenario generate_rectangle_scenario(const ScenarioParams& params) {
  if (params.orientations == 0 || params.grid_height == 0 || params.grid_width == 0)
    throw DomainError("generate_rectangle_scenario: empty candidate grid");
  if (std::hypot(params.length, params.width) >= 2.0 * params.spacing)
    throw DomainError("generate_rectangle_scenario: rectangles may reach beyond the 8-neighborhood");
  RectangleScenario scn;
  scn.params = params;
  const std::size_t K = params.orientations;
  scn.coverage = Matrix(scn.positions(), K);
  scn.conflicts = compute_conflicts(scn);

  std::mt19937_64 rng(params.seed);
  std::vector<Candidate> all;
  for (std::size_t i = 0; i < scn.positions(); ++i)
    for (std::size_t k = 0; k < K; ++k) all.push_back({i, k});
  std::shuffle(all.begin(), all.end(), rng);

  for (const auto& c : all) {
    if (scn.foreground.size() >= params.foreground) break;
    const auto r = scn.rectangle(c);
    const bool clash = std::any_of(scn.foreground.begin(), scn.foreground.end(), [&](const Candidate& f) {
      return f.position == c.position || intersects(r, scn.rectangle(f));
    });
    if (!clash) scn.foreground.push_back(c);
  }
  for (const auto& c : all) {
    if (scn.background.size() >= params.background) break;
    if (std::find(scn.foreground.begin(), scn.foreground.end(), c) != scn.foreground.end()) continue;
    scn.background.push_back(c);
  }

  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  auto sample = [&](const Candidate& c, double density) {
    const auto r = scn.rectangle(c);
    const auto count = static_cast<std::size_t>(std::lround(density * r.area()));
    const double cs = std::cos(r.angle), sn = std::sin(r.angle);
    for (std::size_t k = 0; k < count; ++k) {
      const double a = unit(rng) * r.length, b = unit(rng) * r.width;
      scn.points.push_back({r.center.x + a * cs - b * sn, r.center.y + a * sn + b * cs});
    }
  };
  for (const auto& c : scn.foreground) sample(c, params.foreground_density);
  for (const auto& c : scn.background) sample(c, params.background_density);

  const double expected = params.foreground_density * params.length * params.width;
  for (std::size_t i = 0; i < scn.positions(); ++i)
    for (std::size_t k = 0; k < K; ++k) {
      const auto r = scn.rectangle({i, k});
      std::size_t inside = 0;
      for (const auto& p : scn.points) inside += r.contains(p) ? 1 : 0;
      scn.coverage(i, k) = static_cast<double>(inside) / expected - 1.0;
    }
  return scn;
}

/// D_i = (1/rho) [ -p_i + lambda/|N(i)| sum_j R_ij W_j ; sigma ], where W_j is
/// restricted to its rectangle labels and the trailing entry is the cost of
/// the none label.
inline Matrix rectangle_adaptive_distance(const RectangleScenario& scn, const Matrix& W) {
  const std::size_t K = scn.orientations();
  if (W.rows() != scn.positions() || W.cols() != K + 1)
    throw DimensionError("rectangle_adaptive_distance: W must be positions x (orientations + 1)");
  const auto& prm = scn.params;
  Matrix D(W.rows(), K + 1);
  for (std::size_t i = 0; i < W.rows(); ++i) {
    std::vector<double> penalty(K, 0.0);
    for (const auto& c : scn.conflicts[i])
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t l = 0; l < K; ++l)
          if (c.pattern[k * K + l]) penalty[k] += W(c.neighbor, l);
    const double scale =
        scn.conflicts[i].empty() ? 0.0 : prm.lambda / static_cast<double>(scn.conflicts[i].size());
    for (std::size_t k = 0; k < K; ++k) D(i, k) = (-scn.coverage(i, k) + scale * penalty[k]) / prm.rho;
    D(i, K) = prm.sigma / prm.rho;
  }
  return D;
}

/// Selected candidates: positions whose label is not the none label.
inline std::vector<Candidate> selected(const RectangleScenario& scn, const std::vector<std::size_t>& labels) {
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] != scn.none_label()) out.push_back({i, labels[i]});
  return out;
}

/// Number of neighboring pairs of selected candidates marked as intersecting
/// by the conflict patterns.
inline std::size_t intersecting_pairs(const RectangleScenario& scn, const std::vector<std::size_t>& labels) {
  const std::size_t K = scn.orientations();
  std::size_t count = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == scn.none_label()) continue;
    for (const auto& c : scn.conflicts[i]) {
      if (c.neighbor <= i || labels[c.neighbor] == scn.none_label()) continue;
      count += c.pattern[labels[i] * K + labels[c.neighbor]];
    }
  }
  return count;
}

}  // namespace assignflow::rectangles
