#pragma once

// The labeling engine. One outer iteration maps the assignment matrix W to
//   D(W) -> L = lift(W, -centered D) -> S = neighborhood means of L
//        -> W' = W * S / <W, S>  (row-wise, then floored)
// All rows of an iteration are computed from the same snapshot of W.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "assignflow/errors.hpp"
#include "assignflow/grid.hpp"
#include "assignflow/matrix.hpp"
#include "assignflow/mean.hpp"
#include "assignflow/parallel.hpp"
#include "assignflow/simplex.hpp"

namespace assignflow {

enum class MeanMode { approximate, exact };

struct FlowConfig {
  double entropy_tol = 1e-3;
  int max_iterations = 1000;
  double epsilon_floor = 1e-10;
  MeanMode mean_mode = MeanMode::approximate;
  bool bypass_averaging = false;
  std::size_t threads = 0;  // 0: ASSIGNFLOW_THREADS or hardware concurrency
  MeanConfig exact_mean{};  // used when mean_mode == exact
};

struct TraceEntry {
  int iteration = 0;
  double entropy = 0.0;
  double objective = 0.0;
};

struct FlowResult {
  AssignmentMatrix assignment;
  std::vector<TraceEntry> trace;
  int iterations = 0;  // replicator steps performed
  bool converged = false;
};

/// Produces the (scaled) distance matrix for the current assignment. Fixed
/// distances ignore the argument.
using DistanceSource = std::function<DistanceMatrix(const AssignmentMatrix&)>;

/// Observer called once per recorded iterate, after its trace entry is known.
using TraceSink = std::function<void(const TraceEntry&, const AssignmentMatrix&)>;

inline AssignmentMatrix init_uniform(std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) throw DomainError("init_uniform: m and n must be positive");
  return AssignmentMatrix(m, n, 1.0 / static_cast<double>(n));
}

inline AssignmentMatrix likelihood(const AssignmentMatrix& W, const DistanceMatrix& D,
                                   std::size_t threads = 1) {
  require_same_shape(W, D, "likelihood");
  const std::size_t n = W.cols();
  AssignmentMatrix L(W.rows(), n);
  parallel_for(W.rows(), threads, [&](std::size_t i) {
    const auto d = D.row(i);
    double mean = 0.0;
    for (double x : d) mean += x;
    mean /= static_cast<double>(n);
    std::vector<double> u(n);
    for (std::size_t j = 0; j < n; ++j) u[j] = -(d[j] - mean);
    const auto lifted = simplex::lifting_map(W.row(i), u);
    std::copy(lifted.begin(), lifted.end(), L.row(i).begin());
  });
  return L;
}

/// Row i of the result is the mean of the rows of L over the window of node i.
inline AssignmentMatrix similarity(const AssignmentMatrix& L, const GridGraph& g,
                                   MeanMode mode = MeanMode::approximate, std::size_t threads = 1,
                                   const MeanConfig& exact_cfg = {}) {
  if (L.rows() != g.size()) throw DimensionError("similarity: rows must match grid nodes");
  const std::size_t n = L.cols();
  AssignmentMatrix S(L.rows(), n);
  if (mode == MeanMode::approximate) {
    Matrix logL(L.rows(), n);
    for (std::size_t k = 0; k < L.data().size(); ++k) logL.data()[k] = std::log(L.data()[k]);
    parallel_for(L.rows(), threads, [&](std::size_t i) {
      const auto nb = g.neighborhood(i);
      const double w = 1.0 / static_cast<double>(nb.size());
      auto acc = S.row(i);
      if (nb.size() == 1) {
        std::copy(L.row(i).begin(), L.row(i).end(), acc.begin());
        return;
      }
      for (std::size_t j : nb) {
        const auto lj = logL.row(j);
        for (std::size_t k = 0; k < n; ++k) acc[k] += w * lj[k];
      }
      detail::normalize_log_weights(acc);
    });
  } else {
    parallel_for(L.rows(), threads, [&](std::size_t i) {
      std::vector<std::span<const double>> pts;
      for (std::size_t j : g.neighborhood(i)) pts.push_back(L.row(j));
      const auto mean = karcher_mean(pts, exact_cfg);
      std::copy(mean.begin(), mean.end(), S.row(i).begin());
    });
  }
  return S;
}

/// Rows whose minimum drops below epsilon are lifted by (epsilon - min) and
/// renormalized; other rows are returned untouched.
inline void normalize_rows_in_place(AssignmentMatrix& W, double epsilon_floor) {
  for (std::size_t i = 0; i < W.rows(); ++i) {
    auto r = W.row(i);
    const double lo = *std::min_element(r.begin(), r.end());
    if (lo >= epsilon_floor) continue;
    double total = 0.0;
    for (double& x : r) {
      x = x - lo + epsilon_floor;
      total += x;
    }
    for (double& x : r) x /= total;
  }
}

inline AssignmentMatrix normalize_rows(AssignmentMatrix W, double epsilon_floor = 1e-10) {
  normalize_rows_in_place(W, epsilon_floor);
  return W;
}

/// W_i * S_i / <W_i, S_i> for each row, followed by the epsilon floor.
inline AssignmentMatrix replicator_step(const AssignmentMatrix& W, const AssignmentMatrix& S,
                                        double epsilon_floor = 1e-10, std::size_t threads = 1) {
  require_same_shape(W, S, "replicator_step");
  AssignmentMatrix out(W.rows(), W.cols());
  parallel_for(W.rows(), threads, [&](std::size_t i) {
    const auto w = W.row(i);
    const auto s = S.row(i);
    auto o = out.row(i);
    double fitness = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      o[j] = w[j] * s[j];
      fitness += o[j];
    }
    if (!(fitness > 0.0)) throw DomainError("replicator_step: zero mean fitness");
    double total = 0.0;
    for (double& x : o) {
      x /= fitness;
      total += x;
    }
    for (double& x : o) x /= total;
  });
  normalize_rows_in_place(out, epsilon_floor);
  return out;
}

/// Mean row entropy (natural log).
inline double average_entropy(const AssignmentMatrix& W) {
  double h = 0.0;
  for (double x : W.data())
    if (x > 0.0) h -= x * std::log(x);
  return h / static_cast<double>(W.rows());
}

/// J(W) = <S, W>, the Frobenius inner product.
inline double objective(const AssignmentMatrix& W, const AssignmentMatrix& S) {
  require_same_shape(W, S, "objective");
  double j = 0.0;
  for (std::size_t k = 0; k < W.data().size(); ++k) j += W.data()[k] * S.data()[k];
  return j;
}

/// Row-wise argmax; ties go to the smallest index.
inline std::vector<std::size_t> labels(const AssignmentMatrix& W) {
  std::vector<std::size_t> out(W.rows());
  for (std::size_t i = 0; i < W.rows(); ++i) {
    const auto r = W.row(i);
    out[i] = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  return out;
}

/// Similarity of the current iterate: S = L when averaging is bypassed.
inline AssignmentMatrix similarity_of(const AssignmentMatrix& W, const DistanceMatrix& D,
                                      const GridGraph& g, const FlowConfig& cfg) {
  auto L = likelihood(W, D, cfg.threads);
  if (cfg.bypass_averaging) return L;
  return similarity(L, g, cfg.mean_mode, cfg.threads, cfg.exact_mean);
}

/// Runs the fixed-point iteration from the uniform assignment until the
/// average entropy is <= entropy_tol or max_iterations steps were taken.
/// The trace holds one entry per iterate W^(0), ..., W^(iterations).
inline FlowResult run_flow(const DistanceSource& distances, std::size_t labels_count,
                           const GridGraph& g, const FlowConfig& cfg, const TraceSink& sink = {}) {
  if (cfg.entropy_tol <= 0.0 || cfg.max_iterations <= 0 || cfg.epsilon_floor <= 0.0)
    throw DomainError("run_flow: tolerances and iteration cap must be positive");
  if (labels_count > 1 && cfg.entropy_tol >= std::log(static_cast<double>(labels_count)))
    throw DomainError("run_flow: entropy_tol must be below log(n)");

  FlowResult result;
  AssignmentMatrix W = init_uniform(g.size(), labels_count);
  for (int k = 0;; ++k) {
    const DistanceMatrix D = distances(W);
    if (D.rows() != W.rows() || D.cols() != W.cols())
      throw DimensionError("run_flow: distance matrix shape does not match (nodes, labels)");
    const AssignmentMatrix S = similarity_of(W, D, g, cfg);
    const TraceEntry entry{k, average_entropy(W), objective(W, S)};
    result.trace.push_back(entry);
    if (sink) sink(entry, W);
    if (entry.entropy <= cfg.entropy_tol) {
      result.converged = true;
      result.iterations = k;
      break;
    }
    if (k == cfg.max_iterations) {
      result.iterations = k;
      break;
    }
    W = replicator_step(W, S, cfg.epsilon_floor, cfg.threads);
  }
  result.assignment = std::move(W);
  return result;
}

inline FlowResult run_flow(const DistanceMatrix& D, const GridGraph& g, const FlowConfig& cfg,
                           const TraceSink& sink = {}) {
  return run_flow([&D](const AssignmentMatrix&) { return D; }, D.cols(), g, cfg, sink);
}

}  // namespace assignflow
