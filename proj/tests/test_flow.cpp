#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "assignflow/flow.hpp"
#include "support.hpp"

using namespace assignflow;
using testing_support::Vec;

namespace {

Matrix random_distances(std::mt19937_64& rng, std::size_t m, std::size_t n, double scale) {
  std::uniform_real_distribution<double> u(0.0, scale);
  Matrix D(m, n);
  for (double& x : D.data()) x = u(rng);
  return D;
}

Vec softmax(const Vec& u) {
  Vec out(u.size());
  const double mx = *std::max_element(u.begin(), u.end());
  double z = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) z += (out[i] = std::exp(u[i] - mx));
  for (double& x : out) x /= z;
  return out;
}

void expect_row_stochastic(const Matrix& W, double floor) {
  for (std::size_t i = 0; i < W.rows(); ++i) {
    double s = 0.0;
    for (double x : W.row(i)) {
      EXPECT_GE(x, floor * 0.999);
      s += x;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

}  // namespace

TEST(Flow, UniformInitialization) {
  const auto W = init_uniform(3, 4);
  for (double x : W.data()) EXPECT_EQ(x, 0.25);
  EXPECT_NEAR(average_entropy(W), std::log(4.0), 1e-15);
  EXPECT_THROW(init_uniform(0, 2), DomainError);
}

TEST(Flow, LikelihoodMatchesReweightedExponential) {
  std::mt19937_64 rng(20);
  Matrix W(5, 4);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto p = testing_support::random_point(rng, 4);
    std::copy(p.begin(), p.end(), W.row(i).begin());
  }
  const auto D = random_distances(rng, 5, 4, 3.0);
  const auto L = likelihood(W, D);
  for (std::size_t i = 0; i < 5; ++i) {
    double z = 0.0;
    for (std::size_t j = 0; j < 4; ++j) z += W(i, j) * std::exp(-D(i, j));
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(L(i, j), W(i, j) * std::exp(-D(i, j)) / z, 1e-15);
  }
}

TEST(Flow, ReplicatorKnownValue) {
  Matrix W(1, 2, 0.5), S(1, 2);
  S(0, 0) = 0.8;
  S(0, 1) = 0.2;
  const auto out = replicator_step(W, S);
  EXPECT_NEAR(out(0, 0), 0.8, 1e-15);
  EXPECT_NEAR(out(0, 1), 0.2, 1e-15);
}

TEST(Flow, ReplicatorRejectsZeroFitness) {
  Matrix W(1, 2), S(1, 2);
  W(0, 0) = 1.0;
  S(0, 1) = 1.0;
  EXPECT_THROW(replicator_step(W, S), DomainError);
}

TEST(Flow, FloorNormalization) {
  Matrix W(2, 3);
  W(0, 0) = 1.0;
  W(1, 0) = 0.2;
  W(1, 1) = 0.3;
  W(1, 2) = 0.5;
  const auto N = normalize_rows(W, 1e-10);
  expect_row_stochastic(N, 1e-10);
  EXPECT_NEAR(N(0, 1), 1e-10 / (1.0 + 3e-10), 1e-25);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(N(1, j), W(1, j));
}

TEST(Flow, ApproximateSimilarityIsWindowGeometricMean) {
  std::mt19937_64 rng(21);
  const GridGraph g(4, 5, 1);
  Matrix L(g.size(), 3);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto p = testing_support::random_point(rng, 3);
    std::copy(p.begin(), p.end(), L.row(i).begin());
  }
  const auto S = similarity(L, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto nb = g.neighborhood(i);
    Vec acc(3, 1.0);
    for (std::size_t j : nb)
      for (std::size_t k = 0; k < 3; ++k) acc[k] *= std::pow(L(j, k), 1.0 / static_cast<double>(nb.size()));
    double z = acc[0] + acc[1] + acc[2];
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(S(i, k), acc[k] / z, 1e-14);
  }
}

TEST(Flow, ExactSimilarityIsWindowKarcherMean) {
  std::mt19937_64 rng(22);
  const GridGraph g(3, 3, 1);
  Matrix L(g.size(), 4);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto p = testing_support::random_point(rng, 4);
    std::copy(p.begin(), p.end(), L.row(i).begin());
  }
  const auto S = similarity(L, g, MeanMode::exact);
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::vector<Vec> pts;
    for (std::size_t j : g.neighborhood(i)) pts.emplace_back(L.row(j).begin(), L.row(j).end());
    const auto m = karcher_mean(pts);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(S(i, k), m[k]);
  }
}

TEST(Flow, ObjectiveAndLabels) {
  Matrix W(2, 3), S(2, 3);
  W(0, 1) = 1.0;
  W(1, 0) = 0.5;
  W(1, 2) = 0.5;
  S(0, 1) = 0.7;
  S(1, 0) = 0.2;
  S(1, 2) = 0.4;
  EXPECT_NEAR(objective(W, S), 0.7 + 0.1 + 0.2, 1e-15);
  EXPECT_EQ(labels(W), (std::vector<std::size_t>{1, 0}));
}

// With a radius-0 window S = L, so each step squares W and reweights by
// exp(-D): W^(k) = softmax(-(2^k - 1) D).
TEST(Flow, UncoupledIterationClosedForm) {
  std::mt19937_64 rng(23);
  const auto D = random_distances(rng, 6, 5, 0.5);
  const GridGraph g(2, 3, 0);
  int calls = 0;
  FlowConfig cfg;
  cfg.max_iterations = 4;
  cfg.entropy_tol = 1e-12;
  run_flow(D, g, cfg, [&](const TraceEntry& e, const AssignmentMatrix& W) {
    ++calls;
    const double c = std::pow(2.0, e.iteration) - 1.0;
    for (std::size_t i = 0; i < 6; ++i) {
      Vec u(5);
      for (std::size_t j = 0; j < 5; ++j) u[j] = -c * D(i, j);
      const auto oracle = softmax(u);
      for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(W(i, j), oracle[j], 1e-13);
    }
  });
  EXPECT_EQ(calls, 5);
}

// Two coupled pixels, written out by hand.
TEST(Flow, TwoPixelReference) {
  Matrix D(2, 2);
  D(0, 0) = 0.1;
  D(0, 1) = 0.4;
  D(1, 0) = 0.5;
  D(1, 1) = 0.3;
  const GridGraph g(1, 2, 1);
  std::vector<Vec> w{{0.5, 0.5}, {0.5, 0.5}};
  FlowConfig cfg;
  cfg.max_iterations = 5;
  cfg.entropy_tol = 1e-12;
  run_flow(D, g, cfg, [&](const TraceEntry&, const AssignmentMatrix& W) {
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(W(i, j), w[i][j], 1e-14);
    std::vector<Vec> l(2, Vec(2));
    for (std::size_t i = 0; i < 2; ++i) {
      const double a = w[i][0] * std::exp(-D(i, 0)), b = w[i][1] * std::exp(-D(i, 1));
      l[i] = {a / (a + b), b / (a + b)};
    }
    Vec s{std::sqrt(l[0][0] * l[1][0]), std::sqrt(l[0][1] * l[1][1])};
    const double z = s[0] + s[1];
    s = {s[0] / z, s[1] / z};
    for (auto& r : w) {
      const double f = r[0] * s[0] + r[1] * s[1];
      r = {r[0] * s[0] / f, r[1] * s[1] / f};
    }
  });
}

TEST(Flow, TraceLengthAndConvergence) {
  std::mt19937_64 rng(24);
  const auto D = random_distances(rng, 64, 4, 1.0);
  const GridGraph g(8, 8, 1);
  FlowConfig cfg;
  const auto r = run_flow(D, g, cfg, [&](const TraceEntry&, const AssignmentMatrix& W) {
    expect_row_stochastic(W, cfg.epsilon_floor);
  });
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.trace.size(), static_cast<std::size_t>(r.iterations) + 1);
  EXPECT_LE(r.trace.back().entropy, cfg.entropy_tol);
  EXPECT_GT(r.trace[r.iterations - 1].entropy, cfg.entropy_tol);
  EXPECT_NEAR(r.trace.front().entropy, std::log(4.0), 1e-12);
}

TEST(Flow, IterationCapIsFlagged) {
  std::mt19937_64 rng(25);
  const auto D = random_distances(rng, 9, 3, 0.01);
  FlowConfig cfg;
  cfg.max_iterations = 2;
  const auto r = run_flow(D, GridGraph(3, 3, 1), cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 2);
  EXPECT_EQ(r.trace.size(), 3u);
}

TEST(Flow, SingleLabelConvergesImmediately) {
  const auto r = run_flow(Matrix(1, 1, 0.0), GridGraph(1, 1), FlowConfig{});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.assignment(0, 0), 1.0);
}

TEST(Flow, RadiusZeroPicksNearestPrior) {
  std::mt19937_64 rng(26);
  const auto D = random_distances(rng, 30, 6, 2.0);
  const auto r = run_flow(D, GridGraph(5, 6, 0), FlowConfig{});
  ASSERT_TRUE(r.converged);
  const auto lab = labels(r.assignment);
  for (std::size_t i = 0; i < 30; ++i) {
    const auto row = D.row(i);
    EXPECT_EQ(lab[i], static_cast<std::size_t>(std::min_element(row.begin(), row.end()) - row.begin()));
  }
}

TEST(Flow, RejectsBadConfiguration) {
  const Matrix D(4, 2, 0.0);
  FlowConfig cfg;
  cfg.entropy_tol = 1.0;  // above log 2
  EXPECT_THROW(run_flow(D, GridGraph(2, 2), cfg), DomainError);
  cfg = {};
  cfg.max_iterations = 0;
  EXPECT_THROW(run_flow(D, GridGraph(2, 2), cfg), DomainError);
  EXPECT_THROW(run_flow(D, GridGraph(2, 3), FlowConfig{}), DimensionError);
}

TEST(Flow, ExtremePointsAreNearlyFixed) {
  std::mt19937_64 rng(27);
  const std::size_t m = 50, n = 5;
  Matrix W(m, n), S(m, n);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t k = pick(rng);
    for (std::size_t j = 0; j < n; ++j) {
      W(i, j) = j == k ? 1.0 - 1e-7 * (n - 1) : 1e-7;
      S(i, j) = j == k ? 1.0 - 1e-8 * (n - 1) : 1e-8;
    }
  }
  const double J = objective(W, S);
  EXPECT_GE(J, m - 1e-3);
  EXPECT_LT(J, static_cast<double>(m));
  const auto next = replicator_step(W, S);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) EXPECT_LE(std::abs(next(i, j) - W(i, j)), 1e-6);
}

TEST(Flow, ThreadCountDoesNotChangeResult) {
  std::mt19937_64 rng(28);
  const auto D = random_distances(rng, 100, 7, 1.0);
  const GridGraph g(10, 10, 2);
  FlowConfig one, many;
  one.threads = 1;
  many.threads = 4;
  const auto a = run_flow(D, g, one), b = run_flow(D, g, many);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.iterations, b.iterations);
  one.mean_mode = many.mean_mode = MeanMode::exact;
  EXPECT_EQ(run_flow(D, g, one).assignment, run_flow(D, g, many).assignment);
}

TEST(Flow, BypassAveragingUsesLikelihoodDirectly) {
  std::mt19937_64 rng(29);
  const auto D = random_distances(rng, 9, 3, 1.0);
  const GridGraph g(3, 3, 1);
  FlowConfig bypass;
  bypass.bypass_averaging = true;
  const auto a = run_flow(D, g, bypass);
  const auto b = run_flow(D, GridGraph(3, 3, 0), FlowConfig{});
  EXPECT_EQ(a.assignment, b.assignment);
}
