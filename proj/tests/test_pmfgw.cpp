// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pmfgw/errors.hpp"
#include "pmfgw/pmfgw.hpp"

namespace pmfgw {
namespace {

LossConfig l2_config() {
  LossConfig cfg;
  cfg.loss_h = cfg.loss_a = GroundLoss::squared();
  return cfg;
}

oracle::Objective l2_oracle() {
  oracle::Objective o;
  o.loss_h = o.loss_a = oracle::squared;
  return o;
}

TEST(Pmfgw, IdenticalPaddedGraphsGiveZero) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const int big = 1 + static_cast<int>(rng() % 8);
    const int m = static_cast<int>(rng() % (big + 1));
    const PaddedGraph p = pad(oracle::random_graph(m, 2, rng), big);
    EXPECT_LE(pmfgw(p.as_continuous(), p, l2_config()).value, 1e-9);
    EXPECT_LE(pmfgw(p.as_continuous(), p, LossConfig{}).value, 1e-5);
  }
}

TEST(Pmfgw, ValueMatchesOracleAtPlan) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const int m = static_cast<int>(rng() % (n + 1));
    const ContinuousGraph y = oracle::random_prediction(n, 3, rng);
    const PaddedGraph t = pad(oracle::random_graph(m, 3, rng), n);
    const Matrix plan = oracle::random_plan(n, rng);
    const PmfgwProblem problem(y, t, LossConfig{});
    EXPECT_NEAR(problem.value(plan), oracle::pmfgw_value(y, t, oracle::Objective{}, plan), 1e-12);
    EXPECT_NEAR(problem.objective().evaluate(plan), problem.value(plan), 1e-12);
  }
}

TEST(Pmfgw, TermsReconstructValue) {
  std::mt19937_64 rng(3);
  const ContinuousGraph y = oracle::random_prediction(6, 2, rng);
  const PaddedGraph t = pad(oracle::random_graph(4, 2, rng), 6);
  LossConfig cfg;
  cfg.alpha = {0.2, 0.5, 0.3};
  const LossResult r = pmfgw(y, t, cfg);
  EXPECT_NEAR(r.value, 0.2 * r.term_h + 0.5 * r.term_f + 0.3 * r.term_a, 1e-12);
  EXPECT_GE(r.value, 0.0);
}

int brute_force_hits(int size, int trials) {
  std::mt19937_64 rng(11);
  int hits = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const ContinuousGraph y = oracle::random_prediction(size, 2, rng);
    const PaddedGraph t = pad(oracle::random_graph(1 + static_cast<int>(rng() % size), 2, rng), size);
    LossConfig cfg;
    cfg.solver.restarts = 5;
    cfg.solver.seed = static_cast<std::uint64_t>(trial);
    const double v = pmfgw(y, t, cfg).value;
    hits += v <= oracle::min_over_permutations(y, t, oracle::Objective{}) + 1e-6;
  }
  return hits;
}

TEST(Pmfgw, MatchesBruteForceAtSizeFour) { EXPECT_GE(brute_force_hits(4, 200), 190); }

TEST(Pmfgw, MatchesBruteForceAtSizeThree) { EXPECT_GE(brute_force_hits(3, 200), 190); }

TEST(Pmfgw, ConstantGradientStillFindsIsomorphism) {
  // Two labelings of the 4-cycle; every vertex ties at the uniform plan.
  Matrix a(4, 4), b(4, 4);
  a << 0, 0, 1, 1, 0, 0, 1, 1, 1, 1, 0, 0, 1, 1, 0, 0;
  b << 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0;
  const DiscreteGraph g1(Matrix::Zero(4, 1), a), g2(Matrix::Zero(4, 1), b);
  const LossResult r = pmfgw(pad(g1, 4).as_continuous(), pad(g2, 4), LossConfig{});
  EXPECT_LE(r.value, 1e-5);
}

TEST(Pmfgw, PermutationInvariance) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const ContinuousGraph y = oracle::random_prediction(n, 2, rng);
    const DiscreteGraph g = oracle::random_graph(1 + static_cast<int>(rng() % n), 2, rng);
    const PaddedGraph t = pad(g, n);
    const Permutation p(oracle::random_permutation(n, rng));
    const Permutation q(oracle::random_permutation(static_cast<int>(g.size()), rng));
    const double va = pmfgw(y, t, LossConfig{}).value;
    const double vb = pmfgw(permute(y, p), pad(permute(g, q), n), LossConfig{}).value;
    EXPECT_NEAR(va, vb, 1e-6);
  }
}

TEST(Pmfgw, MaskedTargetSlotsAreIgnored) {
  std::mt19937_64 rng(6);
  const ContinuousGraph y = oracle::random_prediction(5, 2, rng);
  const PaddedGraph t = pad(oracle::random_graph(3, 2, rng), 5);
  const Matrix plan = oracle::random_plan(5, rng);
  const PmfgwProblem base(y, t, LossConfig{});
  // Build a target whose padded slots carry garbage and compare terms via the
  // oracle, which applies the masks literally.
  PaddedGraph noisy = t;
  noisy.features.bottomRows(2).setConstant(0.7);
  EXPECT_NEAR(oracle::pmfgw_value(y, noisy, oracle::Objective{}, plan), base.value(plan), 1e-12);
}

TEST(Pmfgw, AlphaScaling) {
  std::mt19937_64 rng(7);
  const ContinuousGraph y = oracle::random_prediction(5, 2, rng);
  const PaddedGraph t = pad(oracle::random_graph(4, 2, rng), 5);
  LossConfig a;
  a.normalize_alpha = false;
  a.alpha = {0.3, 0.3, 0.4};
  LossConfig b = a;
  b.alpha = {0.9, 0.9, 1.2};
  const LossResult ra = pmfgw(y, t, a), rb = pmfgw(y, t, b);
  EXPECT_NEAR(rb.value, 3.0 * ra.value, 1e-12);
  EXPECT_TRUE(rb.plan.isApprox(ra.plan, 1e-12));
  LossConfig n = a;
  n.normalize_alpha = true;
  n.alpha = {3, 3, 4};
  EXPECT_NEAR(pmfgw(y, t, n).value, ra.value, 1e-12);
}

TEST(Pmfgw, EmptyTargetKeepsOnlyMaskTerm) {
  std::mt19937_64 rng(8);
  const ContinuousGraph y = oracle::random_prediction(4, 2, rng);
  const PaddedGraph t = pad(DiscreteGraph::empty(2), 4);
  const LossResult r = pmfgw(y, t, LossConfig{});
  EXPECT_EQ(r.term_f, 0.0);
  EXPECT_EQ(r.term_a, 0.0);
  double expected = 0.0;
  for (int i = 0; i < 4; ++i) expected += oracle::bernoulli_kl(y.mask(i), 0.0);
  EXPECT_NEAR(r.term_h, expected / 4, 1e-12);
}

TEST(Pmfgw, Errors) {
  std::mt19937_64 rng(9);
  const ContinuousGraph y = oracle::random_prediction(4, 2, rng);
  EXPECT_THROW(pmfgw(y, pad(oracle::random_graph(2, 2, rng), 5), LossConfig{}), DimensionError);
  EXPECT_THROW(pmfgw(y, pad(oracle::random_graph(2, 3, rng), 4), LossConfig{}), DimensionError);
  LossConfig bad;
  bad.alpha = {-1, 1, 1};
  EXPECT_THROW(pmfgw(y, pad(oracle::random_graph(2, 2, rng), 4), bad), InvalidArgumentError);
  bad.alpha = {0, 0, 0};
  EXPECT_THROW(pmfgw(y, pad(oracle::random_graph(2, 2, rng), 4), bad), InvalidArgumentError);
  const PaddedGraph t = pad(oracle::random_graph(2, 2, rng), 4);
  EXPECT_THROW(pmfgw_grad(y, t, LossConfig{}, Matrix::Ones(4, 4)), InvalidArgumentError);
  EXPECT_THROW(pmfgw_grad(y, t, LossConfig{}, Matrix::Identity(3, 3)), DimensionError);
}

double fd_value(const ContinuousGraph& y, const PaddedGraph& t, const oracle::Objective& o, const Matrix& plan,
                const std::function<double&(ContinuousGraph&)>& slot, double h) {
  ContinuousGraph up = y, down = y;
  slot(up) += h;
  slot(down) -= h;
  return (oracle::pmfgw_value(up, t, o, plan) - oracle::pmfgw_value(down, t, o, plan)) / (2 * h);
}

TEST(Gradient, MatchesOracleFiniteDifferences) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const ContinuousGraph y = oracle::random_prediction(n, 2, rng);
    const PaddedGraph t = pad(oracle::random_graph(1 + static_cast<int>(rng() % n), 2, rng), n);
    const LossConfig cfg;
    const Matrix plan = pmfgw(y, t, cfg).plan;
    const LossGradient g = pmfgw_grad(y, t, cfg, plan);
    const oracle::Objective o;
    const double h = 1e-5;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); };
    for (int i = 0; i < n; ++i) {
      EXPECT_LT(rel(g.d_mask(i), fd_value(y, t, o, plan, [&](ContinuousGraph& z) -> double& { return z.mask(i); }, h)),
                1e-4);
      for (int k = 0; k < 2; ++k)
        EXPECT_LT(rel(g.d_features(i, k),
                      fd_value(y, t, o, plan, [&](ContinuousGraph& z) -> double& { return z.features(i, k); }, h)),
                  1e-4);
      for (int k = 0; k < n; ++k)
        EXPECT_LT(rel(g.d_edges(i, k),
                      fd_value(y, t, o, plan, [&](ContinuousGraph& z) -> double& { return z.edges(i, k); }, h)),
                  1e-4);
    }
    EXPECT_TRUE(g.d_edges.isApprox(g.d_edges.transpose()));
  }
}

TEST(Gradient, ZeroAtExactMatchWithL2) {
  std::mt19937_64 rng(11);
  const PaddedGraph t = pad(oracle::random_graph(4, 2, rng), 5);
  const LossConfig cfg = l2_config();
  const LossResult r = pmfgw(t.as_continuous(), t, cfg);
  const LossGradient g = pmfgw_grad(t.as_continuous(), t, cfg, r.plan);
  EXPECT_LT(g.d_mask.cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT(g.d_features.cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT(g.d_edges.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Gradient, LibraryCheckHelper) {
  std::mt19937_64 rng(12);
  const ContinuousGraph y = oracle::random_prediction(5, 3, rng);
  const PaddedGraph t = pad(oracle::random_graph(3, 3, rng), 5);
  const LossResult r = pmfgw(y, t, LossConfig{});
  const GradientCheck c = gradient_check(y, t, LossConfig{}, r.plan);
  EXPECT_EQ(c.entries, 5u * (1 + 3 + 5));
  EXPECT_LT(c.max_relative_error, 1e-4);
}

TEST(Fgw, ZeroOnSelfAndPermutationInvariant) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + static_cast<int>(rng() % 5);
    const DiscreteGraph g = oracle::random_graph(m, 2, rng);
    LossConfig cfg = l2_config();
    EXPECT_LE(fgw(g, g, cfg).value, 1e-9);
    const DiscreteGraph h = oracle::random_graph(m, 2, rng);
    const Permutation p(oracle::random_permutation(m, rng));
    EXPECT_NEAR(fgw(g, h, cfg).value, fgw(g, permute(h, p), cfg).value, 1e-6);
  }
  EXPECT_THROW(fgw(oracle::random_graph(2, 1, rng), oracle::random_graph(3, 1, rng), LossConfig{}), DimensionError);
}

TEST(Fgw, MatchesExactMostly) {
  std::mt19937_64 rng(14);
  int hits = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const DiscreteGraph a = oracle::random_graph(3, 2, rng), b = oracle::random_graph(3, 2, rng);
    LossConfig cfg = l2_config();
    cfg.solver.restarts = 5;
    const GraphMatch exact = gm_exact(a, b, cfg);
    EXPECT_TRUE(exact.permutation.is_valid());
    hits += fgw(a, b, cfg).value <= exact.value + 1e-6;
  }
  EXPECT_GE(hits, 38);
}

TEST(PartialFgw, Cases) {
  std::mt19937_64 rng(15);
  const DiscreteGraph g = oracle::random_graph(4, 2, rng);
  LossConfig cfg = l2_config();
  cfg.solver.restarts = 5;
  EXPECT_LE(partial_fgw(g, g, cfg).value, 1e-9);

  // Add an isolated node: the small graph is an induced subgraph of big.
  DiscreteGraph big{Matrix::Zero(5, 2), Matrix::Zero(5, 5)};
  big.features.topRows(4) = g.features;
  big.features.row(4) << 1, 1;
  big.adjacency.topLeftCorner(4, 4) = g.adjacency;
  EXPECT_LE(partial_fgw(big, g, cfg).value, 1e-9);
  EXPECT_THROW(partial_fgw(g, big, cfg), SizeExceededError);
}

TEST(PartialFgw, ConstantMaskLossShiftsByAlpha) {
  std::mt19937_64 rng(16);
  for (double c : {0.0, 0.3, 1.7}) {
    const ContinuousGraph y = oracle::random_prediction(5, 2, rng);
    const DiscreteGraph g = oracle::random_graph(3, 2, rng);
    LossConfig cfg;
    cfg.alpha = {0.2, 0.3, 0.5};
    cfg.loss_h = GroundLoss::constant_value(c);
    // The relative stopping rule sees the shifted value; a tight tolerance
    // keeps both runs on the same iterates.
    cfg.solver.relative_tolerance = 1e-14;
    EXPECT_NEAR(pmfgw(y, pad(g, 5), cfg).value - partial_fgw(y, g, cfg).value, 0.2 * c, 1e-9);
  }
}

TEST(Toy, MinimaAndIndicator) {
  const LossConfig cfg = toy_config();
  const PaddedGraph t = pad(toy_target(), 3);
  EXPECT_LE(pmfgw(toy_prediction(1, 1), t, cfg).value, 1e-8);
  EXPECT_LE(pmfgw(toy_prediction(0, 0), t, cfg).value, 1e-8);
  const auto pts = toy_landscape(5, 5);
  ASSERT_EQ(pts.size(), 25u);
  for (const auto& p : pts) {
    if (p.a == 0.5 || p.h == 0.5) continue;
    const double expected = ((p.a < 0.5 && p.h > 0.5) || (p.a > 0.5 && p.h < 0.5)) ? 1.0 : 0.0;
    EXPECT_EQ(p.eval, expected) << p.a << ' ' << p.h;
    const double closed = std::min((1 - p.a) * (1 - p.a) + 2.0 / 3 * (1 - p.h) * (1 - p.h),
                                   p.a * p.a + 2.0 / 3 * p.h * p.h);
    EXPECT_NEAR(p.train, closed, 1e-9);
  }
  EXPECT_THROW(toy_landscape(1, 5), InvalidArgumentError);
}

TEST(Toy, DecodeAtHighCorner) {
  const DiscreteGraph d = decode(toy_prediction(0.9, 0.9));
  EXPECT_TRUE(oracle::isomorphic(d, toy_target()));
}

}  // namespace
}  // namespace pmfgw
