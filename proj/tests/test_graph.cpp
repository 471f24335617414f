// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pmfgw/errors.hpp"
#include "pmfgw/graph.hpp"

namespace pmfgw {
namespace {

DiscreteGraph edge_pair() {
  Matrix f(2, 2);
  f << 1, 0, 0, 1;
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  return {f, a};
}

DiscreteGraph path3() {
  Matrix f(3, 1);
  f << 1, 2, 3;
  Matrix a = Matrix::Zero(3, 3);
  a(0, 1) = a(1, 0) = a(1, 2) = a(2, 1) = 1;
  return {f, a};
}

TEST(Pad, EmptyGraph) {
  const PaddedGraph p = pad(DiscreteGraph::empty(2), 3);
  EXPECT_EQ(p.true_size, 0);
  EXPECT_TRUE(p.mask.isZero());
  EXPECT_TRUE(p.features.isZero());
  EXPECT_TRUE(p.edges.isZero());
  EXPECT_EQ(p.features.cols(), 2);
}

TEST(Pad, FullSizeIsUnchanged) {
  const DiscreteGraph g = path3();
  const PaddedGraph p = pad(g, 3);
  EXPECT_TRUE(p.mask.isOnes());
  EXPECT_EQ(p.features, g.features);
  EXPECT_EQ(p.edges, g.adjacency);
}

TEST(Pad, TwoNodeEdgeToThree) {
  const PaddedGraph p = pad(edge_pair(), 3);
  EXPECT_EQ(p.mask, Vector((Vector(3) << 1, 1, 0).finished()));
  EXPECT_EQ(p.edges(0, 1), 1.0);
  EXPECT_EQ(p.edges(1, 0), 1.0);
  EXPECT_TRUE(p.edges.row(2).isZero());
  EXPECT_TRUE(p.edges.col(2).isZero());
  EXPECT_NO_THROW(p.validate());
}

TEST(Pad, TooLargeThrows) {
  EXPECT_THROW(pad(path3(), 2), SizeExceededError);
  try {
    pad(path3(), 2);
  } catch (const SizeExceededError& e) {
    EXPECT_NE(std::string(e.what()).find("pad"), std::string::npos);
  }
}

TEST(Threshold, DroppedEndpointRemovesEdge) {
  ContinuousGraph y{(Vector(2) << 0.9, 0.2).finished(), Matrix::Zero(2, 1),
                    (Matrix(2, 2) << 0, 0.8, 0.8, 0).finished()};
  const PaddedGraph p = threshold(y);
  EXPECT_EQ(p.true_size, 1);
  EXPECT_EQ(p.mask, Vector((Vector(2) << 1, 0).finished()));
  EXPECT_TRUE(p.edges.isZero());
}

TEST(Threshold, HalfIsDropped) {
  ContinuousGraph y{(Vector(2) << 0.5, 0.7).finished(), Matrix::Zero(2, 1), Matrix::Zero(2, 2)};
  EXPECT_EQ(threshold(y).true_size, 1);
}

TEST(Threshold, CompactsInOriginalOrder) {
  Matrix f(3, 1);
  f << 10, 20, 30;
  ContinuousGraph y{(Vector(3) << 0.9, 0.1, 0.8).finished(), f,
                    (Matrix(3, 3) << 0, 0, 0.7, 0, 0, 0, 0.7, 0, 0).finished()};
  const PaddedGraph p = threshold(y);
  EXPECT_EQ(p.true_size, 2);
  EXPECT_EQ(p.features(0, 0), 10);
  EXPECT_EQ(p.features(1, 0), 30);
  EXPECT_EQ(p.features(2, 0), 0);
  EXPECT_EQ(p.edges(0, 1), 1.0);
  EXPECT_NO_THROW(p.validate());
}

TEST(Threshold, IdempotentOnPadded) {
  const PaddedGraph p = pad(path3(), 5);
  EXPECT_EQ(threshold(p.as_continuous()), p);
}

TEST(Decode, AllMaskedIsEmpty) {
  ContinuousGraph y{Vector::Constant(3, 0.1), Matrix::Ones(3, 2), Matrix::Ones(3, 3)};
  EXPECT_EQ(decode(y).size(), 0);
}

TEST(Decode, RoundTrip) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = static_cast<int>(rng() % 6);
    const DiscreteGraph g = oracle::random_graph(m, 3, rng);
    EXPECT_EQ(decode(pad(g, 6).as_continuous()), g);
  }
}

TEST(Permute, IdentityAndInverse) {
  std::mt19937_64 rng(2);
  const DiscreteGraph g = oracle::random_graph(5, 2, rng);
  EXPECT_EQ(permute(g, Permutation::identity(5)), g);
  const Permutation p(oracle::random_permutation(5, rng));
  EXPECT_EQ(permute(permute(g, p), p.inverse()), g);
}

TEST(Permute, MatchesMatrixConjugation) {
  const DiscreteGraph g = path3();
  const Permutation p({1, 0, 2});
  const DiscreteGraph q = permute(g, p);
  const Matrix pm = oracle::permutation_matrix(p.map);
  EXPECT_EQ(q.adjacency, pm * g.adjacency * pm.transpose());
  EXPECT_EQ(q.features, pm * g.features);
  // Path 2-1-3: old node 1 (the middle) now sits at index 0.
  EXPECT_EQ(q.adjacency(0, 1), 1.0);
  EXPECT_EQ(q.adjacency(0, 2), 1.0);
  EXPECT_EQ(q.adjacency(1, 2), 0.0);
}

TEST(Permute, PreservesDegreesAndContinuous) {
  std::mt19937_64 rng(3);
  const DiscreteGraph g = oracle::random_graph(6, 2, rng);
  const Permutation p(oracle::random_permutation(6, rng));
  const DiscreteGraph q = permute(g, p);
  EXPECT_EQ(q.edge_count(), g.edge_count());
  std::vector<double> d1, d2;
  for (int i = 0; i < 6; ++i) {
    d1.push_back(g.adjacency.row(i).sum());
    d2.push_back(q.adjacency.row(i).sum());
  }
  std::sort(d1.begin(), d1.end());
  std::sort(d2.begin(), d2.end());
  EXPECT_EQ(d1, d2);

  const ContinuousGraph y = oracle::random_prediction(6, 2, rng);
  const ContinuousGraph z = permute(y, p);
  const Matrix pm = oracle::permutation_matrix(p.map);
  EXPECT_TRUE(z.mask.isApprox(pm * y.mask));
  EXPECT_TRUE(z.edges.isApprox(pm * y.edges * pm.transpose()));
}

TEST(Permute, LengthMismatchThrows) {
  EXPECT_THROW(permute(path3(), Permutation::identity(2)), DimensionError);
  EXPECT_THROW(permute(path3(), Permutation({0, 0, 1})), InvalidArgumentError);
}

TEST(PermutationType, Basics) {
  const Permutation p({2, 0, 1});
  EXPECT_TRUE(p.is_valid());
  EXPECT_FALSE(Permutation({0, 0}).is_valid());
  EXPECT_EQ(p.inverse().inverse(), p);
  EXPECT_EQ(p.as_matrix(), oracle::permutation_matrix(p.map));
}

TEST(FeatureDiffuse, Edgeless) {
  DiscreteGraph g{Matrix::Identity(3, 3), Matrix::Zero(3, 3)};
  const DiscreteGraph d = feature_diffuse(g);
  EXPECT_EQ(d.dim(), 6);
  EXPECT_EQ(d.features.leftCols(3), g.features);
  EXPECT_TRUE(d.features.rightCols(3).isZero());
}

TEST(FeatureDiffuse, SingleEdge) {
  const DiscreteGraph d = feature_diffuse(edge_pair());
  EXPECT_EQ(d.features.row(0), (Eigen::RowVectorXd(4) << 1, 0, 0, 1).finished());
  EXPECT_EQ(d.features.row(1), (Eigen::RowVectorXd(4) << 0, 1, 1, 0).finished());
  EXPECT_EQ(d.adjacency, edge_pair().adjacency);
}

TEST(FeatureDiffuse, EmptyAndPermutationCommute) {
  EXPECT_EQ(feature_diffuse(DiscreteGraph::empty(2)).size(), 0);
  std::mt19937_64 rng(4);
  const DiscreteGraph g = oracle::random_graph(5, 3, rng);
  const Permutation p(oracle::random_permutation(5, rng));
  EXPECT_EQ(feature_diffuse(permute(g, p)), permute(feature_diffuse(g), p));
}

TEST(Validate, RejectsBrokenInvariants) {
  DiscreteGraph g = path3();
  g.adjacency(0, 2) = 1;
  EXPECT_THROW(g.validate(), InvalidArgumentError);
  g = path3();
  g.adjacency(1, 1) = 1;
  EXPECT_THROW(g.validate(), InvalidArgumentError);
  g = path3();
  g.adjacency(0, 1) = g.adjacency(1, 0) = 0.5;
  EXPECT_THROW(g.validate(), InvalidArgumentError);
  g = path3();
  g.features = Matrix::Zero(2, 1);
  EXPECT_THROW(g.validate(), DimensionError);

  ContinuousGraph y{Vector::Constant(2, 1.5), Matrix::Zero(2, 1), Matrix::Zero(2, 2)};
  EXPECT_THROW(y.validate(), InvalidArgumentError);
  PaddedGraph p = pad(path3(), 4);
  p.mask(3) = 1.0;
  EXPECT_THROW(p.validate(), InvalidArgumentError);
}

}  // namespace
}  // namespace pmfgw
