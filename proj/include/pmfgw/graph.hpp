// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace pmfgw {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A graph with m nodes: an m x d feature matrix and a symmetric binary
/// adjacency matrix with zero diagonal.
struct DiscreteGraph {
  Matrix features;
  Matrix adjacency;

  DiscreteGraph() = default;
  DiscreteGraph(Matrix f, Matrix a) : features(std::move(f)), adjacency(std::move(a)) {}

  /// Empty graph with the given feature dimension.
  static DiscreteGraph empty(Eigen::Index dim);

  Eigen::Index size() const { return adjacency.rows(); }
  Eigen::Index dim() const { return features.cols(); }
  std::size_t edge_count() const;

  /// Throws DimensionError / InvalidArgumentError when an invariant is broken.
  void validate() const;

  bool operator==(const DiscreteGraph& other) const;
};

/// A relaxed graph of fixed size M: node probabilities, node features and
/// edge probabilities.
struct ContinuousGraph {
  Vector mask;
  Matrix features;
  Matrix edges;

  ContinuousGraph() = default;
  ContinuousGraph(Vector h, Matrix f, Matrix a)
      : mask(std::move(h)), features(std::move(f)), edges(std::move(a)) {}

  Eigen::Index size() const { return mask.size(); }
  Eigen::Index dim() const { return features.cols(); }

  void validate() const;

  bool operator==(const ContinuousGraph& other) const;
};

/// A continuous graph in block form (1_m, 0_{M-m}) with binary edges and
/// zeroed padded rows. Produced by pad() and threshold().
struct PaddedGraph {
  Vector mask;
  Matrix features;
  Matrix edges;
  Eigen::Index true_size = 0;

  Eigen::Index size() const { return mask.size(); }
  Eigen::Index dim() const { return features.cols(); }

  ContinuousGraph as_continuous() const { return {mask, features, edges}; }

  void validate() const;

  bool operator==(const PaddedGraph& other) const;
};

/// Bijection of {0..n-1}. map[i] is the old index that becomes node i, i.e.
/// permuting by p applies the matrix P with P(i, map[i]) = 1 as (P F, P A P^T).
struct Permutation {
  std::vector<int> map;

  Permutation() = default;
  explicit Permutation(std::vector<int> m) : map(std::move(m)) {}

  static Permutation identity(std::size_t n);

  std::size_t size() const { return map.size(); }
  bool is_valid() const;
  Permutation inverse() const;
  Matrix as_matrix() const;

  bool operator==(const Permutation& other) const = default;
};

PaddedGraph pad(const DiscreteGraph& g, Eigen::Index max_nodes);

/// Inverse of pad(). Reads the leading true_size block.
DiscreteGraph unpad(const PaddedGraph& g);

/// Keeps node i iff mask_i > 1/2 and edge (i, j) iff edges_ij > 1/2 and both
/// endpoints survive. Survivors are compacted to the leading block in their
/// original order.
PaddedGraph threshold(const ContinuousGraph& y);

DiscreteGraph decode(const ContinuousGraph& y);

/// Embeds a discrete graph as a continuous one with an all-ones mask.
ContinuousGraph as_continuous(const DiscreteGraph& g);

DiscreteGraph permute(const DiscreteGraph& g, const Permutation& p);
ContinuousGraph permute(const ContinuousGraph& g, const Permutation& p);

/// Replaces features F by [F, A F].
DiscreteGraph feature_diffuse(const DiscreteGraph& g);

}  // namespace pmfgw
