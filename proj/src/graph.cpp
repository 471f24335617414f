// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pmfgw/graph.hpp"

#include <string>

#include "pmfgw/errors.hpp"

namespace pmfgw {

namespace {

bool same_shape(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols();
}

bool is_binary(double x) { return x == 0.0 || x == 1.0; }

void check_permutation_length(const Permutation& p, Eigen::Index n) {
  if (static_cast<Eigen::Index>(p.size()) != n) {
    throw DimensionError("permutation of length " + std::to_string(p.size()) +
                         " applied to a graph with " + std::to_string(n) + " nodes");
  }
  if (!p.is_valid()) throw InvalidArgumentError("permutation is not a bijection");
}

}  // namespace

DiscreteGraph DiscreteGraph::empty(Eigen::Index dim) {
  return {Matrix(0, dim), Matrix(0, 0)};
}

std::size_t DiscreteGraph::edge_count() const {
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < size(); ++i)
    for (Eigen::Index j = i + 1; j < size(); ++j)
      if (adjacency(i, j) != 0.0) ++count;
  return count;
}

void DiscreteGraph::validate() const {
  const Eigen::Index m = adjacency.rows();
  if (adjacency.cols() != m) throw DimensionError("adjacency matrix is not square");
  if (features.rows() != m) {
    throw DimensionError("feature matrix has " + std::to_string(features.rows()) +
                         " rows for " + std::to_string(m) + " nodes");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (adjacency(i, i) != 0.0) throw InvalidArgumentError("adjacency diagonal must be zero");
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!is_binary(adjacency(i, j))) throw InvalidArgumentError("adjacency must be binary");
      if (adjacency(i, j) != adjacency(j, i)) throw InvalidArgumentError("adjacency must be symmetric");
    }
  }
  if (!features.allFinite()) throw InvalidArgumentError("features must be finite");
}

bool DiscreteGraph::operator==(const DiscreteGraph& other) const {
  return same_shape(features, other.features) && same_shape(adjacency, other.adjacency) &&
         features == other.features && adjacency == other.adjacency;
}

void ContinuousGraph::validate() const {
  const Eigen::Index n = mask.size();
  if (features.rows() != n) throw DimensionError("feature rows do not match mask length");
  if (edges.rows() != n || edges.cols() != n) throw DimensionError("edge matrix must be M x M");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(mask(i) >= 0.0 && mask(i) <= 1.0)) throw InvalidArgumentError("mask entries must lie in [0,1]");
    for (Eigen::Index j = 0; j < n; ++j) {
      const double e = edges(i, j);
      if (!(e >= 0.0 && e <= 1.0)) throw InvalidArgumentError("edge probabilities must lie in [0,1]");
      if (e != edges(j, i)) throw InvalidArgumentError("edge probabilities must be symmetric");
    }
  }
  if (!features.allFinite()) throw InvalidArgumentError("features must be finite");
}

bool ContinuousGraph::operator==(const ContinuousGraph& other) const {
  return mask.size() == other.mask.size() && same_shape(features, other.features) &&
         same_shape(edges, other.edges) && mask == other.mask && features == other.features &&
         edges == other.edges;
}

void PaddedGraph::validate() const {
  as_continuous().validate();
  const Eigen::Index n = mask.size();
  if (true_size < 0 || true_size > n) throw InvalidArgumentError("true_size out of range");
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool active = i < true_size;
    if (mask(i) != (active ? 1.0 : 0.0)) throw InvalidArgumentError("mask is not in block form");
    if (!active && !features.row(i).isZero(0.0)) throw InvalidArgumentError("padded features must be zero");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!is_binary(edges(i, j))) throw InvalidArgumentError("padded edges must be binary");
      if ((!active || j >= true_size) && edges(i, j) != 0.0)
        throw InvalidArgumentError("padded edges must be zero");
    }
    if (edges(i, i) != 0.0) throw InvalidArgumentError("padded edge diagonal must be zero");
  }
}

bool PaddedGraph::operator==(const PaddedGraph& other) const {
  return true_size == other.true_size && as_continuous() == other.as_continuous();
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<int> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = static_cast<int>(i);
  return Permutation(std::move(m));
}

bool Permutation::is_valid() const {
  std::vector<char> seen(map.size(), 0);
  for (int v : map) {
    if (v < 0 || static_cast<std::size_t>(v) >= map.size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) inv[map[i]] = static_cast<int>(i);
  return Permutation(std::move(inv));
}

Matrix Permutation::as_matrix() const {
  const auto n = static_cast<Eigen::Index>(map.size());
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) p(i, map[i]) = 1.0;
  return p;
}

PaddedGraph pad(const DiscreteGraph& g, Eigen::Index max_nodes) {
  const Eigen::Index m = g.size();
  if (m > max_nodes) {
    throw SizeExceededError("pad: graph has " + std::to_string(m) +
                            " nodes but the padded size is " + std::to_string(max_nodes));
  }
  if (g.features.rows() != m) throw DimensionError("pad: feature rows do not match node count");
  PaddedGraph out;
  out.true_size = m;
  out.mask = Vector::Zero(max_nodes);
  out.mask.head(m).setOnes();
  out.features = Matrix::Zero(max_nodes, g.dim());
  out.features.topRows(m) = g.features;
  out.edges = Matrix::Zero(max_nodes, max_nodes);
  out.edges.topLeftCorner(m, m) = g.adjacency;
  return out;
}

DiscreteGraph unpad(const PaddedGraph& g) {
  const Eigen::Index m = g.true_size;
  return {g.features.topRows(m), g.edges.topLeftCorner(m, m)};
}

PaddedGraph threshold(const ContinuousGraph& y) {
  const Eigen::Index n = y.size();
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < n; ++i)
    if (y.mask(i) > 0.5) kept.push_back(i);

  const auto m = static_cast<Eigen::Index>(kept.size());
  PaddedGraph out;
  out.true_size = m;
  out.mask = Vector::Zero(n);
  out.mask.head(m).setOnes();
  out.features = Matrix::Zero(n, y.dim());
  out.edges = Matrix::Zero(n, n);
  for (Eigen::Index a = 0; a < m; ++a) {
    out.features.row(a) = y.features.row(kept[a]);
    for (Eigen::Index b = a + 1; b < m; ++b) {
      if (y.edges(kept[a], kept[b]) > 0.5) {
        out.edges(a, b) = 1.0;
        out.edges(b, a) = 1.0;
      }
    }
  }
  return out;
}

DiscreteGraph decode(const ContinuousGraph& y) { return unpad(threshold(y)); }

ContinuousGraph as_continuous(const DiscreteGraph& g) {
  return {Vector::Ones(g.size()), g.features, g.adjacency};
}

DiscreteGraph permute(const DiscreteGraph& g, const Permutation& p) {
  check_permutation_length(p, g.size());
  const Eigen::Index n = g.size();
  DiscreteGraph out{Matrix(n, g.dim()), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.features.row(i) = g.features.row(p.map[i]);
    for (Eigen::Index j = 0; j < n; ++j) out.adjacency(i, j) = g.adjacency(p.map[i], p.map[j]);
  }
  return out;
}

ContinuousGraph permute(const ContinuousGraph& g, const Permutation& p) {
  check_permutation_length(p, g.size());
  const Eigen::Index n = g.size();
  ContinuousGraph out{Vector(n), Matrix(n, g.dim()), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.mask(i) = g.mask(p.map[i]);
    out.features.row(i) = g.features.row(p.map[i]);
    for (Eigen::Index j = 0; j < n; ++j) out.edges(i, j) = g.edges(p.map[i], p.map[j]);
  }
  return out;
}

DiscreteGraph feature_diffuse(const DiscreteGraph& g) {
  const Eigen::Index m = g.size();
  DiscreteGraph out;
  out.adjacency = g.adjacency;
  out.features.resize(m, 2 * g.dim());
  out.features.leftCols(g.dim()) = g.features;
  out.features.rightCols(g.dim()) = g.adjacency * g.features;
  return out;
}

}  // namespace pmfgw
