// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pmfgw/metrics.hpp"

#include <algorithm>
#include <memory>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <string>

#include "pmfgw/cg_solver.hpp"
#include "pmfgw/errors.hpp"
#include "pmfgw/parallel.hpp"
#include "pmfgw/tensor_product.hpp"

namespace pmfgw {

namespace {

bool edge(const DiscreteGraph& g, Eigen::Index i, Eigen::Index j) { return g.adjacency(i, j) != 0.0; }

bool node_equal(const DiscreteGraph& g1, Eigen::Index u, const DiscreteGraph& g2, Eigen::Index v,
                const EditConfig& cfg) {
  return cfg.features_equal(g1.features.row(u).transpose(), g2.features.row(v).transpose());
}

// Depth-first search over node mappings of g1 into g2 with an admissible
// node-count bound. With allow_delete = false only bijections are explored
// (equal sizes).
class EditSearch {
 public:
  EditSearch(const DiscreteGraph& g1, const DiscreteGraph& g2, const EditConfig& cfg, bool allow_delete)
      : g1_(g1), g2_(g2), cfg_(cfg), allow_delete_(allow_delete) {
    n1_ = static_cast<int>(g1.size());
    n2_ = static_cast<int>(g2.size());
    map_.assign(n1_, -1);
    used_.assign(n2_, 0);
    for (int u = 0; u < n1_; ++u) {
      sub_.emplace_back(n2_, 0);
      for (int v = 0; v < n2_; ++v) sub_[u][v] = node_equal(g1, u, g2, v, cfg) ? 0 : 1;
    }
  }

  void set_upper_bound(int bound, std::vector<int> mapping) {
    best_ = bound;
    best_map_ = std::move(mapping);
  }

  EditResult run() {
    search(0, 0, n2_);
    return {best_, true, best_map_};
  }

 private:
  void search(int u, int cost, int free2) {
    const int remaining1 = n1_ - u;
    if (cost + std::abs(remaining1 - free2) >= best_) return;
    if (u == n1_) {
      int total = cost + free2;
      for (int a = 0; a < n2_; ++a)
        for (int b = a + 1; b < n2_; ++b)
          if ((!used_[a] || !used_[b]) && edge(g2_, a, b)) ++total;
      if (total < best_) {
        best_ = total;
        best_map_ = map_;
      }
      return;
    }
    for (int v = 0; v < n2_; ++v) {
      if (used_[v]) continue;
      int delta = sub_[u][v];
      for (int w = 0; w < u; ++w) {
        const bool e1 = edge(g1_, u, w);
        if (map_[w] >= 0) {
          if (e1 != edge(g2_, v, map_[w])) ++delta;
        } else if (e1) {
          ++delta;
        }
      }
      used_[v] = 1;
      map_[u] = v;
      search(u + 1, cost + delta, free2 - 1);
      map_[u] = -1;
      used_[v] = 0;
    }
    if (allow_delete_) {
      int delta = 1;
      for (int w = 0; w < u; ++w)
        if (edge(g1_, u, w)) ++delta;
      search(u + 1, cost + delta, free2);
    }
  }

  const DiscreteGraph& g1_;
  const DiscreteGraph& g2_;
  const EditConfig& cfg_;
  bool allow_delete_;
  int n1_ = 0, n2_ = 0;
  std::vector<std::vector<int>> sub_;
  std::vector<int> map_;
  std::vector<char> used_;
  int best_ = std::numeric_limits<int>::max();
  std::vector<int> best_map_;
};

std::vector<int> diagonal_mapping(int n1, int n2) {
  std::vector<int> m(n1, -1);
  for (int u = 0; u < std::min(n1, n2); ++u) m[u] = u;
  return m;
}

// Pads both graphs to a common size with dummy nodes, solves the unit-cost
// matching objective with conditional gradient and rounds to a permutation.
std::vector<int> matching_mapping(const DiscreteGraph& g1, const DiscreteGraph& g2, const EditConfig& cfg) {
  const int n1 = static_cast<int>(g1.size());
  const int n2 = static_cast<int>(g2.size());
  const int n = std::max(n1, n2);
  Matrix cost = Matrix::Zero(n, n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      if (u < n1 && v < n2) cost(u, v) = node_equal(g1, u, g2, v, cfg) ? 0.0 : 1.0;
      else if (u < n1 || v < n2) cost(u, v) = 1.0;
    }
  Matrix a1 = Matrix::Zero(n, n);
  Matrix a2 = Matrix::Zero(n, n);
  a1.topLeftCorner(n1, n1) = g1.adjacency;
  a2.topLeftCorner(n2, n2) = g2.adjacency;
  const Matrix ones = Matrix::Ones(n, n);
  auto tensor = std::make_shared<FactorizedTensor>(GroundLoss::squared().decompose(), a1, a2, ones, ones, 0.5);

  QuadraticObjective obj;
  obj.linear_cost = cost;
  obj.tensor_apply = [tensor](const Matrix& t, Matrix& out) { tensor->apply(t, out); };
  obj.symmetric = true;
  SolverOptions opts;
  opts.restarts = 5;
  const SolveResult res = cg_solve(obj, opts);
  const Permutation p = round_to_permutation(res.plan);

  std::vector<int> mapping(n1, -1);
  for (int u = 0; u < n1; ++u)
    if (p.map[u] < n2) mapping[u] = p.map[u];
  return mapping;
}

}  // namespace

void EditConfig::validate() const {
  if (!(radius >= 0.0)) throw InvalidArgumentError("feature radius must be >= 0");
  if (exact_size_limit < 0) throw InvalidArgumentError("exact_size_limit must be >= 0");
}

bool EditConfig::features_equal(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) const {
  if (a.size() != b.size()) return false;
  switch (match) {
    case FeatureMatch::Exact: return a == b;
    case FeatureMatch::Radius: return (a - b).norm() < radius;
    case FeatureMatch::Argmax: {
      if (a.size() == 0) return true;
      Eigen::Index ia = 0, ib = 0;
      a.maxCoeff(&ia);
      b.maxCoeff(&ib);
      return ia == ib;
    }
  }
  return false;
}

int edit_cost(const DiscreteGraph& g1, const DiscreteGraph& g2, const std::vector<int>& mapping,
              const EditConfig& cfg) {
  const Eigen::Index n1 = g1.size();
  const Eigen::Index n2 = g2.size();
  if (static_cast<Eigen::Index>(mapping.size()) != n1) throw DimensionError("edit_cost: mapping length mismatch");
  std::vector<char> used(n2, 0);
  int cost = 0;
  for (Eigen::Index u = 0; u < n1; ++u) {
    const int v = mapping[u];
    if (v < 0) {
      ++cost;
      continue;
    }
    if (v >= n2 || used[v]) throw InvalidArgumentError("edit_cost: mapping is not injective");
    used[v] = 1;
    if (!node_equal(g1, u, g2, v, cfg)) ++cost;
  }
  for (Eigen::Index v = 0; v < n2; ++v)
    if (!used[v]) ++cost;
  for (Eigen::Index u = 0; u < n1; ++u)
    for (Eigen::Index w = u + 1; w < n1; ++w) {
      const bool e1 = edge(g1, u, w);
      if (mapping[u] >= 0 && mapping[w] >= 0) {
        if (e1 != edge(g2, mapping[u], mapping[w])) ++cost;
      } else if (e1) {
        ++cost;
      }
    }
  for (Eigen::Index a = 0; a < n2; ++a)
    for (Eigen::Index b = a + 1; b < n2; ++b)
      if ((!used[a] || !used[b]) && edge(g2, a, b)) ++cost;
  return cost;
}

EditResult edit_distance(const DiscreteGraph& g1, const DiscreteGraph& g2, const EditConfig& cfg) {
  cfg.validate();
  const int n1 = static_cast<int>(g1.size());
  const int n2 = static_cast<int>(g2.size());
  std::vector<int> start = diagonal_mapping(n1, n2);
  int start_cost = edit_cost(g1, g2, start, cfg);

  if (n1 + n2 <= cfg.exact_size_limit) {
    EditSearch search(g1, g2, cfg, true);
    search.set_upper_bound(start_cost + 1, start);
    return search.run();
  }
  std::vector<int> mapping = matching_mapping(g1, g2, cfg);
  const int cost = edit_cost(g1, g2, mapping, cfg);
  if (cost <= start_cost) return {cost, false, std::move(mapping)};
  return {start_cost, false, std::move(start)};
}

Alignment align_top_m(const ContinuousGraph& pred, const DiscreteGraph& target, const EditConfig& cfg) {
  const Eigen::Index big = pred.size();
  const Eigen::Index m = target.size();
  if (big < m) {
    throw SizeExceededError("align_top_m: prediction has " + std::to_string(big) +
                            " slots for a target of " + std::to_string(m) + " nodes");
  }
  std::vector<int> order(big);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return pred.mask(a) > pred.mask(b); });
  std::vector<int> nodes(order.begin(), order.begin() + m);
  std::sort(nodes.begin(), nodes.end());

  DiscreteGraph selected{Matrix(m, pred.dim()), Matrix::Zero(m, m)};
  for (Eigen::Index a = 0; a < m; ++a) {
    selected.features.row(a) = pred.features.row(nodes[a]);
    for (Eigen::Index b = a + 1; b < m; ++b)
      if (pred.edges(nodes[a], nodes[b]) > 0.5) selected.adjacency(a, b) = selected.adjacency(b, a) = 1.0;
  }

  std::vector<int> mapping;
  if (2 * m <= cfg.exact_size_limit) {
    EditSearch search(selected, target, cfg, false);
    mapping = search.run().mapping;
  } else {
    mapping = matching_mapping(selected, target, cfg);
    // Equal sizes: the rounded permutation never maps to a dummy node.
  }
  Permutation to_target(std::move(mapping));

  Alignment out;
  out.selected = permute(selected, to_target.inverse());
  out.nodes.resize(m);
  const Permutation inv = to_target.inverse();
  for (Eigen::Index j = 0; j < m; ++j) out.nodes[j] = nodes[inv.map[j]];
  out.to_target = std::move(to_target);
  return out;
}

double size_accuracy(const ContinuousGraph& pred, const DiscreteGraph& target) {
  const auto predicted = (pred.mask.array() > 0.5).count();
  return predicted == target.size() ? 1.0 : 0.0;
}

double node_accuracy(const DiscreteGraph& aligned, const DiscreteGraph& target, const EditConfig& cfg) {
  if (aligned.size() != target.size()) throw DimensionError("node_accuracy: graphs must be aligned");
  const Eigen::Index m = target.size();
  if (m == 0) return 1.0;
  int hits = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    if (node_equal(aligned, i, target, i, cfg)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(m);
}

namespace {

struct EdgeCounts {
  double both = 0, predicted = 0, actual = 0;
};

EdgeCounts count_edges(const DiscreteGraph& aligned, const DiscreteGraph& target) {
  if (aligned.size() != target.size()) throw DimensionError("edge metrics: graphs must be aligned");
  EdgeCounts c;
  for (Eigen::Index i = 0; i < target.size(); ++i)
    for (Eigen::Index j = 0; j < target.size(); ++j) {
      const bool p = aligned.adjacency(i, j) == 1.0;
      const bool t = target.adjacency(i, j) == 1.0;
      c.both += p && t;
      c.predicted += p;
      c.actual += t;
    }
  return c;
}

}  // namespace

double edge_precision(const DiscreteGraph& aligned, const DiscreteGraph& target) {
  const EdgeCounts c = count_edges(aligned, target);
  return c.predicted == 0 ? 1.0 : c.both / c.predicted;
}

double edge_recall(const DiscreteGraph& aligned, const DiscreteGraph& target) {
  const EdgeCounts c = count_edges(aligned, target);
  return c.actual == 0 ? 1.0 : c.both / c.actual;
}

SampleMetrics evaluate_pair(const ContinuousGraph& pred, const DiscreteGraph& target, const EditConfig& cfg) {
  SampleMetrics s;
  const EditResult ed = edit_distance(decode(pred), target, cfg);
  s.edit = ed.value;
  s.edit_exact = ed.exact;
  s.gi_acc = ed.value == 0 ? 1.0 : 0.0;
  s.size_acc = size_accuracy(pred, target);
  const Alignment al = align_top_m(pred, target, cfg);
  s.node_acc = node_accuracy(al.selected, target, cfg);
  s.edge_precision = edge_precision(al.selected, target);
  s.edge_recall = edge_recall(al.selected, target);
  return s;
}

MetricReport evaluate_dataset(const std::vector<ContinuousGraph>& preds,
                              const std::vector<DiscreteGraph>& targets, const EditConfig& cfg, int threads) {
  if (preds.size() != targets.size()) {
    throw DimensionError("evaluate_dataset: " + std::to_string(preds.size()) + " predictions for " +
                         std::to_string(targets.size()) + " targets");
  }
  MetricReport r;
  r.samples.resize(preds.size());
  parallel_for(preds.size(), threads, [&](std::size_t i) { r.samples[i] = evaluate_pair(preds[i], targets[i], cfg); });
  if (r.samples.empty()) return r;
  for (const auto& s : r.samples) {
    r.edit += s.edit;
    r.gi_acc += s.gi_acc;
    r.size_acc += s.size_acc;
    r.node_acc += s.node_acc;
    r.edge_precision += s.edge_precision;
    r.edge_recall += s.edge_recall;
    r.approximate_count += s.edit_exact ? 0 : 1;
  }
  const double n = static_cast<double>(r.samples.size());
  r.edit /= n;
  r.gi_acc /= n;
  r.size_acc /= n;
  r.node_acc /= n;
  r.edge_precision /= n;
  r.edge_recall /= n;
  return r;
}

}  // namespace pmfgw
