// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "pmfgw/graph.hpp"

namespace pmfgw {

enum class FeatureMatch {
  Exact,   // all coordinates equal
  Radius,  // L2 distance strictly below radius (2D positions)
  Argmax,  // same arg-max class (one-hot labels vs. class scores)
};

struct EditConfig {
  FeatureMatch match = FeatureMatch::Exact;
  double radius = 0.05;
  int exact_size_limit = 10;  // combined node budget for the exact search

  void validate() const;
  bool features_equal(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) const;
};

struct EditResult {
  int value = 0;
  bool exact = true;
  /// mapping[u] = node of g2 matched to node u of g1, or -1 for a deletion.
  std::vector<int> mapping;
};

/// Unit-cost graph edit distance. Exact branch and bound when
/// g1.size() + g2.size() <= exact_size_limit; otherwise an upper bound from
/// a graph-matching alignment (conditional gradient + rounding).
EditResult edit_distance(const DiscreteGraph& g1, const DiscreteGraph& g2, const EditConfig& cfg);

/// Cost of the edit path induced by a node mapping (see EditResult).
int edit_cost(const DiscreteGraph& g1, const DiscreteGraph& g2, const std::vector<int>& mapping,
              const EditConfig& cfg);

struct Alignment {
  DiscreteGraph selected;   // the m most likely nodes, thresholded, target order
  std::vector<int> nodes;   // prediction slot of each selected row
  Permutation to_target;    // selected row i is matched to target node map[i]
};

/// Selects the target-size most likely prediction nodes (ties: lower index),
/// thresholds their edges at 1/2, and aligns them to the target with the
/// one-to-one matching of minimum edit cost. Rows of `selected` are reordered
/// so that row j is matched to target node j.
Alignment align_top_m(const ContinuousGraph& pred, const DiscreteGraph& target, const EditConfig& cfg);

struct SampleMetrics {
  int edit = 0;
  bool edit_exact = true;
  double gi_acc = 0.0;
  double size_acc = 0.0;
  double node_acc = 0.0;
  double edge_precision = 0.0;
  double edge_recall = 0.0;
};

double size_accuracy(const ContinuousGraph& pred, const DiscreteGraph& target);
double node_accuracy(const DiscreteGraph& aligned, const DiscreteGraph& target, const EditConfig& cfg);
double edge_precision(const DiscreteGraph& aligned, const DiscreteGraph& target);
double edge_recall(const DiscreteGraph& aligned, const DiscreteGraph& target);

SampleMetrics evaluate_pair(const ContinuousGraph& pred, const DiscreteGraph& target, const EditConfig& cfg);

struct MetricReport {
  double edit = 0.0;
  double gi_acc = 0.0;
  double size_acc = 0.0;
  double node_acc = 0.0;
  double edge_precision = 0.0;
  double edge_recall = 0.0;
  int approximate_count = 0;
  std::vector<SampleMetrics> samples;
};

MetricReport evaluate_dataset(const std::vector<ContinuousGraph>& preds,
                              const std::vector<DiscreteGraph>& targets, const EditConfig& cfg,
                              int threads = 1);

}  // namespace pmfgw
