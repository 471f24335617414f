// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pmfgw/errors.hpp"
#include "pmfgw/pmfgw.hpp"

namespace pmfgw::batch {

/// Loss settings as plain scalars and names, convertible to LossConfig.
struct BatchConfig {
  std::array<double, 3> alpha{1.0, 1.0, 1.0};
  std::string loss_h = "bce";
  std::string loss_f = "l2";
  std::string loss_a = "bce";
  bool normalize_alpha = true;
  int max_iterations = 100;
  double tolerance = 1e-6;
  std::string init = "uniform";
  int restarts = 1;
  std::uint64_t seed = 0;

  LossConfig to_loss_config() const;
};

/// n items sharing the padded size M and feature dimension d. Buffers are
/// contiguous row-major doubles, item-major:
///   pred_mask, target_mask        n * M
///   pred_features, target_features n * M * d
///   pred_edges, target_edges      n * M * M
/// Targets must be padded graphs (block-form mask, binary edges).
struct BatchRequest {
  std::size_t size = 0;
  std::size_t max_nodes = 0;
  std::size_t dim = 0;
  std::span<const double> pred_mask, pred_features, pred_edges;
  std::span<const double> target_mask, target_features, target_edges;
  BatchConfig config;
  int threads = 1;
};

/// Gradients use the same item-major layout as the prediction buffers.
struct BatchResult {
  std::vector<double> values;
  std::vector<double> d_mask, d_features, d_edges;
};

/// Raised for a malformed item; item() is its zero-based index.
class BatchItemError : public Error {
 public:
  BatchItemError(std::size_t item, const std::string& what);
  std::size_t item() const { return item_; }

 private:
  std::size_t item_;
};

/// Values and plan-fixed gradients; item i equals pmfgw / pmfgw_grad on the
/// same pair.
BatchResult loss_and_grad(const BatchRequest& request);

/// Values only (gradient vectors left empty).
BatchResult loss_only(const BatchRequest& request);

std::string version();

/// Item i of the request as library types. Throws BatchItemError.
ContinuousGraph prediction(const BatchRequest& request, std::size_t item);
PaddedGraph target(const BatchRequest& request, std::size_t item);

}  // namespace pmfgw::batch
