// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pmfgw/batch.hpp"

#include <algorithm>
#include <cmath>

#include "pmfgw/parallel.hpp"

#ifndef PMFGW_VERSION
#define PMFGW_VERSION "0.0.0"
#endif

namespace pmfgw::batch {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_length(std::span<const double> buf, std::size_t n, std::size_t per_item, const char* name) {
  if (buf.size() == n * per_item) return;
  const std::size_t item = per_item == 0 ? 0 : std::min(n == 0 ? 0 : n - 1, buf.size() / per_item);
  throw BatchItemError(item, std::string(name) + " buffer has " + std::to_string(buf.size()) +
                                 " values, expected " + std::to_string(n * per_item));
}

void check_request(const BatchRequest& r) {
  const std::size_t m = r.max_nodes, d = r.dim, n = r.size;
  check_length(r.pred_mask, n, m, "pred_mask");
  check_length(r.pred_features, n, m * d, "pred_features");
  check_length(r.pred_edges, n, m * m, "pred_edges");
  check_length(r.target_mask, n, m, "target_mask");
  check_length(r.target_features, n, m * d, "target_features");
  check_length(r.target_edges, n, m * m, "target_edges");
}

Vector read_vector(std::span<const double> buf, std::size_t item, std::size_t len) {
  return Eigen::Map<const Vector>(buf.data() + item * len, static_cast<Eigen::Index>(len));
}

Matrix read_matrix(std::span<const double> buf, std::size_t item, std::size_t rows, std::size_t cols) {
  return Eigen::Map<const RowMajor>(buf.data() + item * rows * cols, static_cast<Eigen::Index>(rows),
                                    static_cast<Eigen::Index>(cols));
}

void write_matrix(std::vector<double>& buf, std::size_t item, const Matrix& m) {
  Eigen::Map<RowMajor>(buf.data() + item * static_cast<std::size_t>(m.size()), m.rows(), m.cols()) = m;
}

BatchResult run(const BatchRequest& request, bool with_grad) {
  check_request(request);
  const std::size_t n = request.size, m = request.max_nodes, d = request.dim;
  BatchResult out;
  out.values.assign(n, 0.0);
  if (with_grad) {
    out.d_mask.assign(n * m, 0.0);
    out.d_features.assign(n * m * d, 0.0);
    out.d_edges.assign(n * m * m, 0.0);
  }
  if (n == 0) return out;
  const LossConfig cfg = request.config.to_loss_config();

  parallel_for(n, request.threads, [&](std::size_t i) {
    const ContinuousGraph pred = prediction(request, i);
    const PaddedGraph tgt = target(request, i);
    LossResult res;
    try {
      res = pmfgw(pred, tgt, cfg);
    } catch (const Error& e) {
      throw BatchItemError(i, e.what());
    }
    out.values[i] = res.value;
    if (!with_grad) return;
    const LossGradient g = pmfgw_grad(pred, tgt, cfg, res.plan);
    Eigen::Map<Vector>(out.d_mask.data() + i * m, static_cast<Eigen::Index>(m)) = g.d_mask;
    write_matrix(out.d_features, i, g.d_features);
    write_matrix(out.d_edges, i, g.d_edges);
  });
  return out;
}

}  // namespace

BatchItemError::BatchItemError(std::size_t item, const std::string& what)
    : Error("batch item " + std::to_string(item) + ": " + what), item_(item) {}

LossConfig BatchConfig::to_loss_config() const {
  LossConfig cfg;
  cfg.alpha = alpha;
  cfg.loss_h = GroundLoss{parse_loss_kind(loss_h)};
  cfg.loss_f = GroundLoss{parse_loss_kind(loss_f)};
  cfg.loss_a = GroundLoss{parse_loss_kind(loss_a)};
  cfg.normalize_alpha = normalize_alpha;
  cfg.solver.max_iterations = max_iterations;
  cfg.solver.relative_tolerance = tolerance;
  cfg.solver.init = parse_init_kind(init);
  cfg.solver.restarts = restarts;
  cfg.solver.seed = seed;
  cfg.validate();
  return cfg;
}

ContinuousGraph prediction(const BatchRequest& r, std::size_t item) {
  if (item >= r.size) throw BatchItemError(item, "index out of range");
  ContinuousGraph g{read_vector(r.pred_mask, item, r.max_nodes), read_matrix(r.pred_features, item, r.max_nodes, r.dim),
                    read_matrix(r.pred_edges, item, r.max_nodes, r.max_nodes)};
  if (!g.mask.allFinite() || !g.features.allFinite() || !g.edges.allFinite())
    throw BatchItemError(item, "prediction has non-finite entries");
  return g;
}

PaddedGraph target(const BatchRequest& r, std::size_t item) {
  if (item >= r.size) throw BatchItemError(item, "index out of range");
  PaddedGraph g;
  g.mask = read_vector(r.target_mask, item, r.max_nodes);
  g.features = read_matrix(r.target_features, item, r.max_nodes, r.dim);
  g.edges = read_matrix(r.target_edges, item, r.max_nodes, r.max_nodes);
  g.true_size = static_cast<Eigen::Index>(std::count_if(g.mask.begin(), g.mask.end(), [](double v) { return v > 0.5; }));
  try {
    g.validate();
  } catch (const Error& e) {
    throw BatchItemError(item, e.what());
  }
  return g;
}

BatchResult loss_and_grad(const BatchRequest& request) { return run(request, true); }

BatchResult loss_only(const BatchRequest& request) { return run(request, false); }

std::string version() { return PMFGW_VERSION; }

}  // namespace pmfgw::batch
