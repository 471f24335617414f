// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <memory>
#include <vector>

#include "pmfgw/cg_solver.hpp"
#include "pmfgw/graph.hpp"
#include "pmfgw/ground_loss.hpp"
#include "pmfgw/tensor_product.hpp"

namespace pmfgw {

struct LossConfig {
  std::array<double, 3> alpha{1.0, 1.0, 1.0};  // (node mask, features, structure)
  GroundLoss loss_h = GroundLoss::bce();
  GroundLoss loss_f = GroundLoss::squared();
  GroundLoss loss_a = GroundLoss::bce();
  bool normalize_alpha = true;
  SolverOptions solver;

  void validate() const;
  /// Alpha after optional projection onto the simplex (division by the sum).
  std::array<double, 3> effective_alpha() const;
};

struct LossResult {
  double value = 0.0;
  // Each term carries its own 1/M, 1/m, 1/m^2 normalization.
  double term_h = 0.0;
  double term_f = 0.0;
  double term_a = 0.0;
  Matrix plan;
  SolverTrace trace;
};

struct LossGradient {
  Vector d_mask;
  Matrix d_features;
  Matrix d_edges;
};

/// The masked objective for one (prediction, padded target) pair. Holds the
/// precomputed linear cost and factorized structure tensor so that the
/// objective, its term breakdown and its gradients can all be evaluated at
/// any plan.
class PmfgwProblem {
 public:
  PmfgwProblem(const ContinuousGraph& pred, const PaddedGraph& target, const LossConfig& cfg);

  Eigen::Index size() const { return size_; }
  const QuadraticObjective& objective() const { return objective_; }

  /// Unweighted normalized terms (h, F, A) at a plan.
  std::array<double, 3> terms(const Matrix& plan) const;
  /// Weighted value at a plan.
  double value(const Matrix& plan) const;
  /// Partial derivatives w.r.t. every entry of the prediction at a fixed plan.
  LossGradient gradient(const Matrix& plan) const;

  LossResult solve() const;
  LossResult evaluate_at(const Matrix& plan, SolverTrace trace = {}) const;

 private:
  LossResult solve_canonical(const SolverOptions& opts) const;

  ContinuousGraph pred_;
  PaddedGraph target_;
  LossConfig cfg_;
  std::array<double, 3> alpha_{};
  Eigen::Index size_ = 0;
  double inv_m_ = 0.0;
  Matrix cost_h_;  // ell_h(pred_i, h_j)
  Matrix cost_f_;  // ell_F(f_i, f_j) h_j
  std::shared_ptr<FactorizedTensor> structure_;          // unscaled masked tensor
  std::shared_ptr<FactorizedTensor> structure_adjoint_;  // set when not symmetric
  QuadraticObjective objective_;
};

LossResult pmfgw(const ContinuousGraph& pred, const PaddedGraph& target, const LossConfig& cfg);

/// Plan-fixed gradient. Throws InvalidArgumentError for an infeasible plan.
LossGradient pmfgw_grad(const ContinuousGraph& pred, const PaddedGraph& target,
                        const LossConfig& cfg, const Matrix& plan);

struct GradientCheck {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  std::size_t entries = 0;
};

/// Compares pmfgw_grad with central differences of the plan-fixed value over
/// every prediction entry. Relative error is |g - fd| / max(|g|, |fd|, floor).
GradientCheck gradient_check(const ContinuousGraph& pred, const PaddedGraph& target, const LossConfig& cfg,
                             const Matrix& plan, double step = 1e-5, double floor = 1e-6);

/// Weighted fused Gromov-Wasserstein between equal-size graphs:
/// min_T alpha_f sum T ell_F + alpha_A sum T T ell_A (alpha_h unused, no
/// size normalization).
LossResult fgw(const DiscreteGraph& g1, const DiscreteGraph& g2, const LossConfig& cfg);

struct GraphMatch {
  Permutation permutation;
  double value = 0.0;
};

/// Same objective as fgw() minimized exactly over permutations (m <= 8).
GraphMatch gm_exact(const DiscreteGraph& g1, const DiscreteGraph& g2, const LossConfig& cfg);

/// Partial FGW computed through padding: the small graph is padded to the
/// size of the big one and the masked objective is solved with ell_h = 0.
/// The first small.size() columns of the returned plan form a partial plan.
LossResult partial_fgw(const ContinuousGraph& big, const DiscreteGraph& small, const LossConfig& cfg);
LossResult partial_fgw(const DiscreteGraph& big, const DiscreteGraph& small, const LossConfig& cfg);

struct ToyPoint {
  double a = 0.0;
  double h = 0.0;
  double train = 0.0;
  double eval = 0.0;
};

/// Two-node target padded to three nodes against the one-parameter-pair
/// prediction family y(a, h). Squared grounds for mask and structure, alpha
/// (1, 1, 2) without normalization.
LossConfig toy_config();
ContinuousGraph toy_prediction(double a, double h);
DiscreteGraph toy_target();
std::vector<ToyPoint> toy_landscape(int grid_a, int grid_h);

}  // namespace pmfgw
