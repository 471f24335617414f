// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pmfgw/graph.hpp"
#include "pmfgw/hungarian.hpp"

namespace pmfgw {

/// objective(T) = <T, linear_cost> + <T, tensor_apply(T)> over doubly
/// stochastic T. When `symmetric` is false, tensor_apply_adjoint must be set
/// and is used for the gradient term L^T T.
struct QuadraticObjective {
  using Operator = std::function<void(const Matrix&, Matrix&)>;

  Matrix linear_cost;
  Operator tensor_apply;
  Operator tensor_apply_adjoint;
  bool symmetric = true;

  Eigen::Index size() const { return linear_cost.rows(); }
  double evaluate(const Matrix& t) const;
  /// linear_cost + L T + L^T T
  void gradient(const Matrix& t, Matrix& out) const;
};

enum class InitKind { Uniform, Given, Random };

InitKind parse_init_kind(const std::string& name);

struct SolverOptions {
  int max_iterations = 100;
  double relative_tolerance = 1e-6;
  InitKind init = InitKind::Uniform;
  std::optional<Matrix> initial_plan;  // used with InitKind::Given
  int restarts = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SolverTrace {
  std::vector<double> objectives;  // initial value, then one entry per iteration
  std::vector<double> step_sizes;  // one entry per iteration; final 0 marks stationarity
  int iterations = 0;              // linear-minimization calls
  int restart_index = 0;           // which restart produced the result

  int accepted_steps() const;
};

struct SolveResult {
  Matrix plan;
  double value = 0.0;
  SolverTrace trace;
};

/// Minimizer of phi(t) = a t^2 + b t over [0, 1]. For a <= 0 the endpoint
/// with the smaller value wins (0 on ties).
double line_search_step(double a, double b);

/// Frank-Wolfe on the Birkhoff polytope with Hungarian linear minimization
/// and exact line search. Restart 0 uses opts.init; later restarts start
/// from random plans seeded by (seed, restart). Best value wins, lowest
/// restart index on ties.
SolveResult cg_solve(const QuadraticObjective& obj, const SolverOptions& opts);

struct PermutationMinimum {
  Permutation permutation;
  double value = 0.0;
};

/// Exhaustive minimum over all permutation matrices. Size is capped at 8.
PermutationMinimum brute_force_min(const QuadraticObjective& obj, int max_size = 8);

/// Permutation maximizing <P, T>.
Permutation round_to_permutation(const Matrix& plan);

/// Largest deviation of row and column sums from one.
double marginal_violation(const Matrix& plan);

/// Convex combination of random permutation matrices.
Matrix random_plan(Eigen::Index n, std::uint64_t seed);

}  // namespace pmfgw
