// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "pmfgw/graph.hpp"

namespace pmfgw {

struct Assignment {
  Permutation permutation;  // row i -> column permutation.map[i]
  double value = 0.0;
};

/// Dense O(n^3) shortest-augmenting-path Hungarian method. Minimizes
/// sum_i cost(i, p(i)). Ties are resolved by scan order, so the result is
/// deterministic for a fixed input. Throws on non-finite or non-square input.
Assignment hungarian(const Matrix& cost);

/// Reusable workspace variant; avoids per-call allocation in hot loops.
class HungarianSolver {
 public:
  const Assignment& solve(const Matrix& cost);

 private:
  std::vector<double> u_, v_, minv_;
  std::vector<int> p_, way_;
  std::vector<char> used_;
  Assignment result_;
};

}  // namespace pmfgw
