// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pmfgw/hungarian.hpp"

#include <limits>

#include "pmfgw/errors.hpp"

namespace pmfgw {

Assignment hungarian(const Matrix& cost) {
  HungarianSolver solver;
  return solver.solve(cost);
}

const Assignment& HungarianSolver::solve(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw DimensionError("hungarian: cost matrix must be square");
  if (!cost.allFinite()) throw InvalidArgumentError("hungarian: cost matrix has non-finite entries");

  const int n = static_cast<int>(cost.rows());
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is the virtual source.
  u_.assign(n + 1, 0.0);
  v_.assign(n + 1, 0.0);
  p_.assign(n + 1, 0);
  way_.assign(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p_[0] = i;
    int j0 = 0;
    minv_.assign(n + 1, inf);
    used_.assign(n + 1, 0);
    do {
      used_[j0] = 1;
      const int i0 = p_[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used_[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u_[i0] - v_[j];
        if (cur < minv_[j]) {
          minv_[j] = cur;
          way_[j] = j0;
        }
        if (minv_[j] < delta) {
          delta = minv_[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used_[j]) {
          u_[p_[j]] += delta;
          v_[j] -= delta;
        } else {
          minv_[j] -= delta;
        }
      }
      j0 = j1;
    } while (p_[j0] != 0);
    do {
      const int j1 = way_[j0];
      p_[j0] = p_[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  result_.permutation.map.assign(n, -1);
  for (int j = 1; j <= n; ++j) result_.permutation.map[p_[j] - 1] = j - 1;
  // Sum the chosen entries directly rather than trusting the dual value.
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += cost(i, result_.permutation.map[i]);
  result_.value = total;
  return result_;
}

}  // namespace pmfgw
