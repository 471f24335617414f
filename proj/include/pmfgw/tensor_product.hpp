// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "pmfgw/graph.hpp"
#include "pmfgw/ground_loss.hpp"

namespace pmfgw {

/// (L (x) T)_{i,i'} = sum_{j,j'} T_{j,j'} ell(A_{i,j}, A'_{i',j'}) W_{i,j} W'_{i',j'}
/// for a decomposable ell, evaluated as U1 T W'^T + W T U2^T - V1 T V2^T.
/// A, W are n x n (prediction side), A', W' are m x m (target side) and T is
/// n x m. The four factor matrices are built once; apply() then costs
/// O(n^2 m + n m^2).
class FactorizedTensor {
 public:
  FactorizedTensor() = default;
  FactorizedTensor(const LossDecomposition& dec, const Matrix& a_pred, const Matrix& a_tgt,
                   const Matrix& w_pred, const Matrix& w_tgt, double scale = 1.0);

  Eigen::Index rows() const { return w_pred_.rows(); }
  Eigen::Index cols() const { return w_tgt_.rows(); }

  void apply(const Matrix& t, Matrix& out) const;
  Matrix apply(const Matrix& t) const {
    Matrix out;
    apply(t, out);
    return out;
  }

  /// Tensor built from the transposed inputs; it applies the adjoint L^T.
  FactorizedTensor transposed() const;

 private:
  Matrix u1_, u2_, v1_, v2_, w_pred_, w_tgt_;
  double scale_ = 1.0;
  mutable Matrix scratch_a_, scratch_b_;
};

Matrix tensor_product_factorized(const LossDecomposition& dec, const Matrix& a_pred,
                                 const Matrix& a_tgt, const Matrix& w_pred, const Matrix& w_tgt,
                                 const Matrix& t);

/// Literal O(n^2 m^2) quadruple sum with the same signature. Reference only.
Matrix tensor_product_naive(const GroundLoss& loss, const Matrix& a_pred, const Matrix& a_tgt,
                            const Matrix& w_pred, const Matrix& w_tgt, const Matrix& t);

}  // namespace pmfgw
