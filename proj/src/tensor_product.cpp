// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pmfgw/tensor_product.hpp"

#include "pmfgw/errors.hpp"

namespace pmfgw {

namespace {

void check_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw DimensionError(std::string("tensor product: ") + what + " must be square");
}

void check_inputs(const Matrix& a_pred, const Matrix& a_tgt, const Matrix& w_pred,
                  const Matrix& w_tgt) {
  check_square(a_pred, "prediction structure");
  check_square(a_tgt, "target structure");
  if (w_pred.rows() != a_pred.rows() || w_pred.cols() != a_pred.cols())
    throw DimensionError("tensor product: prediction weights shape mismatch");
  if (w_tgt.rows() != a_tgt.rows() || w_tgt.cols() != a_tgt.cols())
    throw DimensionError("tensor product: target weights shape mismatch");
}

void check_plan(const Matrix& t, Eigen::Index n, Eigen::Index m) {
  if (t.rows() != n || t.cols() != m) throw DimensionError("tensor product: plan must be n x m");
}

}  // namespace

FactorizedTensor::FactorizedTensor(const LossDecomposition& dec, const Matrix& a_pred,
                                   const Matrix& a_tgt, const Matrix& w_pred, const Matrix& w_tgt,
                                   double scale)
    : w_pred_(w_pred), w_tgt_(w_tgt), scale_(scale) {
  check_inputs(a_pred, a_tgt, w_pred, w_tgt);
  u1_ = a_pred.unaryExpr([&](double a) { return dec.eval_f1(a); }).cwiseProduct(w_pred);
  v1_ = a_pred.unaryExpr([&](double a) { return dec.eval_h1(a); }).cwiseProduct(w_pred);
  u2_ = a_tgt.unaryExpr([&](double b) { return dec.eval_f2(b); }).cwiseProduct(w_tgt);
  v2_ = a_tgt.unaryExpr([&](double b) { return dec.eval_h2(b); }).cwiseProduct(w_tgt);
}

void FactorizedTensor::apply(const Matrix& t, Matrix& out) const {
  check_plan(t, rows(), cols());
  scratch_a_.noalias() = t * w_tgt_.transpose();
  out.noalias() = u1_ * scratch_a_;
  scratch_a_.noalias() = w_pred_ * t;
  out.noalias() += scratch_a_ * u2_.transpose();
  scratch_b_.noalias() = t * v2_.transpose();
  out.noalias() -= v1_ * scratch_b_;
  if (scale_ != 1.0) out *= scale_;
}

FactorizedTensor FactorizedTensor::transposed() const {
  FactorizedTensor t;
  t.u1_ = u1_.transpose();
  t.u2_ = u2_.transpose();
  t.v1_ = v1_.transpose();
  t.v2_ = v2_.transpose();
  t.w_pred_ = w_pred_.transpose();
  t.w_tgt_ = w_tgt_.transpose();
  t.scale_ = scale_;
  return t;
}

Matrix tensor_product_factorized(const LossDecomposition& dec, const Matrix& a_pred,
                                 const Matrix& a_tgt, const Matrix& w_pred, const Matrix& w_tgt,
                                 const Matrix& t) {
  return FactorizedTensor(dec, a_pred, a_tgt, w_pred, w_tgt).apply(t);
}

Matrix tensor_product_naive(const GroundLoss& loss, const Matrix& a_pred, const Matrix& a_tgt,
                            const Matrix& w_pred, const Matrix& w_tgt, const Matrix& t) {
  check_inputs(a_pred, a_tgt, w_pred, w_tgt);
  const Eigen::Index n = a_pred.rows();
  const Eigen::Index m = a_tgt.rows();
  check_plan(t, n, m);
  Matrix out = Matrix::Zero(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index ip = 0; ip < m; ++ip) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index jp = 0; jp < m; ++jp)
          s += t(j, jp) * loss.eval(a_pred(i, j), a_tgt(ip, jp)) * w_pred(i, j) * w_tgt(ip, jp);
      out(i, ip) = s;
    }
  return out;
}

}  // namespace pmfgw
