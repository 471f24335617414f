// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>

namespace pmfgw {

enum class LossKind {
  Squared,              // "l2"
  BinaryCrossEntropy,   // "bce"
  SoftmaxCrossEntropy,  // "softmax-ce"
  Constant,             // ell(a, b) = c, used for the partial-FGW reduction
};

LossKind parse_loss_kind(std::string_view name);
std::string loss_kind_name(LossKind kind);

/// Scalar functions of the split ell(a,b) = f1(a) + f2(b) - h1(a) h2(b),
/// together with the derivatives of the prediction-side functions.
struct LossDecomposition {
  double (*f1)(double, double);
  double (*f2)(double, double);
  double (*h1)(double, double);
  double (*h2)(double, double);
  double (*df1)(double, double);
  double (*dh1)(double, double);
  double epsilon = 1e-7;
  double constant = 0.0;

  double eval_f1(double a) const { return f1(a, epsilon) + constant; }
  double eval_f2(double b) const { return f2(b, epsilon); }
  double eval_h1(double a) const { return h1(a, epsilon); }
  double eval_h2(double b) const { return h2(b, epsilon); }
  double eval_df1(double a) const { return df1(a, epsilon); }
  double eval_dh1(double a) const { return dh1(a, epsilon); }
};

/// Ground loss between a prediction and a target. Cross-entropy variants
/// take probabilities and clamp them into [eps, 1 - eps]; targets are used
/// unclamped.
struct GroundLoss {
  LossKind kind = LossKind::BinaryCrossEntropy;
  double clamp_epsilon = 1e-7;
  double constant = 0.0;

  GroundLoss() = default;
  explicit GroundLoss(LossKind k, double eps = 1e-7) : kind(k), clamp_epsilon(eps) { validate(); }

  static GroundLoss squared() { return GroundLoss(LossKind::Squared); }
  static GroundLoss bce(double eps = 1e-7) { return GroundLoss(LossKind::BinaryCrossEntropy, eps); }
  static GroundLoss softmax_ce(double eps = 1e-7) { return GroundLoss(LossKind::SoftmaxCrossEntropy, eps); }
  static GroundLoss constant_value(double c);

  void validate() const;

  double eval(double predicted, double target) const;
  double eval(const Eigen::Ref<const Eigen::VectorXd>& predicted,
              const Eigen::Ref<const Eigen::VectorXd>& target) const;

  /// d ell / d predicted.
  double derivative(double predicted, double target) const;
  Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& predicted,
                           const Eigen::Ref<const Eigen::VectorXd>& target) const;

  /// Same as eval() but the prediction is a logit (sigmoid for bce, softmax
  /// for softmax-ce). Other kinds take the value unchanged.
  double eval_logits(double logit, double target) const;
  double eval_logits(const Eigen::Ref<const Eigen::VectorXd>& logits,
                     const Eigen::Ref<const Eigen::VectorXd>& target) const;

  /// Throws UnsupportedError for softmax-ce.
  LossDecomposition decompose() const;
};

}  // namespace pmfgw
