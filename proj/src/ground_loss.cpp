// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pmfgw/ground_loss.hpp"

#include <algorithm>
#include <cmath>

#include "pmfgw/errors.hpp"

namespace pmfgw {

namespace {

double clamp_prob(double p, double eps) { return std::clamp(p, eps, 1.0 - eps); }
bool inside_clamp(double p, double eps) { return p > eps && p < 1.0 - eps; }

// x log x with the 0 log 0 = 0 convention.
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double sq_f1(double a, double) { return a * a; }
double sq_f2(double b, double) { return b * b; }
double sq_h1(double a, double) { return 2.0 * a; }
double sq_h2(double b, double) { return b; }
double sq_df1(double a, double) { return 2.0 * a; }
double sq_dh1(double, double) { return 2.0; }

double kl_f1(double p, double eps) { return -std::log(clamp_prob(p, eps)); }
double kl_f2(double q, double) { return xlogx(q) + xlogx(1.0 - q); }
double kl_h1(double p, double eps) {
  const double c = clamp_prob(p, eps);
  return std::log1p(-c) - std::log(c);
}
double kl_h2(double q, double) { return 1.0 - q; }
double kl_df1(double p, double eps) { return inside_clamp(p, eps) ? -1.0 / p : 0.0; }
double kl_dh1(double p, double eps) {
  return inside_clamp(p, eps) ? -1.0 / (1.0 - p) - 1.0 / p : 0.0;
}

double zero(double, double) { return 0.0; }

double bernoulli_kl(double p, double q, double eps) {
  const double c = clamp_prob(p, eps);
  double v = 0.0;
  if (q > 0.0) v += q * (std::log(q) - std::log(c));
  if (q < 1.0) v += (1.0 - q) * (std::log1p(-q) - std::log1p(-c));
  return v;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

LossKind parse_loss_kind(std::string_view name) {
  if (name == "l2") return LossKind::Squared;
  if (name == "bce") return LossKind::BinaryCrossEntropy;
  if (name == "softmax-ce") return LossKind::SoftmaxCrossEntropy;
  throw InvalidArgumentError("unknown loss kind '" + std::string(name) + "' (expected l2, bce or softmax-ce)");
}

std::string loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::Squared: return "l2";
    case LossKind::BinaryCrossEntropy: return "bce";
    case LossKind::SoftmaxCrossEntropy: return "softmax-ce";
    case LossKind::Constant: return "constant";
  }
  return "unknown";
}

GroundLoss GroundLoss::constant_value(double c) {
  GroundLoss loss;
  loss.kind = LossKind::Constant;
  loss.constant = c;
  return loss;
}

void GroundLoss::validate() const {
  if (!(clamp_epsilon > 0.0 && clamp_epsilon < 0.5))
    throw InvalidArgumentError("clamp_epsilon must lie in (0, 0.5)");
}

double GroundLoss::eval(double p, double q) const {
  switch (kind) {
    case LossKind::Squared: return (p - q) * (p - q);
    case LossKind::BinaryCrossEntropy: return bernoulli_kl(p, q, clamp_epsilon);
    case LossKind::SoftmaxCrossEntropy:
      // A scalar is a one-class distribution.
      return -q * std::log(clamp_prob(p, clamp_epsilon));
    case LossKind::Constant: return constant;
  }
  return 0.0;
}

double GroundLoss::eval(const Eigen::Ref<const Eigen::VectorXd>& p,
                        const Eigen::Ref<const Eigen::VectorXd>& q) const {
  if (p.size() != q.size()) throw DimensionError("ground loss: prediction and target dimensions differ");
  switch (kind) {
    case LossKind::Squared: return (p - q).squaredNorm();
    case LossKind::BinaryCrossEntropy: {
      double v = 0.0;
      for (Eigen::Index k = 0; k < p.size(); ++k) v += bernoulli_kl(p(k), q(k), clamp_epsilon);
      return v;
    }
    case LossKind::SoftmaxCrossEntropy: {
      double v = 0.0;
      for (Eigen::Index k = 0; k < p.size(); ++k)
        if (q(k) != 0.0) v -= q(k) * std::log(clamp_prob(p(k), clamp_epsilon));
      return v;
    }
    case LossKind::Constant: return constant;
  }
  return 0.0;
}

double GroundLoss::derivative(double p, double q) const {
  switch (kind) {
    case LossKind::Squared: return 2.0 * (p - q);
    case LossKind::BinaryCrossEntropy:
      if (!inside_clamp(p, clamp_epsilon)) return 0.0;
      return -q / p + (1.0 - q) / (1.0 - p);
    case LossKind::SoftmaxCrossEntropy:
      return inside_clamp(p, clamp_epsilon) ? -q / p : 0.0;
    case LossKind::Constant: return 0.0;
  }
  return 0.0;
}

Eigen::VectorXd GroundLoss::gradient(const Eigen::Ref<const Eigen::VectorXd>& p,
                                     const Eigen::Ref<const Eigen::VectorXd>& q) const {
  if (p.size() != q.size()) throw DimensionError("ground loss: prediction and target dimensions differ");
  Eigen::VectorXd g(p.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) g(k) = derivative(p(k), q(k));
  return g;
}

double GroundLoss::eval_logits(double logit, double q) const {
  if (kind == LossKind::BinaryCrossEntropy || kind == LossKind::SoftmaxCrossEntropy)
    return eval(sigmoid(logit), q);
  return eval(logit, q);
}

double GroundLoss::eval_logits(const Eigen::Ref<const Eigen::VectorXd>& logits,
                               const Eigen::Ref<const Eigen::VectorXd>& q) const {
  if (kind == LossKind::SoftmaxCrossEntropy) {
    const double top = logits.size() ? logits.maxCoeff() : 0.0;
    Eigen::VectorXd e = (logits.array() - top).exp().matrix();
    return eval(Eigen::VectorXd(e / e.sum()), q);
  }
  if (kind == LossKind::BinaryCrossEntropy) {
    Eigen::VectorXd p = logits.unaryExpr([](double x) { return sigmoid(x); });
    return eval(p, q);
  }
  return eval(logits, q);
}

LossDecomposition GroundLoss::decompose() const {
  switch (kind) {
    case LossKind::Squared:
      return {sq_f1, sq_f2, sq_h1, sq_h2, sq_df1, sq_dh1, clamp_epsilon, 0.0};
    case LossKind::BinaryCrossEntropy:
      return {kl_f1, kl_f2, kl_h1, kl_h2, kl_df1, kl_dh1, clamp_epsilon, 0.0};
    case LossKind::Constant:
      return {zero, zero, zero, zero, zero, zero, clamp_epsilon, constant};
    case LossKind::SoftmaxCrossEntropy:
      break;
  }
  throw UnsupportedError("softmax-ce has no f1 + f2 - h1 h2 decomposition; use it for node features only");
}

}  // namespace pmfgw
