// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pmfgw/errors.hpp"
#include "pmfgw/ground_loss.hpp"

namespace pmfgw {
namespace {

TEST(GroundLoss, SquaredValue) { EXPECT_DOUBLE_EQ(GroundLoss::squared().eval(0.3, 1.0), 0.49); }

TEST(GroundLoss, BceMatchingCaseIsNearZero) {
  const double eps = 1e-7;
  const double v = GroundLoss::bce(eps).eval(1.0, 1.0);
  EXPECT_GE(v, 0.0);
  EXPECT_LE(v, 2 * eps * std::abs(std::log(eps)));
  EXPECT_NEAR(GroundLoss::bce().eval(0.0, 0.0), GroundLoss::bce().eval(1.0, 1.0), 1e-15);
}

TEST(GroundLoss, BceHalfIsLogTwo) { EXPECT_NEAR(GroundLoss::bce().eval(0.5, 1.0), std::log(2.0), 1e-15); }

TEST(GroundLoss, BceMatchesKlOracle) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double p = u(rng), q = u(rng);
    EXPECT_NEAR(GroundLoss::bce().eval(p, q), oracle::bernoulli_kl(p, q), 1e-12);
    EXPECT_GE(GroundLoss::bce().eval(p, q), -1e-15);
  }
}

TEST(GroundLoss, VectorForms) {
  const Vector p = (Vector(3) << 0.2, 0.5, 0.3).finished();
  const Vector q = (Vector(3) << 0, 1, 0).finished();
  EXPECT_NEAR(GroundLoss::softmax_ce().eval(p, q), -std::log(0.5), 1e-15);
  EXPECT_NEAR(GroundLoss::squared().eval(p, q), 0.04 + 0.25 + 0.09, 1e-15);
  EXPECT_THROW(GroundLoss::squared().eval(p, Vector(2)), DimensionError);
}

TEST(GroundLoss, Logits) {
  EXPECT_NEAR(GroundLoss::bce().eval_logits(0.0, 1.0), std::log(2.0), 1e-15);
  const Vector z = Vector::Zero(4);
  const Vector q = (Vector(4) << 0, 0, 1, 0).finished();
  EXPECT_NEAR(GroundLoss::softmax_ce().eval_logits(z, q), std::log(4.0), 1e-14);
}

TEST(GroundLoss, DerivativesMatchFiniteDifferences) {
  const double h = 1e-6;
  for (const GroundLoss& loss : {GroundLoss::squared(), GroundLoss::bce()}) {
    for (double p : {0.1, 0.35, 0.8})
      for (double q : {0.0, 1.0, 0.4}) {
        const double fd = (loss.eval(p + h, q) - loss.eval(p - h, q)) / (2 * h);
        EXPECT_NEAR(loss.derivative(p, q), fd, 1e-6);
      }
  }
  EXPECT_EQ(GroundLoss::bce().derivative(0.0, 1.0), 0.0);
}

TEST(GroundLoss, InvalidEpsilonAndNames) {
  EXPECT_THROW(GroundLoss::bce(0.0), InvalidArgumentError);
  EXPECT_THROW(GroundLoss::bce(0.5), InvalidArgumentError);
  EXPECT_EQ(parse_loss_kind("l2"), LossKind::Squared);
  EXPECT_EQ(parse_loss_kind("softmax-ce"), LossKind::SoftmaxCrossEntropy);
  EXPECT_EQ(loss_kind_name(parse_loss_kind("bce")), "bce");
  EXPECT_THROW(parse_loss_kind("hinge"), InvalidArgumentError);
}

double recompose(const LossDecomposition& d, double a, double b) {
  return d.eval_f1(a) + d.eval_f2(b) - d.eval_h1(a) * d.eval_h2(b);
}

TEST(Decompose, SquaredIdentity) {
  const LossDecomposition d = GroundLoss::squared().decompose();
  EXPECT_NEAR(recompose(d, 0.3, 0.7), 0.16, 1e-15);
}

TEST(Decompose, BceIdentityAtQuarter) {
  const LossDecomposition d = GroundLoss::bce().decompose();
  EXPECT_NEAR(recompose(d, 0.25, 1.0), std::log(4.0), 1e-14);
}

TEST(Decompose, BceIdentityOnGrid) {
  const GroundLoss loss = GroundLoss::bce();
  const LossDecomposition d = loss.decompose();
  for (int i = 0; i < 100; ++i) {
    const double p = 1e-7 + (1 - 2e-7) * (i + 0.5) / 100;
    for (double q : {0.0, 1.0}) EXPECT_NEAR(recompose(d, p, q), loss.eval(p, q), 1e-12);
  }
}

TEST(Decompose, RandomIdentity) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const GroundLoss& loss : {GroundLoss::squared(), GroundLoss::bce()}) {
    const LossDecomposition d = loss.decompose();
    for (int i = 0; i < 500; ++i) {
      const double a = u(rng), b = u(rng);
      EXPECT_NEAR(recompose(d, a, b), loss.eval(a, b), 1e-12);
    }
  }
}

TEST(Decompose, SoftmaxIsUnsupported) { EXPECT_THROW(GroundLoss::softmax_ce().decompose(), UnsupportedError); }

TEST(Decompose, ConstantLoss) {
  const GroundLoss c = GroundLoss::constant_value(0.7);
  EXPECT_EQ(c.eval(0.1, 1.0), 0.7);
  EXPECT_NEAR(recompose(c.decompose(), 0.3, 0.9), 0.7, 1e-15);
}

}  // namespace
}  // namespace pmfgw
