// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pmfgw/pmfgw.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <vector>
#include <string>

#include "pmfgw/errors.hpp"
#include "pmfgw/metrics.hpp"

namespace pmfgw {

namespace {

constexpr double kPlanTolerance = 1e-8;

bool is_symmetric(const Matrix& m) { return m == m.transpose(); }

void check_prediction(const ContinuousGraph& pred) {
  const Eigen::Index n = pred.size();
  if (pred.features.rows() != n) throw DimensionError("prediction: feature rows do not match mask length");
  if (pred.edges.rows() != n || pred.edges.cols() != n) throw DimensionError("prediction: edge matrix must be M x M");
  if (!pred.mask.allFinite() || !pred.features.allFinite() || !pred.edges.allFinite())
    throw InvalidArgumentError("prediction has non-finite entries");
}

void check_plan(const Matrix& plan, Eigen::Index n) {
  if (plan.rows() != n || plan.cols() != n) throw DimensionError("plan must be M x M");
  if (plan.size() > 0 && plan.minCoeff() < -kPlanTolerance) throw InvalidArgumentError("plan has negative entries");
  if (marginal_violation(plan) > kPlanTolerance) throw InvalidArgumentError("plan is not doubly stochastic");
}

QuadraticObjective::Operator scaled(std::shared_ptr<FactorizedTensor> tensor, double scale) {
  return [tensor = std::move(tensor), scale](const Matrix& t, Matrix& out) {
    tensor->apply(t, out);
    if (scale != 1.0) out *= scale;
  };
}

using Key = std::vector<double>;

// Dense ranks of keys; equal keys share a rank.
std::vector<int> ranks_of(const std::vector<Key>& keys) {
  std::vector<int> idx(keys.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return keys[a] < keys[b]; });
  std::vector<int> rank(keys.size(), 0);
  for (std::size_t k = 1; k < idx.size(); ++k)
    rank[idx[k]] = rank[idx[k - 1]] + (keys[idx[k - 1]] < keys[idx[k]] ? 1 : 0);
  return rank;
}

struct NodeSet {
  const Vector& mask;
  const Matrix& features;
  const Matrix& edges;
};

// Colour refinement over the concatenated node sets. Neighbours are taken
// within each set only; colours are comparable across sets. Only exact
// comparisons of stored values are used, so relabeling a set relabels its
// colours alike.
std::vector<int> refine_colors(const std::vector<NodeSet>& sets) {
  std::vector<Key> keys;
  std::vector<std::pair<int, int>> where;  // (set, local index)
  for (int s = 0; s < static_cast<int>(sets.size()); ++s)
    for (Eigen::Index i = 0; i < sets[s].mask.size(); ++i) {
      Key k{-sets[s].mask(i), sets[s].edges(i, i)};
      for (Eigen::Index c = 0; c < sets[s].features.cols(); ++c) k.push_back(sets[s].features(i, c));
      keys.push_back(std::move(k));
      where.emplace_back(s, static_cast<int>(i));
    }
  const auto total = static_cast<int>(keys.size());
  std::vector<int> color = ranks_of(keys);
  std::vector<int> offset(sets.size() + 1, 0);
  for (std::size_t s = 0; s < sets.size(); ++s) offset[s + 1] = offset[s] + static_cast<int>(sets[s].mask.size());
  int classes = total == 0 ? 0 : *std::max_element(color.begin(), color.end()) + 1;
  for (int round = 0; round < total && classes < total; ++round) {
    for (int u = 0; u < total; ++u) {
      const auto [s, i] = where[u];
      const Matrix& e = sets[s].edges;
      std::vector<std::array<double, 3>> around;
      for (int k = 0; k < e.rows(); ++k)
        if (k != i) around.push_back({e(i, k), e(k, i), static_cast<double>(color[offset[s] + k])});
      std::sort(around.begin(), around.end());
      keys[u] = {static_cast<double>(color[u])};
      for (const auto& a : around) keys[u].insert(keys[u].end(), a.begin(), a.end());
    }
    color = ranks_of(keys);
    const int refined = *std::max_element(color.begin(), color.end()) + 1;
    if (refined == classes) break;
    classes = refined;
  }
  return color;
}

// Node order by refined colour, real nodes first, then by index.
Permutation canonical_order(const Vector& mask, const Matrix& features, const Matrix& edges) {
  const std::vector<int> color = refine_colors({{mask, features, edges}});
  std::vector<int> order(color.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return color[a] < color[b]; });
  return Permutation(std::move(order));
}

// Doubly stochastic plan that spreads mass uniformly between prediction and
// target nodes of the same joint colour (classes of equal size), and
// uniformly among all remaining nodes.
Matrix matched_plan(const ContinuousGraph& pred, const PaddedGraph& target) {
  const Eigen::Index n = pred.size();
  const std::vector<int> color =
      refine_colors({{pred.mask, pred.features, pred.edges}, {target.mask, target.features, target.edges}});
  std::map<int, std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>>> classes;
  for (Eigen::Index i = 0; i < n; ++i) {
    classes[color[i]].first.push_back(i);
    classes[color[n + i]].second.push_back(i);
  }
  Matrix plan = Matrix::Zero(n, n);
  std::vector<Eigen::Index> rest_rows, rest_cols;
  for (const auto& [c, rc] : classes) {
    const auto& [rows, cols] = rc;
    if (rows.size() == cols.size()) {
      for (Eigen::Index i : rows)
        for (Eigen::Index j : cols) plan(i, j) = 1.0 / static_cast<double>(rows.size());
    } else {
      rest_rows.insert(rest_rows.end(), rows.begin(), rows.end());
      rest_cols.insert(rest_cols.end(), cols.begin(), cols.end());
    }
  }
  for (Eigen::Index i : rest_rows)
    for (Eigen::Index j : rest_cols) plan(i, j) = 1.0 / static_cast<double>(rest_rows.size());
  return plan;
}

bool is_identity(const Permutation& p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.map[i] != static_cast<int>(i)) return false;
  return true;
}

// Runs cg_solve on the problem relabeled by (p, q) and maps the plan back.
template <class Build>
SolveResult solve_relabeled(const Permutation& p, const Permutation& q, SolverOptions opts, Build&& build) {
  if (is_identity(p) && is_identity(q)) return cg_solve(build(p, q), opts);
  const Matrix pm = p.as_matrix(), qm = q.as_matrix();
  if (opts.initial_plan) opts.initial_plan = Matrix(pm * *opts.initial_plan * qm.transpose());
  SolveResult res = cg_solve(build(p, q), opts);
  res.plan = pm.transpose() * res.plan * qm;
  return res;
}

}  // namespace

void LossConfig::validate() const {
  for (double a : alpha)
    if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgumentError("alpha entries must be finite and >= 0");
  if (normalize_alpha && alpha[0] + alpha[1] + alpha[2] <= 0.0)
    throw InvalidArgumentError("alpha must have a positive sum to be normalized");
  loss_h.validate();
  loss_f.validate();
  loss_a.validate();
  solver.validate();
}

std::array<double, 3> LossConfig::effective_alpha() const {
  if (!normalize_alpha) return alpha;
  const double s = alpha[0] + alpha[1] + alpha[2];
  return {alpha[0] / s, alpha[1] / s, alpha[2] / s};
}

PmfgwProblem::PmfgwProblem(const ContinuousGraph& pred, const PaddedGraph& target,
                           const LossConfig& cfg)
    : pred_(pred), target_(target), cfg_(cfg) {
  cfg_.validate();
  check_prediction(pred_);
  if (pred_.size() != target_.size()) {
    throw DimensionError("pmfgw: prediction has " + std::to_string(pred_.size()) +
                         " slots but the target is padded to " + std::to_string(target_.size()));
  }
  if (pred_.dim() != target_.dim()) throw DimensionError("pmfgw: feature dimensions differ");
  target_.validate();

  alpha_ = cfg_.effective_alpha();
  size_ = pred_.size();
  const Eigen::Index n = size_;
  const Eigen::Index m = target_.true_size;
  inv_m_ = m > 0 ? 1.0 / static_cast<double>(m) : 0.0;

  cost_h_.resize(n, n);
  cost_f_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      cost_h_(i, j) = cfg_.loss_h.eval(pred_.mask(i), target_.mask(j));
      cost_f_(i, j) = target_.mask(j) != 0.0
                          ? cfg_.loss_f.eval(Vector(pred_.features.row(i).transpose()),
                                             Vector(target_.features.row(j).transpose())) *
                                target_.mask(j)
                          : 0.0;
    }
  }

  const Matrix w_tgt = target_.mask * target_.mask.transpose();
  const Matrix w_pred = Matrix::Ones(n, n);
  const LossDecomposition dec = cfg_.loss_a.decompose();
  structure_ = std::make_shared<FactorizedTensor>(dec, pred_.edges, target_.edges, w_pred, w_tgt);

  const double inv_big = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  objective_.linear_cost = alpha_[0] * inv_big * cost_h_ + alpha_[1] * inv_m_ * cost_f_;
  const double quad_scale = alpha_[2] * inv_m_ * inv_m_;
  objective_.tensor_apply = scaled(structure_, quad_scale);
  objective_.symmetric = is_symmetric(pred_.edges) && is_symmetric(target_.edges);
  if (!objective_.symmetric) {
    structure_adjoint_ = std::make_shared<FactorizedTensor>(structure_->transposed());
    objective_.tensor_apply_adjoint = scaled(structure_adjoint_, quad_scale);
  }
}

std::array<double, 3> PmfgwProblem::terms(const Matrix& plan) const {
  check_plan(plan, size_);
  const double inv_big = size_ > 0 ? 1.0 / static_cast<double>(size_) : 0.0;
  Matrix lt;
  structure_->apply(plan, lt);
  return {inv_big * plan.cwiseProduct(cost_h_).sum(), inv_m_ * plan.cwiseProduct(cost_f_).sum(),
          inv_m_ * inv_m_ * plan.cwiseProduct(lt).sum()};
}

double PmfgwProblem::value(const Matrix& plan) const {
  const auto t = terms(plan);
  return alpha_[0] * t[0] + alpha_[1] * t[1] + alpha_[2] * t[2];
}

LossResult PmfgwProblem::evaluate_at(const Matrix& plan, SolverTrace trace) const {
  LossResult out;
  const auto t = terms(plan);
  out.term_h = t[0];
  out.term_f = t[1];
  out.term_a = t[2];
  out.value = alpha_[0] * t[0] + alpha_[1] * t[1] + alpha_[2] * t[2];
  out.plan = plan;
  out.trace = std::move(trace);
  return out;
}

LossResult PmfgwProblem::solve() const {
  // With several restarts and a uniform start, one run starts from the
  // colour-matched plan instead of a random one.
  if (cfg_.solver.restarts > 1 && cfg_.solver.init == InitKind::Uniform) {
    SolverOptions spread = cfg_.solver;
    spread.restarts -= 1;
    const LossResult a = solve_canonical(spread);
    SolverOptions matched = cfg_.solver;
    matched.restarts = 1;
    matched.init = InitKind::Given;
    matched.initial_plan = matched_plan(pred_, target_);
    LossResult b = solve_canonical(matched);
    if (b.value < a.value) {
      b.trace.restart_index = cfg_.solver.restarts - 1;
      return b;
    }
    return a;
  }
  return solve_canonical(cfg_.solver);
}

LossResult PmfgwProblem::solve_canonical(const SolverOptions& opts) const {
  const Permutation p = canonical_order(pred_.mask, pred_.features, pred_.edges);
  const Permutation q = canonical_order(target_.mask, target_.features, target_.edges);
  std::unique_ptr<PmfgwProblem> relabeled;
  SolveResult res = solve_relabeled(p, q, opts, [&](const Permutation& pp, const Permutation& qq) {
    if (is_identity(pp) && is_identity(qq)) return objective_;
    const Matrix qm = qq.as_matrix();
    PaddedGraph t;
    t.mask = qm * target_.mask;
    t.features = qm * target_.features;
    t.edges = qm * target_.edges * qm.transpose();
    t.true_size = target_.true_size;
    relabeled = std::make_unique<PmfgwProblem>(permute(pred_, pp), t, cfg_);
    return relabeled->objective_;
  });
  return evaluate_at(res.plan, std::move(res.trace));
}

LossGradient PmfgwProblem::gradient(const Matrix& plan) const {
  check_plan(plan, size_);
  const Eigen::Index n = size_;
  const double inv_big = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  LossGradient g;

  g.d_mask = Vector::Zero(n);
  g.d_features = Matrix::Zero(n, pred_.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double tij = plan(i, j);
      if (tij == 0.0) continue;
      g.d_mask(i) += tij * cfg_.loss_h.derivative(pred_.mask(i), target_.mask(j));
      if (target_.mask(j) != 0.0) {
        g.d_features.row(i) += tij * target_.mask(j) *
                               cfg_.loss_f.gradient(Vector(pred_.features.row(i).transpose()),
                                                    Vector(target_.features.row(j).transpose()))
                                   .transpose();
      }
    }
  }
  g.d_mask *= alpha_[0] * inv_big;
  g.d_features *= alpha_[1] * inv_m_;

  // d/dA_ik sum T_ij T_kl ell(A_ik, B_jl) w_jl
  //   = f1'(A_ik) (T W T^T)_ik - h1'(A_ik) (T (h2(B) . W) T^T)_ik
  const LossDecomposition dec = cfg_.loss_a.decompose();
  const Matrix w_tgt = target_.mask * target_.mask.transpose();
  const Matrix v2 = target_.edges.unaryExpr([&](double b) { return dec.eval_h2(b); }).cwiseProduct(w_tgt);
  const Matrix mass = plan * w_tgt * plan.transpose();
  const Matrix cross = plan * v2 * plan.transpose();
  g.d_edges.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) {
      const double a = pred_.edges(i, k);
      g.d_edges(i, k) = dec.eval_df1(a) * mass(i, k) - dec.eval_dh1(a) * cross(i, k);
    }
  g.d_edges *= alpha_[2] * inv_m_ * inv_m_;
  return g;
}

LossResult pmfgw(const ContinuousGraph& pred, const PaddedGraph& target, const LossConfig& cfg) {
  return PmfgwProblem(pred, target, cfg).solve();
}

LossGradient pmfgw_grad(const ContinuousGraph& pred, const PaddedGraph& target,
                        const LossConfig& cfg, const Matrix& plan) {
  return PmfgwProblem(pred, target, cfg).gradient(plan);
}

GradientCheck gradient_check(const ContinuousGraph& pred, const PaddedGraph& target, const LossConfig& cfg,
                             const Matrix& plan, double step, double floor) {
  if (!(step > 0.0) || !(floor > 0.0)) throw InvalidArgumentError("gradient_check: step and floor must be > 0");
  const LossGradient g = pmfgw_grad(pred, target, cfg, plan);
  GradientCheck out;
  auto compare = [&](double analytic, auto&& perturb) {
    ContinuousGraph y = pred;
    double& x = perturb(y);
    const double x0 = x;
    x = x0 + step;
    const double up = PmfgwProblem(y, target, cfg).value(plan);
    x = x0 - step;
    const double down = PmfgwProblem(y, target, cfg).value(plan);
    const double fd = (up - down) / (2.0 * step);
    const double abs_err = std::abs(analytic - fd);
    out.max_absolute_error = std::max(out.max_absolute_error, abs_err);
    out.max_relative_error =
        std::max(out.max_relative_error, abs_err / std::max({std::abs(analytic), std::abs(fd), floor}));
    ++out.entries;
  };
  const Eigen::Index n = pred.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    compare(g.d_mask(i), [&](ContinuousGraph& y) -> double& { return y.mask(i); });
    for (Eigen::Index k = 0; k < pred.dim(); ++k)
      compare(g.d_features(i, k), [&](ContinuousGraph& y) -> double& { return y.features(i, k); });
    for (Eigen::Index k = 0; k < n; ++k)
      compare(g.d_edges(i, k), [&](ContinuousGraph& y) -> double& { return y.edges(i, k); });
  }
  return out;
}

namespace {

struct FgwObjective {
  QuadraticObjective objective;
  Matrix feature_cost;
  std::shared_ptr<FactorizedTensor> structure;
  std::array<double, 3> alpha;
};

FgwObjective build_fgw(const DiscreteGraph& g1, const DiscreteGraph& g2, const LossConfig& cfg) {
  cfg.validate();
  g1.validate();
  g2.validate();
  if (g1.size() != g2.size()) throw DimensionError("fgw: graphs must have the same number of nodes");
  if (g1.dim() != g2.dim()) throw DimensionError("fgw: feature dimensions differ");
  const Eigen::Index n = g1.size();
  FgwObjective out;
  out.alpha = cfg.effective_alpha();
  out.feature_cost.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out.feature_cost(i, j) =
          cfg.loss_f.eval(Vector(g1.features.row(i).transpose()), Vector(g2.features.row(j).transpose()));
  const Matrix ones = Matrix::Ones(n, n);
  out.structure = std::make_shared<FactorizedTensor>(cfg.loss_a.decompose(), g1.adjacency, g2.adjacency, ones, ones);
  out.objective.linear_cost = out.alpha[1] * out.feature_cost;
  out.objective.tensor_apply = scaled(out.structure, out.alpha[2]);
  out.objective.symmetric = true;
  return out;
}

}  // namespace

LossResult fgw(const DiscreteGraph& g1, const DiscreteGraph& g2, const LossConfig& cfg) {
  const FgwObjective f = build_fgw(g1, g2, cfg);
  const Vector ones = Vector::Ones(g1.size());
  const Permutation p = canonical_order(ones, g1.features, g1.adjacency);
  const Permutation q = canonical_order(ones, g2.features, g2.adjacency);
  SolveResult res = solve_relabeled(p, q, cfg.solver, [&](const Permutation& pp, const Permutation& qq) {
    return build_fgw(permute(g1, pp), permute(g2, qq), cfg).objective;
  });
  LossResult out;
  out.plan = res.plan;
  out.trace = std::move(res.trace);
  out.term_f = res.plan.cwiseProduct(f.feature_cost).sum();
  out.term_a = res.plan.cwiseProduct(f.structure->apply(res.plan)).sum();
  out.value = f.alpha[1] * out.term_f + f.alpha[2] * out.term_a;
  return out;
}

GraphMatch gm_exact(const DiscreteGraph& g1, const DiscreteGraph& g2, const LossConfig& cfg) {
  const FgwObjective f = build_fgw(g1, g2, cfg);
  PermutationMinimum best = brute_force_min(f.objective);
  return {std::move(best.permutation), best.value};
}

LossResult partial_fgw(const ContinuousGraph& big, const DiscreteGraph& small, const LossConfig& cfg) {
  if (small.size() > big.size()) {
    throw SizeExceededError("partial_fgw: the small graph has " + std::to_string(small.size()) +
                            " nodes, more than the big graph's " + std::to_string(big.size()));
  }
  LossConfig padded = cfg;
  padded.loss_h = GroundLoss::constant_value(0.0);
  return pmfgw(big, pad(small, big.size()), padded);
}

LossResult partial_fgw(const DiscreteGraph& big, const DiscreteGraph& small, const LossConfig& cfg) {
  big.validate();
  return partial_fgw(as_continuous(big), small, cfg);
}

LossConfig toy_config() {
  LossConfig cfg;
  cfg.alpha = {1.0, 1.0, 2.0};
  cfg.normalize_alpha = false;
  cfg.loss_h = GroundLoss::squared();
  cfg.loss_f = GroundLoss::squared();
  cfg.loss_a = GroundLoss::squared();
  cfg.solver.restarts = 5;
  return cfg;
}

DiscreteGraph toy_target() {
  Matrix f(2, 2);
  f << 1, 0,
       0, 1;
  Matrix a(2, 2);
  a << 0, 1,
       1, 0;
  return {f, a};
}

ContinuousGraph toy_prediction(double a, double h) {
  Vector mask(3);
  mask << 1.0, h, 1.0 - h;
  Matrix f(3, 2);
  f << 1, 0,
       0, 1,
       0, 1;
  Matrix e(3, 3);
  e << 0.0, a, 1.0 - a,
       a, 0.0, 0.0,
       1.0 - a, 0.0, 0.0;
  return {mask, f, e};
}

std::vector<ToyPoint> toy_landscape(int grid_a, int grid_h) {
  if (grid_a < 2 || grid_h < 2) throw InvalidArgumentError("toy_landscape: grid sizes must be >= 2");
  const LossConfig cfg = toy_config();
  const DiscreteGraph target = toy_target();
  const PaddedGraph padded = pad(target, 3);
  std::vector<ToyPoint> out;
  out.reserve(static_cast<std::size_t>(grid_a) * grid_h);
  for (int ia = 0; ia < grid_a; ++ia) {
    const double a = static_cast<double>(ia) / (grid_a - 1);
    for (int ih = 0; ih < grid_h; ++ih) {
      const double h = static_cast<double>(ih) / (grid_h - 1);
      const ContinuousGraph pred = toy_prediction(a, h);
      ToyPoint p;
      p.a = a;
      p.h = h;
      p.train = pmfgw(pred, padded, cfg).value;
      p.eval = static_cast<double>(edit_distance(decode(pred), target, EditConfig{}).value);
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace pmfgw
