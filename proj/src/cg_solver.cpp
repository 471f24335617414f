// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pmfgw/cg_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "pmfgw/errors.hpp"

namespace pmfgw {

namespace {

constexpr int kTieRetries = 8;
constexpr double kTieNoise = 1e-10;

// Per-run scratch buffers; one instance serves one run.
struct Workspace {
  Matrix lt, ltt, grad, noisy, dir, ld, ldt;
  HungarianSolver lap;
};

struct Step {
  double t = 0.0;
  double change = 0.0;
};

// Direction towards the vertex, its image under the tensor and the exact
// line search along it.
Step try_vertex(const QuadraticObjective& obj, const Matrix& plan, const std::vector<int>& map, Workspace& ws) {
  const Eigen::Index n = plan.rows();
  ws.dir = -plan;
  for (Eigen::Index i = 0; i < n; ++i) ws.dir(i, map[i]) += 1.0;
  obj.tensor_apply(ws.dir, ws.ld);
  const double a = ws.dir.cwiseProduct(ws.ld).sum();
  const double b = ws.dir.cwiseProduct(ws.grad).sum();
  // b = 0 with a < 0 is a saddle; the full step still descends.
  const double t = line_search_step(a, b);
  return {t, t * b + t * t * a};
}

bool descends(const Step& s) { return s.t > 0.0 && s.change < 0.0; }

// L T and L^T T are carried along the iterates: L (T + t D) = L T + t L D,
// so every iteration applies the tensor once (twice when not symmetric).
// When the vertex would end the run, a few vertices of slightly perturbed
// gradients are tried; they differ from it only when the linear problem has
// tied minimizers.
SolveResult run_once(const QuadraticObjective& obj, const SolverOptions& opts, Matrix plan, Workspace& ws,
                     std::mt19937_64& rng) {
  const Eigen::Index n = obj.size();
  SolveResult res;
  res.plan = std::move(plan);
  obj.tensor_apply(res.plan, ws.lt);
  if (!obj.symmetric) obj.tensor_apply_adjoint(res.plan, ws.ltt);
  res.value = res.plan.cwiseProduct(obj.linear_cost).sum() + res.plan.cwiseProduct(ws.lt).sum();
  res.trace.objectives.push_back(res.value);
  if (n == 0) return res;

  std::uniform_real_distribution<double> noise(0.0, 1.0);
  for (int it = 0; it < opts.max_iterations; ++it) {
    ws.grad = obj.linear_cost + ws.lt;
    ws.grad += obj.symmetric ? ws.lt : ws.ltt;
    std::vector<int> map = ws.lap.solve(ws.grad).permutation.map;
    ++res.trace.iterations;

    Step step = try_vertex(obj, res.plan, map, ws);
    const double floor = opts.relative_tolerance * std::max(std::abs(res.value), std::numeric_limits<double>::min());
    if (!(step.change < -floor)) {
      // Keep the best of the distinct perturbed vertices.
      Matrix kept_dir = ws.dir, kept_ld = ws.ld;
      const double eps = kTieNoise * std::max(1.0, ws.grad.cwiseAbs().maxCoeff());
      std::vector<std::vector<int>> tried{map};
      for (int r = 0; r < kTieRetries; ++r) {
        ws.noisy = ws.grad;
        for (Eigen::Index k = 0; k < ws.noisy.size(); ++k) ws.noisy.data()[k] += eps * noise(rng);
        const std::vector<int>& other = ws.lap.solve(ws.noisy).permutation.map;
        if (std::find(tried.begin(), tried.end(), other) != tried.end()) continue;
        tried.push_back(other);
        const Step s = try_vertex(obj, res.plan, other, ws);
        if (descends(s) && (!descends(step) || s.change < step.change)) {
          step = s;
          kept_dir = ws.dir;
          kept_ld = ws.ld;
        }
      }
      ws.dir = std::move(kept_dir);
      ws.ld = std::move(kept_ld);
    }
    if (!descends(step)) {
      res.trace.step_sizes.push_back(0.0);
      res.trace.objectives.push_back(res.value);
      break;
    }

    const double previous = res.value;
    res.plan += step.t * ws.dir;
    ws.lt += step.t * ws.ld;
    if (!obj.symmetric) {
      obj.tensor_apply_adjoint(ws.dir, ws.ldt);
      ws.ltt += step.t * ws.ldt;
    }
    res.value = previous + step.change;
    res.trace.step_sizes.push_back(step.t);
    res.trace.objectives.push_back(res.value);

    const double scale = std::max(std::abs(previous), std::numeric_limits<double>::min());
    if (previous - res.value <= opts.relative_tolerance * scale) break;
  }
  // Drop the drift of the running value.
  res.value = obj.evaluate(res.plan);
  return res;
}

}  // namespace

double QuadraticObjective::evaluate(const Matrix& t) const {
  Matrix lt;
  tensor_apply(t, lt);
  return t.cwiseProduct(linear_cost).sum() + t.cwiseProduct(lt).sum();
}

void QuadraticObjective::gradient(const Matrix& t, Matrix& out) const {
  Matrix lt;
  tensor_apply(t, lt);
  if (symmetric) {
    out = linear_cost + 2.0 * lt;
  } else {
    Matrix ltt;
    tensor_apply_adjoint(t, ltt);
    out = linear_cost + lt + ltt;
  }
}

InitKind parse_init_kind(const std::string& name) {
  if (name == "uniform") return InitKind::Uniform;
  if (name == "random") return InitKind::Random;
  if (name == "given") return InitKind::Given;
  throw InvalidArgumentError("unknown init '" + name + "' (expected uniform or random)");
}

void SolverOptions::validate() const {
  if (max_iterations < 1) throw InvalidArgumentError("max_iterations must be >= 1");
  if (!(relative_tolerance > 0.0)) throw InvalidArgumentError("relative_tolerance must be > 0");
  if (restarts < 1) throw InvalidArgumentError("restarts must be >= 1");
  if (init == InitKind::Given && !initial_plan) throw InvalidArgumentError("init=given requires an initial plan");
}

int SolverTrace::accepted_steps() const {
  return static_cast<int>(std::count_if(step_sizes.begin(), step_sizes.end(),
                                        [](double s) { return s > 0.0; }));
}

double line_search_step(double a, double b) {
  if (a > 0.0) return std::clamp(-b / (2.0 * a), 0.0, 1.0);
  return a + b < 0.0 ? 1.0 : 0.0;
}

double marginal_violation(const Matrix& plan) {
  if (plan.size() == 0) return 0.0;
  const double rows = (plan.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double cols = (plan.colwise().sum().array() - 1.0).abs().maxCoeff();
  return std::max(rows, cols);
}

Matrix random_plan(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> weight(1.0);
  Matrix plan = Matrix::Zero(n, n);
  std::vector<int> perm(n);
  std::vector<double> w(std::max<Eigen::Index>(n, 1));
  double total = 0.0;
  for (auto& x : w) total += (x = weight(rng));
  for (double x : w) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (Eigen::Index i = 0; i < n; ++i) plan(i, perm[i]) += x / total;
  }
  return plan;
}

SolveResult cg_solve(const QuadraticObjective& obj, const SolverOptions& opts) {
  opts.validate();
  const Eigen::Index n = obj.size();
  if (obj.linear_cost.cols() != n) throw DimensionError("cg_solve: linear cost must be square");

  Workspace ws;
  SolveResult best;
  bool have_best = false;
  for (int r = 0; r < opts.restarts; ++r) {
    Matrix init;
    if (r == 0 && opts.init == InitKind::Uniform) {
      init = Matrix::Constant(n, n, n > 0 ? 1.0 / static_cast<double>(n) : 0.0);
    } else if (r == 0 && opts.init == InitKind::Given) {
      init = *opts.initial_plan;
      if (init.rows() != n || init.cols() != n) throw DimensionError("cg_solve: initial plan has wrong shape");
    } else {
      init = random_plan(n, opts.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(r));
    }
    std::mt19937_64 rng(opts.seed * 0xD1B54A32D192ED03ULL + static_cast<std::uint64_t>(r) + 1);
    SolveResult res = run_once(obj, opts, std::move(init), ws, rng);
    res.trace.restart_index = r;
    if (!have_best || res.value < best.value) {
      best = std::move(res);
      have_best = true;
    }
  }
  return best;
}

PermutationMinimum brute_force_min(const QuadraticObjective& obj, int max_size) {
  const Eigen::Index n = obj.size();
  if (n > max_size) {
    throw InvalidArgumentError("brute_force_min: size " + std::to_string(n) +
                               " exceeds the factorial guard " + std::to_string(max_size));
  }
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  PermutationMinimum best;
  best.value = std::numeric_limits<double>::infinity();
  Matrix p(n, n);
  do {
    p.setZero();
    for (Eigen::Index i = 0; i < n; ++i) p(i, perm[i]) = 1.0;
    const double v = obj.evaluate(p);
    if (v < best.value) {
      best.value = v;
      best.permutation = Permutation(perm);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Permutation round_to_permutation(const Matrix& plan) {
  return hungarian(-plan).permutation;
}

}  // namespace pmfgw
