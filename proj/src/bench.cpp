// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pmfgw/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "pmfgw/errors.hpp"
#include "pmfgw/graph_io.hpp"
#include "pmfgw/parallel.hpp"
#include "pmfgw/tensor_product.hpp"

namespace pmfgw::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

// Distinct stream per (size, purpose) so that sizes do not share graphs.
std::uint64_t stream_seed(std::uint64_t seed, int m, int purpose) {
  return seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(m) * 1000003ULL + static_cast<std::uint64_t>(purpose);
}

PaddedGraph pad_to(const DiscreteGraph& g, int target) {
  return pad(g, target > 0 ? target : g.size());
}

struct TimingInstance {
  ContinuousGraph pred;
  PaddedGraph target;
};

TimingInstance random_instance(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int d = 4;
  const int m = std::max(1, n - n / 4);
  DiscreteGraph g{Matrix::Zero(m, d), Matrix::Zero(m, m)};
  for (int i = 0; i < m; ++i) g.features(i, static_cast<int>(uni(rng) * d) % d) = 1.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (uni(rng) < 0.3) g.adjacency(i, j) = g.adjacency(j, i) = 1.0;
  ContinuousGraph y{Vector(n), Matrix(n, d), Matrix(n, n)};
  for (int i = 0; i < n; ++i) {
    y.mask(i) = uni(rng);
    for (int k = 0; k < d; ++k) y.features(i, k) = uni(rng);
  }
  for (int i = 0; i < n; ++i) {
    y.edges(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) y.edges(i, j) = y.edges(j, i) = uni(rng);
  }
  return {std::move(y), pad(g, n)};
}

}  // namespace

std::vector<DiscreteGraph> sample_coloring_graphs(int m, std::size_t count, std::uint64_t seed, int threads) {
  coloring::Params params = coloring::Params::preset(coloring::Variant::Plain);
  params.min_nodes = params.max_nodes = m;
  params.resolution = std::max(params.resolution, 2 * m);
  params.seed = seed;
  std::vector<DiscreteGraph> out(count);
  parallel_for(count, threads, [&](std::size_t i) {
    auto rng = coloring::record_rng(seed, i);
    out[i] = coloring::sample_instance(params, rng).graph;
  });
  return out;
}

BenchRecord iteration_record(const std::vector<std::pair<DiscreteGraph, DiscreteGraph>>& pairs, int pad_to_size,
                             bool fd, const LossConfig& loss, int threads) {
  BenchRecord rec;
  rec.feature_diffused = fd;
  rec.samples = pairs.size();
  if (pairs.empty()) return rec;
  rec.size = static_cast<int>(pairs.front().first.size());

  std::vector<double> iterations(pairs.size()), times(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    DiscreteGraph g1 = pairs[i].first, g2 = pairs[i].second;
    if (fd) {
      g1 = feature_diffuse(g1);
      g2 = feature_diffuse(g2);
    }
    const int size = pad_to_size > 0 ? pad_to_size : static_cast<int>(std::max(g1.size(), g2.size()));
    const auto start = Clock::now();
    const LossResult r = pmfgw(pad_to(g1, size).as_continuous(), pad_to(g2, size), loss);
    times[i] = seconds_since(start);
    iterations[i] = r.trace.iterations;
  });

  const double n = static_cast<double>(pairs.size());
  double sum = 0.0, sq = 0.0, t = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    sum += iterations[i];
    sq += iterations[i] * iterations[i];
    t += times[i];
  }
  rec.mean_iterations = sum / n;
  rec.std_iterations = pairs.size() > 1 ? std::sqrt(std::max(0.0, (sq - sum * sum / n) / (n - 1))) : 0.0;
  rec.mean_time_per_pair = t / n;
  return rec;
}

std::vector<BenchRecord> iteration_experiment(const IterationOptions& opts) {
  if (opts.sizes.size() < 2) throw InvalidArgumentError("iteration_experiment: need at least two sizes");
  if (opts.pairs < 1) throw InvalidArgumentError("iteration_experiment: pairs must be >= 1");
  std::vector<BenchRecord> out;
  for (int m : opts.sizes) {
    if (m < 1) throw InvalidArgumentError("iteration_experiment: sizes must be >= 1");
    if (opts.pad_to > 0 && opts.pad_to < m) throw SizeExceededError("iteration_experiment: pad_to is below a size");
    const auto graphs =
        sample_coloring_graphs(m, 2 * static_cast<std::size_t>(opts.pairs), stream_seed(opts.seed, m, 0), opts.threads);
    std::vector<std::pair<DiscreteGraph, DiscreteGraph>> pairs;
    for (int p = 0; p < opts.pairs; ++p) pairs.emplace_back(graphs[2 * p], graphs[2 * p + 1]);
    BenchRecord rec = iteration_record(pairs, opts.pad_to, opts.feature_diffuse, opts.loss, opts.threads);
    rec.size = m;
    out.push_back(rec);
  }
  return out;
}

std::vector<std::array<double, 3>> simplex_grid(int grid) {
  if (grid < 1) throw InvalidArgumentError("simplex_grid: grid must be >= 1");
  std::vector<std::array<double, 3>> out;
  for (int i = 0; i <= grid; ++i)
    for (int j = 0; i + j <= grid; ++j) {
      const int k = grid - i - j;
      out.push_back({static_cast<double>(i) / grid, static_cast<double>(j) / grid, static_cast<double>(k) / grid});
    }
  return out;
}

std::vector<std::pair<ContinuousGraph, PaddedGraph>> load_pairs(const std::string& path) {
  const auto records = read_dataset_file(path);
  if (records.size() % 2 != 0) throw InvalidArgumentError("pair file '" + path + "' has an odd number of records");
  std::vector<std::pair<ContinuousGraph, PaddedGraph>> out;
  for (std::size_t i = 0; i < records.size(); i += 2) {
    const GraphRecord& p = records[i];
    const GraphRecord& t = records[i + 1];
    if (!t.is_discrete()) throw InvalidArgumentError("pair file: record " + std::to_string(i + 2) + " must be discrete");
    const DiscreteGraph& target = t.discrete();
    const Eigen::Index pred_size = p.is_discrete() ? p.discrete().size() : p.continuous().size();
    const Eigen::Index size = std::max(pred_size, target.size());
    ContinuousGraph pred;
    if (p.is_discrete()) {
      pred = pad(p.discrete(), size).as_continuous();
    } else if (pred_size == size) {
      pred = p.continuous();
    } else {
      throw SizeExceededError("pair file: continuous prediction " + std::to_string(i / 2) +
                              " has fewer slots than its target has nodes");
    }
    out.emplace_back(std::move(pred), pad(target, size));
  }
  return out;
}

std::vector<AlphaRow> alpha_sweep(const std::vector<std::pair<ContinuousGraph, PaddedGraph>>& pairs, int grid,
                                  const LossConfig& base, int threads) {
  const auto points = simplex_grid(grid);
  std::vector<AlphaRow> rows;
  rows.reserve(points.size());
  for (const auto& a : points) {
    LossConfig cfg = base;
    cfg.alpha = a;
    std::vector<double> values(pairs.size());
    parallel_for(pairs.size(), threads,
                 [&](std::size_t i) { values[i] = pmfgw(pairs[i].first, pairs[i].second, cfg).value; });
    AlphaRow row{a, 0.0, pairs.size()};
    for (double v : values) row.mean_value += v;
    if (!pairs.empty()) row.mean_value /= static_cast<double>(pairs.size());
    rows.push_back(row);
  }
  return rows;
}

SolverOptions TimingOptions::solver() const {
  SolverOptions s;
  s.max_iterations = cg_iterations;
  s.relative_tolerance = 1e-15;
  return s;
}

std::vector<TimingRow> timing_experiment(const TimingOptions& opts) {
  if (opts.repeats < 1 || opts.cg_iterations < 1) throw InvalidArgumentError("timing_experiment: repeats and iterations must be >= 1");
  std::vector<TimingRow> rows;
  for (int n : opts.sizes) {
    if (n < 1) throw InvalidArgumentError("timing_experiment: sizes must be >= 1");
    std::mt19937_64 rng(stream_seed(opts.seed, n, 1));
    LossConfig cfg;
    cfg.solver = opts.solver();

    std::vector<double> per_iter, fact, naive;
    int iterations = 0;
    for (int r = 0; r < opts.repeats; ++r) {
      const TimingInstance inst = random_instance(n, rng);
      const PmfgwProblem problem(inst.pred, inst.target, cfg);
      auto start = Clock::now();
      const LossResult res = problem.solve();
      const double elapsed = seconds_since(start);
      iterations = res.trace.iterations;
      per_iter.push_back(elapsed / std::max(1, res.trace.iterations));

      const Matrix plan = Matrix::Constant(n, n, 1.0 / n);
      const Matrix w_tgt = inst.target.mask * inst.target.mask.transpose();
      const Matrix ones = Matrix::Ones(n, n);
      const GroundLoss loss = GroundLoss::bce();
      const FactorizedTensor tensor(loss.decompose(), inst.pred.edges, inst.target.edges, ones, w_tgt);
      Matrix out;
      start = Clock::now();
      tensor.apply(plan, out);
      fact.push_back(seconds_since(start));
      start = Clock::now();
      const Matrix ref = tensor_product_naive(loss, inst.pred.edges, inst.target.edges, ones, w_tgt, plan);
      naive.push_back(seconds_since(start));
      if ((ref - out).cwiseAbs().maxCoeff() > 1e-8) throw Error("timing_experiment: tensor products disagree");
    }
    rows.push_back({n, median(per_iter), median(fact), median(naive), iterations});
  }
  return rows;
}

std::string describe(const SolverOptions& opts) {
  std::ostringstream s;
  s << "# solver: max_iterations=" << opts.max_iterations << " tol=" << opts.relative_tolerance
    << " init=" << (opts.init == InitKind::Uniform ? "uniform" : opts.init == InitKind::Random ? "random" : "given")
    << " restarts=" << opts.restarts << " seed=" << opts.seed;
  return s.str();
}

void write_csv(std::ostream& out, const std::vector<BenchRecord>& rows) {
  out << "M,variant,mean_iterations,std_iterations,mean_time_per_pair,samples\n";
  for (const auto& r : rows) {
    out << r.size << ',' << (r.feature_diffused ? "fd" : "plain") << ',' << format_double(r.mean_iterations) << ','
        << format_double(r.std_iterations) << ',' << format_double(r.mean_time_per_pair) << ',' << r.samples << '\n';
  }
}

void write_csv(std::ostream& out, const std::vector<AlphaRow>& rows) {
  out << "alpha_h,alpha_f,alpha_a,mean_value,pairs\n";
  for (const auto& r : rows) {
    out << format_double(r.alpha[0]) << ',' << format_double(r.alpha[1]) << ',' << format_double(r.alpha[2]) << ','
        << format_double(r.mean_value) << ',' << r.pairs << '\n';
  }
}

void write_csv(std::ostream& out, const std::vector<TimingRow>& rows) {
  out << "M,seconds_per_iteration,factorized_seconds,naive_seconds,iterations\n";
  for (const auto& r : rows) {
    out << r.size << ',' << format_double(r.seconds_per_iteration) << ',' << format_double(r.factorized_seconds)
        << ',' << format_double(r.naive_seconds) << ',' << r.iterations << '\n';
  }
}

}  // namespace pmfgw::bench
