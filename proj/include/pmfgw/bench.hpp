// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pmfgw/coloring.hpp"
#include "pmfgw/graph.hpp"
#include "pmfgw/pmfgw.hpp"

namespace pmfgw::bench {

struct BenchRecord {
  int size = 0;
  double mean_iterations = 0.0;
  double std_iterations = 0.0;
  double mean_time_per_pair = 0.0;  // seconds
  std::size_t samples = 0;
  bool feature_diffused = false;
};

struct IterationOptions {
  std::vector<int> sizes{5, 10, 15, 20};
  int pairs = 100;
  bool feature_diffuse = false;
  int pad_to = 0;  // 0: pad to the graph size
  std::uint64_t seed = 0;
  int threads = 1;
  LossConfig loss;
};

/// Coloring graphs with exactly m nodes, drawn from a seeded stream.
std::vector<DiscreteGraph> sample_coloring_graphs(int m, std::size_t count, std::uint64_t seed, int threads = 1);

/// Mean CG iteration count of pmfgw(pad g1, pad g2) over random pairs of
/// Coloring graphs of each size.
std::vector<BenchRecord> iteration_experiment(const IterationOptions& opts);

/// Same, over caller-supplied graph pairs grouped by size.
BenchRecord iteration_record(const std::vector<std::pair<DiscreteGraph, DiscreteGraph>>& pairs, int pad_to,
                             bool fd, const LossConfig& loss, int threads);

struct AlphaRow {
  std::array<double, 3> alpha{};
  double mean_value = 0.0;
  std::size_t pairs = 0;
};

/// Points (i, j, k) / grid with i + j + k = grid, in lexicographic order.
std::vector<std::array<double, 3>> simplex_grid(int grid);

/// Consecutive records (2k, 2k+1) are a (prediction, target) pair. Both are
/// padded to the larger of the two sizes.
std::vector<std::pair<ContinuousGraph, PaddedGraph>> load_pairs(const std::string& path);

std::vector<AlphaRow> alpha_sweep(const std::vector<std::pair<ContinuousGraph, PaddedGraph>>& pairs, int grid,
                                  const LossConfig& base, int threads = 1);

struct TimingRow {
  int size = 0;
  double seconds_per_iteration = 0.0;  // median CG iteration (factorized)
  double factorized_seconds = 0.0;     // median tensor product, factorized
  double naive_seconds = 0.0;          // median tensor product, quadruple sum
  int iterations = 0;
};

struct TimingOptions {
  std::vector<int> sizes{8, 16, 32, 64};
  int repeats = 5;
  int cg_iterations = 10;
  std::uint64_t seed = 0;

  /// Options of the timed solver runs (fixed iteration count).
  SolverOptions solver() const;
};

std::vector<TimingRow> timing_experiment(const TimingOptions& opts);

void write_csv(std::ostream& out, const std::vector<BenchRecord>& rows);
void write_csv(std::ostream& out, const std::vector<AlphaRow>& rows);
void write_csv(std::ostream& out, const std::vector<TimingRow>& rows);

/// Solver settings line written as a CSV comment.
std::string describe(const SolverOptions& opts);

}  // namespace pmfgw::bench
