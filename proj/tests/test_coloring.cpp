// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pmfgw/coloring.hpp"
#include "pmfgw/errors.hpp"

namespace pmfgw::coloring {
namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("pmfgw_test_" + name)).string();
}

TEST(Voronoi, SingleCentroid) {
  const LabelGrid g = voronoi_partition({{0.3, 0.7}}, 5);
  for (int l : g.labels) EXPECT_EQ(l, 0);
}

TEST(Voronoi, MirroredPairTiesGoToLowestIndex) {
  // Pixel centers at 0.125, 0.375, 0.625, 0.875; centroids mirrored about 0.5
  // so that column 1 is equidistant.
  const LabelGrid g = voronoi_partition({{0.25, 0.5}, {0.5, 0.5}}, 4);
  for (int r = 0; r < 4; ++r) {
    EXPECT_EQ(g.at(r, 0), 0);
    EXPECT_EQ(g.at(r, 1), 0);  // |0.375-0.25| = |0.375-0.5|
    EXPECT_EQ(g.at(r, 2), 1);
    EXPECT_EQ(g.at(r, 3), 1);
  }
}

TEST(Voronoi, MatchesExhaustiveScan) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> c(7);
  for (auto& p : c) p = {u(rng), u(rng)};
  const int h = 16;
  const LabelGrid g = voronoi_partition(c, h);
  for (int r = 0; r < h; ++r)
    for (int col = 0; col < h; ++col) {
      const double x = (col + 0.5) / h, y = (r + 0.5) / h;
      double best = 1e9;
      for (const auto& p : c) best = std::min(best, std::abs(x - p[0]) + std::abs(y - p[1]));
      const auto& q = c[g.at(r, col)];
      EXPECT_EQ(std::abs(x - q[0]) + std::abs(y - q[1]), best);
    }
}

TEST(RegionAdjacency, SmallCases) {
  const DiscreteGraph one = region_adjacency(LabelGrid{2, 2, {0, 0, 0, 0}});
  EXPECT_EQ(one.size(), 1);
  EXPECT_EQ(one.edge_count(), 0u);
  const DiscreteGraph two = region_adjacency(LabelGrid{2, 1, {0, 1}});
  EXPECT_EQ(two.size(), 2);
  EXPECT_EQ(two.adjacency(0, 1), 1.0);
  EXPECT_THROW(region_adjacency(LabelGrid{1, 2, {0, 2}}), InvalidArgumentError);
}

TEST(RegionAdjacency, MatchesPairScan) {
  std::mt19937_64 rng(2);
  LabelGrid g{8, 8, std::vector<int>(64)};
  for (int i = 0; i < 64; ++i) g.labels[i] = i < 5 ? i : static_cast<int>(rng() % 5);
  const DiscreteGraph adj = region_adjacency(g);
  Matrix expected = Matrix::Zero(5, 5);
  for (int a = 0; a < 64; ++a)
    for (int b = 0; b < 64; ++b) {
      const int ra = a / 8, ca = a % 8, rb = b / 8, cb = b % 8;
      if (std::abs(ra - rb) + std::abs(ca - cb) == 1 && g.labels[a] != g.labels[b])
        expected(g.labels[a], g.labels[b]) = 1.0;
    }
  EXPECT_EQ(adj.adjacency, expected);
}

TEST(ProperColoring, Cases) {
  std::mt19937_64 rng(3);
  const auto edgeless = proper_coloring(Matrix::Zero(4, 4), 4, rng);
  ASSERT_TRUE(edgeless);
  EXPECT_EQ(edgeless->size(), 4u);
  Matrix tri = Matrix::Ones(3, 3) - Matrix::Identity(3, 3);
  const auto c = proper_coloring(tri, 4, rng);
  ASSERT_TRUE(c);
  EXPECT_NE((*c)[0], (*c)[1]);
  EXPECT_NE((*c)[1], (*c)[2]);
  EXPECT_NE((*c)[0], (*c)[2]);
  // K5 is not 4-colorable: the search fails within its budget.
  const Matrix k5 = Matrix::Ones(5, 5) - Matrix::Identity(5, 5);
  EXPECT_FALSE(proper_coloring(k5, 4, rng));
}

TEST(ProperColoring, RandomRegionGraphsAreProper) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Point> c(1 + rng() % 10);
    for (auto& p : c) p = {u(rng), u(rng)};
    LabelGrid g = voronoi_partition(c, 32);
    std::vector<int> remap(c.size(), -1);
    int next = 0;
    for (int& l : g.labels) {
      if (remap[l] < 0) remap[l] = next++;
      l = remap[l];
    }
    const DiscreteGraph adj = region_adjacency(g);
    const auto colors = proper_coloring(adj.adjacency, 4, rng);
    ASSERT_TRUE(colors);
    EXPECT_TRUE(is_proper(adj.adjacency, *colors));
  }
}

TEST(SampleInstance, DegenerateSizes) {
  Params p;
  p.min_nodes = p.max_nodes = 1;
  std::mt19937_64 rng(5);
  const Instance one = sample_instance(p, rng);
  EXPECT_EQ(one.graph.size(), 1);
  EXPECT_EQ(one.graph.edge_count(), 0u);
  p.min_nodes = p.max_nodes = 2;
  const Instance two = sample_instance(p, rng);
  EXPECT_EQ(two.graph.edge_count(), 1u);
  EXPECT_NE(two.colors[0], two.colors[1]);
}

TEST(SampleInstance, Invariants) {
  const Params p;
  for (std::uint64_t i = 0; i < 200; ++i) {
    auto rng = record_rng(7, i);
    const Instance inst = sample_instance(p, rng);
    const auto m = inst.graph.size();
    EXPECT_GE(m, p.min_nodes);
    EXPECT_LE(m, p.max_nodes);
    EXPECT_TRUE(is_proper(inst.graph.adjacency, inst.colors));
    EXPECT_TRUE(oracle::connected(inst.graph.adjacency));
    EXPECT_NO_THROW(inst.graph.validate());
    std::vector<int> area(m, 0);
    for (int l : inst.regions.labels) ++area[l];
    for (int a : area) EXPECT_GT(a, 0);
    for (std::size_t k = 0; k < inst.image.labels.size(); ++k)
      EXPECT_EQ(inst.image.labels[k], inst.colors[inst.regions.labels[k]]);
    for (Eigen::Index v = 0; v < m; ++v) EXPECT_EQ(inst.graph.features(v, inst.colors[v]), 1.0);
  }
}

TEST(SampleInstance, NoK5) {
  Params p;
  for (std::uint64_t i = 0; i < 100; ++i) {
    auto rng = record_rng(8, i);
    const Matrix a = sample_instance(p, rng).graph.adjacency;
    const int m = static_cast<int>(a.rows());
    for (int mask = 0; mask < (1 << m); ++mask) {
      if (__builtin_popcount(mask) != 5) continue;
      std::vector<int> v;
      for (int k = 0; k < m; ++k)
        if (mask >> k & 1) v.push_back(k);
      bool clique = true;
      for (int x = 0; x < 5 && clique; ++x)
        for (int y = x + 1; y < 5 && clique; ++y) clique = a(v[x], v[y]) != 0.0;
      EXPECT_FALSE(clique);
    }
  }
}

TEST(Params, Validation) {
  Params p;
  p.min_nodes = 0;
  EXPECT_THROW(p.validate(), InvalidArgumentError);
  p = {};
  p.min_nodes = 8;
  p.max_nodes = 6;
  EXPECT_THROW(p.validate(), InvalidArgumentError);
  p = {};
  p.num_colors = 3;
  EXPECT_THROW(p.validate(), InvalidArgumentError);
  p = {};
  p.resolution = 5;
  EXPECT_THROW(p.validate(), InvalidArgumentError);
  EXPECT_THROW(parse_variant("huge"), InvalidArgumentError);
  EXPECT_THROW(generate_dataset(0, Params{}), InvalidArgumentError);
}

TEST(Dataset, DeterministicBytes) {
  Params p;
  p.seed = 11;
  const std::string a = temp_path("a.jsonl"), b = temp_path("b.jsonl");
  generate_dataset_file(1, p, a);
  generate_dataset_file(1, p, b, 4);
  EXPECT_EQ(slurp(a), slurp(b));
  generate_dataset_file(20, p, a, 1);
  generate_dataset_file(20, p, b, 3);
  EXPECT_EQ(slurp(a), slurp(b));
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(Dataset, Variants) {
  const Params big = Params::preset(Variant::Big);
  EXPECT_EQ(big.min_nodes, 10);
  EXPECT_EQ(big.max_nodes, 15);
  EXPECT_EQ(big.resolution, 64);
  const auto recs = generate_dataset(5, big);
  for (const auto& r : recs) {
    EXPECT_GE(r.discrete().size(), 10);
    EXPECT_EQ((*r.input)["height"], 64);
    EXPECT_EQ((*r.input)["pixels"].size(), 64u * 64u);
  }
  const Params vect = Params::preset(Variant::Vect);
  const auto v = generate_dataset(5, vect);
  for (const auto& r : v) {
    EXPECT_LE(r.discrete().size(), 6);
    EXPECT_EQ((*r.input)["vector"].size(), 16u * 16u);
    EXPECT_FALSE(r.input->contains("pixels"));
  }
}

TEST(Png, WritesFile) {
  Params p;
  auto rng = record_rng(1, 0);
  const Instance inst = sample_instance(p, rng);
  const std::string path = temp_path("img.png");
  write_png(path, inst.image, 2);
  const std::string bytes = slurp(path);
  ASSERT_GT(bytes.size(), 8u);
  EXPECT_EQ(bytes.substr(1, 3), "PNG");
  std::filesystem::remove(path);
  EXPECT_THROW(write_png("/nonexistent/dir/x.png", inst.image), Error);
}

}  // namespace
}  // namespace pmfgw::coloring
