// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pmfgw/graph.hpp"
#include "pmfgw/graph_io.hpp"

namespace pmfgw::coloring {

enum class Variant { Plain, Big, Vect };

Variant parse_variant(const std::string& name);

struct Params {
  int min_nodes = 6;
  int max_nodes = 10;
  int resolution = 32;
  int num_colors = 4;
  std::uint64_t seed = 0;
  Variant variant = Variant::Plain;

  /// Size/resolution defaults of each variant: plain 6-10 @32,
  /// big 10-15 @64, vect 4-6 @16.
  static Params preset(Variant v);
  void validate() const;
};

using Point = std::array<double, 2>;  // (x, y) in [0,1]^2

/// Row-major H x W grid of region (or color) indices.
struct LabelGrid {
  int height = 0;
  int width = 0;
  std::vector<int> labels;

  int at(int row, int col) const { return labels[static_cast<std::size_t>(row) * width + col]; }
};

struct Instance {
  LabelGrid regions;       // region index per pixel
  LabelGrid image;         // color index per pixel
  std::vector<Point> centroids;
  std::vector<int> colors;  // color of each region
  DiscreteGraph graph;      // one-hot color features
};

/// Labels each pixel center ((col+0.5)/H, (row+0.5)/H) with the centroid of
/// minimal L1 distance; ties go to the lowest index.
LabelGrid voronoi_partition(const std::vector<Point>& centroids, int resolution);

/// Edge (i, j) iff a pixel of region i is 4-adjacent to a pixel of region j.
/// Features are empty (dimension 0). Throws if a label in [0, max] is absent.
DiscreteGraph region_adjacency(const LabelGrid& grid);

/// DSATUR-ordered backtracking with random tie-breaks and random color
/// order. Returns nullopt when the search budget (explored nodes) runs out.
std::optional<std::vector<int>> proper_coloring(const Matrix& adjacency, int num_colors, std::mt19937_64& rng,
                                                long budget = 100000);

bool is_proper(const Matrix& adjacency, const std::vector<int>& colors);

/// Throws GenerationError after 100 rejected centroid draws.
Instance sample_instance(const Params& params, std::mt19937_64& rng);

/// Generator seeded for record `index` of a dataset with the given seed.
std::mt19937_64 record_rng(std::uint64_t seed, std::uint64_t index);

GraphRecord to_record(const Instance& inst, Variant variant);

std::vector<GraphRecord> generate_dataset(std::size_t n, const Params& params, int threads = 1);
void generate_dataset_file(std::size_t n, const Params& params, const std::string& path, int threads = 1);

/// Renders the color image with a fixed palette, each pixel scaled up.
void write_png(const std::string& path, const LabelGrid& image, int scale = 8);

}  // namespace pmfgw::coloring
