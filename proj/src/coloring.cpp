// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pmfgw/coloring.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

#include "pmfgw/errors.hpp"
#include "pmfgw/parallel.hpp"

namespace pmfgw::coloring {

namespace {

constexpr int kMaxAttempts = 100;

class DsaturSearch {
 public:
  DsaturSearch(const Matrix& adjacency, int colors, std::mt19937_64& rng, long budget)
      : adj_(adjacency), k_(colors), rng_(rng), budget_(budget) {
    n_ = static_cast<int>(adjacency.rows());
    color_.assign(n_, -1);
    degree_.assign(n_, 0);
    tie_.resize(n_);
    for (int v = 0; v < n_; ++v)
      for (int u = 0; u < n_; ++u) degree_[v] += adj_(v, u) != 0.0;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (auto& t : tie_) t = uni(rng_);
  }

  std::optional<std::vector<int>> run() {
    if (search(0)) return color_;
    return std::nullopt;
  }

 private:
  int saturation(int v) const {
    std::vector<char> seen(k_, 0);
    int s = 0;
    for (int u = 0; u < n_; ++u)
      if (adj_(v, u) != 0.0 && color_[u] >= 0 && !seen[color_[u]]) {
        seen[color_[u]] = 1;
        ++s;
      }
    return s;
  }

  int pick() const {
    int best = -1, best_sat = -1, best_deg = -1;
    double best_tie = -1.0;
    for (int v = 0; v < n_; ++v) {
      if (color_[v] >= 0) continue;
      const int s = saturation(v);
      if (s > best_sat || (s == best_sat && (degree_[v] > best_deg || (degree_[v] == best_deg && tie_[v] > best_tie)))) {
        best = v;
        best_sat = s;
        best_deg = degree_[v];
        best_tie = tie_[v];
      }
    }
    return best;
  }

  bool search(int colored) {
    if (colored == n_) return true;
    if (--budget_ < 0) return false;
    const int v = pick();
    std::vector<int> order(k_);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng_);
    for (int c : order) {
      bool clash = false;
      for (int u = 0; u < n_ && !clash; ++u) clash = adj_(v, u) != 0.0 && color_[u] == c;
      if (clash) continue;
      color_[v] = c;
      if (search(colored + 1)) return true;
      color_[v] = -1;
      if (budget_ < 0) return false;
    }
    return false;
  }

  const Matrix& adj_;
  int k_;
  std::mt19937_64& rng_;
  long budget_;
  int n_ = 0;
  std::vector<int> color_, degree_;
  std::vector<double> tie_;
};

nlohmann::json image_payload(const LabelGrid& image, Variant variant) {
  if (variant == Variant::Vect) {
    return {{"length", image.labels.size()}, {"vector", image.labels}};
  }
  return {{"height", image.height}, {"width", image.width}, {"pixels", image.labels}};
}

}  // namespace

Variant parse_variant(const std::string& name) {
  if (name == "plain") return Variant::Plain;
  if (name == "big") return Variant::Big;
  if (name == "vect") return Variant::Vect;
  throw InvalidArgumentError("unknown variant '" + name + "' (expected plain, big or vect)");
}

Params Params::preset(Variant v) {
  Params p;
  p.variant = v;
  switch (v) {
    case Variant::Plain: p.min_nodes = 6; p.max_nodes = 10; p.resolution = 32; break;
    case Variant::Big: p.min_nodes = 10; p.max_nodes = 15; p.resolution = 64; break;
    case Variant::Vect: p.min_nodes = 4; p.max_nodes = 6; p.resolution = 16; break;
  }
  return p;
}

void Params::validate() const {
  if (min_nodes < 1 || min_nodes > max_nodes) throw InvalidArgumentError("coloring: need 1 <= min_nodes <= max_nodes");
  if (resolution < max_nodes) throw InvalidArgumentError("coloring: resolution must be >= max_nodes");
  if (num_colors < 4) throw InvalidArgumentError("coloring: at least 4 colors are required");
}

LabelGrid voronoi_partition(const std::vector<Point>& centroids, int resolution) {
  if (centroids.empty()) throw InvalidArgumentError("voronoi_partition: no centroids");
  LabelGrid grid{resolution, resolution, std::vector<int>(static_cast<std::size_t>(resolution) * resolution)};
  for (int r = 0; r < resolution; ++r) {
    const double y = (r + 0.5) / resolution;
    for (int c = 0; c < resolution; ++c) {
      const double x = (c + 0.5) / resolution;
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < centroids.size(); ++k) {
        const double d = std::abs(x - centroids[k][0]) + std::abs(y - centroids[k][1]);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(k);
        }
      }
      grid.labels[static_cast<std::size_t>(r) * resolution + c] = best;
    }
  }
  return grid;
}

DiscreteGraph region_adjacency(const LabelGrid& grid) {
  if (grid.labels.empty()) throw InvalidArgumentError("region_adjacency: empty grid");
  const int m = *std::max_element(grid.labels.begin(), grid.labels.end()) + 1;
  std::vector<char> present(m, 0);
  for (int l : grid.labels) {
    if (l < 0) throw InvalidArgumentError("region_adjacency: negative label");
    present[l] = 1;
  }
  for (int l = 0; l < m; ++l)
    if (!present[l]) throw InvalidArgumentError("region_adjacency: label " + std::to_string(l) + " is missing");

  DiscreteGraph g{Matrix(m, 0), Matrix::Zero(m, m)};
  auto link = [&](int a, int b) {
    if (a != b) g.adjacency(a, b) = g.adjacency(b, a) = 1.0;
  };
  for (int r = 0; r < grid.height; ++r)
    for (int c = 0; c < grid.width; ++c) {
      if (c + 1 < grid.width) link(grid.at(r, c), grid.at(r, c + 1));
      if (r + 1 < grid.height) link(grid.at(r, c), grid.at(r + 1, c));
    }
  return g;
}

std::optional<std::vector<int>> proper_coloring(const Matrix& adjacency, int num_colors, std::mt19937_64& rng,
                                                long budget) {
  if (num_colors < 1) throw InvalidArgumentError("proper_coloring: need at least one color");
  return DsaturSearch(adjacency, num_colors, rng, budget).run();
}

bool is_proper(const Matrix& adjacency, const std::vector<int>& colors) {
  if (static_cast<Eigen::Index>(colors.size()) != adjacency.rows()) return false;
  for (Eigen::Index i = 0; i < adjacency.rows(); ++i)
    for (Eigen::Index j = i + 1; j < adjacency.cols(); ++j)
      if (adjacency(i, j) != 0.0 && colors[i] == colors[j]) return false;
  return true;
}

Instance sample_instance(const Params& params, std::mt19937_64& rng) {
  params.validate();
  std::uniform_int_distribution<int> size_dist(params.min_nodes, params.max_nodes);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  const int m = size_dist(rng);
  const int h = params.resolution;

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Instance inst;
    inst.centroids.resize(m);
    std::set<std::pair<int, int>> cells;
    bool collided = false;
    for (auto& p : inst.centroids) {
      p = {coord(rng), coord(rng)};
      const int cx = std::min(h - 1, static_cast<int>(p[0] * h));
      const int cy = std::min(h - 1, static_cast<int>(p[1] * h));
      collided |= !cells.insert({cx, cy}).second;
    }
    if (collided) continue;

    inst.regions = voronoi_partition(inst.centroids, h);
    std::vector<char> present(m, 0);
    for (int l : inst.regions.labels) present[l] = 1;
    if (std::find(present.begin(), present.end(), 0) != present.end()) continue;

    const DiscreteGraph structure = region_adjacency(inst.regions);
    auto colors = proper_coloring(structure.adjacency, params.num_colors, rng);
    if (!colors) continue;

    inst.colors = std::move(*colors);
    inst.graph.adjacency = structure.adjacency;
    inst.graph.features = Matrix::Zero(m, params.num_colors);
    for (int v = 0; v < m; ++v) inst.graph.features(v, inst.colors[v]) = 1.0;
    inst.image = inst.regions;
    for (auto& px : inst.image.labels) px = inst.colors[px];
    return inst;
  }
  throw GenerationError("coloring: no valid instance after " + std::to_string(kMaxAttempts) + " attempts");
}

std::mt19937_64 record_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

GraphRecord to_record(const Instance& inst, Variant variant) {
  GraphRecord rec;
  rec.graph = inst.graph;
  rec.input = image_payload(inst.image, variant);
  return rec;
}

std::vector<GraphRecord> generate_dataset(std::size_t n, const Params& params, int threads) {
  if (n < 1) throw InvalidArgumentError("generate_dataset: n must be >= 1");
  params.validate();
  std::vector<GraphRecord> out(n);
  parallel_for(n, threads, [&](std::size_t i) {
    auto rng = record_rng(params.seed, i);
    out[i] = to_record(sample_instance(params, rng), params.variant);
  });
  return out;
}

void generate_dataset_file(std::size_t n, const Params& params, const std::string& path, int threads) {
  write_dataset_file(path, generate_dataset(n, params, threads));
}

void write_png(const std::string& path, const LabelGrid& image, int scale) {
  static constexpr unsigned char palette[][3] = {
      {230, 57, 70}, {42, 157, 143}, {233, 196, 106}, {69, 123, 157},
      {244, 162, 97}, {131, 56, 236}, {38, 70, 83}, {200, 200, 200}};
  constexpr int palette_size = sizeof(palette) / sizeof(palette[0]);

  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw Error("cannot open '" + path + "' for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw Error("failed to write PNG '" + path + "'");
  }
  const int w = image.width * scale;
  const int h = image.height * scale;
  png_init_io(png, fp);
  png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<unsigned char> row(static_cast<std::size_t>(w) * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto& c = palette[image.at(y / scale, x / scale) % palette_size];
      std::copy(c, c + 3, row.begin() + static_cast<std::ptrdiff_t>(x) * 3);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

}  // namespace pmfgw::coloring
