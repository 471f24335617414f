// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pmfgw/batch.hpp"
#include "pmfgw/bench.hpp"
#include "pmfgw/coloring.hpp"
#include "pmfgw/errors.hpp"
#include "pmfgw/graph_io.hpp"
#include "pmfgw/metrics.hpp"
#include "pmfgw/pmfgw.hpp"

namespace pmfgw::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Globals {
  std::uint64_t seed = 0;
  int threads = 0;
  bool quiet = false;
  std::string out;
};

struct SolverFlags {
  int max_iters = 100;
  double tol = 1e-6;
  int restarts = 1;
  std::string init = "uniform";

  void add(CLI::App* cmd) {
    cmd->add_option("--max-iters", max_iters, "Maximum conditional-gradient iterations")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", tol, "Relative decrease stopping tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--restarts", restarts, "Solver restarts (random plans after the first)")->check(CLI::PositiveNumber);
    cmd->add_option("--init", init, "Initial plan")->check(CLI::IsMember({"uniform", "random"}));
  }

  SolverOptions options(std::uint64_t seed) const {
    SolverOptions s;
    s.max_iterations = max_iters;
    s.relative_tolerance = tol;
    s.restarts = restarts;
    s.init = parse_init_kind(init);
    s.seed = seed;
    return s;
  }
};

std::array<double, 3> parse_alpha(const std::string& text) {
  std::array<double, 3> a{};
  std::stringstream ss(text);
  std::string item;
  int k = 0;
  while (std::getline(ss, item, ',')) {
    if (k == 3) throw CLI::ValidationError("--alpha", "expected three comma-separated values");
    try {
      std::size_t used = 0;
      a[k] = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--alpha", "'" + item + "' is not a number");
    }
    ++k;
  }
  if (k != 3) throw CLI::ValidationError("--alpha", "expected three comma-separated values");
  return a;
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--sizes", "'" + item + "' is not a positive integer");
    }
  }
  if (out.empty()) throw CLI::ValidationError("--sizes", "no sizes given");
  return out;
}

std::string human_line(const Json& record) {
  std::string line;
  for (const auto& [key, value] : record.items()) {
    if (!line.empty()) line += ' ';
    line += key + '=' + (value.is_string() ? value.get<std::string>() : value.dump());
  }
  return line;
}

void open_out(std::ofstream& file, const std::string& path) {
  file.open(path, std::ios::binary);
  if (!file) throw Error("cannot open '" + path + "' for writing");
}

void emit_text(const Globals& g, std::ostream& out, const std::string& text);

// Records become key=value lines, printed and written to --out alike.
void emit_records(const Globals& g, std::ostream& out, const std::vector<Json>& records) {
  std::string text;
  for (const auto& r : records) text += human_line(r) + '\n';
  emit_text(g, out, text);
}

void emit_text(const Globals& g, std::ostream& out, const std::string& text) {
  if (!g.quiet) out << text;
  if (!g.out.empty()) {
    std::ofstream file;
    open_out(file, g.out);
    file << text;
  }
}

ContinuousGraph prediction_of(const GraphRecord& r, Eigen::Index size) {
  if (!r.is_discrete()) {
    if (r.continuous().size() != size) {
      throw DimensionError("prediction has " + std::to_string(r.continuous().size()) +
                           " slots but --max-nodes is " + std::to_string(size));
    }
    return r.continuous();
  }
  return pad(r.discrete(), size).as_continuous();
}

Eigen::Index record_size(const GraphRecord& r) {
  return r.is_discrete() ? r.discrete().size() : r.continuous().size();
}

void check_same_count(std::size_t preds, std::size_t targets) {
  if (preds != targets) {
    throw InvalidArgumentError("prediction file has " + std::to_string(preds) + " records but target file has " +
                               std::to_string(targets));
  }
}

ContinuousGraph random_prediction(Eigen::Index n, Eigen::Index d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.05, 0.95);
  ContinuousGraph y{Vector(n), Matrix(n, d), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    y.mask(i) = uni(rng);
    for (Eigen::Index k = 0; k < d; ++k) y.features(i, k) = uni(rng);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    y.edges(i, i) = uni(rng);
    for (Eigen::Index j = i + 1; j < n; ++j) y.edges(i, j) = y.edges(j, i) = uni(rng);
  }
  return y;
}

DiscreteGraph random_graph(Eigen::Index m, Eigen::Index d, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  DiscreteGraph g{Matrix::Zero(m, d), Matrix::Zero(m, m)};
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index k = 0; k < d; ++k) g.features(i, k) = coin(rng) ? 1.0 : 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j)
      if (coin(rng)) g.adjacency(i, j) = g.adjacency(j, i) = 1.0;
  return g;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Partially-masked fused Gromov-Wasserstein loss, metrics and benchmarks", "pmfgw"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", batch::version());

  Globals g;
  app.add_option("--seed", g.seed, "Random seed for every randomized command");
  auto* threads_opt = app.add_option("--threads", g.threads, "Worker threads, 0 for all cores (env PMFGW_THREADS)")
                          ->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", g.quiet, "Suppress the printed summary");
  app.add_option("--out", g.out, "Output file (same content as the printed summary)");

  // compute
  auto* compute = app.add_subcommand("compute", "PMFGW value between paired prediction and target records");
  std::string pred_path, target_path, alpha_text = "1,1,1", loss_f = "l2", loss_h = "bce", loss_a = "bce";
  int max_nodes = 0;
  SolverFlags solver;
  compute->add_option("--pred", pred_path, "Prediction records (continuous or discrete)")->required()->check(CLI::ExistingFile);
  compute->add_option("--target", target_path, "Target records (discrete)")->required()->check(CLI::ExistingFile);
  compute->add_option("--alpha", alpha_text, "Weights h,f,A (normalized to sum 1)");
  compute->add_option("--loss-f", loss_f, "Feature ground loss")->check(CLI::IsMember({"l2", "softmax-ce"}));
  compute->add_option("--loss-h", loss_h, "Node-mask ground loss")->check(CLI::IsMember({"bce", "l2"}));
  compute->add_option("--loss-a", loss_a, "Edge ground loss")->check(CLI::IsMember({"bce", "l2"}));
  compute->add_option("--max-nodes", max_nodes, "Padded size M (default: largest graph of each pair)")
      ->check(CLI::NonNegativeNumber);
  solver.add(compute);

  // grad-check
  auto* grad = app.add_subcommand("grad-check", "Analytic gradient vs central differences on a random pair");
  int grad_nodes = 6, grad_dim = 3;
  std::string grad_loss_f = "l2";
  grad->add_option("--max-nodes", grad_nodes, "Padded size M")->check(CLI::Range(1, 64));
  grad->add_option("--dim", grad_dim, "Feature dimension")->check(CLI::Range(1, 64));
  grad->add_option("--loss-f", grad_loss_f, "Feature ground loss")->check(CLI::IsMember({"l2", "softmax-ce"}));

  // toy
  auto* toy = app.add_subcommand("toy", "Training and evaluation landscape of the two-parameter toy problem");
  int toy_grid = 101;
  toy->add_option("--grid", toy_grid, "Grid points per axis")->check(CLI::Range(2, 10001));

  // eval
  auto* eval = app.add_subcommand("eval", "Edit distance and alignment metrics for predictions vs targets");
  std::string eval_pred, eval_target, eval_match = "exact";
  std::optional<double> pos_radius;
  int exact_limit = 10;
  eval->add_option("--pred", eval_pred, "Prediction records")->required()->check(CLI::ExistingFile);
  eval->add_option("--target", eval_target, "Target records (discrete)")->required()->check(CLI::ExistingFile);
  eval->add_option("--match", eval_match, "Node feature equality")->check(CLI::IsMember({"exact", "radius", "argmax"}));
  eval->add_option("--pos-radius", pos_radius, "Position radius; implies --match radius")->check(CLI::PositiveNumber);
  eval->add_option("--exact-limit", exact_limit, "Combined node budget for exact edit distance")
      ->check(CLI::NonNegativeNumber);

  // coloring
  auto* color = app.add_subcommand("coloring", "Generate a Coloring dataset");
  std::size_t color_n = 0;
  std::string variant = "plain", png_dir;
  std::optional<int> min_nodes, max_nodes_c, resolution, colors;
  color->add_option("--n", color_n, "Number of records")->required()->check(CLI::PositiveNumber);
  color->add_option("--min-nodes", min_nodes, "Minimum region count");
  color->add_option("--max-nodes", max_nodes_c, "Maximum region count");
  color->add_option("--resolution", resolution, "Image side H");
  color->add_option("--colors", colors, "Number of colors K (>= 4)");
  color->add_option("--variant", variant, "Size preset")->check(CLI::IsMember({"plain", "big", "vect"}));
  color->add_option("--png-dir", png_dir, "Also render each image as PNG into this directory");

  // bench
  auto* bench = app.add_subcommand("bench", "Solver benchmarks");
  bench->require_subcommand(1);
  auto* iters = bench->add_subcommand("iters",
                                      "Mean CG iterations per size. CSV: M,variant,mean_iterations,"
                                      "std_iterations,mean_time_per_pair,samples");
  std::string sizes_text = "5,10,15,20";
  int pairs = 100, pad_to = 0;
  bool fd = false;
  SolverFlags bench_solver;
  iters->add_option("--sizes", sizes_text, "Comma-separated graph sizes");
  iters->add_option("--pairs", pairs, "Pairs per size")->check(CLI::PositiveNumber);
  iters->add_flag("--fd", fd, "Apply feature diffusion first");
  iters->add_option("--pad-to", pad_to, "Padded size (default: graph size)")->check(CLI::NonNegativeNumber);
  bench_solver.add(iters);

  auto* alpha = bench->add_subcommand("alpha",
                                      "Mean value over a simplex grid of alpha. CSV: alpha_h,alpha_f,alpha_a,"
                                      "mean_value,pairs");
  int alpha_grid = 10;
  std::string pairs_path;
  alpha->add_option("--grid", alpha_grid, "Simplex subdivisions")->check(CLI::PositiveNumber);
  alpha->add_option("--pairs", pairs_path, "Records (prediction, target) alternating")
      ->required()
      ->check(CLI::ExistingFile);

  auto* timing = bench->add_subcommand("timing",
                                       "Per-iteration and tensor-product timings. CSV: M,seconds_per_iteration,"
                                       "factorized_seconds,naive_seconds,iterations");
  std::string timing_sizes = "8,16,32,64";
  int repeats = 5;
  timing->add_option("--sizes", timing_sizes, "Comma-separated sizes");
  timing->add_option("--repeats", repeats, "Repetitions per size (median)")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
    if (threads_opt->count() == 0) {
      if (const char* env = std::getenv("PMFGW_THREADS"); env != nullptr && *env != '\0') {
        const std::string text = env;
        try {
          std::size_t used = 0;
          g.threads = std::stoi(text, &used);
          if (used != text.size() || g.threads < 0) throw std::invalid_argument(text);
        } catch (const std::exception&) {
          throw CLI::ValidationError("PMFGW_THREADS", "'" + text + "' is not a non-negative integer");
        }
      }
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*compute) {
      LossConfig cfg;
      cfg.alpha = parse_alpha(alpha_text);
      cfg.loss_f = GroundLoss(parse_loss_kind(loss_f));
      cfg.loss_h = GroundLoss(parse_loss_kind(loss_h));
      cfg.loss_a = GroundLoss(parse_loss_kind(loss_a));
      cfg.solver = solver.options(g.seed);
      cfg.validate();
      const auto preds = read_dataset_file(pred_path);
      const auto targets = read_dataset_file(target_path);
      check_same_count(preds.size(), targets.size());
      std::vector<Json> records;
      for (std::size_t i = 0; i < preds.size(); ++i) {
        if (!targets[i].is_discrete()) throw InvalidArgumentError("target record " + std::to_string(i + 1) + " must be discrete");
        const DiscreteGraph& t = targets[i].discrete();
        const Eigen::Index size = max_nodes > 0 ? max_nodes : std::max(record_size(preds[i]), t.size());
        const PaddedGraph padded = pad(t, size);
        const LossResult r = pmfgw(prediction_of(preds[i], size), padded, cfg);
        records.push_back(Json{{"pair", i},
                               {"value", r.value},
                               {"term_h", r.term_h},
                               {"term_f", r.term_f},
                               {"term_a", r.term_a},
                               {"iterations", r.trace.iterations}});
      }
      emit_records(g, out, records);
    } else if (*grad) {
      std::mt19937_64 rng(g.seed);
      const Eigen::Index n = grad_nodes;
      const Eigen::Index m = std::uniform_int_distribution<Eigen::Index>(1, n)(rng);
      const ContinuousGraph pred = random_prediction(n, grad_dim, rng);
      const PaddedGraph target = pad(random_graph(m, grad_dim, rng), n);
      LossConfig cfg;
      cfg.loss_f = GroundLoss(parse_loss_kind(grad_loss_f));
      cfg.solver.seed = g.seed;
      const LossResult r = pmfgw(pred, target, cfg);
      const GradientCheck check = gradient_check(pred, target, cfg, r.plan);
      emit_records(g, out,
                   {Json{{"seed", g.seed},
                         {"max_nodes", n},
                         {"target_nodes", m},
                         {"entries", check.entries},
                         {"max_relative_error", check.max_relative_error},
                         {"max_absolute_error", check.max_absolute_error}}});
    } else if (*toy) {
      std::ostringstream csv;
      csv << "a,h,train,eval\n";
      for (const auto& p : toy_landscape(toy_grid, toy_grid))
        csv << format_double(p.a) << ',' << format_double(p.h) << ',' << format_double(p.train) << ','
            << format_double(p.eval) << '\n';
      emit_text(g, out, csv.str());
    } else if (*eval) {
      EditConfig cfg;
      cfg.match = eval_match == "radius" ? FeatureMatch::Radius
                  : eval_match == "argmax" ? FeatureMatch::Argmax
                                           : FeatureMatch::Exact;
      if (pos_radius) {
        cfg.match = FeatureMatch::Radius;
        cfg.radius = *pos_radius;
      }
      cfg.exact_size_limit = exact_limit;
      cfg.validate();
      const auto preds = read_dataset_file(eval_pred);
      const auto targets = read_dataset_file(eval_target);
      check_same_count(preds.size(), targets.size());
      std::vector<ContinuousGraph> ys;
      std::vector<DiscreteGraph> ts;
      for (std::size_t i = 0; i < preds.size(); ++i) {
        if (!targets[i].is_discrete()) throw InvalidArgumentError("target record " + std::to_string(i + 1) + " must be discrete");
        ys.push_back(preds[i].is_discrete() ? as_continuous(preds[i].discrete()) : preds[i].continuous());
        ts.push_back(targets[i].discrete());
      }
      const MetricReport rep = evaluate_dataset(ys, ts, cfg, g.threads);
      std::vector<Json> records;
      for (std::size_t i = 0; i < rep.samples.size(); ++i) {
        const SampleMetrics& s = rep.samples[i];
        records.push_back(Json{{"sample", i},
                               {"edit", s.edit},
                               {"exact", s.edit_exact},
                               {"gi_acc", s.gi_acc},
                               {"size_acc", s.size_acc},
                               {"node_acc", s.node_acc},
                               {"edge_precision", s.edge_precision},
                               {"edge_recall", s.edge_recall}});
      }
      records.push_back(Json{{"mean", "all"},
                             {"samples", rep.samples.size()},
                             {"edit", rep.edit},
                             {"gi_acc", rep.gi_acc},
                             {"size_acc", rep.size_acc},
                             {"node_acc", rep.node_acc},
                             {"edge_precision", rep.edge_precision},
                             {"edge_recall", rep.edge_recall},
                             {"approximate", rep.approximate_count}});
      emit_records(g, out, records);
    } else if (*color) {
      if (g.out.empty()) throw CLI::RequiredError("--out");
      coloring::Params params = coloring::Params::preset(coloring::parse_variant(variant));
      if (min_nodes) params.min_nodes = *min_nodes;
      if (max_nodes_c) params.max_nodes = *max_nodes_c;
      if (resolution) params.resolution = *resolution;
      if (colors) params.num_colors = *colors;
      params.seed = g.seed;
      params.validate();
      const auto records = coloring::generate_dataset(color_n, params, g.threads);
      write_dataset_file(g.out, records);
      if (!png_dir.empty()) {
        std::filesystem::create_directories(png_dir);
        for (std::size_t i = 0; i < color_n; ++i) {
          auto rng = coloring::record_rng(params.seed, i);
          const auto inst = coloring::sample_instance(params, rng);
          char name[32];
          std::snprintf(name, sizeof(name), "%06zu.png", i);
          coloring::write_png((std::filesystem::path(png_dir) / name).string(), inst.image);
        }
      }
      std::map<Eigen::Index, std::size_t> histogram;
      for (const auto& r : records) ++histogram[r.discrete().size()];
      if (!g.quiet) {
        out << human_line(Json{{"records", color_n},
                               {"variant", variant},
                               {"min_nodes", params.min_nodes},
                               {"max_nodes", params.max_nodes},
                               {"resolution", params.resolution},
                               {"colors", params.num_colors},
                               {"seed", params.seed}})
            << '\n';
        for (const auto& [size, count] : histogram) out << human_line(Json{{"nodes", size}, {"count", count}}) << '\n';
      }
    } else if (*iters) {
      bench::IterationOptions opts;
      opts.sizes = parse_sizes(sizes_text);
      opts.pairs = pairs;
      opts.feature_diffuse = fd;
      opts.pad_to = pad_to;
      opts.seed = g.seed;
      opts.threads = g.threads;
      opts.loss.solver = bench_solver.options(g.seed);
      const auto rows = bench::iteration_experiment(opts);
      std::ostringstream csv;
      csv << bench::describe(opts.loss.solver) << '\n';
      bench::write_csv(csv, rows);
      emit_text(g, out, csv.str());
    } else if (*alpha) {
      LossConfig base;
      base.solver.seed = g.seed;
      const auto rows = bench::alpha_sweep(bench::load_pairs(pairs_path), alpha_grid, base, g.threads);
      std::ostringstream csv;
      csv << bench::describe(base.solver) << '\n';
      bench::write_csv(csv, rows);
      emit_text(g, out, csv.str());
    } else if (*timing) {
      bench::TimingOptions opts;
      opts.sizes = parse_sizes(timing_sizes);
      opts.repeats = repeats;
      opts.seed = g.seed;
      std::ostringstream csv;
      csv << bench::describe(opts.solver()) << '\n';
      bench::write_csv(csv, bench::timing_experiment(opts));
      emit_text(g, out, csv.str());
    }
  } catch (const CLI::Error& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace pmfgw::cli
