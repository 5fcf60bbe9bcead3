#include "cli.hpp"

#include "spca/bench.hpp"
#include "spca/datagen.hpp"
#include "spca/io.hpp"
#include "spca/robust.hpp"
#include "spca/sketch.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>

namespace spca {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::pair<Index, Index> parse_shape(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos || x == 0 || x + 1 == text.size())
    throw std::invalid_argument("expected a shape like 40x30, got '" + text + "'");
  std::size_t used1 = 0, used2 = 0;
  const long a = std::stol(text.substr(0, x), &used1);
  const long b = std::stol(text.substr(x + 1), &used2);
  if (used1 != x || used2 != text.size() - x - 1 || a < 1 || b < 1)
    throw std::invalid_argument("expected a shape like 40x30, got '" + text + "'");
  return {Index(a), Index(b)};
}

std::string matrix_name(const std::string& stem, bool binary) {
  return stem + (binary ? ".bin" : ".csv");
}

struct SolveArgs {
  std::string input;
  std::string output_dir;
  Index rank = 1;
  std::string reg = "none";
  double alpha = 0.0;
  double beta = 0.0;
  std::string groups;
  bool robust = false;
  std::optional<double> huber_kappa;
  bool randomized = false;
  Index oversample = 10;
  int power_iters = 2;
  double tol = 1e-5;
  int max_iter = 1000;
  bool no_center = false;
  std::uint64_t seed = 0;
  bool fista = false;
  std::optional<double> step;
  std::string init;
  bool binary = false;
};

int cmd_solve(const SolveArgs& args) {
  const auto t_total = Clock::now();
  if (args.huber_kappa && !args.robust)
    throw std::invalid_argument("--huber-kappa requires --robust");

  const Matrix x = read_matrix(args.input);

  SolverConfig cfg;
  cfg.rank = args.rank;
  cfg.regularizer.kind = regularizer_from_string(args.reg);
  cfg.regularizer.alpha = args.alpha;
  cfg.regularizer.beta = args.beta;
  if (cfg.regularizer.kind == Regularizer::group_lasso) {
    if (args.groups.empty())
      throw std::invalid_argument("--reg group requires --groups FILE");
    cfg.regularizer.groups = read_groups(args.groups, x.cols());
  }
  cfg.max_iter = args.max_iter;
  cfg.tol = args.tol;
  cfg.step_size = args.step;
  cfg.center = !args.no_center;
  cfg.seed = args.seed;
  cfg.randomized = args.randomized;
  cfg.oversample = args.oversample;
  cfg.power_iters = args.power_iters;
  cfg.huber_kappa = args.huber_kappa;
  cfg.fista = args.fista;
  if (!args.init.empty()) cfg.init_loadings = read_matrix(args.init);

  Matrix xc = x;
  if (cfg.center) xc.rowwise() -= x.colwise().mean().eval();

  fs::create_directories(args.output_dir);
  const auto path = [&](const std::string& stem) {
    return (fs::path(args.output_dir) / matrix_name(stem, args.binary)).string();
  };

  double time_sketch = 0.0;
  SpcaResult result;
  const auto t_solve = Clock::now();
  if (args.robust) {
    result = solve_robust(xc, cfg);
  } else if (cfg.randomized) {
    // Same steps as the solver's randomized dispatch, split apart here so the
    // sketch phase gets its own wall-clock entry in the manifest.
    SketchConfig sketch_cfg;
    sketch_cfg.target_rank = cfg.rank;
    sketch_cfg.oversample = cfg.oversample;
    sketch_cfg.power_iters = cfg.power_iters;
    sketch_cfg.seed = cfg.seed;
    const auto t_sketch = Clock::now();
    const Sketch sketch = randomized_sketch(xc, sketch_cfg);
    time_sketch = seconds_since(t_sketch);
    SolverConfig inner = cfg;
    inner.randomized = false;
    result = solve(sketch.compressed, inner);
  } else {
    result = solve(xc, cfg);
  }
  const double time_solve = seconds_since(t_solve) - time_sketch;

  // Quality is always reported on the full matrix, even for the randomized
  // path whose traces live in sketch space.
  const double objective =
      args.robust ? objective_robust(xc, result.a, result.b, *result.s, cfg.regularizer,
                                     *result.huber_kappa)
                  : objective_value(xc, result.a, result.b, cfg.regularizer);

  write_matrix(path("loadings"), result.b);
  write_matrix(path("factor"), result.a);
  write_matrix(path("components"), xc * result.b);
  if (result.s) write_matrix(path("outliers"), *result.s);

  const VarianceReport variance = explained_variance(xc, result);
  const std::string variance_path = (fs::path(args.output_dir) / "variance.csv").string();
  {
    std::ofstream out(variance_path, std::ios::binary);
    if (!out) throw std::runtime_error(variance_path + ": cannot open for writing");
    out << "component,explained,cumulative\n";
    for (Index i = 0; i < variance.per_component.size(); ++i)
      out << i + 1 << ',' << format_double(variance.per_component(i)) << ','
          << format_double(variance.cumulative(i)) << '\n';
  }
  const std::string trace_path = (fs::path(args.output_dir) / "trace.csv").string();
  write_trace_csv(trace_path, result.objective_trace, result.stationarity_trace);

  Manifest m;
  m.set("command", "solve");
  m.set("input", args.input);
  m.set("rows", std::to_string(x.rows()));
  m.set("cols", std::to_string(x.cols()));
  m.set("center", cfg.center ? "1" : "0");
  m.set("rank", std::to_string(cfg.rank));
  m.set("reg", args.reg);
  m.set("alpha", format_double(args.alpha));
  m.set("beta", format_double(args.beta));
  m.set("groups", args.groups.empty() ? "-" : args.groups);
  m.set("robust", args.robust ? "1" : "0");
  m.set("randomized", cfg.randomized ? "1" : "0");
  m.set("oversample", std::to_string(cfg.oversample));
  m.set("power_iters", std::to_string(cfg.power_iters));
  m.set("fista", cfg.fista ? "1" : "0");
  m.set("tol", format_double(cfg.tol));
  m.set("max_iter", std::to_string(cfg.max_iter));
  m.set("seed", std::to_string(cfg.seed));
  m.set("step_size", format_double(result.step_size));
  if (result.huber_kappa) m.set("huber_kappa", format_double(*result.huber_kappa));
  m.set("termination", to_string(result.termination));
  m.set("iterations", std::to_string(result.iterations));
  m.set("objective", format_double(objective));
  m.set("stationarity", format_double(result.stationarity_trace.empty()
                                          ? 0.0
                                          : result.stationarity_trace.back()));
  m.set("output_loadings", path("loadings"));
  m.set("output_factor", path("factor"));
  m.set("output_components", path("components"));
  if (result.s) m.set("output_outliers", path("outliers"));
  m.set("output_variance", variance_path);
  m.set("output_trace", trace_path);
  m.set("time_sketch_s", format_double(time_sketch));
  m.set("time_solve_s", format_double(time_solve));
  m.set("time_total_s", format_double(seconds_since(t_total)));
  m.write((fs::path(args.output_dir) / "manifest.txt").string());
  return 0;
}

struct GenMultiscaleArgs {
  std::string grid = "40x40";
  Index snapshots = 300;
  double dt = 0.5;
  int modes = 3;
  bool overlap = false;
  std::uint64_t seed = 0;
  std::string output_dir;
  bool binary = false;
};

int cmd_gen_multiscale(const GenMultiscaleArgs& args) {
  const auto t_total = Clock::now();
  const auto [h, w] = parse_shape(args.grid);
  const MultiscaleSpec spec =
      MultiscaleSpec::defaults(h, w, args.snapshots, args.dt, args.modes, args.overlap,
                               args.seed);
  const MultiscaleData data = generate_multiscale(spec);

  fs::create_directories(args.output_dir);
  const auto path = [&](const std::string& stem) {
    return (fs::path(args.output_dir) / matrix_name(stem, args.binary)).string();
  };
  write_matrix(path("x"), data.x);
  write_matrix(path("modes"), data.modes);
  write_matrix(path("masks"), data.masks);
  write_matrix(path("amplitudes"), data.amplitudes);

  Manifest m;
  m.set("command", "gen-multiscale");
  m.set("grid", args.grid);
  m.set("snapshots", std::to_string(args.snapshots));
  m.set("dt", format_double(args.dt));
  m.set("modes", std::to_string(args.modes));
  m.set("overlap", args.overlap ? "1" : "0");
  m.set("seed", std::to_string(args.seed));
  m.set("output_x", path("x"));
  m.set("output_modes", path("modes"));
  m.set("output_masks", path("masks"));
  m.set("output_amplitudes", path("amplitudes"));
  m.set("time_total_s", format_double(seconds_since(t_total)));
  m.write((fs::path(args.output_dir) / "manifest.txt").string());
  return 0;
}

struct GenCorruptArgs {
  std::string input;
  double fraction = 0.05;
  std::optional<double> magnitude;
  std::uint64_t seed = 0;
  std::string output_dir;
  bool binary = false;
};

int cmd_gen_corrupt(const GenCorruptArgs& args) {
  const auto t_total = Clock::now();
  const Matrix x = read_matrix(args.input);

  CorruptionSpec spec;
  spec.fraction = args.fraction;
  spec.seed = args.seed;
  if (args.magnitude) {
    spec.magnitude = *args.magnitude;
  } else {
    // Default spikes at 10x the data scale, the regime the robust solver is
    // meant to absorb.
    const double mean = x.mean();
    spec.magnitude =
        10.0 * std::sqrt((x.array() - mean).square().sum() / double(x.size()));
  }
  const CorruptionResult result = corrupt(x, spec);

  fs::create_directories(args.output_dir);
  const auto path = [&](const std::string& stem) {
    return (fs::path(args.output_dir) / matrix_name(stem, args.binary)).string();
  };
  write_matrix(path("corrupted"), result.corrupted);
  write_matrix(path("mask"), result.mask);

  Manifest m;
  m.set("command", "gen-corrupt");
  m.set("input", args.input);
  m.set("fraction", format_double(args.fraction));
  m.set("magnitude", format_double(spec.magnitude));
  m.set("seed", std::to_string(args.seed));
  m.set("corrupted_entries", std::to_string(std::int64_t(result.mask.sum())));
  m.set("output_corrupted", path("corrupted"));
  m.set("output_mask", path("mask"));
  m.set("time_total_s", format_double(seconds_since(t_total)));
  m.write((fs::path(args.output_dir) / "manifest.txt").string());
  return 0;
}

struct ScoreArgs {
  std::string loadings;
  std::string masks;
  double threshold = 1e-6;
  bool normalize = false;
  std::string output;
};

int cmd_score(const ScoreArgs& args) {
  Matrix loadings = read_matrix(args.loadings);
  const Matrix masks = read_matrix(args.masks);
  if (args.normalize)
    for (Index j = 0; j < loadings.cols(); ++j) {
      const double peak = loadings.col(j).cwiseAbs().maxCoeff();
      if (peak > 0.0) loadings.col(j) /= peak;
    }
  const auto scores = score_support_recovery(masks, loadings, args.threshold);

  std::ostringstream text;
  text << "mode,matched_column,jaccard,f1\n";
  double mean_j = 0.0, mean_f1 = 0.0;
  for (const auto& s : scores) {
    text << s.mode << ',' << s.matched_column << ',' << format_double(s.jaccard) << ','
         << format_double(s.f1) << '\n';
    mean_j += s.jaccard;
    mean_f1 += s.f1;
  }
  if (!scores.empty()) {
    mean_j /= double(scores.size());
    mean_f1 /= double(scores.size());
  }

  if (args.output.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream out(args.output, std::ios::binary);
    if (!out) throw std::runtime_error(args.output + ": cannot open for writing");
    out << text.str();
  }
  std::cout << "mean_jaccard " << format_double(mean_j) << "\n"
            << "mean_f1 " << format_double(mean_f1) << "\n";
  return 0;
}

struct BenchArgs {
  std::vector<std::string> shapes;
  Index data_rank = 10;
  Index rank = 10;
  int reps = 3;
  double alpha = 1e-3;
  double tol = 1e-5;
  int max_iter = 1000;
  Index oversample = 10;
  int power_iters = 2;
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_bench(const BenchArgs& args) {
  BenchSpec spec;
  for (const auto& s : args.shapes) spec.shapes.push_back(parse_shape(s));
  spec.data_rank = args.data_rank;
  spec.rank = args.rank;
  spec.repetitions = args.reps;
  spec.alpha = args.alpha;
  spec.tol = args.tol;
  spec.max_iter = args.max_iter;
  spec.oversample = args.oversample;
  spec.power_iters = args.power_iters;
  spec.seed = args.seed;

  const auto rows = run_bench(spec);
  std::cout << bench_table(rows);
  if (!args.output.empty()) write_bench_csv(args.output, rows);
  return 0;
}

}  // namespace

int cli_run(int argc, const char* const* argv) {
  CLI::App app{"Sparse PCA via alternating proximal gradient and Procrustes updates"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "Factor a matrix into sparse components");
  solve->add_option("--input", solve_args.input, "Input matrix (.csv or .bin)")
      ->required();
  solve->add_option("--output-dir", solve_args.output_dir, "Directory for all outputs")
      ->required();
  solve->add_option("--rank", solve_args.rank, "Number of components")->required();
  solve->add_option("--reg", solve_args.reg, "Regularizer: none|l0|l1|l0l2|l1l2|group");
  solve->add_option("--alpha", solve_args.alpha, "Sparsity weight");
  solve->add_option("--beta", solve_args.beta, "Ridge weight (l0l2/l1l2)");
  solve->add_option("--groups", solve_args.groups, "Groups file for --reg group");
  solve->add_flag("--robust", solve_args.robust,
                  "Model entrywise outliers with a Huber penalty");
  solve->add_option("--huber-kappa", solve_args.huber_kappa,
                    "Huber threshold (default: MAD estimate)");
  solve->add_flag("--randomized", solve_args.randomized,
                  "Solve on a randomized row-space sketch");
  solve->add_option("--oversample", solve_args.oversample, "Sketch oversampling");
  solve->add_option("--power-iters", solve_args.power_iters, "Sketch power iterations");
  solve->add_option("--tol", solve_args.tol, "Convergence tolerance");
  solve->add_option("--max-iter", solve_args.max_iter, "Iteration cap");
  solve->add_flag("--no-center", solve_args.no_center, "Skip column centering");
  solve->add_option("--seed", solve_args.seed, "Seed for all randomness");
  solve->add_flag("--fista", solve_args.fista, "Momentum acceleration");
  solve->add_option("--step", solve_args.step, "Fixed step size (default: from ||X||_2)");
  solve->add_option("--init", solve_args.init,
                    "Initial loadings file (default: PCA warm start)");
  solve->add_flag("--binary", solve_args.binary, "Write matrices in binary form");

  CLI::App* gen = app.add_subcommand("gen", "Generate synthetic datasets");
  gen->require_subcommand(1);

  GenMultiscaleArgs multi_args;
  CLI::App* multi = gen->add_subcommand("multiscale", "Gated oscillating spatial modes");
  multi->add_option("--grid", multi_args.grid, "Spatial grid, e.g. 40x40");
  multi->add_option("--snapshots", multi_args.snapshots, "Number of time samples");
  multi->add_option("--dt", multi_args.dt, "Sample spacing in seconds");
  multi->add_option("--modes", multi_args.modes, "Number of planted modes (1-5)");
  multi->add_flag("--overlap", multi_args.overlap, "Pack mode supports to intersect");
  multi->add_option("--seed", multi_args.seed, "Seed for gating windows");
  multi->add_option("--output-dir", multi_args.output_dir, "Directory for all outputs")
      ->required();
  multi->add_flag("--binary", multi_args.binary, "Write matrices in binary form");

  GenCorruptArgs corrupt_args;
  CLI::App* corr = gen->add_subcommand("corrupt", "Add salt-and-pepper spikes");
  corr->add_option("--input", corrupt_args.input, "Matrix to corrupt")->required();
  corr->add_option("--fraction", corrupt_args.fraction, "Fraction of entries to hit");
  corr->add_option("--magnitude", corrupt_args.magnitude,
                   "Spike size (default: 10x the data standard deviation)");
  corr->add_option("--seed", corrupt_args.seed, "Seed for spike placement");
  corr->add_option("--output-dir", corrupt_args.output_dir, "Directory for all outputs")
      ->required();
  corr->add_flag("--binary", corrupt_args.binary, "Write matrices in binary form");

  ScoreArgs score_args;
  CLI::App* score = app.add_subcommand("score", "Support recovery against truth masks");
  score->add_option("--loadings", score_args.loadings, "Loadings matrix from solve")
      ->required();
  score->add_option("--masks", score_args.masks, "Ground-truth 0/1 support masks")
      ->required();
  score->add_option("--threshold", score_args.threshold,
                    "|loading| above this counts as support");
  score->add_flag("--normalize", score_args.normalize,
                  "Scale each loading column to unit peak before thresholding");
  score->add_option("--output", score_args.output, "Score CSV path (default: stdout)");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "Deterministic vs randomized timings");
  bench->add_option("--shape", bench_args.shapes, "Shape NxP; repeatable")->required();
  bench->add_option("--data-rank", bench_args.data_rank, "Exact rank of the synthetic");
  bench->add_option("--rank", bench_args.rank, "Components solved for");
  bench->add_option("--reps", bench_args.reps, "Repetitions per cell (>= 3)");
  bench->add_option("--alpha", bench_args.alpha, "l1 weight for both configurations");
  bench->add_option("--tol", bench_args.tol, "Convergence tolerance");
  bench->add_option("--max-iter", bench_args.max_iter, "Iteration cap for both configs");
  bench->add_option("--oversample", bench_args.oversample, "Sketch oversampling");
  bench->add_option("--power-iters", bench_args.power_iters, "Sketch power iterations");
  bench->add_option("--seed", bench_args.seed, "Seed for instances and sketches");
  bench->add_option("--output", bench_args.output, "Also write the table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_args);
    if (multi->parsed()) return cmd_gen_multiscale(multi_args);
    if (corr->parsed()) return cmd_gen_corrupt(corrupt_args);
    if (score->parsed()) return cmd_score(score_args);
    if (bench->parsed()) return cmd_bench(bench_args);
  } catch (const numerical_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

int cli_run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("spca");
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_run(int(argv.size()), argv.data());
}

}  // namespace spca
