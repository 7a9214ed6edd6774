#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "provalue/estimators.hpp"
#include "provalue/harness.hpp"
#include "provalue/serialize.hpp"
#include "provalue/treeprob.hpp"
#include "provalue/weights.hpp"

namespace fs = std::filesystem;
using namespace provalue;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Argument values that parse but are semantically invalid are usage errors.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

WeightFamily family_arg(const std::string& text) {
  try {
    return parse_family(text);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

int cmd_weights(const std::string& family, int n) {
  if (n < 1) throw UsageError("--n must be >= 1");
  const WeightVector w = make_weights(family_arg(family), n);
  std::cout << format_vector(w.values()) << "\n";
  return 0;
}

int cmd_exact(const std::string& game_path, const std::string& family) {
  const WeightFamily f = family_arg(family);
  const GamePtr game = game_from_json(read_json_file(game_path));
  std::cout << format_vector(ground_truth(*game, make_weights(f, game->players()))) << "\n";
  return 0;
}

struct EstimateArgs {
  std::string game;
  std::string family = "shapley";
  std::string estimator;
  std::string budget;
  std::optional<int> k;
  std::optional<std::string> model;
  bool practical = false;
  bool without_replacement = false;
  std::string out;
};

int cmd_estimate(const EstimateArgs& args, std::uint64_t seed) {
  const WeightFamily f = family_arg(args.family);
  const GamePtr game = game_from_json(read_json_file(args.game));
  EstimatorSpec spec;
  spec.name = args.estimator;
  spec.k = args.k;
  spec.model = args.model;
  if (args.practical) spec.practical = true;
  if (args.without_replacement) spec.replacement = false;
  std::size_t m = 0;
  try {
    m = parse_budget(args.budget, game->players());
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  const EstimateReport report = run_estimator(spec, *game, f, m, seed);
  const std::string text = report_to_json(report).dump(2) + "\n";
  if (args.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(args.out, text);
  }
  return 0;
}

int cmd_bench(const std::string& config_path, const std::string& out, std::optional<std::uint64_t> seed,
              std::optional<int> threads) {
  const nlohmann::json doc = read_json_file(config_path);
  BenchmarkConfig cfg = parse_benchmark_config(doc, fs::path(config_path).parent_path());
  if (seed) cfg.seed = *seed;
  if (threads) cfg.threads = *threads;
  if (!out.empty()) cfg.out = out;
  if (cfg.out.empty()) throw UsageError("bench needs --out or an \"out\" entry in the config");
  const auto records = run_benchmark(cfg);
  write_text_file(cfg.out, to_csv(records));
  std::size_t failed = 0;
  for (const auto& r : records) {
    if (!r.failure.empty()) {
      ++failed;
      std::cerr << "cell " << r.game << " " << r.family << " " << r.estimator << " m=" << r.m
                << " run=" << r.run << " failed: " << r.failure << "\n";
    }
  }
  std::cerr << records.size() << " rows written to " << cfg.out << " (" << failed << " failed)\n";
  return 0;
}

bool check(bool ok, const std::string& what) {
  std::cout << (ok ? "ok   " : "FAIL ") << what << "\n";
  return ok;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

int cmd_validate(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no fixtures found in " + dir);

  const std::vector<std::string> families = {"shapley", "banzhaf", "beta:2,2", "beta:1,4",
                                             "wbanzhaf:0.7", "wbanzhaf:0.9"};
  bool all = true;
  for (const auto& path : files) {
    const GamePtr game = game_from_json(read_json_file(path));
    const int n = game->players();
    const std::string name = path.filename().string();
    for (const auto& family : families) {
      const WeightVector w = make_weights(parse_family(family), n);
      const auto exact = ground_truth(*game, w);
      if (n <= kMaxBruteForcePlayers) {
        const double diff = max_abs_diff(exact, brute_force_values(*game, w));
        all &= check(diff <= 1e-9, name + " " + family + " exact vs enumeration, max diff " +
                                       format_vector({diff}));
      }
      if (family == "shapley") {
        double sum = 0.0;
        for (double x : exact) sum += x;
        const double gap = game->value(Subset::full(n)) - game->value(Subset{});
        all &= check(std::abs(sum - gap) < 1e-9, name + " Shapley efficiency");
      }
    }
  }

  const fs::path stump = fs::path(dir) / "stump.json";
  if (fs::exists(stump)) {
    const GamePtr game = game_from_json(read_json_file(stump));
    const auto phi = ground_truth(*game, make_weights(Shapley{}, game->players()));
    all &= check(max_abs_diff(phi, {0.8, 0, 0, 0, 0}) < 1e-12, "stump.json Shapley = [0.8, 0, 0, 0, 0]");
  }
  const fs::path pair = fs::path(dir) / "pair.json";
  if (fs::exists(pair)) {
    const GamePtr game = game_from_json(read_json_file(pair));
    const auto phi = ground_truth(*game, make_weights(Shapley{}, 2));
    all &= check(max_abs_diff(phi, {1.5, 2.5}) < 1e-12, "pair.json Shapley = [1.5, 2.5]");
  }
  std::cout << (all ? "all checks passed" : "some checks failed") << "\n";
  return all ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and estimated probabilistic values of set functions"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  std::optional<int> threads;
  auto* seed_opt = app.add_option("--seed", seed, "Random seed")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads for bench (default 1)")->check(CLI::PositiveNumber);

  std::string family = "shapley";
  int n = 0;
  auto* weights = app.add_subcommand("weights", "Print the weight vector p_0..p_{n-1}");
  weights->add_option("--family", family, "shapley | banzhaf | beta:A,B | wbanzhaf:Q")->required();
  weights->add_option("--n", n, "Number of players")->required();

  std::string game_path;
  std::string exact_family;
  auto* exact = app.add_subcommand("exact", "Exact values of a game");
  exact->add_option("--game", game_path, "Game JSON file")->required()->check(CLI::ExistingFile);
  exact->add_option("--weights", exact_family, "Weight family")->required();

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Run one estimator and print its report");
  estimate->add_option("--game", est.game, "Game JSON file")->required()->check(CLI::ExistingFile);
  estimate->add_option("--weights", est.family, "Weight family")->capture_default_str();
  estimate->add_option("--estimator", est.estimator,
                       "monte_carlo | wsl | permutation | msr | arm | kernel_shap | leverage_shap | "
                       "regression_msr | linear_msr | tree_msr")
      ->required();
  estimate->add_option("--budget", est.budget, "Evaluations, e.g. 640 or 40n")->required();
  estimate->add_option("--k", est.k, "Folds for regression_msr")->check(CLI::PositiveNumber);
  estimate->add_option("--model", est.model, "regression_msr model")->check(CLI::IsMember({"linear", "gbt"}));
  estimate->add_flag("--practical", est.practical, "Fit once on all samples");
  estimate->add_flag("--without-replacement", est.without_replacement, "Sample coalitions without replacement");
  estimate->add_option("--out", est.out, "Write the report here instead of stdout");

  std::string config_path;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "Run a benchmark sweep and write CSV");
  bench->add_option("--config", config_path, "Benchmark JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", bench_out, "CSV output path");

  std::string fixture_dir = PROVALUE_FIXTURE_DIR;
  auto* validate = app.add_subcommand("validate", "Check exact engines against enumeration on fixtures");
  validate->add_option("--fixtures", fixture_dir, "Fixture directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    if (argc <= 1) std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (*weights) return cmd_weights(family, n);
    if (*exact) return cmd_exact(game_path, exact_family);
    if (*estimate) return cmd_estimate(est, seed);
    if (*bench) {
      return cmd_bench(config_path, bench_out,
                       seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt, threads);
    }
    if (*validate) return cmd_validate(fixture_dir);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
