#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "provalue/estimators.hpp"
#include "provalue/games.hpp"
#include "provalue/regress.hpp"
#include "provalue/sampling.hpp"
#include "provalue/weights.hpp"

namespace provalue {

/// Exact values: TreeProb for tree games (any n), the coefficients times
/// (x^e - mean baseline) for linear games, enumeration for anything else
/// with n <= 20.
std::vector<double> ground_truth(const Game& game, const WeightVector& w);

/// ||est - truth||^2 / ||truth||^2.
double normalized_error(const std::vector<double>& est, const std::vector<double>& truth);

struct NamedGame {
  std::string id;
  GamePtr game;
};

struct BenchmarkConfig {
  std::uint64_t seed = 0;
  int runs = 1;
  std::vector<NamedGame> games;
  std::vector<WeightFamily> families;
  std::vector<EstimatorSpec> estimators;
  std::vector<std::string> budgets;  // "640" or "40n"
  // Empty: games are evaluated without a noise wrapper and rows report sigma 0.
  std::vector<double> sigmas;
  int threads = 1;
  std::string out;

  void validate() const;
};

/// Parses the benchmark JSON document. Games are inline game documents (see
/// game_from_json) or {"file": "path"} resolved against `base_dir`.
BenchmarkConfig parse_benchmark_config(const nlohmann::json& j,
                                       const std::filesystem::path& base_dir = ".");

struct BenchmarkRecord {
  std::string game;
  std::string family;
  std::string estimator;
  std::size_t m = 0;
  double sigma = 0.0;
  int run = 0;
  double error = 0.0;  // NaN on error rows
  std::size_t evals = 0;
  double wall_ms = 0.0;
  std::string failure;  // empty unless the cell failed; not part of the CSV
};

inline constexpr const char* kBenchmarkCsvHeader = "game,family,estimator,m,sigma,run,error,evals,wall_ms";

/// Seed of one estimator run. Independent of sigma, so a noise sweep reuses
/// the sample paths of the noiseless run.
std::uint64_t cell_seed(std::uint64_t master, const std::string& game, const std::string& family,
                        const std::string& estimator, std::size_t m, int run);
std::uint64_t noise_seed(std::uint64_t master, const std::string& game, double sigma, int run);

/// Runs the full cross product. Rows come back in a fixed order regardless
/// of `threads`; failed cells become rows with error = NaN.
std::vector<BenchmarkRecord> run_benchmark(const BenchmarkConfig& config);

std::string to_csv(const std::vector<BenchmarkRecord>& records);
std::vector<BenchmarkRecord> parse_csv(const std::string& text);
std::vector<BenchmarkRecord> read_csv(const std::filesystem::path& path);

struct CellSummary {
  std::string game;
  std::string family;
  std::string estimator;
  std::size_t m = 0;
  double sigma = 0.0;
  std::size_t runs = 0;
  double mean = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

/// Mean and quartiles of the error column per (game, family, estimator, m, sigma).
std::vector<CellSummary> summarize(const std::vector<BenchmarkRecord>& records);

struct BoundReport {
  double rhs = 0.0;                  // k^2 / (m delta) * weighted residual sum
  double epsilon = 0.0;              // k^2 n / (m delta)
  double weighted_residual_sum = 0.0;
  double realized_error = 0.0;       // ||phi_est - phi||^2, when known
  std::size_t m = 0;
  int k = 1;
  double delta = 0.0;
};

/// sum_S [v(S) - f(S)]^2 (p_{s-1}^2 s + p_s^2 (n - s)) / D(S). n <= 16.
double weighted_residual_sum(const Game& game, const WeightVector& w, const SizeDistribution& dist,
                             const FittedFunction& f);

BoundReport theorem_bound_report(const Game& game, const WeightVector& w,
                                 const SizeDistribution& dist, const FittedFunction& f,
                                 std::size_t m, int k, double delta);

/// Runs regression_msr once, takes the fold function with the largest
/// weighted residual sum as f_max, and fills in the realized squared error.
BoundReport bound_for_run(const Game& game, const WeightVector& w, const RegressionMsrConfig& config,
                          std::size_t m, std::uint64_t seed, double delta,
                          const std::vector<double>& truth);

inline constexpr int kMaxBoundPlayers = 16;

}  // namespace provalue
