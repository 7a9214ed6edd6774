#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "provalue/games.hpp"
#include "provalue/regress.hpp"
#include "provalue/sampling.hpp"
#include "provalue/weights.hpp"

namespace provalue {

struct EstimateReport {
  std::string estimator;
  nlohmann::json config;  // echo of every option that shaped the run
  std::vector<double> estimates;
  std::size_t evaluations_used = 0;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
  // Learned functions of Regression MSR, one per fold (or one when practical).
  std::vector<FittedFunction> fits;
};

class BudgetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct MonteCarloOptions {
  // Law over coalitions of all n players; the per-player draw restricts it
  // to coalitions without the player. Defaults to density proportional to
  // p_|S|, which makes every reweighting factor 1.
  std::optional<SizeDistribution> distribution;
  // Evaluate every term of the defining sum instead of sampling.
  bool exhaustive = false;
};

EstimateReport monte_carlo(const Game& game, const WeightVector& w, std::size_t m,
                           std::uint64_t seed, const MonteCarloOptions& options = {});

/// Monte Carlo with the Shapley size law (uniform over sizes 0..n-1 of the
/// coalitions without the player), reweighted to the target weights.
EstimateReport wsl(const Game& game, const WeightVector& w, std::size_t m, std::uint64_t seed);

/// Permutation sampling; the prefix of size s is reweighted by
/// n C(n-1, s) p_s, which is 1 for Shapley weights.
EstimateReport permutation_estimator(const Game& game, const WeightVector& w, std::size_t m,
                                     std::uint64_t seed);

struct MsrOptions {
  std::optional<SizeDistribution> distribution;  // default_msr_distribution(w)
  bool replacement = true;
  bool exhaustive = false;
};

EstimateReport msr(const Game& game, const WeightVector& w, std::size_t m, std::uint64_t seed,
                   const MsrOptions& options = {});

EstimateReport arm(const Game& game, const WeightVector& w, std::size_t m, std::uint64_t seed);

struct KernelOptions {
  // Use every non-trivial coalition with its exact kernel weight.
  bool exhaustive = false;
};

EstimateReport kernel_shap(const Game& game, std::size_t m, std::uint64_t seed,
                           const KernelOptions& options = {});
EstimateReport leverage_shap(const Game& game, std::size_t m, std::uint64_t seed,
                             const KernelOptions& options = {});

/// Leverage score of a single coalition of each size s = 0..n in the
/// Shapley-kernel regression after the sum constraint is eliminated.
/// Trivial sizes have leverage 0. Closed form via the Gram matrix c (I - 11^T/n).
std::vector<double> shapley_leverage_by_size(int n);

/// Size law of Kernel SHAP: Pr(s) proportional to 1 / (s (n - s)), s in 1..n-1.
SizeDistribution shapley_kernel_distribution(int n);
/// Size law proportional to C(n,s) * leverage(s), s in 1..n-1.
SizeDistribution shapley_leverage_distribution(int n);

struct RegressionMsrConfig {
  enum class Model { kLinear, kGbt };

  int k = 10;
  Model model = Model::kLinear;
  GbtConfig gbt;
  std::optional<SizeDistribution> distribution;  // default_msr_distribution(w)
  bool practical = false;
  bool replacement = true;
  // Shapley only: sample by leverage, anchor v(empty) and v([n]), and fit
  // with the sum-constrained kernel regression.
  bool constrained_shapley = false;
  // Retain the learned functions in the report.
  bool keep_fits = false;

  void validate() const;
};

RegressionMsrConfig linear_msr_preset(const WeightFamily& family);
RegressionMsrConfig tree_msr_preset();

EstimateReport regression_msr(const Game& game, const WeightVector& w, std::size_t m,
                              const RegressionMsrConfig& config, std::uint64_t seed);

/// Named estimator plus its options, as accepted by the CLI and benchmark
/// configs. Names: monte_carlo, wsl, permutation, msr, arm, kernel_shap,
/// leverage_shap, regression_msr, linear_msr, tree_msr.
struct EstimatorSpec {
  std::string name;
  std::optional<int> k;
  std::optional<bool> practical;
  std::optional<bool> replacement;
  std::optional<std::string> model;  // regression_msr: "linear" | "gbt"
  GbtConfig gbt;

  std::string label() const;
};

EstimatorSpec parse_estimator_spec(const nlohmann::json& j);
nlohmann::json to_json(const EstimatorSpec& spec);

EstimateReport run_estimator(const EstimatorSpec& spec, const Game& game,
                             const WeightFamily& family, std::size_t m, std::uint64_t seed);

/// Parses "640" or "40n" into an absolute budget.
std::size_t parse_budget(const std::string& text, int n);

}  // namespace provalue
