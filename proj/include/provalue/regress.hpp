#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "provalue/sampling.hpp"
#include "provalue/tree.hpp"
#include "provalue/weights.hpp"

namespace provalue {

/// One evaluated coalition.
struct Sample {
  Subset subset;
  double target = 0.0;
};

struct LinearFit {
  double intercept = 0.0;
  std::vector<double> coeffs;
  // Set when the normal equations were singular and a ridge term was added.
  bool regularized = false;
};

/// Boosted trees over membership bits (bit i is 1 iff player i is in S,
/// splits at 0.5). Stored as an ensemble whose mean equals the boosted sum.
struct TreeFit {
  TreeEnsemble ensemble;
  // Training MSE after the constant initialisation and after each round.
  std::vector<double> training_loss;
};

using FittedFunction = std::variant<LinearFit, TreeFit>;

double predict(const FittedFunction& f, const Subset& s);
int fitted_players(const FittedFunction& f);

struct GbtConfig {
  int rounds = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
  int min_samples_leaf = 2;

  void validate() const;
};

/// Ordinary least squares on (1, 1[1 in S], ..., 1[n in S]). Singular
/// systems get a ridge on the coefficient block (the intercept is never
/// penalised).
LinearFit fit_linear(std::span<const Sample> samples, int n);

/// Weighted least squares for f(S) = base + <x, 1_S> subject to
/// sum(x) = anchor. The constraint is eliminated by substitution, so the
/// returned coefficients satisfy it to rounding.
LinearFit fit_constrained_linear(std::span<const Sample> samples, std::span<const double> weights,
                                 int n, double base, double anchor);

/// Squared-loss gradient boosting with depth-limited variance-reduction
/// trees. Split search is exhaustive with ties going to the lowest feature
/// index, so the result does not depend on `seed`; it is accepted for
/// interface stability.
TreeFit fit_gbt(std::span<const Sample> samples, int n, const GbtConfig& config,
                std::uint64_t seed = 0);

/// Exact probabilistic values of a fitted function. For a linear fit these
/// are its coefficients; trees go through tree_prob_values with explicand
/// all-ones and baseline all-zeros.
std::vector<double> exact_prob_values(const FittedFunction& f, const WeightVector& w);

/// Kernel weight of a coalition of size s in the Shapley regression:
/// (n-1) / (C(n,s) s (n-s)), infinite at s = 0 and s = n.
double shapley_kernel_weight(int n, int s);

}  // namespace provalue
