#pragma once

#include <vector>

#include "provalue/games.hpp"
#include "provalue/tree.hpp"
#include "provalue/weights.hpp"

namespace provalue {

/// Contributions of one root-to-leaf path to a feature that must be present
/// (`pos`) or absent (`neg`) for the path to be followed.
struct CaseSums {
  double pos = 0.0;
  double neg = 0.0;
};

/// For a path with `explicand_only` features that require x^e and
/// `baseline_only` features that require x^b:
///   pos =  leaf * sum_{l=s}^{n-b} p_{l-1} C(n-b-s, l-s)
///   neg = -leaf * sum_{l=s}^{n-b} p_l     C(n-b-s, l-s)
CaseSums path_case_sums(int explicand_only, int baseline_only, double leaf_value,
                        const WeightVector& w);

/// Exact probabilistic values of the interventional game of a tree
/// ensemble, averaged over baselines. Cost is linear in the number of
/// root-to-leaf paths per (tree, baseline) pair.
std::vector<double> tree_prob_values(const TreeEnsemble& ensemble,
                                     const std::vector<double>& explicand,
                                     const std::vector<std::vector<double>>& baselines,
                                     const WeightVector& w);

/// Exhaustive evaluation of phi_i = sum_{S not containing i} p_|S| [v(S+i) - v(S)].
/// Requires n <= 20.
std::vector<double> brute_force_values(const Game& game, const WeightVector& w);

inline constexpr int kMaxBruteForcePlayers = 20;

}  // namespace provalue
