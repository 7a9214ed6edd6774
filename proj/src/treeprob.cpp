#include "provalue/treeprob.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "provalue/numeric.hpp"

namespace provalue {
namespace {

// sum_{l=s}^{n-b} p_{l+shift} C(n-b-s, l-s) in log space. shift is -1 for
// the "must be present" case and 0 for the "must be absent" case.
double log_path_weight(int s, int b, int shift, const WeightVector& w) {
  const int n = w.players();
  const int free = n - b - s;
  double acc = kNegInf;
  for (int l = s; l <= n - b; ++l) {
    acc = log_add(acc, w.log_p(l + shift) + log_binomial(free, l - s));
  }
  return acc;
}

// Memo of the two path weights keyed by (s_P, n_P).
class PathWeights {
 public:
  explicit PathWeights(const WeightVector& w)
      : w_(w), n_(w.players()),
        pos_(static_cast<std::size_t>(n_ + 1) * (n_ + 1), std::numeric_limits<double>::quiet_NaN()),
        neg_(pos_) {}

  CaseSums at(int s, int b, double leaf) {
    const std::size_t key = static_cast<std::size_t>(s) * (n_ + 1) + b;
    if (std::isnan(pos_[key])) {
      pos_[key] = std::exp(log_path_weight(s, b, -1, w_));
      neg_[key] = std::exp(log_path_weight(s, b, 0, w_));
    }
    return {leaf * pos_[key], -leaf * neg_[key]};
  }

 private:
  const WeightVector& w_;
  int n_;
  std::vector<double> pos_;
  std::vector<double> neg_;
};

struct Recursion {
  const Tree& tree;
  std::span<const double> explicand;
  std::span<const double> baseline;
  PathWeights& weights;
  std::vector<int> ef_seen;
  std::vector<int> bf_seen;
  std::vector<double>& phi;

  CaseSums recurse(int node_index, int s, int b) {
    const TreeNode& node = tree.nodes[node_index];
    if (node.is_leaf()) return weights.at(s, b, *node.value);

    const int e_child = node.route(explicand);
    const int b_child = node.route(baseline);
    const int f = node.feature;
    if (ef_seen[f] > 0) return recurse(e_child, s, b);
    if (bf_seen[f] > 0) return recurse(b_child, s, b);
    if (e_child == b_child) return recurse(e_child, s, b);

    ++ef_seen[f];
    const CaseSums e = recurse(e_child, s + 1, b);
    --ef_seen[f];

    ++bf_seen[f];
    const CaseSums bs = recurse(b_child, s, b + 1);
    --bf_seen[f];

    phi[f] += e.pos + bs.neg;
    return {e.pos + bs.pos, e.neg + bs.neg};
  }
};

}  // namespace

CaseSums path_case_sums(int explicand_only, int baseline_only, double leaf_value,
                        const WeightVector& w) {
  if (explicand_only < 0 || baseline_only < 0 || explicand_only + baseline_only > w.players()) {
    throw std::invalid_argument("path counts must satisfy 0 <= s_P, n_P and s_P + n_P <= n");
  }
  const double pos = std::exp(log_path_weight(explicand_only, baseline_only, -1, w));
  const double neg = std::exp(log_path_weight(explicand_only, baseline_only, 0, w));
  return {leaf_value * pos, -leaf_value * neg};
}

std::vector<double> tree_prob_values(const TreeEnsemble& ensemble,
                                     const std::vector<double>& explicand,
                                     const std::vector<std::vector<double>>& baselines,
                                     const WeightVector& w) {
  ensemble.validate();
  const int n = w.players();
  if (ensemble.n_features != n || static_cast<int>(explicand.size()) != n) {
    throw std::invalid_argument("ensemble, explicand and weights disagree on the feature count");
  }
  if (baselines.empty()) throw std::invalid_argument("at least one baseline is required");
  for (const auto& b : baselines) {
    if (static_cast<int>(b.size()) != n) throw std::invalid_argument("baseline length mismatch");
  }

  PathWeights weights(w);
  std::vector<double> phi(n, 0.0);
  for (const Tree& tree : ensemble.trees) {
    for (const auto& baseline : baselines) {
      Recursion r{tree, explicand, baseline, weights, std::vector<int>(n, 0),
                  std::vector<int>(n, 0), phi};
      r.recurse(tree.root, 0, 0);
    }
  }
  const double denom = static_cast<double>(ensemble.trees.size() * baselines.size());
  for (double& x : phi) x /= denom;
  return phi;
}

std::vector<double> brute_force_values(const Game& game, const WeightVector& w) {
  const int n = game.players();
  if (n > kMaxBruteForcePlayers) {
    throw std::invalid_argument("brute force enumeration is limited to n <= 20, got " +
                                std::to_string(n));
  }
  if (w.players() != n) throw std::invalid_argument("weights and game disagree on n");
  const std::vector<double> v = tabulate(game);
  std::vector<double> p(n);
  for (int l = 0; l < n; ++l) p[l] = w.p(l);

  std::vector<double> phi(n, 0.0);
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    const int size = std::popcount(mask);
    for (int i = 0; i < n; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if (mask & bit) continue;
      phi[i] += p[size] * (v[mask | bit] - v[mask]);
    }
  }
  return phi;
}

}  // namespace provalue
