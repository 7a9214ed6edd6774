#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace provalue {

// Internal nodes send x to `left` when x[feature] < threshold.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::optional<double> value;

  bool is_leaf() const { return value.has_value(); }
  int route(std::span<const double> x) const { return x[feature] < threshold ? left : right; }

  static TreeNode leaf(double v) {
    TreeNode node;
    node.value = v;
    return node;
  }
  static TreeNode split(int feature, double threshold, int left, int right) {
    TreeNode node;
    node.feature = feature;
    node.threshold = threshold;
    node.left = left;
    node.right = right;
    return node;
  }
};

struct Tree {
  int root = 0;
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
  int depth() const;
  int leaf_count() const;
};

/// Forest whose prediction is the unweighted mean of its trees.
struct TreeEnsemble {
  int n_features = 0;
  std::vector<Tree> trees;

  /// Throws std::invalid_argument naming the first structural defect found.
  void validate() const;
  double predict(std::span<const double> x) const;
  /// Multiplies every leaf value, e.g. to fold a per-tree weight into the mean.
  void scale_leaves(double factor);
};

}  // namespace provalue
