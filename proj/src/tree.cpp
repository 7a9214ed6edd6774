#include "provalue/tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace provalue {

double Tree::predict(std::span<const double> x) const {
  int node = root;
  while (!nodes[node].is_leaf()) node = nodes[node].route(x);
  return *nodes[node].value;
}

namespace {

int depth_from(const Tree& tree, int node) {
  const TreeNode& n = tree.nodes[node];
  if (n.is_leaf()) return 0;
  return 1 + std::max(depth_from(tree, n.left), depth_from(tree, n.right));
}

int leaves_from(const Tree& tree, int node) {
  const TreeNode& n = tree.nodes[node];
  if (n.is_leaf()) return 1;
  return leaves_from(tree, n.left) + leaves_from(tree, n.right);
}

// Depth-first walk; `on_path` detects cycles.
void check_reachable(const Tree& tree, int node, std::vector<char>& on_path, std::size_t t) {
  const auto where = "tree " + std::to_string(t) + " node " + std::to_string(node);
  if (node < 0 || node >= static_cast<int>(tree.nodes.size())) {
    throw std::invalid_argument("tree " + std::to_string(t) + ": child index " +
                                std::to_string(node) + " out of range");
  }
  if (on_path[node]) throw std::invalid_argument(where + ": cycle detected");
  const TreeNode& n = tree.nodes[node];
  if (n.is_leaf()) {
    if (!std::isfinite(*n.value)) throw std::invalid_argument(where + ": non-finite leaf value");
    return;
  }
  if (!std::isfinite(n.threshold)) throw std::invalid_argument(where + ": split without threshold");
  on_path[node] = 1;
  check_reachable(tree, n.left, on_path, t);
  check_reachable(tree, n.right, on_path, t);
  on_path[node] = 0;
}

}  // namespace

int Tree::depth() const { return depth_from(*this, root); }
int Tree::leaf_count() const { return leaves_from(*this, root); }

void TreeEnsemble::validate() const {
  if (n_features < 0) throw std::invalid_argument("negative feature count");
  if (trees.empty()) throw std::invalid_argument("ensemble has no trees");
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const Tree& tree = trees[t];
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      const TreeNode& n = tree.nodes[i];
      if (n.is_leaf()) continue;
      if (n.feature < 0 || n.feature >= n_features) {
        throw std::invalid_argument("tree " + std::to_string(t) + " node " + std::to_string(i) +
                                    ": split feature " + std::to_string(n.feature) +
                                    " outside [0, " + std::to_string(n_features) + ")");
      }
    }
    std::vector<char> on_path(tree.nodes.size(), 0);
    check_reachable(tree, tree.root, on_path, t);
  }
}

double TreeEnsemble::predict(std::span<const double> x) const {
  double total = 0.0;
  for (const Tree& tree : trees) total += tree.predict(x);
  return total / static_cast<double>(trees.size());
}

void TreeEnsemble::scale_leaves(double factor) {
  for (Tree& tree : trees) {
    for (TreeNode& node : tree.nodes) {
      if (node.is_leaf()) *node.value *= factor;
    }
  }
}

}  // namespace provalue
