#include "provalue/regress.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "provalue/numeric.hpp"
#include "provalue/treeprob.hpp"

namespace provalue {
namespace {

constexpr double kRcondFloor = 1e-12;
constexpr double kRidgeScale = 1e-8;

// Solves G x = rhs; when G is numerically singular, adds
// lambda * I on the indices >= `first_penalised` and solves again.
Eigen::VectorXd solve_normal_equations(Eigen::MatrixXd gram, const Eigen::VectorXd& rhs,
                                       int first_penalised, bool& regularized) {
  regularized = false;
  const int dim = static_cast<int>(gram.rows());
  if (dim == 0) return Eigen::VectorXd();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() == Eigen::Success) {
    const Eigen::VectorXd pivots = ldlt.vectorD();
    const double largest = pivots.cwiseAbs().maxCoeff();
    if (pivots.minCoeff() > kRcondFloor * largest && ldlt.rcond() > kRcondFloor) return ldlt.solve(rhs);
  }
  regularized = true;
  const double lambda = kRidgeScale * std::max(gram.trace() / dim, 1.0);
  for (int j = first_penalised; j < dim; ++j) gram(j, j) += lambda;
  ldlt.compute(gram);
  return ldlt.solve(rhs);
}

std::vector<double> membership_bits(const Subset& s, int n) {
  std::vector<double> x(n, 0.0);
  for (int i : s.members()) x[i] = 1.0;
  return x;
}

struct BoostState {
  const std::vector<std::vector<int>>& members;  // per sample
  const std::vector<std::vector<double>>& bits;
  const std::vector<double>& residual;
  int n;
  const GbtConfig& config;
};

struct SplitChoice {
  int feature = -1;
  double gain = 0.0;
};

SplitChoice best_split(const BoostState& st, const std::vector<int>& rows) {
  const int count = static_cast<int>(rows.size());
  std::vector<double> sum_in(st.n, 0.0);
  std::vector<int> cnt_in(st.n, 0);
  double total = 0.0;
  for (int r : rows) {
    total += st.residual[r];
    for (int j : st.members[r]) {
      sum_in[j] += st.residual[r];
      ++cnt_in[j];
    }
  }
  const double parent = total * total / count;
  SplitChoice best;
  for (int j = 0; j < st.n; ++j) {
    const int right = cnt_in[j];
    const int left = count - right;
    if (left < st.config.min_samples_leaf || right < st.config.min_samples_leaf) continue;
    const double sl = total - sum_in[j];
    const double sr = sum_in[j];
    const double gain = sl * sl / left + sr * sr / right - parent;
    if (gain > best.gain + 1e-12 * std::max(1.0, std::abs(parent))) {
      best.feature = j;
      best.gain = gain;
    }
  }
  return best;
}

// Grows one regression tree on the residuals of `rows`; leaf values are
// learning_rate * mean residual.
int grow_tree(const BoostState& st, Tree& tree, const std::vector<int>& rows, int depth) {
  const int index = static_cast<int>(tree.nodes.size());
  auto make_leaf = [&] {
    double sum = 0.0;
    for (int r : rows) sum += st.residual[r];
    tree.nodes.push_back(TreeNode::leaf(st.config.learning_rate * sum / rows.size()));
    return index;
  };
  if (depth >= st.config.max_depth || static_cast<int>(rows.size()) < 2 * st.config.min_samples_leaf) {
    return make_leaf();
  }
  const SplitChoice split = best_split(st, rows);
  if (split.feature < 0) return make_leaf();

  std::vector<int> left_rows;
  std::vector<int> right_rows;
  for (int r : rows) (st.bits[r][split.feature] > 0.5 ? right_rows : left_rows).push_back(r);
  tree.nodes.push_back(TreeNode::split(split.feature, 0.5, -1, -1));
  const int left = grow_tree(st, tree, left_rows, depth + 1);
  const int right = grow_tree(st, tree, right_rows, depth + 1);
  tree.nodes[index].left = left;
  tree.nodes[index].right = right;
  return index;
}

}  // namespace

double predict(const FittedFunction& f, const Subset& s) {
  if (const auto* lin = std::get_if<LinearFit>(&f)) {
    double y = lin->intercept;
    for (int i : s.members()) y += lin->coeffs[i];
    return y;
  }
  const auto& fit = std::get<TreeFit>(f);
  return fit.ensemble.predict(membership_bits(s, fit.ensemble.n_features));
}

int fitted_players(const FittedFunction& f) {
  if (const auto* lin = std::get_if<LinearFit>(&f)) return static_cast<int>(lin->coeffs.size());
  return std::get<TreeFit>(f).ensemble.n_features;
}

void GbtConfig::validate() const {
  if (rounds < 1) throw std::invalid_argument("gbt rounds must be >= 1");
  if (max_depth < 0) throw std::invalid_argument("gbt max_depth must be >= 0");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw std::invalid_argument("gbt learning_rate must lie in (0, 1]");
  }
  if (min_samples_leaf < 1) throw std::invalid_argument("gbt min_samples_leaf must be >= 1");
}

LinearFit fit_linear(std::span<const Sample> samples, int n) {
  if (samples.empty()) throw std::invalid_argument("linear fit needs at least one sample");
  const int dim = n + 1;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  for (const Sample& sample : samples) {
    std::vector<int> cols{0};
    for (int i : sample.subset.members()) cols.push_back(i + 1);
    for (int a : cols) {
      rhs(a) += sample.target;
      for (int b : cols) gram(a, b) += 1.0;
    }
  }
  LinearFit fit;
  const Eigen::VectorXd beta = solve_normal_equations(gram, rhs, 1, fit.regularized);
  fit.intercept = beta(0);
  fit.coeffs.assign(beta.data() + 1, beta.data() + dim);
  return fit;
}

LinearFit fit_constrained_linear(std::span<const Sample> samples, std::span<const double> weights,
                                 int n, double base, double anchor) {
  if (samples.empty()) throw std::invalid_argument("constrained fit needs at least one sample");
  if (weights.size() != samples.size()) {
    throw std::invalid_argument("one weight per sample is required");
  }
  if (!std::isfinite(anchor)) throw std::invalid_argument("constraint anchor must be finite");
  LinearFit fit;
  fit.intercept = base;
  fit.coeffs.assign(n, 0.0);
  if (n == 1) {
    fit.coeffs[0] = anchor;
    return fit;
  }
  // x_last = anchor - sum_{j < last} x_j, leaving n - 1 free coordinates.
  const int last = n - 1;
  const int dim = n - 1;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd row(dim);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Subset& s = samples[k].subset;
    const double has_last = s.contains(last) ? 1.0 : 0.0;
    for (int j = 0; j < dim; ++j) row(j) = (s.contains(j) ? 1.0 : 0.0) - has_last;
    const double target = samples[k].target - base - anchor * has_last;
    gram.noalias() += weights[k] * row * row.transpose();
    rhs.noalias() += weights[k] * target * row;
  }
  const Eigen::VectorXd free = solve_normal_equations(gram, rhs, 0, fit.regularized);
  double partial = 0.0;
  for (int j = 0; j < dim; ++j) {
    fit.coeffs[j] = free(j);
    partial += free(j);
  }
  fit.coeffs[last] = anchor - partial;
  return fit;
}

TreeFit fit_gbt(std::span<const Sample> samples, int n, const GbtConfig& config,
                std::uint64_t /*seed*/) {
  config.validate();
  if (samples.size() < 2) throw std::invalid_argument("gbt needs at least two samples");
  const std::size_t m = samples.size();

  std::vector<std::vector<int>> members(m);
  std::vector<std::vector<double>> bits(m);
  double mean = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    members[r] = samples[r].subset.members();
    bits[r] = membership_bits(samples[r].subset, n);
    mean += samples[r].target;
  }
  mean /= static_cast<double>(m);

  std::vector<double> fitted(m, mean);
  std::vector<double> residual(m);
  auto mse = [&] {
    double acc = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      residual[r] = samples[r].target - fitted[r];
      acc += residual[r] * residual[r];
    }
    return acc / static_cast<double>(m);
  };

  TreeFit out;
  out.ensemble.n_features = n;
  Tree constant;
  constant.nodes.push_back(TreeNode::leaf(mean));
  out.ensemble.trees.push_back(constant);
  out.training_loss.push_back(mse());

  std::vector<int> all(m);
  std::iota(all.begin(), all.end(), 0);
  const BoostState state{members, bits, residual, n, config};
  for (int round = 0; round < config.rounds; ++round) {
    Tree tree;
    tree.root = grow_tree(state, tree, all, 0);
    for (std::size_t r = 0; r < m; ++r) fitted[r] += tree.predict(bits[r]);
    out.ensemble.trees.push_back(std::move(tree));
    out.training_loss.push_back(mse());
  }
  // The ensemble predicts the mean of its trees; the boosted model is the sum.
  out.ensemble.scale_leaves(static_cast<double>(out.ensemble.trees.size()));
  return out;
}

std::vector<double> exact_prob_values(const FittedFunction& f, const WeightVector& w) {
  if (const auto* lin = std::get_if<LinearFit>(&f)) return lin->coeffs;
  const auto& fit = std::get<TreeFit>(f);
  const int n = fit.ensemble.n_features;
  return tree_prob_values(fit.ensemble, std::vector<double>(n, 1.0), {std::vector<double>(n, 0.0)},
                          w);
}

double shapley_kernel_weight(int n, int s) {
  if (s <= 0 || s >= n) return std::numeric_limits<double>::infinity();
  return (n - 1) / (std::exp(log_binomial(n, s)) * s * (n - s));
}

}  // namespace provalue
