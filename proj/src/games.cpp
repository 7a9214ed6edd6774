#include "provalue/games.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "provalue/numeric.hpp"

namespace provalue {

TableGame::TableGame(int n, std::vector<double> values) : n_(n), values_(std::move(values)) {
  if (n_ < 0 || n_ > kMaxEnumerablePlayers) throw std::invalid_argument("table games need n <= 25");
  if (values_.size() != (std::size_t{1} << n_)) {
    throw std::invalid_argument("table game needs exactly 2^n values");
  }
}

double LinearModel::predict(std::span<const double> x) const {
  double y = intercept;
  for (std::size_t i = 0; i < coeffs.size(); ++i) y += coeffs[i] * x[i];
  return y;
}

InterventionalGame::InterventionalGame(Model model, std::vector<double> explicand,
                                       std::vector<std::vector<double>> baselines)
    : model_(std::move(model)), explicand_(std::move(explicand)), baselines_(std::move(baselines)) {
  const std::size_t d = explicand_.size();
  if (d > static_cast<std::size_t>(kMaxPlayers)) throw std::invalid_argument("at most 128 features");
  if (baselines_.empty()) throw std::invalid_argument("at least one baseline is required");
  for (const auto& b : baselines_) {
    if (b.size() != d) throw std::invalid_argument("baseline length differs from explicand length");
  }
  if (const auto* lin = std::get_if<LinearModel>(&model_)) {
    if (lin->coeffs.size() != d) {
      throw std::invalid_argument("linear model has " + std::to_string(lin->coeffs.size()) +
                                  " coefficients for " + std::to_string(d) + " features");
    }
  } else {
    const auto& ensemble = std::get<TreeEnsemble>(model_);
    ensemble.validate();
    if (static_cast<std::size_t>(ensemble.n_features) != d) {
      throw std::invalid_argument("ensemble feature count differs from explicand length");
    }
  }
}

std::vector<double> InterventionalGame::hybrid_point(const Subset& s, std::size_t baseline) const {
  std::vector<double> x = baselines_[baseline];
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (s.contains(static_cast<int>(i))) x[i] = explicand_[i];
  }
  return x;
}

double InterventionalGame::value(const Subset& s) const {
  double total = 0.0;
  for (std::size_t b = 0; b < baselines_.size(); ++b) {
    const auto x = hybrid_point(s, b);
    total += std::visit([&](const auto& m) { return m.predict(x); }, model_);
  }
  return total / static_cast<double>(baselines_.size());
}

std::shared_ptr<const InterventionalGame> linear_game(double intercept, std::vector<double> coeffs,
                                                      std::vector<double> explicand,
                                                      std::vector<double> baseline) {
  return std::make_shared<const InterventionalGame>(
      LinearModel{intercept, std::move(coeffs)}, std::move(explicand),
      std::vector<std::vector<double>>{std::move(baseline)});
}

std::shared_ptr<const InterventionalGame> tree_game(TreeEnsemble ensemble,
                                                    std::vector<double> explicand,
                                                    std::vector<std::vector<double>> baselines) {
  return std::make_shared<const InterventionalGame>(std::move(ensemble), std::move(explicand),
                                                    std::move(baselines));
}

InteractionGame::InteractionGame(LinearModel linear, std::vector<Pair> pairs)
    : linear_(std::move(linear)), pairs_(std::move(pairs)) {}

double InteractionGame::value(const Subset& s) const {
  double y = linear_.intercept;
  for (std::size_t i = 0; i < linear_.coeffs.size(); ++i) {
    if (s.contains(static_cast<int>(i))) y += linear_.coeffs[i];
  }
  for (const Pair& p : pairs_) {
    if (s.contains(p.a) && s.contains(p.b)) y += p.weight;
  }
  return y;
}

RandomGameKind parse_random_game_kind(const std::string& text) {
  if (text == "linear") return RandomGameKind::kLinear;
  if (text == "forest") return RandomGameKind::kForest;
  if (text == "linear_plus_noise") return RandomGameKind::kLinearPlusNoise;
  throw std::invalid_argument("unknown random game kind '" + text +
                              "' (expected linear, forest or linear_plus_noise)");
}

namespace {

int grow(Tree& tree, int depth, int max_depth, int n_features, Rng& rng, double lo, double hi,
         double stop_prob) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> leaf_value(0.0, 1.0);
  const int index = static_cast<int>(tree.nodes.size());
  const bool stop = depth == max_depth || n_features == 0 || (depth > 0 && unit(rng) < stop_prob);
  if (stop) {
    tree.nodes.push_back(TreeNode::leaf(leaf_value(rng)));
    return index;
  }
  std::uniform_int_distribution<int> feature(0, n_features - 1);
  std::uniform_real_distribution<double> threshold(lo, hi);
  const int f = feature(rng);
  const double t = threshold(rng);
  tree.nodes.push_back(TreeNode::split(f, t, -1, -1));
  const int left = grow(tree, depth + 1, max_depth, n_features, rng, lo, hi, stop_prob);
  const int right = grow(tree, depth + 1, max_depth, n_features, rng, lo, hi, stop_prob);
  tree.nodes[index].left = left;
  tree.nodes[index].right = right;
  return index;
}

}  // namespace

TreeEnsemble random_ensemble(int n_features, int trees, int max_depth, Rng& rng, double threshold_lo,
                             double threshold_hi, double stop_prob) {
  TreeEnsemble ensemble;
  ensemble.n_features = n_features;
  ensemble.trees.resize(trees);
  for (Tree& tree : ensemble.trees) {
    tree.root = grow(tree, 0, max_depth, n_features, rng, threshold_lo, threshold_hi, stop_prob);
  }
  return ensemble;
}

GamePtr random_game(RandomGameKind kind, int n, std::uint64_t seed, const RandomGameParams& params) {
  if (n < 1) throw std::invalid_argument("random games need at least one player");
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> ones(n, 1.0);
  std::vector<double> zeros(n, 0.0);

  switch (kind) {
    case RandomGameKind::kLinear:
    case RandomGameKind::kLinearPlusNoise: {
      LinearModel model;
      model.intercept = gauss(rng);
      model.coeffs.resize(n);
      for (double& c : model.coeffs) c = gauss(rng);
      if (kind == RandomGameKind::kLinear) {
        return linear_game(model.intercept, model.coeffs, ones, zeros);
      }
      std::vector<InteractionGame::Pair> pairs;
      if (n >= 2) {
        std::uniform_int_distribution<int> player(0, n - 1);
        for (int k = 0; k < n; ++k) {
          int a = player(rng);
          int b = player(rng);
          while (b == a) b = player(rng);
          pairs.push_back({a, b, params.interaction_scale * gauss(rng)});
        }
      }
      return std::make_shared<const InteractionGame>(std::move(model), std::move(pairs));
    }
    case RandomGameKind::kForest: {
      // Explicand 1 and baseline 0 with thresholds inside (0, 1): every split
      // separates the two points.
      TreeEnsemble ensemble =
          random_ensemble(n, params.trees, params.max_depth, rng, 0.1, 0.9, 0.0);
      return tree_game(std::move(ensemble), ones, {zeros});
    }
  }
  throw std::logic_error("unhandled random game kind");
}

CountingGame::CountingGame(GamePtr inner) : inner_(std::move(inner)) {}

double CountingGame::value(const Subset& s) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(s); it != cache_.end()) return it->second;
  }
  const double v = inner_->value(s);
  std::lock_guard lock(mutex_);
  cache_.emplace(s, v);
  return v;
}

std::size_t CountingGame::calls() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

void CountingGame::reset() {
  std::lock_guard lock(mutex_);
  cache_.clear();
}

NoisyGame::NoisyGame(GamePtr inner, double sigma, std::uint64_t seed, bool fresh)
    : inner_(std::move(inner)), sigma_(sigma), seed_(seed), fresh_(fresh), rng_(seed) {
  if (!(sigma_ >= 0.0)) throw std::invalid_argument("noise standard deviation must be >= 0");
}

double NoisyGame::value(const Subset& s) const {
  const double base = inner_->value(s);
  if (sigma_ == 0.0) return base;
  double u1 = 0.0;
  double u2 = 0.0;
  if (fresh_) {
    std::lock_guard lock(mutex_);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    u1 = unit(rng_);
    u2 = unit(rng_);
  } else {
    const std::uint64_t key = combine_seed(seed_, SubsetHash{}(s));
    // 53-bit uniforms in (0, 1].
    u1 = (static_cast<double>(mix64(key) >> 11) + 1.0) * 0x1.0p-53;
    u2 = (static_cast<double>(mix64(key + 1) >> 11) + 1.0) * 0x1.0p-53;
  }
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return base + sigma_ * z;
}

std::shared_ptr<const NoisyGame> with_noise(GamePtr game, double sigma, std::uint64_t seed,
                                            bool fresh) {
  return std::make_shared<const NoisyGame>(std::move(game), sigma, seed, fresh);
}

std::shared_ptr<CountingGame> with_counting(GamePtr game) {
  return std::make_shared<CountingGame>(std::move(game));
}

std::vector<double> tabulate(const Game& game) {
  const int n = game.players();
  std::vector<double> values;
  if (n >= 0 && n <= kMaxEnumerablePlayers) values.reserve(std::size_t{1} << n);
  for_each_subset(n, [&](const Subset& s) { values.push_back(game.value(s)); });
  return values;
}

}  // namespace provalue
