#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "provalue/sampling.hpp"
#include "provalue/tree.hpp"

namespace provalue {

/// Black-box set function v: 2^[n] -> R.
class Game {
 public:
  virtual ~Game() = default;
  virtual int players() const = 0;
  virtual double value(const Subset& s) const = 0;
};

using GamePtr = std::shared_ptr<const Game>;

/// Game given by an explicit table indexed by bitmask (n <= 25).
class TableGame final : public Game {
 public:
  TableGame(int n, std::vector<double> values);
  int players() const override { return n_; }
  double value(const Subset& s) const override { return values_[s.low_word()]; }

 private:
  int n_;
  std::vector<double> values_;
};

struct LinearModel {
  double intercept = 0.0;
  std::vector<double> coeffs;

  double predict(std::span<const double> x) const;
};

using Model = std::variant<LinearModel, TreeEnsemble>;

/// v(S) = model prediction at the hybrid point taking x^e on S and the
/// baseline elsewhere, averaged over baselines.
class InterventionalGame final : public Game {
 public:
  InterventionalGame(Model model, std::vector<double> explicand,
                     std::vector<std::vector<double>> baselines);

  int players() const override { return static_cast<int>(explicand_.size()); }
  double value(const Subset& s) const override;

  std::vector<double> hybrid_point(const Subset& s, std::size_t baseline) const;

  const Model& model() const { return model_; }
  const std::vector<double>& explicand() const { return explicand_; }
  const std::vector<std::vector<double>>& baselines() const { return baselines_; }
  bool is_tree() const { return std::holds_alternative<TreeEnsemble>(model_); }

 private:
  Model model_;
  std::vector<double> explicand_;
  std::vector<std::vector<double>> baselines_;
};

std::shared_ptr<const InterventionalGame> linear_game(double intercept, std::vector<double> coeffs,
                                                      std::vector<double> explicand,
                                                      std::vector<double> baseline);
std::shared_ptr<const InterventionalGame> tree_game(TreeEnsemble ensemble,
                                                    std::vector<double> explicand,
                                                    std::vector<std::vector<double>> baselines);

/// Linear game plus a fixed set of pairwise interaction terms.
class InteractionGame final : public Game {
 public:
  struct Pair {
    int a;
    int b;
    double weight;
  };
  InteractionGame(LinearModel linear, std::vector<Pair> pairs);
  int players() const override { return static_cast<int>(linear_.coeffs.size()); }
  double value(const Subset& s) const override;

 private:
  LinearModel linear_;
  std::vector<Pair> pairs_;
};

enum class RandomGameKind { kLinear, kForest, kLinearPlusNoise };

RandomGameKind parse_random_game_kind(const std::string& text);

struct RandomGameParams {
  int trees = 10;
  int max_depth = 4;
  // Scale of the pairwise terms in kLinearPlusNoise relative to the
  // unit-variance linear coefficients.
  double interaction_scale = 0.05;
};

/// Random forest over `n_features` continuous features. Split features
/// and thresholds are drawn from `rng`; below the root a branch becomes a
/// leaf early with probability `stop_prob`.
TreeEnsemble random_ensemble(int n_features, int trees, int max_depth, Rng& rng,
                             double threshold_lo = -1.0, double threshold_hi = 1.0,
                             double stop_prob = 0.25);

GamePtr random_game(RandomGameKind kind, int n, std::uint64_t seed,
                    const RandomGameParams& params = {});

/// Memoizing wrapper that counts distinct evaluations of the inner game.
class CountingGame final : public Game {
 public:
  explicit CountingGame(GamePtr inner);
  int players() const override { return inner_->players(); }
  double value(const Subset& s) const override;

  std::size_t calls() const;
  void reset();

 private:
  GamePtr inner_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<Subset, double, SubsetHash> cache_;
};

/// Adds N(0, sigma^2) noise to every value. By default the noise for a
/// coalition is a pure function of (seed, S), so repeated queries agree;
/// `fresh` redraws on every call instead.
class NoisyGame final : public Game {
 public:
  NoisyGame(GamePtr inner, double sigma, std::uint64_t seed, bool fresh = false);
  int players() const override { return inner_->players(); }
  double value(const Subset& s) const override;
  double sigma() const { return sigma_; }

 private:
  GamePtr inner_;
  double sigma_;
  std::uint64_t seed_;
  bool fresh_;
  mutable std::mutex mutex_;
  mutable Rng rng_;
};

std::shared_ptr<const NoisyGame> with_noise(GamePtr game, double sigma, std::uint64_t seed,
                                            bool fresh = false);
std::shared_ptr<CountingGame> with_counting(GamePtr game);

/// Calls value() on every subset (n <= 25) and returns the table.
std::vector<double> tabulate(const Game& game);

}  // namespace provalue
