#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace provalue {

class WeightVector;

inline constexpr int kMaxPlayers = 128;
inline constexpr int kMaxEnumerablePlayers = 25;

/// A coalition S of [n], n <= 128, as a two-word bitmask. Players are
/// 0-based here; serialized forms use 1-based indices.
class Subset {
 public:
  Subset() = default;

  static Subset from_mask(std::uint64_t mask) {
    Subset s;
    s.words_[0] = mask;
    s.size_ = std::popcount(mask);
    return s;
  }
  static Subset full(int n);

  bool contains(int i) const { return (words_[i >> 6] >> (i & 63)) & 1ULL; }
  int size() const { return size_; }
  bool empty() const { return size_ == 0; }

  void insert(int i) {
    if (contains(i)) return;
    words_[i >> 6] |= 1ULL << (i & 63);
    ++size_;
  }
  void erase(int i) {
    if (!contains(i)) return;
    words_[i >> 6] &= ~(1ULL << (i & 63));
    --size_;
  }
  Subset with(int i) const {
    Subset s = *this;
    s.insert(i);
    return s;
  }
  Subset without(int i) const {
    Subset s = *this;
    s.erase(i);
    return s;
  }

  std::uint64_t low_word() const { return words_[0]; }
  std::uint64_t high_word() const { return words_[1]; }
  std::vector<int> members() const;

  friend bool operator==(const Subset& a, const Subset& b) { return a.words_ == b.words_; }
  friend bool operator<(const Subset& a, const Subset& b) {
    return a.words_[1] != b.words_[1] ? a.words_[1] < b.words_[1] : a.words_[0] < b.words_[0];
  }

 private:
  std::array<std::uint64_t, 2> words_{0, 0};
  int size_ = 0;
};

struct SubsetHash {
  std::size_t operator()(const Subset& s) const noexcept;
};

class ZeroDensityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Size-stratified subset law: Pr(|S| = s) = q(s), uniform within a size,
/// so the per-subset density is q(|S|) / C(n, |S|).
class SizeDistribution {
 public:
  SizeDistribution(int n, std::vector<double> log_q);

  /// Normalizes per-subset log weights (one per size 0..n) into a law.
  static SizeDistribution from_subset_log_weights(int n, const std::vector<double>& log_w);
  static SizeDistribution uniform(int n);

  int players() const { return n_; }
  double log_size_prob(int s) const { return log_q_[s]; }
  double size_prob(int s) const;
  const std::vector<double>& log_size_probs() const { return log_q_; }
  double log_density(int size) const;

 private:
  int n_;
  std::vector<double> log_q_;
};

SizeDistribution default_msr_distribution(const WeightVector& w);

/// D(S). Throws ZeroDensityError when the size has no mass.
double subset_density(const SizeDistribution& dist, const Subset& s);

struct SampleBatch {
  std::vector<Subset> subsets;
  bool replacement = true;
  std::uint64_t seed = 0;
};

using Rng = std::mt19937_64;

/// Uniform subset of [n] with exactly `size` members.
Subset random_subset_of_size(int n, int size, Rng& rng);
/// Same, drawn from the players listed in `pool`.
Subset random_subset_from(const std::vector<int>& pool, int size, Rng& rng);

SampleBatch sample_subsets(const SizeDistribution& dist, std::size_t m, bool replacement,
                           std::uint64_t seed);

std::vector<Subset> enumerate_subsets(int n);
void for_each_subset(int n, const std::function<void(const Subset&)>& fn);

std::vector<std::vector<int>> sample_permutations(int n, std::size_t count, std::uint64_t seed);

}  // namespace provalue
