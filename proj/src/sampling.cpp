#include "provalue/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "provalue/numeric.hpp"
#include "provalue/weights.hpp"

namespace provalue {

Subset Subset::full(int n) {
  Subset s;
  for (int i = 0; i < n; ++i) s.insert(i);
  return s;
}

std::vector<int> Subset::members() const {
  std::vector<int> out;
  out.reserve(size_);
  for (int w = 0; w < 2; ++w) {
    std::uint64_t bits = words_[w];
    while (bits) {
      out.push_back(w * 64 + std::countr_zero(bits));
      bits &= bits - 1;
    }
  }
  return out;
}

std::size_t SubsetHash::operator()(const Subset& s) const noexcept {
  return static_cast<std::size_t>(combine_seed(mix64(s.low_word()), s.high_word()));
}

SizeDistribution::SizeDistribution(int n, std::vector<double> log_q) : n_(n), log_q_(std::move(log_q)) {
  if (n_ < 0 || n_ > kMaxPlayers) throw std::invalid_argument("player count outside [0, 128]");
  if (static_cast<int>(log_q_.size()) != n_ + 1) {
    throw std::invalid_argument("size distribution needs n + 1 entries");
  }
  const double total = log_sum_exp(log_q_);
  if (!std::isfinite(total) || std::abs(std::exp(total) - 1.0) > 1e-10) {
    throw std::invalid_argument("size probabilities must sum to one");
  }
}

SizeDistribution SizeDistribution::from_subset_log_weights(int n, const std::vector<double>& log_w) {
  if (static_cast<int>(log_w.size()) != n + 1) {
    throw std::invalid_argument("expected one subset weight per size 0..n");
  }
  std::vector<double> log_q(n + 1);
  for (int s = 0; s <= n; ++s) log_q[s] = log_w[s] == kNegInf ? kNegInf : log_binomial(n, s) + log_w[s];
  const double z = log_sum_exp(log_q);
  if (!std::isfinite(z)) throw std::invalid_argument("subset weights have no mass");
  for (double& x : log_q) {
    if (x != kNegInf) x -= z;
  }
  return SizeDistribution(n, std::move(log_q));
}

SizeDistribution SizeDistribution::uniform(int n) {
  return from_subset_log_weights(n, std::vector<double>(n + 1, 0.0));
}

double SizeDistribution::size_prob(int s) const { return std::exp(log_q_[s]); }

double SizeDistribution::log_density(int size) const {
  if (size < 0 || size > n_) return kNegInf;
  return log_q_[size] - log_binomial(n_, size);
}

SizeDistribution default_msr_distribution(const WeightVector& w) {
  const int n = w.players();
  std::vector<double> log_w(n + 1);
  for (int s = 0; s <= n; ++s) {
    // sqrt(p_s^2 (1 - s/n) + p_{s-1}^2 s/n)
    double absent = s < n ? 2.0 * w.log_p(s) + std::log1p(-static_cast<double>(s) / n) : kNegInf;
    double present = s > 0 ? 2.0 * w.log_p(s - 1) + std::log(static_cast<double>(s) / n) : kNegInf;
    log_w[s] = 0.5 * log_add(absent, present);
  }
  return SizeDistribution::from_subset_log_weights(n, log_w);
}

double subset_density(const SizeDistribution& dist, const Subset& s) {
  if (s.size() > dist.players()) throw std::invalid_argument("subset larger than the player set");
  const double log_d = dist.log_density(s.size());
  if (log_d == kNegInf) {
    throw ZeroDensityError("sampling density is zero for coalitions of size " +
                           std::to_string(s.size()));
  }
  return std::exp(log_d);
}

Subset random_subset_from(const std::vector<int>& pool, int size, Rng& rng) {
  std::vector<int> idx = pool;
  const int n = static_cast<int>(idx.size());
  Subset s;
  // Partial Fisher-Yates: the first `size` slots end up a uniform sample.
  for (int k = 0; k < size; ++k) {
    std::uniform_int_distribution<int> pick(k, n - 1);
    std::swap(idx[k], idx[pick(rng)]);
    s.insert(idx[k]);
  }
  return s;
}

Subset random_subset_of_size(int n, int size, Rng& rng) {
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  return random_subset_from(pool, size, rng);
}

SampleBatch sample_subsets(const SizeDistribution& dist, std::size_t m, bool replacement,
                           std::uint64_t seed) {
  const int n = dist.players();
  if (m < 1) throw std::invalid_argument("sample count must be positive");
  if (!replacement) {
    if (n > kMaxEnumerablePlayers) {
      throw std::invalid_argument("sampling without replacement is limited to n <= 25");
    }
    double support = 0.0;
    for (int s = 0; s <= n; ++s) {
      if (dist.log_size_prob(s) != kNegInf) support += std::exp(log_binomial(n, s));
    }
    if (static_cast<double>(m) > support + 0.5) {
      throw std::invalid_argument("cannot draw " + std::to_string(m) +
                                  " distinct subsets; only " +
                                  std::to_string(static_cast<long long>(support)) +
                                  " have positive density");
    }
  }

  std::vector<double> q(n + 1);
  for (int s = 0; s <= n; ++s) q[s] = dist.size_prob(s);
  std::discrete_distribution<int> size_law(q.begin(), q.end());
  Rng rng(seed);

  SampleBatch batch;
  batch.replacement = replacement;
  batch.seed = seed;
  batch.subsets.reserve(m);
  std::unordered_set<Subset, SubsetHash> seen;
  while (batch.subsets.size() < m) {
    Subset s = random_subset_of_size(n, size_law(rng), rng);
    if (!replacement && !seen.insert(s).second) continue;
    batch.subsets.push_back(s);
  }
  return batch;
}

void for_each_subset(int n, const std::function<void(const Subset&)>& fn) {
  if (n < 0 || n > kMaxEnumerablePlayers) {
    throw std::invalid_argument("enumeration is limited to n <= 25, got " + std::to_string(n));
  }
  const std::uint64_t count = 1ULL << n;
  for (std::uint64_t mask = 0; mask < count; ++mask) fn(Subset::from_mask(mask));
}

std::vector<Subset> enumerate_subsets(int n) {
  std::vector<Subset> out;
  if (n >= 0 && n <= kMaxEnumerablePlayers) out.reserve(1ULL << n);
  for_each_subset(n, [&](const Subset& s) { out.push_back(s); });
  return out;
}

std::vector<std::vector<int>> sample_permutations(int n, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("permutation count must be positive");
  Rng rng(seed);
  std::vector<std::vector<int>> out(count, std::vector<int>(n));
  for (auto& perm : out) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
  }
  return out;
}

}  // namespace provalue
