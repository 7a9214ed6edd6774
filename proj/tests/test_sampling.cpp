#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "provalue/numeric.hpp"
#include "provalue/sampling.hpp"
#include "provalue/weights.hpp"

using namespace provalue;

TEST(Subset, BasicOperations) {
  Subset s;
  s.insert(3);
  s.insert(100);
  s.insert(3);
  EXPECT_EQ(s.size(), 2);
  EXPECT_TRUE(s.contains(100));
  EXPECT_EQ(s.members(), (std::vector<int>{3, 100}));
  EXPECT_EQ(s.without(100).size(), 1);
  EXPECT_EQ(Subset::full(128).size(), 128);
  EXPECT_EQ(Subset::full(64).high_word(), 0u);
  EXPECT_EQ(Subset::full(65).high_word(), 1u);
}

TEST(SizeDistribution, DefaultBanzhafIsUniform) {
  const auto dist = default_msr_distribution(make_weights(Banzhaf{}, 4));
  for (std::uint64_t mask = 0; mask < 16; ++mask) {
    EXPECT_NEAR(subset_density(dist, Subset::from_mask(mask)), 1.0 / 16, 1e-15);
  }
}

TEST(SizeDistribution, DefaultShapleyTwoPlayers) {
  const auto dist = default_msr_distribution(make_weights(Shapley{}, 2));
  for (std::uint64_t mask = 0; mask < 4; ++mask) {
    EXPECT_NEAR(subset_density(dist, Subset::from_mask(mask)), 0.25, 1e-15);
  }
}

TEST(SizeDistribution, DefaultMatchesRadicalFormula) {
  const int n = 7;
  const auto w = make_weights(BetaShapley{1, 4}, n);
  const auto dist = default_msr_distribution(w);
  std::vector<double> q(n + 1);
  double z = 0.0;
  for (int s = 0; s <= n; ++s) {
    const double ps = w.p(s);
    const double pm = w.p(s - 1);
    q[s] = std::exp(log_binomial(n, s)) * std::sqrt(ps * ps * (1.0 - double(s) / n) + pm * pm * double(s) / n);
    z += q[s];
  }
  for (int s = 0; s <= n; ++s) EXPECT_NEAR(dist.size_prob(s), q[s] / z, 1e-14);
}

TEST(SizeDistribution, UniformDensity) {
  const auto dist = SizeDistribution::uniform(4);
  EXPECT_NEAR(subset_density(dist, Subset::from_mask(0b1010)), 1.0 / 16, 1e-15);
}

TEST(SizeDistribution, ZeroDensitySignal) {
  std::vector<double> log_q = {kNegInf, std::log(0.5), std::log(0.5)};
  const SizeDistribution dist(2, log_q);
  EXPECT_THROW(subset_density(dist, Subset{}), ZeroDensityError);
  EXPECT_THROW(SizeDistribution(2, {0.0, 0.0, 0.0}), std::invalid_argument);
}

TEST(Sampling, WithoutReplacementCoversEverything) {
  const auto batch = sample_subsets(SizeDistribution::uniform(4), 16, false, 5);
  std::set<std::uint64_t> masks;
  for (const auto& s : batch.subsets) masks.insert(s.low_word());
  EXPECT_EQ(masks.size(), 16u);
  EXPECT_THROW(sample_subsets(SizeDistribution::uniform(4), 17, false, 5), std::invalid_argument);
}

TEST(Sampling, Deterministic) {
  const auto dist = default_msr_distribution(make_weights(Shapley{}, 9));
  const auto a = sample_subsets(dist, 1000, true, 7);
  const auto b = sample_subsets(dist, 1000, true, 7);
  EXPECT_EQ(a.subsets, b.subsets);
  const auto c = sample_subsets(dist, 1000, true, 8);
  EXPECT_NE(a.subsets, c.subsets);
}

TEST(Sampling, SizeHistogramConcentrates) {
  const int n = 10;
  const std::size_t m = 100000;
  const auto dist = default_msr_distribution(make_weights(Shapley{}, n));
  const auto batch = sample_subsets(dist, m, true, 11);
  std::vector<double> counts(n + 1, 0.0);
  for (const auto& s : batch.subsets) counts[s.size()] += 1.0;
  for (int s = 0; s <= n; ++s) {
    const double q = dist.size_prob(s);
    EXPECT_NEAR(counts[s] / m, q, 3.0 * std::sqrt(q * (1 - q) / m) + 1e-12) << "size " << s;
  }
}

TEST(Sampling, WithinSizeUniform) {
  // All C(5,2) = 10 pairs should be equally likely.
  Rng rng(3);
  std::map<std::uint64_t, int> counts;
  const int trials = 50000;
  for (int t = 0; t < trials; ++t) ++counts[random_subset_of_size(5, 2, rng).low_word()];
  ASSERT_EQ(counts.size(), 10u);
  for (const auto& [mask, c] : counts) EXPECT_NEAR(c / double(trials), 0.1, 3 * std::sqrt(0.09 / trials) + 0.002);
}

TEST(Enumerate, Order) {
  const auto two = enumerate_subsets(2);
  ASSERT_EQ(two.size(), 4u);
  EXPECT_EQ(two[0].size(), 0);
  EXPECT_EQ(two[1].members(), std::vector<int>{0});
  EXPECT_EQ(two[2].members(), std::vector<int>{1});
  EXPECT_EQ(two[3].members(), (std::vector<int>{0, 1}));
  EXPECT_EQ(enumerate_subsets(0).size(), 1u);
  std::size_t count = 0;
  for_each_subset(25, [&](const Subset&) { ++count; });
  EXPECT_EQ(count, std::size_t{1} << 25);
  EXPECT_THROW(enumerate_subsets(26), std::invalid_argument);
}

TEST(Permutations, SingletonAndFrequencies) {
  EXPECT_EQ(sample_permutations(1, 1, 0), (std::vector<std::vector<int>>{{0}}));
  const std::size_t count = 60000;
  const auto perms = sample_permutations(3, count, 9);
  EXPECT_EQ(perms, sample_permutations(3, count, 9));
  std::map<std::vector<int>, int> freq;
  for (const auto& p : perms) ++freq[p];
  ASSERT_EQ(freq.size(), 6u);
  const double q = 1.0 / 6;
  for (const auto& [p, c] : freq) EXPECT_NEAR(c / double(count), q, 3 * std::sqrt(q * (1 - q) / count));
}
