#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "provalue/estimators.hpp"
#include "provalue/harness.hpp"
#include "provalue/numeric.hpp"
#include "provalue/treeprob.hpp"

using namespace provalue;

namespace {

const TableGame kPair(2, {0, 1, 2, 4});

std::shared_ptr<const Game> constant_game(int n, double c) {
  return std::make_shared<TableGame>(n, std::vector<double>(std::size_t{1} << n, c));
}

void expect_vec_near(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "index " << i;
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST(MonteCarlo, ExhaustivePairGame) {
  MonteCarloOptions opts;
  opts.exhaustive = true;
  expect_vec_near(monte_carlo(kPair, make_weights(Shapley{}, 2), 0, 0, opts).estimates, {1.5, 2.5}, 1e-15);
}

TEST(Estimators, ConstantGameGivesZero) {
  const auto g = constant_game(5, 3.7);
  const auto w = make_weights(BetaShapley{1, 4}, 5);
  for (const auto& r : {monte_carlo(*g, w, 100, 1), wsl(*g, w, 100, 2), permutation_estimator(*g, w, 100, 3)}) {
    for (double x : r.estimates) EXPECT_NEAR(x, 0.0, 1e-12) << r.estimator;
  }
}

TEST(Wsl, EqualsDefaultMonteCarloForShapley) {
  const auto g = random_game(RandomGameKind::kForest, 7, 3);
  const auto w = make_weights(Shapley{}, 7);
  const auto a = monte_carlo(*g, w, 280, 5);
  const auto b = wsl(*g, w, 280, 5);
  expect_vec_near(a.estimates, b.estimates, 1e-12);
}

TEST(Permutation, PairGameHandTrace) {
  const std::size_t count = 7;
  const auto perms = sample_permutations(2, count, 13);
  double first = 0.0;
  for (const auto& p : perms) first += p[0] == 0 ? 1.0 : 2.0;
  first /= count;
  const auto r = permutation_estimator(kPair, make_weights(Shapley{}, 2), 3 * count, 13);
  EXPECT_NEAR(r.estimates[0], first, 1e-15);
  EXPECT_NEAR(r.estimates[0] + r.estimates[1], 4.0, 1e-15);
  EXPECT_LE(r.evaluations_used, 3 * count);
}

TEST(Msr, ExhaustivePairGame) {
  MsrOptions opts;
  opts.exhaustive = true;
  expect_vec_near(msr(kPair, make_weights(Shapley{}, 2), 0, 0, opts).estimates, {1.5, 2.5}, 1e-15);
}

TEST(Msr, UniformWithoutReplacementEqualsExhaustive) {
  const int n = 6;
  const auto g = random_game(RandomGameKind::kForest, n, 9);
  for (const auto& fam : {WeightFamily{Shapley{}}, WeightFamily{WeightedBanzhaf{0.7}}}) {
    const auto w = make_weights(fam, n);
    MsrOptions opts;
    opts.distribution = SizeDistribution::uniform(n);
    opts.replacement = false;
    const auto sampled = msr(*g, w, 64, 4, opts);
    expect_vec_near(sampled.estimates, brute_force_values(*g, w), 1e-12);
    EXPECT_EQ(sampled.evaluations_used, 64u);
  }
}

TEST(Msr, UnbiasedBanzhafModerateRuns) {
  const int n = 6;
  const auto g = random_game(RandomGameKind::kForest, n, 17);
  const auto w = make_weights(Banzhaf{}, n);
  const auto truth = brute_force_values(*g, w);
  const int runs = 3000;
  std::vector<double> mean(n, 0.0), sq(n, 0.0);
  for (int r = 0; r < runs; ++r) {
    const auto est = msr(*g, w, 32, combine_seed(77, r)).estimates;
    for (int i = 0; i < n; ++i) {
      mean[i] += est[i];
      sq[i] += est[i] * est[i];
    }
  }
  for (int i = 0; i < n; ++i) {
    mean[i] /= runs;
    const double se = std::sqrt((sq[i] / runs - mean[i] * mean[i]) / runs);
    EXPECT_LE(std::abs(mean[i] - truth[i]), 4 * se + 1e-12) << "player " << i;
  }
}

TEST(Arm, ConstantGameInExpectation) {
  const auto g = constant_game(5, 2.0);
  const auto w = make_weights(WeightedBanzhaf{0.7}, 5);
  double total = 0.0;
  const int runs = 400;
  for (int r = 0; r < runs; ++r) total += sum(arm(*g, w, 40, r).estimates);
  EXPECT_NEAR(total / runs, 0.0, 0.2);
}

TEST(Kernel, ExactOnLinearGame) {
  const int n = 12;
  const auto g = random_game(RandomGameKind::kLinear, n, 31);
  const auto truth = ground_truth(*g, make_weights(Shapley{}, n));
  for (const auto& r : {kernel_shap(*g, 4 * n, 1), leverage_shap(*g, 4 * n, 1)}) {
    EXPECT_LT(normalized_error(r.estimates, truth), 1e-12) << r.estimator;
    EXPECT_LE(r.evaluations_used, std::size_t(4 * n));
  }
}

TEST(Kernel, ExhaustiveEqualsShapley) {
  for (int n : {2, 5, 8}) {
    const auto g = random_game(RandomGameKind::kForest, n, 40 + n);
    const auto truth = brute_force_values(*g, make_weights(Shapley{}, n));
    KernelOptions opts;
    opts.exhaustive = true;
    expect_vec_near(kernel_shap(*g, 0, 0, opts).estimates, truth, 1e-10);
    expect_vec_near(leverage_shap(*g, 0, 0, opts).estimates, truth, 1e-10);
  }
}

TEST(Kernel, EfficiencyAlwaysHolds) {
  const int n = 9;
  const auto g = random_game(RandomGameKind::kForest, n, 2);
  const double gap = g->value(Subset::full(n)) - g->value(Subset{});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EXPECT_NEAR(sum(kernel_shap(*g, 3 * n, seed).estimates), gap, 1e-10);
    EXPECT_NEAR(sum(leverage_shap(*g, 3 * n, seed).estimates), gap, 1e-10);
  }
  EXPECT_THROW(kernel_shap(*g, n + 1, 0), BudgetError);
}

TEST(Leverage, MatchesExplicitHatMatrix) {
  for (int n = 2; n <= 8; ++n) {
    // Constraint-eliminated design: columns j < n-1 hold 1[j in S] - 1[n-1 in S].
    std::vector<Subset> rows;
    for_each_subset(n, [&](const Subset& s) {
      if (s.size() > 0 && s.size() < n) rows.push_back(s);
    });
    Eigen::MatrixXd a(rows.size(), n - 1);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double scale = std::sqrt(shapley_kernel_weight(n, rows[r].size()));
      const double last = rows[r].contains(n - 1) ? 1.0 : 0.0;
      for (int j = 0; j < n - 1; ++j) a(r, j) = scale * ((rows[r].contains(j) ? 1.0 : 0.0) - last);
    }
    const Eigen::MatrixXd gram_inv = (a.transpose() * a).inverse();
    const auto by_size = shapley_leverage_by_size(n);
    double trace = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double h = a.row(r) * gram_inv * a.row(r).transpose();
      EXPECT_NEAR(h, by_size[rows[r].size()], 1e-10) << "n=" << n;
      trace += h;
    }
    EXPECT_NEAR(trace, n - 1.0, 1e-8);
    double closed = 0.0;
    for (int s = 0; s <= n; ++s) closed += std::exp(log_binomial(n, s)) * by_size[s];
    EXPECT_NEAR(closed, n - 1.0, 1e-8);
  }
}

TEST(Leverage, ShapleyKernelLawIsUniformOverSizes) {
  const auto dist = shapley_leverage_distribution(10);
  EXPECT_EQ(dist.size_prob(0), 0.0);
  EXPECT_EQ(dist.size_prob(10), 0.0);
  for (int s = 1; s < 10; ++s) EXPECT_NEAR(dist.size_prob(s), 1.0 / 9, 1e-12);
}

TEST(RegressionMsr, PracticalLinearExactOnLinearGame) {
  const int n = 10;
  const auto g = random_game(RandomGameKind::kLinear, n, 8);
  for (const auto& fam : {WeightFamily{Shapley{}}, WeightFamily{Banzhaf{}}, WeightFamily{BetaShapley{1, 4}}}) {
    const auto w = make_weights(fam, n);
    RegressionMsrConfig cfg = linear_msr_preset(fam);
    cfg.practical = true;
    EXPECT_LT(normalized_error(regression_msr(*g, w, 10 * n, cfg, 3).estimates, ground_truth(*g, w)), 1e-12);
  }
}

TEST(RegressionMsr, FullEnumerationIsExact) {
  const int n = 7;
  const auto g = random_game(RandomGameKind::kForest, n, 5);
  for (auto model : {RegressionMsrConfig::Model::kLinear, RegressionMsrConfig::Model::kGbt}) {
    const auto w = make_weights(BetaShapley{2, 2}, n);
    RegressionMsrConfig cfg;
    cfg.model = model;
    cfg.practical = true;
    cfg.replacement = false;
    cfg.distribution = SizeDistribution::uniform(n);
    expect_vec_near(regression_msr(*g, w, 128, cfg, 1).estimates, brute_force_values(*g, w), 1e-10);
  }
}

TEST(RegressionMsr, FoldsAndConfigValidation) {
  const auto g = random_game(RandomGameKind::kForest, 6, 5);
  const auto w = make_weights(Shapley{}, 6);
  RegressionMsrConfig cfg;
  cfg.k = 1;
  EXPECT_THROW(regression_msr(*g, w, 60, cfg, 0), std::invalid_argument);
  cfg.k = 3;
  cfg.keep_fits = true;
  const auto r = regression_msr(*g, w, 60, cfg, 0);
  EXPECT_EQ(r.fits.size(), 3u);
  EXPECT_LE(r.evaluations_used, 60u);
  EXPECT_THROW(regression_msr(*g, w, 5, cfg, 0), BudgetError);
  cfg.constrained_shapley = true;
  cfg.model = RegressionMsrConfig::Model::kGbt;
  EXPECT_THROW(regression_msr(*g, w, 60, cfg, 0), std::invalid_argument);
}

TEST(RegressionMsr, ConstrainedShapleyUnbiasedAndEfficient) {
  const int n = 6;
  const auto g = random_game(RandomGameKind::kForest, n, 23);
  const auto w = make_weights(Shapley{}, n);
  const auto truth = brute_force_values(*g, w);
  RegressionMsrConfig cfg = linear_msr_preset(Shapley{});
  ASSERT_TRUE(cfg.constrained_shapley);
  cfg.k = 2;
  const int runs = 2000;
  std::vector<double> mean(n, 0.0), sq(n, 0.0);
  for (int r = 0; r < runs; ++r) {
    const auto est = regression_msr(*g, w, 32, cfg, combine_seed(5, r)).estimates;
    for (int i = 0; i < n; ++i) {
      mean[i] += est[i];
      sq[i] += est[i] * est[i];
    }
  }
  for (int i = 0; i < n; ++i) {
    mean[i] /= runs;
    const double se = std::sqrt(std::max(sq[i] / runs - mean[i] * mean[i], 0.0) / runs);
    EXPECT_LE(std::abs(mean[i] - truth[i]), 4 * se + 1e-9);
  }
}

TEST(Estimators, BudgetsDeterminismAndDispatch) {
  const int n = 8;
  const auto g = random_game(RandomGameKind::kForest, n, 1);
  const auto fam = WeightFamily{WeightedBanzhaf{0.7}};
  for (const char* name : {"monte_carlo", "wsl", "permutation", "msr", "arm", "regression_msr", "linear_msr",
                           "tree_msr"}) {
    EstimatorSpec spec;
    spec.name = name;
    const auto a = run_estimator(spec, *g, fam, 160, 9);
    const auto b = run_estimator(spec, *g, fam, 160, 9);
    EXPECT_EQ(a.estimates, b.estimates) << name;
    EXPECT_LE(a.evaluations_used, 160u) << name;
    EXPECT_EQ(a.estimator, name);
  }
  EstimatorSpec kernel;
  kernel.name = "kernel_shap";
  EXPECT_THROW(run_estimator(kernel, *g, fam, 160, 0), std::invalid_argument);
  EstimatorSpec bogus;
  bogus.name = "bogus";
  EXPECT_THROW(run_estimator(bogus, *g, fam, 160, 0), std::invalid_argument);
  EXPECT_THROW(monte_carlo(*g, make_weights(fam, n), 2 * n - 1, 0), BudgetError);
}

TEST(ParseBudget, Forms) {
  EXPECT_EQ(parse_budget("640", 16), 640u);
  EXPECT_EQ(parse_budget("40n", 16), 640u);
  for (const char* bad : {"", "n", "4.5n", "-3", "0", "12x"}) EXPECT_THROW(parse_budget(bad, 4), std::invalid_argument);
}

TEST(EstimatorSpec, ParseAndLabel) {
  const auto spec = parse_estimator_spec(nlohmann::json::parse(R"({"name": "regression_msr", "model": "gbt", "k": 2})"));
  EXPECT_EQ(spec.label(), "regression_msr[model=gbt;k=2]");
  EXPECT_EQ(parse_estimator_spec("msr").label(), "msr");
  EXPECT_THROW(parse_estimator_spec(nlohmann::json::parse(R"({"name": "msr", "colour": 1})")), std::invalid_argument);
}
