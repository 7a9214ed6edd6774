#include <gtest/gtest.h>

#include <cmath>

#include "provalue/harness.hpp"
#include "provalue/serialize.hpp"
#include "provalue/treeprob.hpp"

using namespace provalue;

TEST(GroundTruth, Dispatch) {
  const auto forest = random_game(RandomGameKind::kForest, 10, 4);
  const auto w = make_weights(BetaShapley{1, 4}, 10);
  const auto fast = ground_truth(*forest, w);
  const auto slow = brute_force_values(*forest, w);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(fast[i], slow[i], 1e-10);

  const auto linear = linear_game(1.0, {2.0, -1.0, 0.5}, {1.0, 2.0, 3.0}, {0.5, 0.5, 0.5});
  const auto wl = make_weights(WeightedBanzhaf{0.8}, 3);
  const auto exact = ground_truth(*linear, wl);
  const auto enumerated = brute_force_values(*linear, wl);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(exact[i], enumerated[i], 1e-12);
  EXPECT_DOUBLE_EQ(exact[0], 1.0);

  const auto big = random_game(RandomGameKind::kLinearPlusNoise, 21, 0);
  EXPECT_THROW(ground_truth(*big, make_weights(Shapley{}, 21)), std::invalid_argument);
  const auto big_forest = random_game(RandomGameKind::kForest, 30, 0);
  EXPECT_EQ(ground_truth(*big_forest, make_weights(Shapley{}, 30)).size(), 30u);
}

TEST(NormalizedError, Identities) {
  const std::vector<double> t = {1.0, -2.0, 0.5};
  EXPECT_EQ(normalized_error(t, t), 0.0);
  EXPECT_DOUBLE_EQ(normalized_error({0, 0, 0}, t), 1.0);
  EXPECT_DOUBLE_EQ(normalized_error({2.0, -4.0, 1.0}, t), 1.0);
  EXPECT_THROW(normalized_error({1.0, 1.0}, {0.0, 0.0}), std::invalid_argument);
}

namespace {

BenchmarkConfig small_config() {
  return parse_benchmark_config(nlohmann::json::parse(R"({
    "seed": 5, "runs": 3,
    "games": [{"id": "f6", "type": "random", "kind": "forest", "n": 6, "seed": 1}],
    "families": ["shapley", "wbanzhaf:0.7"],
    "estimators": ["msr", {"name": "regression_msr", "k": 2}],
    "budgets": ["8n", 96]
  })"));
}

}  // namespace

TEST(Benchmark, RowCountAndDeterminism) {
  auto cfg = small_config();
  const auto a = run_benchmark(cfg);
  EXPECT_EQ(a.size(), 2u * 2 * 2 * 3);
  cfg.threads = 4;
  const auto b = run_benchmark(cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].error, b[i].error);
    EXPECT_EQ(a[i].evals, b[i].evals);
    EXPECT_EQ(a[i].estimator, b[i].estimator);
    EXPECT_LE(a[i].evals, a[i].m);
    EXPECT_GE(a[i].error, 0.0);
    EXPECT_TRUE(a[i].failure.empty()) << a[i].failure;
  }
}

TEST(Benchmark, HundredRunsTwoEstimators) {
  auto cfg = small_config();
  cfg.runs = 100;
  cfg.families.resize(1);
  cfg.budgets = {"64"};
  EXPECT_EQ(run_benchmark(cfg).size(), 200u);
}

TEST(Benchmark, FailuresBecomeRows) {
  auto cfg = small_config();
  EstimatorSpec kernel;
  kernel.name = "kernel_shap";
  cfg.estimators.push_back(kernel);
  const auto rows = run_benchmark(cfg);
  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (!r.failure.empty()) {
      ++failed;
      EXPECT_TRUE(std::isnan(r.error));
    }
  }
  EXPECT_EQ(failed, 2u * 3);  // kernel_shap rejects the weighted Banzhaf family
}

TEST(Benchmark, ZeroNoiseMatchesNoiselessRun) {
  auto plain = small_config();
  auto noisy = plain;
  noisy.sigmas = {0.0, 0.5};
  const auto a = run_benchmark(plain);
  const auto b = run_benchmark(noisy);
  std::size_t matched = 0;
  for (const auto& row : b) {
    if (row.sigma != 0.0) continue;
    for (const auto& ref : a) {
      if (ref.game == row.game && ref.family == row.family && ref.estimator == row.estimator &&
          ref.m == row.m && ref.run == row.run) {
        EXPECT_EQ(std::bit_cast<std::uint64_t>(ref.error), std::bit_cast<std::uint64_t>(row.error));
        EXPECT_EQ(ref.evals, row.evals);
        ++matched;
      }
    }
  }
  EXPECT_EQ(matched, a.size());
}

TEST(Benchmark, CsvRoundTrip) {
  auto cfg = small_config();
  cfg.families = {BetaShapley{2, 2}};
  const auto rows = run_benchmark(cfg);
  const std::string csv = to_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kBenchmarkCsvHeader);
  const auto back = parse_csv(csv);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].family, "beta:2,2");
    EXPECT_EQ(back[i].estimator, rows[i].estimator);
    EXPECT_EQ(back[i].error, rows[i].error);
    EXPECT_EQ(back[i].m, rows[i].m);
  }
  EXPECT_THROW(parse_csv("a,b\n"), std::invalid_argument);
  const auto summary = summarize(rows);
  EXPECT_EQ(summary.size(), 2u * 2);
  for (const auto& s : summary) {
    EXPECT_EQ(s.runs, 3u);
    EXPECT_LE(s.q1, s.median);
    EXPECT_LE(s.median, s.q3);
  }
}

TEST(Benchmark, ConfigValidation) {
  auto bad = R"({"games": [{"type": "random", "kind": "forest", "n": 4, "seed": 1}],
                 "estimators": ["msr"], "budgets": ["0"]})";
  EXPECT_THROW(parse_benchmark_config(nlohmann::json::parse(bad)), std::invalid_argument);
  auto no_runs = R"({"runs": 0, "games": [{"type": "random", "kind": "forest", "n": 4, "seed": 1}],
                     "estimators": ["msr"], "budgets": ["4n"]})";
  EXPECT_THROW(parse_benchmark_config(nlohmann::json::parse(no_runs)), std::invalid_argument);
}

TEST(Bound, ZeroResidualGivesZero) {
  const int n = 6;
  const auto g = random_game(RandomGameKind::kLinear, n, 2);
  const auto w = make_weights(Shapley{}, n);
  RegressionMsrConfig cfg;
  cfg.practical = true;
  const auto report = bound_for_run(*g, w, cfg, 60, 1, 0.1, ground_truth(*g, w));
  EXPECT_NEAR(report.rhs, 0.0, 1e-18);
  EXPECT_NEAR(report.realized_error, 0.0, 1e-20);
}

TEST(Bound, ZeroFunctionPairGameByHand) {
  const TableGame g(2, {0, 1, 2, 4});
  const auto w = make_weights(Shapley{}, 2);
  const auto dist = default_msr_distribution(w);
  const FittedFunction zero = LinearFit{0.0, {0.0, 0.0}, false};
  // p = (1/2, 1/2), D = 1/4; mix(s) = p^2 s + p^2 (2 - s) = 1/2 for every S.
  const double expected = (0.0 + 1.0 + 4.0 + 16.0) * 0.5 * 4.0;
  EXPECT_NEAR(weighted_residual_sum(g, w, dist, zero), expected, 1e-12);
  const auto report = theorem_bound_report(g, w, dist, zero, 10, 2, 0.1);
  EXPECT_NEAR(report.rhs, 4.0 / (10 * 0.1) * expected, 1e-10);
  EXPECT_NEAR(report.epsilon, 4.0 * 2 / (10 * 0.1), 1e-12);
  EXPECT_THROW(weighted_residual_sum(*random_game(RandomGameKind::kForest, 17, 0), make_weights(Shapley{}, 17),
                                     SizeDistribution::uniform(17), LinearFit{0.0, std::vector<double>(17, 0.0), false}),
               std::invalid_argument);
}
