#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "provalue/sampling.hpp"
#include "provalue/weights.hpp"

using namespace provalue;

namespace {

double choose(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(Weights, ShapleyThreePlayers) {
  const auto p = make_weights(Shapley{}, 3).values();
  ASSERT_EQ(p.size(), 3u);
  EXPECT_NEAR(p[0], 1.0 / 3, 1e-15);
  EXPECT_NEAR(p[1], 1.0 / 6, 1e-15);
  EXPECT_NEAR(p[2], 1.0 / 3, 1e-15);
}

TEST(Weights, BanzhafIsConstant) {
  for (double x : make_weights(Banzhaf{}, 4).values()) EXPECT_NEAR(x, 0.125, 1e-15);
}

TEST(Weights, BetaTwoTwoByFactorials) {
  const auto p = make_weights(BetaShapley{2, 2}, 3).values();
  EXPECT_NEAR(p[0], 0.3, 1e-14);
  EXPECT_NEAR(p[1], 0.2, 1e-14);
  EXPECT_NEAR(p[2], 0.3, 1e-14);
}

TEST(Weights, BetaMatchesStdBeta) {
  for (auto [a, b] : {std::pair{1.0, 4.0}, {2.0, 2.0}, {1.0, 8.0}, {3.5, 1.25}}) {
    const int n = 9;
    const auto p = make_weights(BetaShapley{a, b}, n).values();
    for (int l = 0; l < n; ++l) {
      const double expected = std::beta(l + b, n - l - 1 + a) / std::beta(a, b);
      EXPECT_NEAR(p[l], expected, 1e-13 * expected) << a << "," << b << " l=" << l;
    }
  }
}

TEST(Weights, WeightedBanzhafMatchesPowers) {
  const auto p = make_weights(WeightedBanzhaf{0.9}, 2).values();
  EXPECT_NEAR(p[0], 0.1, 1e-15);
  EXPECT_NEAR(p[1], 0.9, 1e-15);
  EXPECT_NEAR(normalization_residual(make_weights(WeightedBanzhaf{0.9}, 2)), 0.0, 1e-15);
}

TEST(Weights, SpecialCasesCoincide) {
  const auto shapley = make_weights(Shapley{}, 10).values();
  const auto beta11 = make_weights(BetaShapley{1, 1}, 10).values();
  for (int l = 0; l < 10; ++l) EXPECT_NEAR(shapley[l], beta11[l], 1e-12 * shapley[l]);
  const auto banzhaf = make_weights(Banzhaf{}, 7).values();
  const auto wb = make_weights(WeightedBanzhaf{0.5}, 7).values();
  for (int l = 0; l < 7; ++l) EXPECT_NEAR(banzhaf[l], wb[l], 1e-15);
}

TEST(Weights, NormalizationAgainstDirectSum) {
  for (int n : {1, 2, 5, 17, 50, 64}) {
    for (const auto& family : {WeightFamily{Shapley{}}, WeightFamily{Banzhaf{}},
                               WeightFamily{BetaShapley{1, 4}}, WeightFamily{WeightedBanzhaf{0.8}}}) {
      const auto w = make_weights(family, n);
      EXPECT_LT(normalization_residual(w), 1e-10) << family_name(family) << " n=" << n;
      if (n <= 30) {
        double direct = 0.0;
        for (int l = 0; l < n; ++l) direct += choose(n - 1, l) * w.p(l);
        EXPECT_NEAR(direct, 1.0, 1e-12);
      }
    }
  }
}

TEST(Weights, BoundaryIndicesAreZero) {
  const auto w = make_weights(BetaShapley{2, 3}, 6);
  EXPECT_EQ(w.p(-1), 0.0);
  EXPECT_EQ(w.p(6), 0.0);
  for (double x : w.values()) EXPECT_GT(x, 0.0);
}

TEST(Weights, MsrCoefficient) {
  const auto w = make_weights(Shapley{}, 2);
  EXPECT_NEAR(msr_coefficient(w, Subset::from_mask(0b01), 0), 0.5, 1e-15);
  EXPECT_NEAR(msr_coefficient(w, Subset::from_mask(0b10), 0), -0.5, 1e-15);
  const auto wb = make_weights(WeightedBanzhaf{0.3}, 5);
  for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(msr_coefficient(wb, Subset{}, i), -wb.p(0));
  EXPECT_THROW(msr_coefficient(wb, Subset{}, 5), std::out_of_range);
}

TEST(Weights, ParseAndName) {
  EXPECT_TRUE(std::holds_alternative<Shapley>(parse_family("shapley")));
  EXPECT_TRUE(std::holds_alternative<Banzhaf>(parse_family("banzhaf")));
  const auto beta = std::get<BetaShapley>(parse_family("beta:2,0.5e1"));
  EXPECT_EQ(beta.alpha, 2.0);
  EXPECT_EQ(beta.beta, 5.0);
  EXPECT_EQ(std::get<WeightedBanzhaf>(parse_family("wbanzhaf:0.7")).q, 0.7);
  EXPECT_EQ(family_name(parse_family("beta:1,4")), "beta:1,4");
  EXPECT_EQ(family_name(parse_family("wbanzhaf:0.9")), "wbanzhaf:0.9");
  for (const char* bad : {"", "shap", "beta:1", "beta:0.5,2", "beta:a,b", "wbanzhaf:1", "wbanzhaf:0",
                          "wbanzhaf:", "banzhaf:1"}) {
    EXPECT_THROW(parse_family(bad), std::invalid_argument) << bad;
  }
  EXPECT_THROW(make_weights(Shapley{}, 0), std::invalid_argument);
}
