#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace provalue {

class Subset;

struct Shapley {};
struct Banzhaf {};
struct BetaShapley {
  double alpha = 1.0;
  double beta = 1.0;
};
struct WeightedBanzhaf {
  double q = 0.5;
};

using WeightFamily = std::variant<Shapley, Banzhaf, BetaShapley, WeightedBanzhaf>;

// Parses `shapley`, `banzhaf`, `beta:A,B` or `wbanzhaf:Q`.
WeightFamily parse_family(std::string_view text);
std::string family_name(const WeightFamily& family);
void validate_family(const WeightFamily& family);

/// Probabilistic weights p_0..p_{n-1}, held as logarithms.
///
/// p_l is the weight a single coalition of size l (not containing the
/// player) receives in the player's value. Indices -1 and n are valid
/// queries and return exactly zero.
class WeightVector {
 public:
  WeightVector(int n, std::vector<double> log_p);

  int players() const { return n_; }
  double log_p(int l) const;
  double p(int l) const;
  const std::vector<double>& log_values() const { return log_p_; }
  std::vector<double> values() const;

 private:
  int n_;
  std::vector<double> log_p_;
};

WeightVector make_weights(const WeightFamily& family, int n);

/// |sum_l C(n-1, l) p_l - 1|.
double normalization_residual(const WeightVector& w);

/// Signed per-coalition coefficient of v(S) in player i's value:
/// p_{|S|-1} when i is in S, -p_{|S|} otherwise. `player` is 0-based.
double msr_coefficient(const WeightVector& w, const Subset& s, int player);

}  // namespace provalue
