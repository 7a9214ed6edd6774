#include "provalue/weights.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "provalue/numeric.hpp"
#include "provalue/sampling.hpp"

namespace provalue {
namespace {

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument("malformed " + std::string(what) + " parameter '" +
                                std::string(text) + "'");
  }
  return value;
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

WeightFamily parse_family(std::string_view text) {
  WeightFamily family;
  if (text == "shapley") {
    family = Shapley{};
  } else if (text == "banzhaf") {
    family = Banzhaf{};
  } else if (text.starts_with("beta:")) {
    auto args = text.substr(5);
    auto comma = args.find(',');
    if (comma == std::string_view::npos) {
      throw std::invalid_argument("beta family expects 'beta:A,B', got '" + std::string(text) + "'");
    }
    family = BetaShapley{parse_number(args.substr(0, comma), "alpha"),
                         parse_number(args.substr(comma + 1), "beta")};
  } else if (text.starts_with("wbanzhaf:")) {
    family = WeightedBanzhaf{parse_number(text.substr(9), "q")};
  } else {
    throw std::invalid_argument("unknown weight family '" + std::string(text) +
                                "' (expected shapley, banzhaf, beta:A,B or wbanzhaf:Q)");
  }
  validate_family(family);
  return family;
}

std::string family_name(const WeightFamily& family) {
  std::ostringstream out;
  if (std::holds_alternative<Shapley>(family)) {
    out << "shapley";
  } else if (std::holds_alternative<Banzhaf>(family)) {
    out << "banzhaf";
  } else if (const auto* b = std::get_if<BetaShapley>(&family)) {
    out << "beta:" << b->alpha << "," << b->beta;
  } else {
    out << "wbanzhaf:" << std::get<WeightedBanzhaf>(family).q;
  }
  return out.str();
}

void validate_family(const WeightFamily& family) {
  if (const auto* b = std::get_if<BetaShapley>(&family)) {
    if (!(b->alpha >= 1.0) || !(b->beta >= 1.0) || !std::isfinite(b->alpha) ||
        !std::isfinite(b->beta)) {
      throw std::invalid_argument("beta Shapley parameters must satisfy alpha >= 1 and beta >= 1");
    }
  } else if (const auto* wb = std::get_if<WeightedBanzhaf>(&family)) {
    if (!(wb->q > 0.0 && wb->q < 1.0)) {
      throw std::invalid_argument("weighted Banzhaf parameter q must lie in (0, 1)");
    }
  }
}

WeightVector::WeightVector(int n, std::vector<double> log_p) : n_(n), log_p_(std::move(log_p)) {
  if (n_ < 1) throw std::invalid_argument("weight vector needs at least one player");
  if (static_cast<int>(log_p_.size()) != n_) {
    throw std::invalid_argument("weight vector length must equal the player count");
  }
}

double WeightVector::log_p(int l) const {
  if (l < 0 || l >= n_) return kNegInf;
  return log_p_[l];
}

double WeightVector::p(int l) const {
  if (l < 0 || l >= n_) return 0.0;
  return std::exp(log_p_[l]);
}

std::vector<double> WeightVector::values() const {
  std::vector<double> out(n_);
  for (int l = 0; l < n_; ++l) out[l] = std::exp(log_p_[l]);
  return out;
}

WeightVector make_weights(const WeightFamily& family, int n) {
  if (n < 1) throw std::invalid_argument("player count must be at least 1");
  validate_family(family);
  std::vector<double> log_p(n);
  for (int l = 0; l < n; ++l) {
    if (std::holds_alternative<Shapley>(family)) {
      log_p[l] = -std::log(static_cast<double>(n)) - log_binomial(n - 1, l);
    } else if (std::holds_alternative<Banzhaf>(family)) {
      log_p[l] = -(n - 1) * std::log(2.0);
    } else if (const auto* b = std::get_if<BetaShapley>(&family)) {
      log_p[l] = log_beta(l + b->beta, n - l - 1 + b->alpha) - log_beta(b->alpha, b->beta);
    } else {
      const double q = std::get<WeightedBanzhaf>(family).q;
      log_p[l] = l * std::log(q) + (n - 1 - l) * std::log1p(-q);
    }
  }
  return WeightVector(n, std::move(log_p));
}

double normalization_residual(const WeightVector& w) {
  const int n = w.players();
  std::vector<double> terms(n);
  for (int l = 0; l < n; ++l) terms[l] = log_binomial(n - 1, l) + w.log_p(l);
  return std::abs(std::exp(log_sum_exp(terms)) - 1.0);
}

double msr_coefficient(const WeightVector& w, const Subset& s, int player) {
  if (player < 0 || player >= w.players()) {
    throw std::out_of_range("player index " + std::to_string(player) + " outside [0, " +
                            std::to_string(w.players()) + ")");
  }
  return s.contains(player) ? w.p(s.size() - 1) : -w.p(s.size());
}

}  // namespace provalue
