#include "provalue/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "provalue/numeric.hpp"

namespace provalue {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Non-owning handle so a caller's game can sit behind CountingGame.
GamePtr borrow(const Game& game) { return GamePtr(GamePtr{}, &game); }

void check_players(const Game& game, const WeightVector& w) {
  if (game.players() != w.players()) {
    throw std::invalid_argument("game has " + std::to_string(game.players()) +
                                " players but weights were built for " +
                                std::to_string(w.players()));
  }
}

// p_l for l = -1..n, shifted by one so index 0 holds p_{-1} = 0.
std::vector<double> padded_weights(const WeightVector& w) {
  const int n = w.players();
  std::vector<double> p(n + 2, 0.0);
  for (int l = 0; l < n; ++l) p[l + 1] = w.p(l);
  return p;
}

// Accumulates scale * v * msr_coefficient(S, i) into out[i] for every i.
void add_msr_term(std::vector<double>& out, const Subset& s, double scaled_value,
                  const std::vector<double>& padded) {
  const int n = static_cast<int>(out.size());
  const double in_coef = padded[s.size()];        // p_{|S|-1}
  const double out_coef = -padded[s.size() + 1];  // -p_{|S|}
  for (int i = 0; i < n; ++i) out[i] += scaled_value * (s.contains(i) ? in_coef : out_coef);
}

EstimateReport start_report(std::string name, std::size_t m, std::uint64_t seed) {
  EstimateReport report;
  report.estimator = std::move(name);
  report.budget = m;
  report.seed = seed;
  report.config = nlohmann::json::object();
  return report;
}

void finish(EstimateReport& report, const CountingGame& counted, Clock::time_point start) {
  report.evaluations_used = counted.calls();
  report.wall_ms = elapsed_ms(start);
  for (double x : report.estimates) {
    if (!std::isfinite(x)) throw std::runtime_error(report.estimator + " produced a non-finite estimate");
  }
}

std::vector<double> log_densities(const SizeDistribution& dist, const std::vector<Subset>& subsets) {
  std::vector<double> out(subsets.size());
  for (std::size_t r = 0; r < subsets.size(); ++r) {
    out[r] = dist.log_density(subsets[r].size());
    if (out[r] == kNegInf) {
      throw ZeroDensityError("sampled a coalition of size " + std::to_string(subsets[r].size()) +
                             " that has zero density");
    }
  }
  return out;
}

nlohmann::json distribution_json(const SizeDistribution& dist) {
  nlohmann::json q = nlohmann::json::array();
  for (int s = 0; s <= dist.players(); ++s) q.push_back(dist.size_prob(s));
  return q;
}

// Shared core of monte_carlo and wsl. `restricted` is a law over the n-1
// players other than the one being estimated.
EstimateReport monte_carlo_core(std::string name, const Game& game, const WeightVector& w,
                                std::size_t m, std::uint64_t seed,
                                const SizeDistribution& restricted) {
  check_players(game, w);
  const int n = game.players();
  if (m < static_cast<std::size_t>(2 * n)) {
    throw BudgetError(name + " needs a budget of at least 2n = " + std::to_string(2 * n));
  }
  const auto start = Clock::now();
  CountingGame counted(borrow(game));
  EstimateReport report = start_report(std::move(name), m, seed);
  const std::size_t pairs = m / (2 * static_cast<std::size_t>(n));
  report.config["pairs_per_player"] = pairs;
  report.config["restricted_size_law"] = distribution_json(restricted);

  std::vector<double> q(n);
  for (int s = 0; s < n; ++s) q[s] = restricted.size_prob(s);
  std::discrete_distribution<int> size_law(q.begin(), q.end());
  Rng rng(seed);

  report.estimates.assign(n, 0.0);
  std::vector<int> pool;
  for (int i = 0; i < n; ++i) {
    pool.clear();
    for (int j = 0; j < n; ++j) {
      if (j != i) pool.push_back(j);
    }
    double acc = 0.0;
    for (std::size_t t = 0; t < pairs; ++t) {
      const int size = size_law(rng);
      const Subset s = random_subset_from(pool, size, rng);
      const double ratio = std::exp(w.log_p(size) - restricted.log_density(size));
      acc += (counted.value(s.with(i)) - counted.value(s)) * ratio;
    }
    report.estimates[i] = acc / static_cast<double>(pairs);
  }
  finish(report, counted, start);
  return report;
}

void require_enumerable(const Game& game, const std::string& what) {
  if (game.players() > 20) {
    throw std::invalid_argument(what + " exhaustive mode is limited to n <= 20");
  }
}

}  // namespace

EstimateReport monte_carlo(const Game& game, const WeightVector& w, std::size_t m,
                           std::uint64_t seed, const MonteCarloOptions& options) {
  check_players(game, w);
  const int n = game.players();
  if (options.exhaustive) {
    require_enumerable(game, "monte_carlo");
    const auto start = Clock::now();
    CountingGame counted(borrow(game));
    EstimateReport report = start_report("monte_carlo", m, seed);
    report.config["exhaustive"] = true;
    report.estimates.assign(n, 0.0);
    for_each_subset(n, [&](const Subset& s) {
      for (int i = 0; i < n; ++i) {
        if (s.contains(i)) continue;
        report.estimates[i] += w.p(s.size()) * (counted.value(s.with(i)) - counted.value(s));
      }
    });
    finish(report, counted, start);
    return report;
  }

  std::vector<double> log_w(n);
  for (int s = 0; s < n; ++s) {
    log_w[s] = options.distribution ? options.distribution->log_density(s) : w.log_p(s);
  }
  if (options.distribution && options.distribution->players() != n) {
    throw std::invalid_argument("sampling distribution built for a different player count");
  }
  const auto restricted = SizeDistribution::from_subset_log_weights(n - 1, log_w);
  return monte_carlo_core("monte_carlo", game, w, m, seed, restricted);
}

EstimateReport wsl(const Game& game, const WeightVector& w, std::size_t m, std::uint64_t seed) {
  check_players(game, w);
  const int n = game.players();
  std::vector<double> log_q(n, -std::log(static_cast<double>(n)));
  return monte_carlo_core("wsl", game, w, m, seed, SizeDistribution(n - 1, std::move(log_q)));
}

EstimateReport permutation_estimator(const Game& game, const WeightVector& w, std::size_t m,
                                     std::uint64_t seed) {
  check_players(game, w);
  const int n = game.players();
  if (m < static_cast<std::size_t>(n + 1)) {
    throw BudgetError("permutation estimator needs a budget of at least n + 1 = " +
                      std::to_string(n + 1));
  }
  const auto start = Clock::now();
  CountingGame counted(borrow(game));
  EstimateReport report = start_report("permutation", m, seed);
  const std::size_t count = m / static_cast<std::size_t>(n + 1);
  report.config["permutations"] = count;

  std::vector<double> reweight(n);
  for (int s = 0; s < n; ++s) {
    reweight[s] = std::exp(std::log(static_cast<double>(n)) + log_binomial(n - 1, s) + w.log_p(s));
  }
  report.estimates.assign(n, 0.0);
  for (const auto& perm : sample_permutations(n, count, seed)) {
    Subset prefix;
    double previous = counted.value(prefix);
    for (int s = 0; s < n; ++s) {
      prefix.insert(perm[s]);
      const double current = counted.value(prefix);
      report.estimates[perm[s]] += (current - previous) * reweight[s];
      previous = current;
    }
  }
  for (double& x : report.estimates) x /= static_cast<double>(count);
  finish(report, counted, start);
  return report;
}

EstimateReport msr(const Game& game, const WeightVector& w, std::size_t m, std::uint64_t seed,
                   const MsrOptions& options) {
  check_players(game, w);
  const int n = game.players();
  const auto start = Clock::now();
  CountingGame counted(borrow(game));
  EstimateReport report = start_report("msr", m, seed);
  const auto padded = padded_weights(w);
  report.estimates.assign(n, 0.0);

  if (options.exhaustive) {
    require_enumerable(game, "msr");
    report.config["exhaustive"] = true;
    for_each_subset(n, [&](const Subset& s) { add_msr_term(report.estimates, s, counted.value(s), padded); });
    finish(report, counted, start);
    return report;
  }
  if (m < 1) throw BudgetError("msr needs a budget of at least 1");

  const SizeDistribution dist = options.distribution.value_or(default_msr_distribution(w));
  if (dist.players() != n) throw std::invalid_argument("sampling distribution built for a different n");
  report.config["replacement"] = options.replacement;
  report.config["size_law"] = distribution_json(dist);

  const SampleBatch batch = sample_subsets(dist, m, options.replacement, seed);
  const auto log_d = log_densities(dist, batch.subsets);
  for (std::size_t r = 0; r < batch.subsets.size(); ++r) {
    const double scaled = counted.value(batch.subsets[r]) * std::exp(-log_d[r]);
    add_msr_term(report.estimates, batch.subsets[r], scaled, padded);
  }
  for (double& x : report.estimates) x /= static_cast<double>(m);
  finish(report, counted, start);
  return report;
}

EstimateReport arm(const Game& game, const WeightVector& w, std::size_t m, std::uint64_t seed) {
  check_players(game, w);
  const int n = game.players();
  if (m < 2) throw BudgetError("arm needs a budget of at least 2");
  const auto start = Clock::now();
  CountingGame counted(borrow(game));
  EstimateReport report = start_report("arm", m, seed);

  // Per-coalition weights p_{|S|-1} (sets containing i) and p_{|S|} (sets without i).
  std::vector<double> log_plus(n + 1);
  std::vector<double> log_minus(n + 1);
  for (int s = 0; s <= n; ++s) {
    log_plus[s] = w.log_p(s - 1);
    log_minus[s] = w.log_p(s);
  }
  const auto plus = SizeDistribution::from_subset_log_weights(n, log_plus);
  const auto minus = SizeDistribution::from_subset_log_weights(n, log_minus);
  auto log_normalizer = [n](const std::vector<double>& log_w) {
    std::vector<double> terms(n + 1);
    for (int s = 0; s <= n; ++s) terms[s] = log_binomial(n, s) + log_w[s];
    return log_sum_exp(terms);
  };
  const double z_plus = std::exp(log_normalizer(log_plus));
  const double z_minus = std::exp(log_normalizer(log_minus));
  report.config["z_plus"] = z_plus;
  report.config["z_minus"] = z_minus;

  const std::size_t half_a = m / 2;
  const std::size_t half_b = m / 2;
  const SampleBatch a = sample_subsets(plus, half_a, true, combine_seed(seed, 1));
  const SampleBatch b = sample_subsets(minus, half_b, true, combine_seed(seed, 2));

  std::vector<double> pos(n, 0.0);
  std::vector<double> neg(n, 0.0);
  for (const Subset& s : a.subsets) {
    const double v = counted.value(s);
    for (int i : s.members()) pos[i] += v;
  }
  for (const Subset& s : b.subsets) {
    const double v = counted.value(s);
    for (int i = 0; i < n; ++i) {
      if (!s.contains(i)) neg[i] += v;
    }
  }
  report.estimates.resize(n);
  for (int i = 0; i < n; ++i) {
    report.estimates[i] = z_plus * pos[i] / static_cast<double>(half_a) -
                          z_minus * neg[i] / static_cast<double>(half_b);
  }
  finish(report, counted, start);
  return report;
}

SizeDistribution shapley_kernel_distribution(int n) {
  if (n < 2) throw std::invalid_argument("kernel regression needs n >= 2");
  std::vector<double> log_q(n + 1, kNegInf);
  for (int s = 1; s < n; ++s) log_q[s] = -std::log(static_cast<double>(s) * (n - s));
  const double z = log_sum_exp(log_q);
  for (int s = 1; s < n; ++s) log_q[s] -= z;
  return SizeDistribution(n, std::move(log_q));
}

std::vector<double> shapley_leverage_by_size(int n) {
  if (n < 2) throw std::invalid_argument("kernel regression needs n >= 2");
  // Row for S after projecting out the constraint: sqrt(w_s) (1_S - s/n 1),
  // squared norm w_s s (n - s) / n. By symmetry the Gram matrix is c P with
  // P = I - 11^T/n, and c = trace / (n - 1).
  std::vector<double> row_norm2(n + 1, 0.0);
  double trace = 0.0;
  for (int s = 1; s < n; ++s) {
    row_norm2[s] = shapley_kernel_weight(n, s) * s * (n - s) / n;
    trace += std::exp(log_binomial(n, s)) * row_norm2[s];
  }
  const double c = trace / (n - 1);
  std::vector<double> leverage(n + 1, 0.0);
  for (int s = 1; s < n; ++s) leverage[s] = row_norm2[s] / c;
  return leverage;
}

SizeDistribution shapley_leverage_distribution(int n) {
  const auto leverage = shapley_leverage_by_size(n);
  std::vector<double> log_w(n + 1, kNegInf);
  for (int s = 1; s < n; ++s) log_w[s] = std::log(leverage[s]);
  return SizeDistribution::from_subset_log_weights(n, log_w);
}

namespace {

struct KernelProblem {
  std::vector<Sample> samples;
  std::vector<double> weights;
};

EstimateReport kernel_regression(std::string name, const Game& game, std::size_t m,
                                 std::uint64_t seed, const KernelOptions& options,
                                 const SizeDistribution& dist) {
  const int n = game.players();
  const auto start = Clock::now();
  CountingGame counted(borrow(game));
  EstimateReport report = start_report(std::move(name), m, seed);

  KernelProblem problem;
  if (options.exhaustive) {
    require_enumerable(game, report.estimator);
    report.config["exhaustive"] = true;
    for_each_subset(n, [&](const Subset& s) {
      if (s.size() == 0 || s.size() == n) return;
      problem.samples.push_back({s, counted.value(s)});
      problem.weights.push_back(shapley_kernel_weight(n, s.size()));
    });
  } else {
    if (m < static_cast<std::size_t>(n + 2)) {
      throw BudgetError(report.estimator + " needs a budget of at least n + 2 = " +
                        std::to_string(n + 2));
    }
    report.config["size_law"] = distribution_json(dist);
    const SampleBatch batch = sample_subsets(dist, m - 2, true, seed);
    const auto log_d = log_densities(dist, batch.subsets);
    for (std::size_t r = 0; r < batch.subsets.size(); ++r) {
      const Subset& s = batch.subsets[r];
      problem.samples.push_back({s, counted.value(s)});
      problem.weights.push_back(shapley_kernel_weight(n, s.size()) * std::exp(-log_d[r]));
    }
  }
  const double empty = counted.value(Subset{});
  const double full = counted.value(Subset::full(n));
  const LinearFit fit = fit_constrained_linear(problem.samples, problem.weights, n, empty, full - empty);
  report.config["regularized"] = fit.regularized;
  report.estimates = fit.coeffs;
  finish(report, counted, start);
  return report;
}

}  // namespace

EstimateReport kernel_shap(const Game& game, std::size_t m, std::uint64_t seed,
                           const KernelOptions& options) {
  return kernel_regression("kernel_shap", game, m, seed, options,
                           shapley_kernel_distribution(game.players()));
}

EstimateReport leverage_shap(const Game& game, std::size_t m, std::uint64_t seed,
                             const KernelOptions& options) {
  return kernel_regression("leverage_shap", game, m, seed, options,
                           shapley_leverage_distribution(game.players()));
}

void RegressionMsrConfig::validate() const {
  if (k < 1) throw std::invalid_argument("regression_msr needs k >= 1");
  if (!practical && k < 2) {
    throw std::invalid_argument("the unbiased variant needs k >= 2 so every fold has training data");
  }
  if (constrained_shapley && model != Model::kLinear) {
    throw std::invalid_argument("the constrained Shapley fit is only defined for the linear model");
  }
  if (model == Model::kGbt) gbt.validate();
}

RegressionMsrConfig linear_msr_preset(const WeightFamily& family) {
  RegressionMsrConfig cfg;
  cfg.model = RegressionMsrConfig::Model::kLinear;
  const auto* beta = std::get_if<BetaShapley>(&family);
  cfg.constrained_shapley =
      std::holds_alternative<Shapley>(family) || (beta && beta->alpha == 1.0 && beta->beta == 1.0);
  return cfg;
}

RegressionMsrConfig tree_msr_preset() {
  RegressionMsrConfig cfg;
  cfg.model = RegressionMsrConfig::Model::kGbt;
  return cfg;
}

EstimateReport regression_msr(const Game& game, const WeightVector& w, std::size_t m,
                              const RegressionMsrConfig& config, std::uint64_t seed) {
  config.validate();
  check_players(game, w);
  const int n = game.players();
  const bool gbt = config.model == RegressionMsrConfig::Model::kGbt;
  const auto start = Clock::now();
  CountingGame counted(borrow(game));
  EstimateReport report = start_report("regression_msr", m, seed);
  report.config["k"] = config.k;
  report.config["model"] = gbt ? "gbt" : "linear";
  report.config["practical"] = config.practical;
  report.config["replacement"] = config.replacement;
  report.config["constrained_shapley"] = config.constrained_shapley;
  if (gbt) {
    report.config["gbt"] = {{"rounds", config.gbt.rounds},
                            {"max_depth", config.gbt.max_depth},
                            {"learning_rate", config.gbt.learning_rate},
                            {"min_samples_leaf", config.gbt.min_samples_leaf}};
  }

  // The constrained path spends two evaluations on v(empty) and v([n]).
  const std::size_t reserved = config.constrained_shapley ? 2 : 0;
  const std::size_t min_train = gbt ? 2 : 1;
  const std::size_t needed =
      reserved + (config.practical ? min_train : 2 * static_cast<std::size_t>(config.k));
  if (m < needed) {
    throw BudgetError("regression_msr needs a budget of at least " + std::to_string(needed) +
                      " for this configuration");
  }

  double empty_value = 0.0;
  double full_value = 0.0;
  SizeDistribution dist = config.constrained_shapley
                              ? shapley_leverage_distribution(n)
                              : config.distribution.value_or(default_msr_distribution(w));
  if (dist.players() != n) throw std::invalid_argument("sampling distribution built for a different n");
  report.config["size_law"] = distribution_json(dist);
  if (config.constrained_shapley) {
    empty_value = counted.value(Subset{});
    full_value = counted.value(Subset::full(n));
  }

  const std::size_t count = m - reserved;
  const SampleBatch batch = sample_subsets(dist, count, config.replacement, combine_seed(seed, 0));
  const auto log_d = log_densities(dist, batch.subsets);
  std::vector<Sample> samples(count);
  for (std::size_t r = 0; r < count; ++r) {
    samples[r] = {batch.subsets[r], counted.value(batch.subsets[r])};
  }

  // Fold assignment: a uniformly random permutation dealt round-robin.
  std::vector<std::vector<std::size_t>> folds;
  if (config.practical) {
    folds.emplace_back(count);
    std::iota(folds[0].begin(), folds[0].end(), std::size_t{0});
  } else {
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(combine_seed(seed, 1));
    std::shuffle(order.begin(), order.end(), rng);
    folds.resize(config.k);
    for (std::size_t pos = 0; pos < count; ++pos) folds[pos % config.k].push_back(order[pos]);
  }

  const auto padded = padded_weights(w);
  report.estimates.assign(n, 0.0);
  std::vector<char> in_fold(count, 0);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<Sample> train;
    if (config.practical) {
      train = samples;
    } else {
      std::fill(in_fold.begin(), in_fold.end(), 0);
      for (std::size_t r : folds[f]) in_fold[r] = 1;
      for (std::size_t r = 0; r < count; ++r) {
        if (!in_fold[r]) train.push_back(samples[r]);
      }
    }
    if (train.size() < min_train) {
      throw BudgetError("fold " + std::to_string(f) + " has too few training samples");
    }

    FittedFunction fit;
    if (gbt) {
      fit = fit_gbt(train, n, config.gbt, combine_seed(seed, 2 + f));
    } else if (config.constrained_shapley) {
      std::vector<double> weights(train.size());
      for (std::size_t r = 0; r < train.size(); ++r) {
        const int s = train[r].subset.size();
        weights[r] = shapley_kernel_weight(n, s) * std::exp(-dist.log_density(s));
      }
      fit = fit_constrained_linear(train, weights, n, empty_value, full_value - empty_value);
    } else {
      fit = fit_linear(train, n);
    }

    std::vector<double> fold_estimate = exact_prob_values(fit, w);
    std::vector<double> correction(n, 0.0);
    for (std::size_t r : folds[f]) {
      const double residual = samples[r].target - predict(fit, samples[r].subset);
      add_msr_term(correction, samples[r].subset, residual * std::exp(-log_d[r]), padded);
    }
    const double held_out = static_cast<double>(folds[f].size());
    for (int i = 0; i < n; ++i) {
      report.estimates[i] += fold_estimate[i] + correction[i] / held_out;
    }
    if (config.keep_fits) report.fits.push_back(std::move(fit));
  }
  for (double& x : report.estimates) x /= static_cast<double>(folds.size());
  finish(report, counted, start);
  return report;
}

std::string EstimatorSpec::label() const {
  std::ostringstream out;
  out << name;
  std::vector<std::string> opts;
  if (model) opts.push_back("model=" + *model);
  if (k) opts.push_back("k=" + std::to_string(*k));
  if (practical) opts.push_back(std::string("practical=") + (*practical ? "1" : "0"));
  if (replacement) opts.push_back(std::string("replacement=") + (*replacement ? "1" : "0"));
  if (!opts.empty()) {
    out << '[';
    for (std::size_t i = 0; i < opts.size(); ++i) out << (i ? ";" : "") << opts[i];
    out << ']';
  }
  return out.str();
}

EstimatorSpec parse_estimator_spec(const nlohmann::json& j) {
  EstimatorSpec spec;
  if (j.is_string()) {
    spec.name = j.get<std::string>();
    return spec;
  }
  if (!j.is_object() || !j.contains("name")) {
    throw std::invalid_argument("estimator entries must be a name or an object with \"name\"");
  }
  for (const auto& [key, value] : j.items()) {
    if (key == "name") {
      spec.name = value.get<std::string>();
    } else if (key == "k") {
      spec.k = value.get<int>();
    } else if (key == "practical") {
      spec.practical = value.get<bool>();
    } else if (key == "replacement") {
      spec.replacement = value.get<bool>();
    } else if (key == "model") {
      spec.model = value.get<std::string>();
    } else if (key == "rounds") {
      spec.gbt.rounds = value.get<int>();
    } else if (key == "max_depth") {
      spec.gbt.max_depth = value.get<int>();
    } else if (key == "learning_rate") {
      spec.gbt.learning_rate = value.get<double>();
    } else if (key == "min_samples_leaf") {
      spec.gbt.min_samples_leaf = value.get<int>();
    } else {
      throw std::invalid_argument("unknown estimator option '" + key + "'");
    }
  }
  return spec;
}

nlohmann::json to_json(const EstimatorSpec& spec) {
  nlohmann::json j = {{"name", spec.name}};
  if (spec.k) j["k"] = *spec.k;
  if (spec.practical) j["practical"] = *spec.practical;
  if (spec.replacement) j["replacement"] = *spec.replacement;
  if (spec.model) j["model"] = *spec.model;
  return j;
}

EstimateReport run_estimator(const EstimatorSpec& spec, const Game& game,
                             const WeightFamily& family, std::size_t m, std::uint64_t seed) {
  const WeightVector w = make_weights(family, game.players());
  const std::string& name = spec.name;
  auto only_shapley = [&] {
    if (!std::holds_alternative<Shapley>(family)) {
      throw std::invalid_argument(name + " estimates Shapley values only");
    }
  };

  if (name == "monte_carlo") return monte_carlo(game, w, m, seed);
  if (name == "wsl") return wsl(game, w, m, seed);
  if (name == "permutation") return permutation_estimator(game, w, m, seed);
  if (name == "arm") return arm(game, w, m, seed);
  if (name == "msr") {
    MsrOptions options;
    if (spec.replacement) options.replacement = *spec.replacement;
    return msr(game, w, m, seed, options);
  }
  if (name == "kernel_shap") {
    only_shapley();
    return kernel_shap(game, m, seed);
  }
  if (name == "leverage_shap") {
    only_shapley();
    return leverage_shap(game, m, seed);
  }

  RegressionMsrConfig cfg;
  if (name == "linear_msr") {
    cfg = linear_msr_preset(family);
  } else if (name == "tree_msr") {
    cfg = tree_msr_preset();
  } else if (name == "regression_msr") {
    const std::string model = spec.model.value_or("linear");
    if (model == "gbt") {
      cfg.model = RegressionMsrConfig::Model::kGbt;
    } else if (model != "linear") {
      throw std::invalid_argument("regression_msr model must be 'linear' or 'gbt'");
    }
  } else {
    throw std::invalid_argument("unknown estimator '" + name + "'");
  }
  if (spec.k) cfg.k = *spec.k;
  if (spec.practical) cfg.practical = *spec.practical;
  if (spec.replacement) cfg.replacement = *spec.replacement;
  cfg.gbt = spec.gbt;
  EstimateReport report = regression_msr(game, w, m, cfg, seed);
  report.estimator = name;
  return report;
}

std::size_t parse_budget(const std::string& text, int n) {
  if (text.empty()) throw std::invalid_argument("empty budget");
  const bool per_player = text.back() == 'n';
  const std::string digits = per_player ? text.substr(0, text.size() - 1) : text;
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
    throw std::invalid_argument("budget must be an integer or a multiple like '40n', got '" + text + "'");
  }
  const std::size_t value = std::stoull(digits);
  const std::size_t budget = per_player ? value * static_cast<std::size_t>(n) : value;
  if (budget == 0) throw std::invalid_argument("budget must be positive");
  return budget;
}

}  // namespace provalue
