#include "provalue/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "provalue/numeric.hpp"
#include "provalue/serialize.hpp"
#include "provalue/treeprob.hpp"

namespace provalue {
namespace {

// FNV-1a, so seeds do not depend on the standard library's std::hash.
std::uint64_t hash_string(std::uint64_t seed, const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ mix64(seed);
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

std::string format_double(double x, const char* fmt) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, fmt, x);
  return buffer;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quote in CSV line: " + line);
  fields.push_back(std::move(current));
  return fields;
}

double quantile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<double> ground_truth(const Game& game, const WeightVector& w) {
  if (game.players() != w.players()) throw std::invalid_argument("weights and game disagree on n");
  if (const auto* g = dynamic_cast<const InterventionalGame*>(&game)) {
    if (g->is_tree()) {
      return tree_prob_values(std::get<TreeEnsemble>(g->model()), g->explicand(), g->baselines(), w);
    }
    const auto& lin = std::get<LinearModel>(g->model());
    const int n = g->players();
    std::vector<double> phi(n, 0.0);
    for (const auto& b : g->baselines()) {
      for (int i = 0; i < n; ++i) phi[i] += lin.coeffs[i] * (g->explicand()[i] - b[i]);
    }
    for (double& x : phi) x /= static_cast<double>(g->baselines().size());
    return phi;
  }
  if (game.players() > kMaxBruteForcePlayers) {
    throw std::invalid_argument("no exact method for a non-tree game with n = " +
                                std::to_string(game.players()) + " > 20");
  }
  return brute_force_values(game, w);
}

double normalized_error(const std::vector<double>& est, const std::vector<double>& truth) {
  if (est.size() != truth.size()) throw std::invalid_argument("estimate and truth lengths differ");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    num += (est[i] - truth[i]) * (est[i] - truth[i]);
    den += truth[i] * truth[i];
  }
  if (den == 0.0) throw std::invalid_argument("normalized error is undefined for an all-zero truth");
  return num / den;
}

void BenchmarkConfig::validate() const {
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (games.empty() || families.empty() || estimators.empty() || budgets.empty()) {
    throw std::invalid_argument("games, families, estimators and budgets must all be non-empty");
  }
  for (const auto& g : games) {
    for (const auto& b : budgets) parse_budget(b, g.game->players());
  }
  for (double s : sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("sigmas must be finite and >= 0");
  }
}

BenchmarkConfig parse_benchmark_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  BenchmarkConfig cfg;
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.runs = j.value("runs", 1);
  cfg.threads = j.value("threads", 1);
  cfg.out = j.value("out", std::string{});
  if (!j.contains("games")) throw std::invalid_argument("benchmark config needs \"games\"");
  int index = 0;
  for (const auto& entry : j.at("games")) {
    nlohmann::json doc = entry;
    std::string id = entry.value("id", std::string{});
    if (entry.contains("file")) {
      const std::filesystem::path path = base_dir / entry.at("file").get<std::string>();
      doc = read_json_file(path);
      if (id.empty()) id = doc.value("id", path.stem().string());
    }
    if (id.empty()) id = doc.value("id", "game" + std::to_string(index));
    cfg.games.push_back({id, game_from_json(doc)});
    ++index;
  }
  for (const auto& f : j.value("families", nlohmann::json::array({"shapley"}))) {
    cfg.families.push_back(parse_family(f.get<std::string>()));
  }
  if (!j.contains("estimators")) throw std::invalid_argument("benchmark config needs \"estimators\"");
  for (const auto& e : j.at("estimators")) cfg.estimators.push_back(parse_estimator_spec(e));
  if (!j.contains("budgets")) throw std::invalid_argument("benchmark config needs \"budgets\"");
  for (const auto& b : j.at("budgets")) {
    cfg.budgets.push_back(b.is_string() ? b.get<std::string>() : std::to_string(b.get<std::size_t>()));
  }
  if (j.contains("sigmas")) cfg.sigmas = j.at("sigmas").get<std::vector<double>>();
  cfg.validate();
  return cfg;
}

std::uint64_t cell_seed(std::uint64_t master, const std::string& game, const std::string& family,
                        const std::string& estimator, std::size_t m, int run) {
  std::uint64_t h = hash_string(master, game);
  h = hash_string(h, family);
  h = hash_string(h, estimator);
  h = combine_seed(h, m);
  return combine_seed(h, static_cast<std::uint64_t>(run));
}

std::uint64_t noise_seed(std::uint64_t master, const std::string& game, double sigma, int run) {
  std::uint64_t h = hash_string(combine_seed(master, 0x6e6f697365ULL), game);
  h = combine_seed(h, std::bit_cast<std::uint64_t>(sigma));
  return combine_seed(h, static_cast<std::uint64_t>(run));
}

std::vector<BenchmarkRecord> run_benchmark(const BenchmarkConfig& config) {
  config.validate();
  struct Cell {
    std::size_t game;
    std::size_t family;
    std::size_t estimator;
    std::size_t m;
    double sigma;
    bool noisy;
    int run;
  };

  // Ground truth once per (game, family); a failure here fails every cell of the pair.
  std::vector<std::vector<std::vector<double>>> truth(config.games.size());
  std::vector<std::vector<std::string>> truth_error(config.games.size());
  for (std::size_t g = 0; g < config.games.size(); ++g) {
    const auto& game = *config.games[g].game;
    for (const auto& family : config.families) {
      try {
        truth[g].push_back(ground_truth(game, make_weights(family, game.players())));
        truth_error[g].emplace_back();
      } catch (const std::exception& e) {
        truth[g].emplace_back();
        truth_error[g].push_back(std::string("ground truth: ") + e.what());
      }
    }
  }

  std::vector<Cell> cells;
  const bool noisy = !config.sigmas.empty();
  const std::vector<double> sigmas = noisy ? config.sigmas : std::vector<double>{0.0};
  for (std::size_t g = 0; g < config.games.size(); ++g) {
    const int n = config.games[g].game->players();
    for (std::size_t f = 0; f < config.families.size(); ++f) {
      for (std::size_t e = 0; e < config.estimators.size(); ++e) {
        for (const auto& budget : config.budgets) {
          for (double sigma : sigmas) {
            for (int run = 0; run < config.runs; ++run) {
              cells.push_back({g, f, e, parse_budget(budget, n), sigma, noisy, run});
            }
          }
        }
      }
    }
  }

  std::vector<BenchmarkRecord> records(cells.size());
  auto execute = [&](std::size_t index) {
    const Cell& cell = cells[index];
    const NamedGame& named = config.games[cell.game];
    const WeightFamily& family = config.families[cell.family];
    const EstimatorSpec& spec = config.estimators[cell.estimator];
    BenchmarkRecord& rec = records[index];
    rec.game = named.id;
    rec.family = family_name(family);
    rec.estimator = spec.label();
    rec.m = cell.m;
    rec.sigma = cell.sigma;
    rec.run = cell.run;
    rec.error = std::numeric_limits<double>::quiet_NaN();
    try {
      if (!truth_error[cell.game][cell.family].empty()) {
        throw std::runtime_error(truth_error[cell.game][cell.family]);
      }
      GamePtr game = named.game;
      if (cell.noisy) {
        game = with_noise(game, cell.sigma, noise_seed(config.seed, named.id, cell.sigma, cell.run));
      }
      const std::uint64_t seed = cell_seed(config.seed, rec.game, rec.family, rec.estimator, cell.m, cell.run);
      const EstimateReport report = run_estimator(spec, *game, family, cell.m, seed);
      rec.error = normalized_error(report.estimates, truth[cell.game][cell.family]);
      rec.evals = report.evaluations_used;
      rec.wall_ms = report.wall_ms;
    } catch (const std::exception& e) {
      rec.failure = e.what();
    }
  };

  const int workers = std::min<int>(config.threads, static_cast<int>(std::max<std::size_t>(cells.size(), 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) execute(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) execute(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  return records;
}

std::string to_csv(const std::vector<BenchmarkRecord>& records) {
  std::string out = std::string(kBenchmarkCsvHeader) + "\n";
  for (const auto& r : records) {
    out += csv_field(r.game) + ',' + csv_field(r.family) + ',' + csv_field(r.estimator) + ',' +
           std::to_string(r.m) + ',' + format_double(r.sigma, "%.17g") + ',' + std::to_string(r.run) +
           ',' + (std::isnan(r.error) ? std::string("nan") : format_double(r.error, "%.17g")) + ',' +
           std::to_string(r.evals) + ',' + format_double(r.wall_ms, "%.3f") + '\n';
  }
  return out;
}

std::vector<BenchmarkRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kBenchmarkCsvHeader) {
    throw std::invalid_argument("CSV does not start with the benchmark header");
  }
  std::vector<BenchmarkRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw std::invalid_argument("expected 9 CSV fields in: " + line);
    BenchmarkRecord r;
    r.game = f[0];
    r.family = f[1];
    r.estimator = f[2];
    r.m = std::stoull(f[3]);
    r.sigma = std::stod(f[4]);
    r.run = std::stoi(f[5]);
    r.error = f[6] == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(f[6]);
    r.evals = std::stoull(f[7]);
    r.wall_ms = std::stod(f[8]);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<BenchmarkRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

std::vector<CellSummary> summarize(const std::vector<BenchmarkRecord>& records) {
  using Key = std::tuple<std::string, std::string, std::string, std::size_t, double>;
  std::map<Key, std::vector<double>> groups;
  std::vector<Key> order;
  for (const auto& r : records) {
    Key key{r.game, r.family, r.estimator, r.m, r.sigma};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    if (!std::isnan(r.error)) it->second.push_back(r.error);
  }
  std::vector<CellSummary> out;
  for (const auto& key : order) {
    auto errors = groups[key];
    std::sort(errors.begin(), errors.end());
    CellSummary s{std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key), std::get<4>(key)};
    s.runs = errors.size();
    double sum = 0.0;
    for (double e : errors) sum += e;
    s.mean = errors.empty() ? std::numeric_limits<double>::quiet_NaN() : sum / errors.size();
    s.q1 = quantile(errors, 0.25);
    s.median = quantile(errors, 0.5);
    s.q3 = quantile(errors, 0.75);
    out.push_back(std::move(s));
  }
  return out;
}

double weighted_residual_sum(const Game& game, const WeightVector& w, const SizeDistribution& dist,
                             const FittedFunction& f) {
  const int n = game.players();
  if (n > kMaxBoundPlayers) throw std::invalid_argument("the bound is enumerated only for n <= 16");
  if (w.players() != n || dist.players() != n || fitted_players(f) != n) {
    throw std::invalid_argument("game, weights, distribution and fit disagree on n");
  }
  double total = 0.0;
  for_each_subset(n, [&](const Subset& s) {
    const int size = s.size();
    const double pin = w.p(size - 1);
    const double pout = w.p(size);
    const double mix = pin * pin * size + pout * pout * (n - size);
    const double residual = game.value(s) - predict(f, s);
    if (mix == 0.0 || residual == 0.0) return;
    const double log_d = dist.log_density(size);
    if (log_d == kNegInf) {
      total = std::numeric_limits<double>::infinity();
      return;
    }
    total += residual * residual * mix * std::exp(-log_d);
  });
  return total;
}

BoundReport theorem_bound_report(const Game& game, const WeightVector& w, const SizeDistribution& dist,
                                 const FittedFunction& f, std::size_t m, int k, double delta) {
  if (m == 0 || k < 1 || !(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("bound needs m >= 1, k >= 1 and delta in (0, 1)");
  }
  BoundReport report;
  report.m = m;
  report.k = k;
  report.delta = delta;
  report.weighted_residual_sum = weighted_residual_sum(game, w, dist, f);
  const double scale = static_cast<double>(k) * k / (static_cast<double>(m) * delta);
  report.epsilon = scale * game.players();
  report.rhs = scale * report.weighted_residual_sum;
  return report;
}

BoundReport bound_for_run(const Game& game, const WeightVector& w, const RegressionMsrConfig& config,
                          std::size_t m, std::uint64_t seed, double delta,
                          const std::vector<double>& truth) {
  RegressionMsrConfig cfg = config;
  cfg.keep_fits = true;
  const EstimateReport est = regression_msr(game, w, m, cfg, seed);
  const SizeDistribution dist = cfg.constrained_shapley
                                    ? shapley_leverage_distribution(game.players())
                                    : cfg.distribution.value_or(default_msr_distribution(w));
  std::size_t worst = 0;
  double worst_sum = -1.0;
  for (std::size_t l = 0; l < est.fits.size(); ++l) {
    const double sum = weighted_residual_sum(game, w, dist, est.fits[l]);
    if (sum > worst_sum) {
      worst_sum = sum;
      worst = l;
    }
  }
  const std::size_t samples = m - (cfg.constrained_shapley ? 2 : 0);
  BoundReport report =
      theorem_bound_report(game, w, dist, est.fits[worst], samples, cfg.practical ? 1 : cfg.k, delta);
  double err = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    err += (est.estimates[i] - truth[i]) * (est.estimates[i] - truth[i]);
  }
  report.realized_error = err;
  return report;
}

}  // namespace provalue
