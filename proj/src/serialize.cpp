#include "provalue/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace provalue {
namespace {

json optional_number(bool present, double value) { return present ? json(value) : json(nullptr); }

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw std::invalid_argument(std::string("missing field \"") + key + "\"");
  return j.at(key).get<T>();
}

}  // namespace

json subset_to_json(const Subset& s) {
  json out = json::array();
  for (int i : s.members()) out.push_back(i + 1);
  return out;
}

Subset subset_from_json(const json& j, int n) {
  if (!j.is_array()) throw std::invalid_argument("a subset is an array of 1-based indices");
  Subset s;
  for (const auto& item : j) {
    const int index = item.get<int>();
    if (index < 1 || index > n) {
      throw std::invalid_argument("player index " + std::to_string(index) + " outside 1.." +
                                  std::to_string(n));
    }
    s.insert(index - 1);
  }
  return s;
}

json ensemble_to_json(const TreeEnsemble& ensemble) {
  json trees = json::array();
  for (const Tree& tree : ensemble.trees) {
    json nodes = json::array();
    for (const TreeNode& node : tree.nodes) {
      const bool leaf = node.is_leaf();
      nodes.push_back({{"feature", leaf ? json(nullptr) : json(node.feature)},
                       {"threshold", optional_number(!leaf, node.threshold)},
                       {"left", leaf ? json(nullptr) : json(node.left)},
                       {"right", leaf ? json(nullptr) : json(node.right)},
                       {"value", optional_number(leaf, node.value.value_or(0.0))}});
    }
    trees.push_back({{"root", tree.root}, {"nodes", std::move(nodes)}});
  }
  return {{"n_features", ensemble.n_features}, {"trees", std::move(trees)}};
}

TreeEnsemble ensemble_from_json(const json& j) {
  TreeEnsemble ensemble;
  ensemble.n_features = required<int>(j, "n_features");
  for (const json& jt : required<json>(j, "trees")) {
    Tree tree;
    tree.root = required<int>(jt, "root");
    for (const json& jn : required<json>(jt, "nodes")) {
      auto field = [&](const char* key) { return jn.contains(key) ? jn.at(key) : json(nullptr); };
      const json value = field("value");
      const bool any_split_field = !field("feature").is_null() || !field("threshold").is_null() ||
                                   !field("left").is_null() || !field("right").is_null();
      if (!value.is_null()) {
        if (any_split_field) {
          throw std::invalid_argument("a leaf must have null feature, threshold, left and right");
        }
        tree.nodes.push_back(TreeNode::leaf(value.get<double>()));
        continue;
      }
      for (const char* key : {"feature", "threshold", "left", "right"}) {
        if (field(key).is_null()) {
          throw std::invalid_argument(std::string("internal node is missing \"") + key + "\"");
        }
      }
      tree.nodes.push_back(TreeNode::split(field("feature").get<int>(), field("threshold").get<double>(),
                                           field("left").get<int>(), field("right").get<int>()));
    }
    ensemble.trees.push_back(std::move(tree));
  }
  ensemble.validate();
  return ensemble;
}

json fitted_to_json(const FittedFunction& f) {
  if (const auto* lin = std::get_if<LinearFit>(&f)) {
    return {{"intercept", lin->intercept}, {"coeffs", lin->coeffs}};
  }
  return ensemble_to_json(std::get<TreeFit>(f).ensemble);
}

FittedFunction fitted_from_json(const json& j) {
  if (j.contains("trees")) {
    TreeFit fit;
    fit.ensemble = ensemble_from_json(j);
    return fit;
  }
  LinearFit fit;
  fit.intercept = required<double>(j, "intercept");
  fit.coeffs = required<std::vector<double>>(j, "coeffs");
  return fit;
}

json report_to_json(const EstimateReport& report) {
  json j = {{"estimator", report.estimator},
            {"config", report.config},
            {"estimates", report.estimates},
            {"evaluations_used", report.evaluations_used},
            {"budget", report.budget},
            {"seed", report.seed},
            {"wall_ms", report.wall_ms}};
  if (!report.fits.empty()) {
    json fits = json::array();
    for (const auto& f : report.fits) fits.push_back(fitted_to_json(f));
    j["fits"] = std::move(fits);
  }
  return j;
}

EstimateReport report_from_json(const json& j) {
  EstimateReport report;
  report.estimator = required<std::string>(j, "estimator");
  report.config = j.value("config", json::object());
  report.estimates = required<std::vector<double>>(j, "estimates");
  report.evaluations_used = required<std::size_t>(j, "evaluations_used");
  report.budget = required<std::size_t>(j, "budget");
  report.seed = required<std::uint64_t>(j, "seed");
  report.wall_ms = j.value("wall_ms", 0.0);
  if (j.contains("fits")) {
    for (const auto& f : j.at("fits")) report.fits.push_back(fitted_from_json(f));
  }
  return report;
}

GamePtr game_from_json(const json& j) {
  const std::string type = required<std::string>(j, "type");
  if (type == "table") {
    return std::make_shared<TableGame>(required<int>(j, "n"), required<std::vector<double>>(j, "values"));
  }
  if (type == "random") {
    RandomGameParams params;
    params.trees = j.value("trees", params.trees);
    params.max_depth = j.value("max_depth", params.max_depth);
    params.interaction_scale = j.value("interaction_scale", params.interaction_scale);
    return random_game(parse_random_game_kind(required<std::string>(j, "kind")), required<int>(j, "n"),
                       required<std::uint64_t>(j, "seed"), params);
  }
  if (type != "tree" && type != "linear") {
    throw std::invalid_argument("unknown game type '" + type + "'");
  }
  auto explicand = required<std::vector<double>>(j, "explicand");
  auto baselines = required<std::vector<std::vector<double>>>(j, "baselines");
  const json& model = required<json>(j, "model");
  if (type == "tree") {
    return std::make_shared<InterventionalGame>(ensemble_from_json(model), std::move(explicand),
                                                std::move(baselines));
  }
  LinearModel linear{model.value("intercept", 0.0), required<std::vector<double>>(model, "coeffs")};
  return std::make_shared<InterventionalGame>(std::move(linear), std::move(explicand), std::move(baselines));
}

json game_to_json(const Game& game) {
  if (const auto* g = dynamic_cast<const InterventionalGame*>(&game)) {
    json model;
    if (g->is_tree()) {
      model = ensemble_to_json(std::get<TreeEnsemble>(g->model()));
    } else {
      const auto& lin = std::get<LinearModel>(g->model());
      model = {{"intercept", lin.intercept}, {"coeffs", lin.coeffs}};
    }
    return {{"type", g->is_tree() ? "tree" : "linear"},
            {"model", std::move(model)},
            {"explicand", g->explicand()},
            {"baselines", g->baselines()}};
  }
  if (game.players() <= kMaxEnumerablePlayers) {
    return {{"type", "table"}, {"n", game.players()}, {"values", tabulate(game)}};
  }
  throw std::invalid_argument("this game has no JSON form");
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed while writing " + path.string());
}

std::string format_vector(const std::vector<double>& values) {
  std::string out = "[";
  char buffer[32];
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = values[i] == 0.0 ? 0.0 : values[i];
    std::snprintf(buffer, sizeof buffer, "%.10g", x);
    if (i) out += ", ";
    out += buffer;
  }
  return out + "]";
}

}  // namespace provalue
