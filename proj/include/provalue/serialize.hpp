#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "provalue/estimators.hpp"
#include "provalue/games.hpp"
#include "provalue/regress.hpp"
#include "provalue/sampling.hpp"
#include "provalue/tree.hpp"

namespace provalue {

using nlohmann::json;

// Subsets are written as sorted 1-based player indices.
json subset_to_json(const Subset& s);
Subset subset_from_json(const json& j, int n);

// Feature indices inside tree JSON are 0-based.
json ensemble_to_json(const TreeEnsemble& ensemble);
TreeEnsemble ensemble_from_json(const json& j);

json fitted_to_json(const FittedFunction& f);
FittedFunction fitted_from_json(const json& j);

json report_to_json(const EstimateReport& report);
EstimateReport report_from_json(const json& j);

/// Accepted game documents:
///   {"type": "tree",   "model": <ensemble>, "explicand": [...], "baselines": [[...], ...]}
///   {"type": "linear", "model": {"intercept": c, "coeffs": [...]}, "explicand": [...], "baselines": [[...]]}
///   {"type": "table",  "n": 2, "values": [v(0b00), v(0b01), v(0b10), v(0b11)]}
///   {"type": "random", "kind": "forest" | "linear" | "linear_plus_noise", "n": 30, "seed": 7,
///    "trees": 10, "max_depth": 4}
/// An optional "id" names the game in benchmark output.
GamePtr game_from_json(const json& j);
json game_to_json(const Game& game);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// JSON array of doubles with %.10g formatting, e.g. [0.3333333333, 0.5].
std::string format_vector(const std::vector<double>& values);

}  // namespace provalue
