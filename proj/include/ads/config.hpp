#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ads/evaluate.hpp"
#include "json.hpp"

namespace ads {

struct RunConfig {
  std::filesystem::path schema;
  std::filesystem::path cohort;
  GridOptions grid;
  std::vector<GridCell> cells = default_grid();
  GridCell train{BinningMode::CAIM, make_spec(Method::BayesNetK2), Selector::None};
  std::optional<std::filesystem::path> catalog;
  std::filesystem::path report_csv = "grid.csv";
  std::filesystem::path report_json = "grid.json";
  std::filesystem::path artifact = "model.json";
  std::string host = "127.0.0.1";
  int port = 8080;
};

// Relative paths resolve against base_dir. Unknown keys at any level
// raise ConfigError naming the key.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace ads
