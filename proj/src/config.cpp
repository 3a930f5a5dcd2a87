#include "ads/config.hpp"

#include <fstream>
#include <set>

#include "ads/error.hpp"

namespace ads {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError("unknown config key '" + where + it.key() + "'");
  }
}

}  // namespace

RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir) {
  only_keys(j, {"schema", "cohort", "seed", "folds", "stratified", "target", "parallel_cells", "cells", "train",
                "catalog", "outputs", "serve"},
            "");
  RunConfig c;
  auto path = [&](const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a path string");
    std::filesystem::path p = v.get<std::string>();
    return p.is_absolute() ? p : base_dir / p;
  };
  std::string key;
  try {
    key = "schema";
    if (j.contains(key)) c.schema = path(j.at(key), key);
    key = "cohort";
    if (j.contains(key)) c.cohort = path(j.at(key), key);
    key = "seed";
    if (j.contains(key)) c.grid.seed = j.at(key).get<std::uint64_t>();
    key = "folds";
    if (j.contains(key)) c.grid.n_folds = j.at(key).get<std::size_t>();
    key = "stratified";
    if (j.contains(key)) c.grid.stratified = j.at(key).get<bool>();
    key = "target";
    if (j.contains(key)) c.grid.target = parse_target_mode(j.at(key).get<std::string>());
    key = "parallel_cells";
    if (j.contains(key)) {
      c.grid.exec = j.at(key).get<bool>() ? kernels::Execution::Parallel : kernels::Execution::Serial;
    }
    key = "cells";
    if (j.contains(key)) c.cells = j.at(key).get<std::vector<GridCell>>();
    key = "train";
    if (j.contains(key)) c.train = j.at(key).get<GridCell>();
    key = "catalog";
    if (j.contains(key)) c.catalog = path(j.at(key), key);
    if (j.contains("outputs")) {
      const json& o = j.at("outputs");
      only_keys(o, {"report_csv", "report_json", "artifact"}, "outputs.");
      if (o.contains("report_csv")) c.report_csv = path(o.at("report_csv"), "outputs.report_csv");
      if (o.contains("report_json")) c.report_json = path(o.at("report_json"), "outputs.report_json");
      if (o.contains("artifact")) c.artifact = path(o.at("artifact"), "outputs.artifact");
    }
    if (j.contains("serve")) {
      const json& s = j.at("serve");
      only_keys(s, {"host", "port"}, "serve.");
      key = "serve.host";
      if (s.contains("host")) c.host = s.at("host").get<std::string>();
      key = "serve.port";
      if (s.contains("port")) c.port = s.at("port").get<int>();
      if (c.port < 0 || c.port > 65535) throw ConfigError("config key 'serve.port' out of range");
    }
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  } catch (const ConfigError& e) {
    if (std::string(e.what()).find("config key") != std::string::npos) throw;
    throw ConfigError("config key '" + key + "': " + e.what());
  }
  if (c.cells.empty()) throw ConfigError("config key 'cells' must list at least one cell");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_run_config(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace ads
