#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ads/artifact.hpp"
#include "ads/cohort.hpp"
#include "json.hpp"

namespace ads {

struct ServicePackage {
  std::string id;
  std::string name;
  // Service field -> value; replaces the client's value outright.
  std::map<std::string, Value> overrides;
};

struct PackageCatalog {
  std::vector<ServicePackage> packages;
};

// Service Profile x Service Volume, 8 packages.
PackageCatalog default_catalog();

// Throws ConfigError unless ids are unique, the catalog is non-empty and
// every override names a service field with a valid value.
void validate_catalog(const PackageCatalog& catalog, const CohortSchema& schema);

// {"packages": [{"id", "name", "overrides": {field: value}}]}
PackageCatalog catalog_from_json(const nlohmann::json& j);
nlohmann::json catalog_to_json(const PackageCatalog& catalog);
PackageCatalog load_catalog(const std::filesystem::path& path, const CohortSchema& schema);

struct Recommendation {
  std::string package_id;
  std::string name;
  double p_above = 0.0;
  std::size_t rank = 0;
};

using Scorer = std::function<double(const Record&)>;

// Client copy with the package's overrides applied.
Record apply_package(const CohortSchema& schema, const Record& client, const ServicePackage& package);

// Ranked descending by p_above, ties by package id.
std::vector<Recommendation> what_if(const Scorer& score, const CohortSchema& schema, const Record& client,
                                    const PackageCatalog& catalog);
std::vector<Recommendation> what_if(const ModelArtifact& artifact, const Record& client,
                                    const PackageCatalog& catalog);

nlohmann::json recommendations_to_json(const std::vector<Recommendation>& recs);
std::string recommendations_table(const std::vector<Recommendation>& recs);

}  // namespace ads
