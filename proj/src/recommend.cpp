#include "ads/recommend.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ads/error.hpp"

namespace ads {

using nlohmann::json;

PackageCatalog default_catalog() {
  const std::vector<std::pair<std::string, std::string>> profiles{{"therapy", "Therapy"},
                                                                  {"medical", "Medical"},
                                                                  {"case-management", "Case management"},
                                                                  {"therapy+medical", "Therapy + medical"}};
  PackageCatalog c;
  for (const auto& [profile, label] : profiles) {
    for (const std::string volume : {"low", "high"}) {
      c.packages.push_back({profile + "/" + volume,
                            label + ", " + volume + " volume",
                            {{"service_profile", profile}, {"service_volume", volume}}});
    }
  }
  return c;
}

void validate_catalog(const PackageCatalog& catalog, const CohortSchema& schema) {
  if (catalog.packages.empty()) throw ConfigError("catalog has no packages");
  std::set<std::string> ids;
  for (const auto& p : catalog.packages) {
    if (p.id.empty()) throw ConfigError("catalog package with empty id");
    if (!ids.insert(p.id).second) throw ConfigError("duplicate package id '" + p.id + "'");
    for (const auto& [field, value] : p.overrides) {
      const auto idx = schema.index_of(field);
      if (!idx) throw ConfigError("package '" + p.id + "' overrides unknown field '" + field + "'");
      if (!schema.at(*idx).service_field) {
        throw ConfigError("package '" + p.id + "' overrides non-service field '" + field + "'");
      }
      if (is_missing(value)) throw ConfigError("package '" + p.id + "' sets '" + field + "' to missing");
      if (auto err = check_value(schema.at(*idx), value)) throw ConfigError("package '" + p.id + "': " + *err);
    }
  }
}

PackageCatalog catalog_from_json(const json& j) {
  PackageCatalog c;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() != "packages") throw ConfigError("unknown key '" + it.key() + "' in catalog");
    }
    for (const auto& pj : j.at("packages")) {
      for (auto it = pj.begin(); it != pj.end(); ++it) {
        if (it.key() != "id" && it.key() != "name" && it.key() != "overrides") {
          throw ConfigError("unknown key '" + it.key() + "' in catalog package");
        }
      }
      ServicePackage p;
      p.id = pj.at("id").get<std::string>();
      p.name = pj.contains("name") ? pj.at("name").get<std::string>() : p.id;
      for (auto it = pj.at("overrides").begin(); it != pj.at("overrides").end(); ++it) {
        if (it->is_number()) p.overrides[it.key()] = it->get<double>();
        else if (it->is_string()) p.overrides[it.key()] = it->get<std::string>();
        else throw ConfigError("override '" + it.key() + "' must be a number or a string");
      }
      c.packages.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed catalog: ") + e.what());
  }
  return c;
}

json catalog_to_json(const PackageCatalog& catalog) {
  json packages = json::array();
  for (const auto& p : catalog.packages) {
    json o = json::object();
    for (const auto& [k, v] : p.overrides) {
      if (const auto* d = std::get_if<double>(&v)) o[k] = *d;
      else if (const auto* s = std::get_if<std::string>(&v)) o[k] = *s;
    }
    packages.push_back({{"id", p.id}, {"name", p.name}, {"overrides", o}});
  }
  return {{"packages", packages}};
}

PackageCatalog load_catalog(const std::filesystem::path& path, const CohortSchema& schema) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read catalog " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  PackageCatalog c = catalog_from_json(j);
  validate_catalog(c, schema);
  return c;
}

Record apply_package(const CohortSchema& schema, const Record& client, const ServicePackage& package) {
  Record r = client;
  for (const auto& [field, value] : package.overrides) r.values.at(schema.require_index(field)) = value;
  return r;
}

std::vector<Recommendation> what_if(const Scorer& score, const CohortSchema& schema, const Record& client,
                                    const PackageCatalog& catalog) {
  validate_catalog(catalog, schema);
  if (client.values.size() != schema.size()) throw SchemaError("client record width does not match schema");
  std::vector<Recommendation> out;
  for (const auto& p : catalog.packages) out.push_back({p.id, p.name, score(apply_package(schema, client, p)), 0});
  std::sort(out.begin(), out.end(), [](const Recommendation& a, const Recommendation& b) {
    return a.p_above > b.p_above || (a.p_above == b.p_above && a.package_id < b.package_id);
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

std::vector<Recommendation> what_if(const ModelArtifact& artifact, const Record& client,
                                    const PackageCatalog& catalog) {
  return what_if([&](const Record& r) { return artifact.p_above(r); }, artifact.schema, client, catalog);
}

json recommendations_to_json(const std::vector<Recommendation>& recs) {
  json out = json::array();
  for (const auto& r : recs) {
    out.push_back({{"package_id", r.package_id}, {"name", r.name}, {"p_above", r.p_above}, {"rank", r.rank}});
  }
  return out;
}

std::string recommendations_table(const std::vector<Recommendation>& recs) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-4s  %-24s  %-32s  %s\n", "Rank", "Package", "Name", "P(above)");
  out << line;
  for (const auto& r : recs) {
    std::snprintf(line, sizeof line, "%-4zu  %-24s  %-32s  %.4f\n", r.rank, r.package_id.c_str(), r.name.c_str(),
                  r.p_above);
    out << line;
  }
  return out.str();
}

}  // namespace ads
