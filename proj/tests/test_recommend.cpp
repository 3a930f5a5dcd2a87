#include <algorithm>

#include "ads/artifact.hpp"
#include "ads/error.hpp"
#include "ads/recommend.hpp"
#include "ads/synth.hpp"
#include "doctest.h"

using namespace ads;
using nlohmann::json;

namespace {

const GenSpec& spec() {
  static const GenSpec s;
  return s;
}

json client_json(const std::string& diagnosis = "depressive") {
  return {{"baseline_carla", 3.0},   {"gender", "female"},      {"race", "white"},
          {"age", 44},               {"toms_symptom", 30.0},    {"toms_function", 25.0},
          {"mobile_crisis", "no"},   {"diagnosis", diagnosis},  {"payor", "medicaid"},
          {"location", "clinic-a"},  {"county", "davidson"},    {"region_type", "Urban"},
          {"service_profile", "medical"}, {"service_volume", "low"}};
}

Scorer oracle() {
  const auto schema = synth_schema();
  return [schema](const Record& r) { return oracle_p_above(spec(), schema, r); };
}

std::vector<std::string> ids(const std::vector<Recommendation>& recs) {
  std::vector<std::string> out;
  for (const auto& r : recs) out.push_back(r.package_id);
  return out;
}

}  // namespace

TEST_CASE("default catalog is the profile by volume cross") {
  const auto c = default_catalog();
  CHECK(c.packages.size() == 8);
  CHECK_NOTHROW(validate_catalog(c, synth_schema()));
  CHECK(c.packages[0].id == "therapy/low");
  CHECK(catalog_from_json(catalog_to_json(c)).packages.size() == 8);
}

TEST_CASE("a single-package catalog yields one ranked option") {
  const auto schema = synth_schema();
  PackageCatalog c{{default_catalog().packages[3]}};
  const auto recs = what_if(oracle(), schema, record_from_json(schema, client_json()), c);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].rank == 1);
  CHECK(recs[0].package_id == c.packages[0].id);
}

TEST_CASE("identical packages score identically and rank by id") {
  const auto schema = synth_schema();
  auto p = default_catalog().packages[0];
  auto q = p;
  p.id = "b";
  q.id = "a";
  const auto recs = what_if(oracle(), schema, record_from_json(schema, client_json()), PackageCatalog{{p, q}});
  CHECK(recs[0].p_above == recs[1].p_above);
  CHECK(ids(recs) == std::vector<std::string>{"a", "b"});
  CHECK(recs[1].rank == 2);
}

TEST_CASE("ranking is invariant to catalog order") {
  const auto schema = synth_schema();
  const auto client = record_from_json(schema, client_json("bipolar"));
  auto c = default_catalog();
  const auto base = recommendations_to_json(what_if(oracle(), schema, client, c)).dump();
  for (int k = 0; k < 5; ++k) {
    std::rotate(c.packages.begin(), c.packages.begin() + 3, c.packages.end());
    std::reverse(c.packages.begin(), c.packages.end());
    CHECK(recommendations_to_json(what_if(oracle(), schema, client, c)).dump() == base);
  }
}

TEST_CASE("packages change only service fields") {
  const auto schema = synth_schema();
  const auto client = record_from_json(schema, client_json());
  const auto copy = client;
  for (const auto& p : default_catalog().packages) {
    const auto r = apply_package(schema, client, p);
    for (std::size_t k = 0; k < schema.size(); ++k) {
      if (schema.at(k).service_field) {
        CHECK(r.values[k] == p.overrides.at(schema.at(k).name));
      } else {
        CHECK(r.values[k] == client.values[k]);
      }
    }
  }
  CHECK(client == copy);
}

TEST_CASE("under the generator high volume beats low for every profile") {
  const auto schema = synth_schema();
  const auto recs = what_if(oracle(), schema, record_from_json(schema, client_json()), default_catalog());
  auto p = [&](const std::string& id) {
    return std::find_if(recs.begin(), recs.end(), [&](const Recommendation& r) { return r.package_id == id; })->p_above;
  };
  for (const std::string prof : {"therapy", "medical", "case-management", "therapy+medical"})
    CHECK(p(prof + "/high") > p(prof + "/low"));
}

TEST_CASE("the generator's best package comes first") {
  const auto schema = synth_schema();
  CHECK(what_if(oracle(), schema, record_from_json(schema, client_json("depressive")), default_catalog())[0].package_id ==
        "therapy/high");
  CHECK(what_if(oracle(), schema, record_from_json(schema, client_json("psychotic")), default_catalog())[0].package_id ==
        "medical/high");
  CHECK(what_if(oracle(), schema, record_from_json(schema, client_json("substance")), default_catalog())[0].package_id ==
        "case-management/high");
}

TEST_CASE("catalog validation") {
  const auto schema = synth_schema();
  CHECK_THROWS_AS(validate_catalog(PackageCatalog{}, schema), ConfigError);
  auto dup = default_catalog();
  dup.packages[1].id = dup.packages[0].id;
  CHECK_THROWS_AS(validate_catalog(dup, schema), ConfigError);
  auto non_service = default_catalog();
  non_service.packages[0].overrides["diagnosis"] = std::string("anxiety");
  CHECK_THROWS_AS(validate_catalog(non_service, schema), ConfigError);
  auto bad_value = default_catalog();
  bad_value.packages[0].overrides["service_volume"] = std::string("extreme");
  CHECK_THROWS_AS(validate_catalog(bad_value, schema), ConfigError);
  json j = catalog_to_json(default_catalog());
  j["packages"][0]["price"] = 3;
  CHECK_THROWS_AS(catalog_from_json(j), ConfigError);
}

TEST_CASE("client records from JSON") {
  const auto schema = synth_schema();
  auto j = client_json();
  j.erase("race");
  const auto r = record_from_json(schema, j);
  CHECK(std::holds_alternative<Missing>(r.values[*schema.index_of("race")]));
  auto unknown = client_json();
  unknown["shoe_size"] = 9;
  CHECK_THROWS_AS(record_from_json(schema, unknown), SchemaError);
  auto target = client_json();
  target["followup_carla"] = 2.0;
  CHECK_THROWS_AS(record_from_json(schema, target), SchemaError);
  auto bad_cat = client_json();
  bad_cat["diagnosis"] = "gout";
  CHECK_THROWS_AS(record_from_json(schema, bad_cat), ValueError);
  auto bad_type = client_json();
  bad_type["age"] = "old";
  CHECK_THROWS_AS(record_from_json(schema, bad_type), ValueError);
}

TEST_CASE("artifact scoring agrees with scoring each modified record") {
  GenSpec s;
  s.n = 200;
  const auto cohort = screen(generate(s), {"baseline_carla", "followup_carla"}).cohort;
  const auto a = train_artifact(cohort, GridCell{BinningMode::BinTarget, make_spec(Method::LogReg), Selector::None}, 3);
  const auto client = record_from_json(a.schema, client_json());
  const auto catalog = default_catalog();
  const auto recs = what_if(a, client, catalog);
  for (const auto& r : recs) {
    const auto& pkg = *std::find_if(catalog.packages.begin(), catalog.packages.end(),
                                    [&](const ServicePackage& p) { return p.id == r.package_id; });
    CHECK(r.p_above == a.p_above(apply_package(a.schema, client, pkg)));
  }
  for (std::size_t i = 1; i < recs.size(); ++i) CHECK(recs[i - 1].p_above >= recs[i].p_above);
}
