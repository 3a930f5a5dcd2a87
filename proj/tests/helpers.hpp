#pragma once

#include <string>
#include <vector>

#include "ads/cohort.hpp"
#include "ads/rng.hpp"
#include "ads/table.hpp"

namespace testing {

inline ads::CohortSchema small_schema() {
  using ads::FeatureKind;
  using ads::FeatureRole;
  return ads::CohortSchema(
      {
          {"id", FeatureKind::Categorical, FeatureRole::Identifier, false, {}},
          {"baseline", FeatureKind::Numeric, FeatureRole::Predictor, false, {}},
          {"x", FeatureKind::Numeric, FeatureRole::Predictor, false, {}},
          {"region", FeatureKind::Binary, FeatureRole::Predictor, false, {"Urban", "Rural"}},
          {"profile", FeatureKind::Categorical, FeatureRole::Predictor, true, {"therapy", "medical", "case"}},
          {"followup", FeatureKind::Numeric, FeatureRole::TargetRaw, false, {}},
      },
      "baseline", "followup");
}

inline ads::Record record(std::vector<ads::Value> v) { return ads::Record{std::move(v)}; }

// Random cohort over small_schema with optional missingness.
inline ads::Cohort random_cohort(std::uint64_t seed, std::size_t n, double missing = 0.1) {
  ads::Rng rng(seed);
  const auto schema = small_schema();
  std::vector<ads::Record> rows;
  auto maybe = [&](ads::Value v) { return rng.uniform() < missing ? ads::Value{ads::Missing{}} : v; };
  for (std::size_t i = 0; i < n; ++i) {
    const double b = rng.normal();
    rows.push_back(record({"r" + std::to_string(i), maybe(b), maybe(rng.uniform(-3, 3)),
                           maybe(std::string(rng.uniform() < 0.5 ? "Urban" : "Rural")),
                           maybe(std::string(std::vector<std::string>{"therapy", "medical", "case"}[rng.below(3)])),
                           maybe(b + rng.normal())}));
  }
  return ads::Cohort(schema, std::move(rows));
}

inline ads::Column num(const std::string& name) { return {name, false, {}}; }
inline ads::Column cat(const std::string& name, std::size_t levels) {
  std::vector<std::string> l;
  for (std::size_t i = 0; i < levels; ++i) l.push_back("v" + std::to_string(i));
  return {name, true, l};
}

}  // namespace testing
