#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ads/cohort.hpp"
#include "ads/evaluate.hpp"
#include "ads/model.hpp"
#include "ads/preprocess.hpp"
#include "json.hpp"

namespace ads {

inline constexpr int kArtifactFormatVersion = 1;

std::string schema_fingerprint(const CohortSchema& schema);

// A model ready for decision support: everything needed to turn a raw
// client record into a probability.
struct ModelArtifact {
  int format_version = kArtifactFormatVersion;
  CohortSchema schema;
  TargetBinarizer binarizer;
  GridCell cell;
  FoldFit fit;
  nlohmann::json metadata = nlohmann::json::object();

  // Validates the record, imputes missing predictors and predicts.
  ClassDistribution predict(const Record& client) const;
  double p_above(const Record& client) const { return predict(client).p_above; }
};

// Fits preprocessing, selection and the model on the whole cohort.
ModelArtifact train_artifact(const Cohort& cohort, const GridCell& cell, std::uint64_t seed,
                             TargetMode target = TargetMode::ChangeScore);

nlohmann::json artifact_to_json(const ModelArtifact& a);
// Checks the format version and every fingerprint before returning.
ModelArtifact artifact_from_json(const nlohmann::json& j);
void save_artifact(const std::filesystem::path& path, const ModelArtifact& a);
ModelArtifact load_artifact(const std::filesystem::path& path);

// Client record from a JSON object of field name -> value; absent fields
// are missing. Unknown or non-predictor fields raise SchemaError, values
// of the wrong type or undeclared categories raise ValueError.
Record record_from_json(const CohortSchema& schema, const nlohmann::json& j);

}  // namespace ads
