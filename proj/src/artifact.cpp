#include "ads/artifact.hpp"

#include <fstream>

#include "ads/error.hpp"

namespace ads {

using nlohmann::json;

std::string schema_fingerprint(const CohortSchema& schema) { return digest(json(schema).dump()); }

namespace {

std::vector<std::size_t> selected_positions(const ModelArtifact& a) {
  const auto cols = a.fit.state.columns();
  std::vector<std::size_t> pos;
  for (const auto& name : a.fit.selected) {
    auto it = std::find_if(cols.begin(), cols.end(), [&](const Column& c) { return c.name == name; });
    if (it == cols.end()) throw SchemaError("artifact selects unknown column '" + name + "'");
    pos.push_back(static_cast<std::size_t>(it - cols.begin()));
  }
  return pos;
}

}  // namespace

ClassDistribution ModelArtifact::predict(const Record& client) const {
  if (client.values.size() != schema.size()) throw SchemaError("client record width does not match schema");
  for (std::size_t f : schema.predictor_indices()) {
    if (auto err = check_value(schema.at(f), client.values[f])) throw ValueError(*err);
  }
  const auto full = apply_preprocess(fit.state, client);
  std::vector<double> row;
  for (std::size_t p : selected_positions(*this)) row.push_back(full[p]);
  return fit.model.predict_proba(row);
}

ModelArtifact train_artifact(const Cohort& cohort, const GridCell& cell, std::uint64_t seed, TargetMode target) {
  ModelArtifact a;
  a.schema = cohort.schema();
  a.binarizer = fit_binarizer(cohort, target);
  a.cell = cell;
  a.fit = fit_fold(cohort, a.binarizer.labels(cohort), cell, seed);
  a.metadata = {{"seed", seed}, {"n_train", cohort.size()}};
  return a;
}

json artifact_to_json(const ModelArtifact& a) {
  return {{"format_version", a.format_version},
          {"schema", a.schema},
          {"schema_fingerprint", schema_fingerprint(a.schema)},
          {"binarizer", a.binarizer},
          {"cell", a.cell},
          {"preprocess", a.fit.state},
          {"selected", a.fit.selected},
          {"model", model_to_json(a.fit.model)},
          {"metadata", a.metadata}};
}

ModelArtifact artifact_from_json(const json& j) {
  try {
    ModelArtifact a;
    a.format_version = j.at("format_version").get<int>();
    if (a.format_version != kArtifactFormatVersion) {
      throw SchemaError("unsupported artifact format_version " + std::to_string(a.format_version));
    }
    a.schema = j.at("schema").get<CohortSchema>();
    if (j.at("schema_fingerprint").get<std::string>() != schema_fingerprint(a.schema)) {
      throw SchemaError("artifact schema fingerprint mismatch");
    }
    a.binarizer = j.at("binarizer").get<TargetBinarizer>();
    a.cell = j.at("cell").get<GridCell>();
    a.fit.state = preprocess_from_json(j.at("preprocess"));
    if (!(a.fit.state.schema == a.schema)) throw SchemaError("artifact preprocess schema differs from its schema");
    a.fit.selected = j.at("selected").get<std::vector<std::string>>();
    a.fit.model = model_from_json(j.at("model"));
    const auto cols = a.fit.state.columns();
    std::vector<Column> expected;
    for (std::size_t p : selected_positions(a)) expected.push_back(cols[p]);
    if (fingerprint(expected) != a.fit.model.fingerprint()) {
      throw SchemaError("artifact model columns do not match its preprocessing");
    }
    if (a.fit.model.spec() != a.cell.spec) throw SchemaError("artifact model spec differs from its cell");
    if (j.contains("metadata")) a.metadata = j.at("metadata");
    return a;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed artifact: ") + e.what());
  }
}

void save_artifact(const std::filesystem::path& path, const ModelArtifact& a) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << artifact_to_json(a).dump() << "\n";
}

ModelArtifact load_artifact(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read artifact " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return artifact_from_json(j);
}

Record record_from_json(const CohortSchema& schema, const json& j) {
  if (!j.is_object()) throw SchemaError("client record must be a JSON object");
  Record r;
  r.values.assign(schema.size(), Missing{});
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto idx = schema.index_of(it.key());
    if (!idx || schema.at(*idx).role == FeatureRole::TargetRaw) throw SchemaError("unknown field '" + it.key() + "'");
    const FeatureSpec& spec = schema.at(*idx);
    Value v;
    if (it->is_null()) v = Missing{};
    else if (it->is_number()) v = it->get<double>();
    else if (it->is_string()) v = it->get<std::string>();
    else throw ValueError("field '" + it.key() + "' must be a number or a string");
    if (auto err = check_value(spec, v)) throw ValueError(*err);
    r.values[*idx] = std::move(v);
  }
  return r;
}

}  // namespace ads
