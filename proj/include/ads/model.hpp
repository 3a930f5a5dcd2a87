#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ads/table.hpp"
#include "json.hpp"

namespace ads {

enum class Method {
  NaiveBayes,
  AODE,
  BayesNetK2,
  Tree,
  RandomForest,
  LogReg,
  KNN,
  MLP,
  LinRegClassifier,
  Ensemble,
  Vote,
};

// Identifier used in configs and artifacts ("naive_bayes", "k2", ...).
std::string to_string(Method m);
Method parse_method(const std::string& s);
// Row label used in grid reports.
std::string display_name(Method m);
bool requires_discrete(Method m);

struct ModelSpec {
  Method method = Method::NaiveBayes;
  // Complete after make_spec: every key the method accepts, defaults filled.
  std::map<std::string, double> hyperparams;

  double param(const std::string& key) const;
  bool requires_discrete() const { return ads::requires_discrete(method); }
  bool operator==(const ModelSpec&) const = default;
};

// Fills defaults and rejects unknown keys or out-of-range values.
ModelSpec make_spec(Method method, const std::map<std::string, double>& overrides = {});

void to_json(nlohmann::json& j, const ModelSpec& s);
void from_json(const nlohmann::json& j, ModelSpec& s);

// Fitted predictor behind a Model.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual ClassDistribution predict(std::span<const double> row) const = 0;
  virtual nlohmann::json parameters() const = 0;
};

// A fitted classifier bound to the column layout it was trained on.
class Model {
 public:
  Model() = default;
  Model(ModelSpec spec, std::vector<Column> columns, std::shared_ptr<const Classifier> impl,
        std::uint64_t seed = 0);

  const ModelSpec& spec() const { return spec_; }
  const std::vector<Column>& columns() const { return columns_; }
  const std::string& fingerprint() const { return fingerprint_; }
  std::uint64_t seed() const { return seed_; }
  bool fitted() const { return static_cast<bool>(impl_); }

  // Rejects rows whose width differs from the training layout.
  ClassDistribution predict_proba(std::span<const double> row) const;
  // Rejects tables whose column fingerprint differs from training.
  std::vector<ClassDistribution> predict_proba(const Table& table) const;

  template <typename T>
  const T* as() const {
    return dynamic_cast<const T*>(impl_.get());
  }
  const Classifier& impl() const { return *impl_; }

 private:
  ModelSpec spec_;
  std::vector<Column> columns_;
  std::string fingerprint_;
  std::shared_ptr<const Classifier> impl_;
  std::uint64_t seed_ = 0;
};

// Fits any method, ensembles and votes included.
Model fit_model(const ModelSpec& spec, const Table& train, const Labels& labels, std::uint64_t seed = 0);

nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);

}  // namespace ads
