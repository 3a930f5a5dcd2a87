#include "ads/model.hpp"

#include <cmath>

#include "ads/combine.hpp"
#include "ads/error.hpp"
#include "ads/learners.hpp"

namespace ads {

using nlohmann::json;

namespace {

struct MethodInfo {
  Method method;
  const char* id;
  const char* display;
  bool discrete;
  std::map<std::string, double> defaults;
};

const std::vector<MethodInfo>& registry() {
  static const std::vector<MethodInfo> info{
      {Method::NaiveBayes, "naive_bayes", "Naive Bayes", false, {{"alpha", 1.0}, {"variance_floor", 1e-6}}},
      {Method::AODE, "aode", "AODE", true, {{"freq_limit", 1.0}, {"alpha", 1.0}}},
      {Method::BayesNetK2, "k2", "Bayes Net - K2", true, {{"max_parents", 3.0}, {"alpha", 0.5}}},
      {Method::Tree, "tree", "C4.5 Tree", false, {{"min_leaf", 2.0}, {"prune_cf", 0.25}, {"prune", 1.0}}},
      {Method::RandomForest, "random_forest", "Random Forest", false,
       {{"n_trees", 10.0}, {"features_per_split", 0.0}, {"bootstrap", 1.0}}},
      {Method::LogReg, "logreg", "Log Regression", false, {{"ridge", 1e-8}, {"tol", 1e-8}, {"max_iter", 200.0}}},
      {Method::KNN, "knn", "K-Nearest Neighbor", false, {{"k", 5.0}}},
      {Method::MLP, "mlp", "MP Neural Net", false,
       {{"hidden", 0.0}, {"learning_rate", 0.3}, {"momentum", 0.2}, {"epochs", 500.0}, {"decay", 1.0}}},
      {Method::LinRegClassifier, "linreg", "Classif via Linear Reg", false, {{"ridge", 1e-8}}},
      {Method::Ensemble, "ensemble", "Ensemble", false, {{"max_iters", 50.0}, {"hillclimb_fraction", 0.2}}},
      {Method::Vote, "vote", "Vote", false, {}},
  };
  return info;
}

const MethodInfo& info_for(Method m) {
  for (const auto& i : registry()) {
    if (i.method == m) return i;
  }
  throw Error("unregistered method");
}

bool is_count(const std::string& key) {
  return key == "freq_limit" || key == "max_parents" || key == "min_leaf" || key == "n_trees" ||
         key == "features_per_split" || key == "max_iter" || key == "k" || key == "hidden" || key == "epochs" ||
         key == "max_iters";
}

bool is_flag(const std::string& key) { return key == "prune" || key == "bootstrap" || key == "decay"; }

void validate_param(Method m, const std::string& key, double v) {
  const std::string where = "hyperparameter '" + key + "' of " + to_string(m);
  if (!std::isfinite(v)) throw ConfigError(where + " is not finite");
  if (is_flag(key) && v != 0.0 && v != 1.0) throw ConfigError(where + " must be 0 or 1");
  if (is_count(key) && (v < 0.0 || v != std::floor(v))) throw ConfigError(where + " must be a non-negative integer");
  if ((key == "k" || key == "n_trees" || key == "epochs" || key == "max_iters" || key == "min_leaf") && v < 1.0) {
    throw ConfigError(where + " must be at least 1");
  }
  if ((key == "alpha" || key == "ridge" || key == "tol" || key == "variance_floor" || key == "learning_rate" ||
       key == "momentum") &&
      v < 0.0) {
    throw ConfigError(where + " must be non-negative");
  }
  if (key == "prune_cf" && (v <= 0.0 || v > 0.5)) throw ConfigError(where + " must be in (0, 0.5]");
  if (key == "hillclimb_fraction" && (v <= 0.0 || v >= 1.0)) throw ConfigError(where + " must be in (0, 1)");
}

std::size_t as_count(double v) { return static_cast<std::size_t>(v); }

}  // namespace

std::string to_string(Method m) { return info_for(m).id; }

Method parse_method(const std::string& s) {
  for (const auto& i : registry()) {
    if (s == i.id || s == i.display) return i.method;
  }
  throw ConfigError("unknown method '" + s + "'");
}

std::string display_name(Method m) { return info_for(m).display; }

bool requires_discrete(Method m) { return info_for(m).discrete; }

double ModelSpec::param(const std::string& key) const {
  auto it = hyperparams.find(key);
  if (it == hyperparams.end()) throw ConfigError("method " + to_string(method) + " has no hyperparameter '" + key + "'");
  return it->second;
}

ModelSpec make_spec(Method method, const std::map<std::string, double>& overrides) {
  const auto& info = info_for(method);
  ModelSpec s;
  s.method = method;
  s.hyperparams = info.defaults;
  for (const auto& [k, v] : overrides) {
    if (!info.defaults.count(k)) throw ConfigError("unknown hyperparameter '" + k + "' for " + info.id);
    validate_param(method, k, v);
    s.hyperparams[k] = v;
  }
  return s;
}

void to_json(json& j, const ModelSpec& s) {
  j = json{{"method", to_string(s.method)}, {"hyperparams", s.hyperparams}};
}

void from_json(const json& j, ModelSpec& s) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "method" && it.key() != "hyperparams") throw ConfigError("unknown key '" + it.key() + "' in model spec");
  }
  std::map<std::string, double> hp;
  if (j.contains("hyperparams")) hp = j.at("hyperparams").get<std::map<std::string, double>>();
  s = make_spec(parse_method(j.at("method").get<std::string>()), hp);
}

Model::Model(ModelSpec spec, std::vector<Column> columns, std::shared_ptr<const Classifier> impl, std::uint64_t seed)
    : spec_(std::move(spec)),
      columns_(std::move(columns)),
      fingerprint_(ads::fingerprint(columns_)),
      impl_(std::move(impl)),
      seed_(seed) {}

ClassDistribution Model::predict_proba(std::span<const double> row) const {
  if (!impl_) throw Error("model is not fitted");
  if (row.size() != columns_.size()) {
    throw SchemaError("row has " + std::to_string(row.size()) + " columns, model expects " +
                      std::to_string(columns_.size()));
  }
  return impl_->predict(row);
}

std::vector<ClassDistribution> Model::predict_proba(const Table& table) const {
  if (ads::fingerprint(table.columns) != fingerprint_) {
    throw SchemaError("table columns do not match the model's training layout");
  }
  std::vector<ClassDistribution> out;
  out.reserve(table.n_rows());
  for (const auto& r : table.rows) out.push_back(predict_proba(r));
  return out;
}

Model fit_model(const ModelSpec& spec, const Table& train, const Labels& labels, std::uint64_t seed) {
  const auto& h = spec.hyperparams;
  auto p = [&](const char* k) { return h.at(k); };
  if (spec.requires_discrete()) require_all_categorical(train, display_name(spec.method).c_str());
  switch (spec.method) {
    case Method::NaiveBayes:
      return fit_naive_bayes(train, labels, {p("alpha"), p("variance_floor")});
    case Method::AODE:
      return fit_aode(train, labels, {as_count(p("freq_limit")), p("alpha")});
    case Method::BayesNetK2:
      return fit_bayesnet_k2(train, labels, {as_count(p("max_parents")), p("alpha")});
    case Method::Tree:
      return fit_tree(train, labels, {as_count(p("min_leaf")), p("prune_cf"), p("prune") != 0.0, 0});
    case Method::RandomForest:
      return fit_random_forest(train, labels,
                               {as_count(p("n_trees")), as_count(p("features_per_split")), p("bootstrap") != 0.0},
                               seed);
    case Method::LogReg:
      return fit_logreg(train, labels, {p("ridge"), p("tol"), as_count(p("max_iter"))});
    case Method::KNN:
      return fit_knn(train, labels, {as_count(p("k"))});
    case Method::MLP:
      return fit_mlp(train, labels,
                     {as_count(p("hidden")), p("learning_rate"), p("momentum"), as_count(p("epochs")),
                      p("decay") != 0.0},
                     seed);
    case Method::LinRegClassifier:
      return fit_linreg_classifier(train, labels, {p("ridge")});
    case Method::Ensemble:
      return fit_ensemble(train, labels, {as_count(p("max_iters")), p("hillclimb_fraction")}, seed);
    case Method::Vote:
      return fit_vote(train, labels, seed);
  }
  throw Error("unhandled method");
}

json model_to_json(const Model& model) {
  return json{{"spec", model.spec()},
              {"seed", model.seed()},
              {"columns", model.columns()},
              {"fingerprint", model.fingerprint()},
              {"parameters", model.impl().parameters()}};
}

Model model_from_json(const json& j) {
  const ModelSpec spec = j.at("spec").get<ModelSpec>();
  const auto columns = j.at("columns").get<std::vector<Column>>();
  const auto seed = j.at("seed").get<std::uint64_t>();
  const json& params = j.at("parameters");
  std::shared_ptr<const Classifier> impl;
  switch (spec.method) {
    case Method::NaiveBayes: impl = std::make_shared<NaiveBayes>(NaiveBayes::from_json(params)); break;
    case Method::AODE: impl = std::make_shared<Aode>(Aode::from_json(params)); break;
    case Method::BayesNetK2: impl = std::make_shared<BayesNetK2>(BayesNetK2::from_json(params)); break;
    case Method::Tree: impl = std::make_shared<DecisionTree>(DecisionTree::from_json(params)); break;
    case Method::RandomForest: impl = std::make_shared<RandomForest>(RandomForest::from_json(params)); break;
    case Method::LogReg:
      impl = std::make_shared<LogisticRegression>(LogisticRegression::from_json(params, columns));
      break;
    case Method::KNN: impl = std::make_shared<Knn>(Knn::from_json(params)); break;
    case Method::MLP: impl = std::make_shared<Mlp>(Mlp::from_json(params, columns)); break;
    case Method::LinRegClassifier:
      impl = std::make_shared<LinRegClassifier>(LinRegClassifier::from_json(params, columns));
      break;
    case Method::Ensemble: impl = std::make_shared<EnsembleModel>(EnsembleModel::from_json(params)); break;
    case Method::Vote: impl = std::make_shared<VoteModel>(VoteModel::from_json(params)); break;
  }
  Model m(spec, columns, std::move(impl), seed);
  if (j.contains("fingerprint") && j.at("fingerprint").get<std::string>() != m.fingerprint()) {
    throw SchemaError("model fingerprint does not match its columns");
  }
  return m;
}

}  // namespace ads
