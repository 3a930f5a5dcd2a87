#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ads/model.hpp"
#include "ads/table.hpp"
#include "json.hpp"

namespace ads {

class Rng;

// ---------------------------------------------------------------------------
// Naive Bayes

struct NaiveBayesParams {
  double alpha = 1.0;
  double variance_floor = 1e-6;
};

// Add-alpha categorical likelihoods, per-class Gaussian numerics (MLE
// variance, floored), add-alpha class prior.
class NaiveBayes final : public Classifier {
 public:
  static NaiveBayes fit(const Table& train, const Labels& labels, const NaiveBayesParams& p);
  static NaiveBayes from_json(const nlohmann::json& j);

  ClassDistribution predict(std::span<const double> row) const override;
  nlohmann::json parameters() const override;

  // log P(y) + sum log P(x_j | y), one entry per class.
  std::array<double, 2> log_joint(std::span<const double> row) const;

 private:
  std::array<double, 2> log_prior_{};
  std::vector<bool> categorical_;
  // Categorical: log_lik_[col][cls][level]. Numeric: mean_/var_[col][cls].
  std::vector<std::array<std::vector<double>, 2>> log_lik_;
  std::vector<std::array<double, 2>> mean_;
  std::vector<std::array<double, 2>> var_;
};

Model fit_naive_bayes(const Table& train, const Labels& labels, const NaiveBayesParams& p = {});

// ---------------------------------------------------------------------------
// AODE

struct AodeParams {
  std::size_t freq_limit = 1;
  double alpha = 1.0;
};

// Averaged one-dependence estimators over categorical columns. The
// super-parent term P(y, x_i) is the smoothed prior times the smoothed
// conditional, so a single-column model coincides with Naive Bayes.
class Aode final : public Classifier {
 public:
  static Aode fit(const Table& train, const Labels& labels, const AodeParams& p);
  static Aode from_json(const nlohmann::json& j);

  ClassDistribution predict(std::span<const double> row) const override;
  nlohmann::json parameters() const override;

  // Unnormalised per-class sums; all zero means the Naive Bayes fallback applies.
  std::array<double, 2> joint_scores(std::span<const double> row) const;

 private:
  std::size_t pair_offset(std::size_t i, std::size_t vi, std::size_t j) const;

  AodeParams params_;
  std::vector<std::size_t> levels_;
  std::size_t n_ = 0;
  std::array<std::size_t, 2> class_count_{};
  // value_count_[i][v] = N(x_i = v); class_value_count_[i][y][v] = N(y, x_i = v)
  std::vector<std::vector<std::size_t>> value_count_;
  std::vector<std::array<std::vector<std::size_t>, 2>> class_value_count_;
  // Flattened N(y, x_i = v, x_j = w).
  std::vector<std::size_t> offsets_;
  std::array<std::vector<std::size_t>, 2> triple_count_;
};

Model fit_aode(const Table& train, const Labels& labels, const AodeParams& p = {});

// ---------------------------------------------------------------------------
// Bayesian network, K2 structure search

struct K2Params {
  std::size_t max_parents = 3;
  double alpha = 0.5;
};

// Node 0 is the class; node i > 0 is table column i - 1. The search order
// is fixed: class first, then columns in table order.
class BayesNetK2 final : public Classifier {
 public:
  struct Node {
    std::size_t cardinality = 0;
    std::vector<std::size_t> parents;
    // counts[config * cardinality + value], config in mixed radix over parents.
    std::vector<double> counts;
  };

  static BayesNetK2 fit(const Table& train, const Labels& labels, const K2Params& p);
  static BayesNetK2 from_json(const nlohmann::json& j);

  ClassDistribution predict(std::span<const double> row) const override;
  nlohmann::json parameters() const override;

  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  double log_cpt(std::size_t node, std::span<const std::size_t> assignment) const;

  double alpha_ = 0.5;
  std::vector<Node> nodes_;
};

// Cooper-Herskovits log score of one node given a parent set. `data`
// holds one row per record with the class value at position 0.
double k2_log_score(const std::vector<std::vector<std::size_t>>& data,
                    const std::vector<std::size_t>& cardinality, std::size_t node,
                    const std::vector<std::size_t>& parents);

Model fit_bayesnet_k2(const Table& train, const Labels& labels, const K2Params& p = {});

// ---------------------------------------------------------------------------
// Decision trees

struct TreeParams {
  std::size_t min_leaf = 2;
  double prune_cf = 0.25;
  bool prune = true;
  // 0 means every column is considered at each split.
  std::size_t features_per_split = 0;
};

// Gain-ratio tree: multiway splits on categoricals, binary midpoint
// thresholds on numerics, pessimistic-error subtree replacement, Laplace
// leaf estimates.
class DecisionTree final : public Classifier {
 public:
  struct Node {
    int column = -1;  // -1 for leaves
    bool numeric = false;
    double threshold = 0.0;
    std::vector<std::size_t> children;
    std::array<double, 2> counts{};
  };

  // rng may be null when features_per_split == 0.
  static DecisionTree fit(const Table& train, const Labels& labels, const TreeParams& p,
                          Rng* rng = nullptr);
  static DecisionTree from_json(const nlohmann::json& j);

  ClassDistribution predict(std::span<const double> row) const override;
  nlohmann::json parameters() const override;

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t depth() const;
  std::size_t n_leaves() const;

 private:
  const Node& leaf_for(std::span<const double> row) const;

  std::vector<Node> nodes_;
};

// Upper-confidence extra errors for a leaf with n cases and e errors.
double pessimistic_extra_errors(double n, double e, double cf);

Model fit_tree(const Table& train, const Labels& labels, const TreeParams& p = {});

struct ForestParams {
  std::size_t n_trees = 10;
  std::size_t features_per_split = 0;  // 0: floor(log2 p) + 1
  bool bootstrap = true;
};

class RandomForest final : public Classifier {
 public:
  static RandomForest fit(const Table& train, const Labels& labels, const ForestParams& p,
                          std::uint64_t seed);
  static RandomForest from_json(const nlohmann::json& j);

  ClassDistribution predict(std::span<const double> row) const override;
  nlohmann::json parameters() const override;

  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
};

Model fit_random_forest(const Table& train, const Labels& labels, const ForestParams& p = {},
                        std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Logistic regression

struct LogRegParams {
  double ridge = 1e-8;
  double tol = 1e-8;
  std::size_t max_iter = 200;
};

// Penalised negative log-likelihood sum_i [log(1+e^z_i) - y_i z_i] +
// ridge * |beta_{1..}|^2 with beta_0 the unpenalised intercept. Rows of
// `x` are already expanded (no intercept column).
double logistic_objective(const std::vector<std::vector<double>>& x, const Labels& y,
                          std::span<const double> beta, double ridge);
std::vector<double> logistic_gradient(const std::vector<std::vector<double>>& x, const Labels& y,
                                      std::span<const double> beta, double ridge);

class LogisticRegression final : public Classifier {
 public:
  static LogisticRegression fit(const Table& train, const Labels& labels, const LogRegParams& p);
  static LogisticRegression from_json(const nlohmann::json& j, const std::vector<Column>& columns);

  ClassDistribution predict(std::span<const double> row) const override;
  nlohmann::json parameters() const override;

  const std::vector<double>& coefficients() const { return beta_; }
  bool converged() const { return converged_; }
  std::size_t iterations() const { return iterations_; }

 private:
  OneHotEncoder encoder_;
  std::vector<double> beta_;
  bool converged_ = false;
  std::size_t iterations_ = 0;
};

Model fit_logreg(const Table& train, const Labels& labels, const LogRegParams& p = {});

// ---------------------------------------------------------------------------
// k nearest neighbours

struct KnnParams {
  std::size_t k = 5;
};

// Squared Euclidean over numeric columns plus 0/1 mismatch over
// categoricals; ties in distance go to the lower training index.
class Knn final : public Classifier {
 public:
  static Knn fit(const Table& train, const Labels& labels, const KnnParams& p);
  static Knn from_json(const nlohmann::json& j);

  ClassDistribution predict(std::span<const double> row) const override;
  nlohmann::json parameters() const override;

  std::vector<std::size_t> neighbours(std::span<const double> row) const;

 private:
  std::size_t k_ = 5;
  std::vector<char> categorical_;
  std::vector<double> rows_;  // row-major
  std::size_t width_ = 0;
  Labels labels_;
};

Model fit_knn(const Table& train, const Labels& labels, const KnnParams& p = {});

// ---------------------------------------------------------------------------
// Multi-layer perceptron

struct MlpParams {
  std::size_t hidden = 0;  // 0: ceil((inputs + 2) / 2)
  double learning_rate = 0.3;
  double momentum = 0.2;
  std::size_t epochs = 500;
  bool decay = true;
};

// One sigmoid hidden layer, two softmax outputs, cross-entropy. Weights
// are laid out as [hidden x (inputs+1)] then [2 x (hidden+1)], bias last
// in each row.
class MlpNetwork {
 public:
  MlpNetwork() = default;
  MlpNetwork(std::size_t inputs, std::size_t hidden);

  std::size_t inputs() const { return inputs_; }
  std::size_t hidden() const { return hidden_; }
  std::vector<double>& weights() { return w_; }
  const std::vector<double>& weights() const { return w_; }

  std::array<double, 2> forward(std::span<const double> x) const;
  // Cross-entropy of one example; accumulates its gradient into grad.
  double loss_gradient(std::span<const double> x, int y, std::span<double> grad) const;
  double loss(std::span<const double> x, int y) const;

 private:
  std::size_t inputs_ = 0;
  std::size_t hidden_ = 0;
  std::vector<double> w_;
};

class Mlp final : public Classifier {
 public:
  static Mlp fit(const Table& train, const Labels& labels, const MlpParams& p, std::uint64_t seed);
  static Mlp from_json(const nlohmann::json& j, const std::vector<Column>& columns);

  ClassDistribution predict(std::span<const double> row) const override;
  nlohmann::json parameters() const override;

  const MlpNetwork& network() const { return net_; }

 private:
  OneHotEncoder encoder_;
  MlpNetwork net_;
};

Model fit_mlp(const Table& train, const Labels& labels, const MlpParams& p = {}, std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Classification via linear regression

struct LinRegParams {
  double ridge = 1e-8;
};

// Least squares on the 0/1 class indicator; p_above is the score clipped
// to [0, 1].
class LinRegClassifier final : public Classifier {
 public:
  static LinRegClassifier fit(const Table& train, const Labels& labels, const LinRegParams& p);
  static LinRegClassifier from_json(const nlohmann::json& j, const std::vector<Column>& columns);

  ClassDistribution predict(std::span<const double> row) const override;
  nlohmann::json parameters() const override;

  const std::vector<double>& coefficients() const { return beta_; }
  double score(std::span<const double> row) const;

 private:
  OneHotEncoder encoder_;
  std::vector<double> beta_;
};

Model fit_linreg_classifier(const Table& train, const Labels& labels, const LinRegParams& p = {});

// Throws when the table has numeric columns.
void require_all_categorical(const Table& t, const char* learner);

}  // namespace ads
