#include <algorithm>
#include <cmath>
#include <numbers>

#include "ads/error.hpp"
#include "ads/learners.hpp"
#include "common.hpp"

namespace ads {

using nlohmann::json;

using detail::check_training;

void require_all_categorical(const Table& t, const char* learner) {
  for (const auto& c : t.columns) {
    if (!c.categorical) {
      throw Error(std::string(learner) + " requires discrete inputs; column '" + c.name +
                  "' is numeric (use CAIM binning)");
    }
  }
}

NaiveBayes NaiveBayes::fit(const Table& train, const Labels& labels, const NaiveBayesParams& p) {
  check_training(train, labels);
  NaiveBayes nb;
  const std::size_t cols = train.n_cols();
  std::array<double, 2> n_class{0.0, 0.0};
  for (int y : labels) n_class[y] += 1.0;
  const double n = static_cast<double>(labels.size());
  for (int c = 0; c < 2; ++c) nb.log_prior_[c] = std::log((n_class[c] + p.alpha) / (n + 2.0 * p.alpha));

  nb.categorical_.resize(cols);
  nb.log_lik_.resize(cols);
  nb.mean_.assign(cols, {0.0, 0.0});
  nb.var_.assign(cols, {0.0, 0.0});
  for (std::size_t j = 0; j < cols; ++j) {
    const Column& col = train.columns[j];
    nb.categorical_[j] = col.categorical;
    if (col.categorical) {
      const std::size_t r = col.n_levels();
      std::array<std::vector<double>, 2> counts{std::vector<double>(r, 0.0), std::vector<double>(r, 0.0)};
      for (std::size_t i = 0; i < train.n_rows(); ++i) {
        counts[labels[i]][static_cast<std::size_t>(train.rows[i][j])] += 1.0;
      }
      for (int c = 0; c < 2; ++c) {
        auto& out = nb.log_lik_[j][c];
        out.resize(r);
        for (std::size_t v = 0; v < r; ++v) {
          out[v] = std::log((counts[c][v] + p.alpha) / (n_class[c] + static_cast<double>(r) * p.alpha));
        }
      }
    } else {
      std::array<double, 2> sum{0.0, 0.0};
      for (std::size_t i = 0; i < train.n_rows(); ++i) sum[labels[i]] += train.rows[i][j];
      for (int c = 0; c < 2; ++c) nb.mean_[j][c] = n_class[c] > 0 ? sum[c] / n_class[c] : 0.0;
      std::array<double, 2> ss{0.0, 0.0};
      for (std::size_t i = 0; i < train.n_rows(); ++i) {
        const double d = train.rows[i][j] - nb.mean_[j][labels[i]];
        ss[labels[i]] += d * d;
      }
      for (int c = 0; c < 2; ++c) {
        const double var = n_class[c] > 0 ? ss[c] / n_class[c] : 0.0;
        nb.var_[j][c] = std::max(var, p.variance_floor);
      }
    }
  }
  return nb;
}

std::array<double, 2> NaiveBayes::log_joint(std::span<const double> row) const {
  std::array<double, 2> lp = log_prior_;
  for (std::size_t j = 0; j < categorical_.size(); ++j) {
    for (int c = 0; c < 2; ++c) {
      if (categorical_[j]) {
        lp[c] += log_lik_[j][c][static_cast<std::size_t>(row[j])];
      } else {
        const double d = row[j] - mean_[j][c];
        lp[c] += -0.5 * std::log(2.0 * std::numbers::pi * var_[j][c]) - d * d / (2.0 * var_[j][c]);
      }
    }
  }
  return lp;
}

ClassDistribution NaiveBayes::predict(std::span<const double> row) const {
  const auto lp = log_joint(row);
  const double m = std::max(lp[0], lp[1]);
  return ClassDistribution::from_scores(std::exp(lp[0] - m), std::exp(lp[1] - m));
}

json NaiveBayes::parameters() const {
  json cols = json::array();
  for (std::size_t j = 0; j < categorical_.size(); ++j) {
    if (categorical_[j]) {
      cols.push_back({{"categorical", true}, {"log_lik", {log_lik_[j][0], log_lik_[j][1]}}});
    } else {
      cols.push_back({{"categorical", false},
                      {"mean", {mean_[j][0], mean_[j][1]}},
                      {"var", {var_[j][0], var_[j][1]}}});
    }
  }
  return {{"log_prior", log_prior_}, {"columns", cols}};
}

NaiveBayes NaiveBayes::from_json(const json& j) {
  NaiveBayes nb;
  nb.log_prior_ = j.at("log_prior").get<std::array<double, 2>>();
  for (const auto& c : j.at("columns")) {
    const bool cat = c.at("categorical").get<bool>();
    nb.categorical_.push_back(cat);
    if (cat) {
      nb.log_lik_.push_back({c.at("log_lik")[0].get<std::vector<double>>(),
                             c.at("log_lik")[1].get<std::vector<double>>()});
      nb.mean_.push_back({0.0, 0.0});
      nb.var_.push_back({0.0, 0.0});
    } else {
      nb.log_lik_.emplace_back();
      nb.mean_.push_back(c.at("mean").get<std::array<double, 2>>());
      nb.var_.push_back(c.at("var").get<std::array<double, 2>>());
    }
  }
  return nb;
}

Model fit_naive_bayes(const Table& train, const Labels& labels, const NaiveBayesParams& p) {
  ModelSpec spec = make_spec(Method::NaiveBayes, {{"alpha", p.alpha}, {"variance_floor", p.variance_floor}});
  return Model(spec, train.columns, std::make_shared<NaiveBayes>(NaiveBayes::fit(train, labels, p)));
}

}  // namespace ads
