#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "ads/learners.hpp"
#include "common.hpp"

namespace ads {

using nlohmann::json;

namespace {

std::size_t config_index(const std::vector<std::size_t>& row, const std::vector<std::size_t>& parents,
                         const std::vector<std::size_t>& cardinality) {
  std::size_t idx = 0;
  for (std::size_t p : parents) idx = idx * cardinality[p] + row[p];
  return idx;
}

}  // namespace

double k2_log_score(const std::vector<std::vector<std::size_t>>& data,
                    const std::vector<std::size_t>& cardinality, std::size_t node,
                    const std::vector<std::size_t>& parents) {
  const std::size_t r = cardinality[node];
  std::unordered_map<std::size_t, std::vector<double>> counts;
  for (const auto& row : data) {
    auto& c = counts[config_index(row, parents, cardinality)];
    if (c.empty()) c.assign(r, 0.0);
    c[row[node]] += 1.0;
  }
  // Unobserved parent configurations contribute zero.
  double score = 0.0;
  const double lr = std::lgamma(static_cast<double>(r));
  for (const auto& [_, c] : counts) {
    double nij = 0.0;
    for (double v : c) {
      nij += v;
      score += std::lgamma(v + 1.0);
    }
    score += lr - std::lgamma(nij + static_cast<double>(r));
  }
  return score;
}

BayesNetK2 BayesNetK2::fit(const Table& train, const Labels& labels, const K2Params& p) {
  detail::check_training(train, labels);
  require_all_categorical(train, "Bayes Net K2");
  const std::size_t n_nodes = train.n_cols() + 1;
  std::vector<std::size_t> card(n_nodes);
  card[0] = 2;
  for (std::size_t j = 0; j < train.n_cols(); ++j) card[j + 1] = train.columns[j].n_levels();

  std::vector<std::vector<std::size_t>> data(train.n_rows(), std::vector<std::size_t>(n_nodes));
  for (std::size_t i = 0; i < train.n_rows(); ++i) {
    data[i][0] = static_cast<std::size_t>(labels[i]);
    for (std::size_t j = 0; j < train.n_cols(); ++j) data[i][j + 1] = static_cast<std::size_t>(train.rows[i][j]);
  }

  BayesNetK2 net;
  net.alpha_ = p.alpha;
  net.nodes_.resize(n_nodes);
  for (std::size_t node = 0; node < n_nodes; ++node) {
    std::vector<std::size_t> parents;
    double current = k2_log_score(data, card, node, parents);
    while (parents.size() < p.max_parents) {
      double best = current;
      std::size_t best_parent = node;
      for (std::size_t cand = 0; cand < node; ++cand) {
        if (std::find(parents.begin(), parents.end(), cand) != parents.end()) continue;
        auto trial = parents;
        trial.push_back(cand);
        const double s = k2_log_score(data, card, node, trial);
        if (s > best) {
          best = s;
          best_parent = cand;
        }
      }
      if (best_parent == node) break;
      parents.push_back(best_parent);
      current = best;
    }

    Node& nd = net.nodes_[node];
    nd.cardinality = card[node];
    nd.parents = parents;
    std::size_t configs = 1;
    for (std::size_t pa : parents) configs *= card[pa];
    nd.counts.assign(configs * card[node], 0.0);
    for (const auto& row : data) nd.counts[config_index(row, parents, card) * card[node] + row[node]] += 1.0;
  }
  return net;
}

double BayesNetK2::log_cpt(std::size_t node, std::span<const std::size_t> assignment) const {
  const Node& nd = nodes_[node];
  std::size_t cfg = 0;
  for (std::size_t pa : nd.parents) cfg = cfg * nodes_[pa].cardinality + assignment[pa];
  const double* row = nd.counts.data() + cfg * nd.cardinality;
  double nij = 0.0;
  for (std::size_t k = 0; k < nd.cardinality; ++k) nij += row[k];
  return std::log((row[assignment[node]] + alpha_) / (nij + static_cast<double>(nd.cardinality) * alpha_));
}

ClassDistribution BayesNetK2::predict(std::span<const double> row) const {
  std::vector<std::size_t> assignment(nodes_.size());
  for (std::size_t j = 1; j < nodes_.size(); ++j) assignment[j] = static_cast<std::size_t>(row[j - 1]);
  std::array<double, 2> lp{};
  for (std::size_t y = 0; y < 2; ++y) {
    assignment[0] = y;
    lp[y] = log_cpt(0, assignment);
    for (std::size_t node = 1; node < nodes_.size(); ++node) {
      const auto& pa = nodes_[node].parents;
      if (std::find(pa.begin(), pa.end(), 0) != pa.end()) lp[y] += log_cpt(node, assignment);
    }
  }
  const double m = std::max(lp[0], lp[1]);
  return ClassDistribution::from_scores(std::exp(lp[0] - m), std::exp(lp[1] - m));
}

json BayesNetK2::parameters() const {
  json nodes = json::array();
  for (const auto& nd : nodes_) {
    nodes.push_back({{"cardinality", nd.cardinality}, {"parents", nd.parents}, {"counts", nd.counts}});
  }
  return {{"alpha", alpha_}, {"nodes", nodes}};
}

BayesNetK2 BayesNetK2::from_json(const json& j) {
  BayesNetK2 net;
  net.alpha_ = j.at("alpha").get<double>();
  for (const auto& jn : j.at("nodes")) {
    Node nd;
    nd.cardinality = jn.at("cardinality").get<std::size_t>();
    nd.parents = jn.at("parents").get<std::vector<std::size_t>>();
    nd.counts = jn.at("counts").get<std::vector<double>>();
    net.nodes_.push_back(std::move(nd));
  }
  return net;
}

Model fit_bayesnet_k2(const Table& train, const Labels& labels, const K2Params& p) {
  ModelSpec spec =
      make_spec(Method::BayesNetK2, {{"max_parents", static_cast<double>(p.max_parents)}, {"alpha", p.alpha}});
  return Model(spec, train.columns, std::make_shared<BayesNetK2>(BayesNetK2::fit(train, labels, p)));
}

}  // namespace ads
