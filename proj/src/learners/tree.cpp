#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "ads/learners.hpp"
#include "ads/rng.hpp"
#include "common.hpp"

namespace ads {

using nlohmann::json;

namespace {

double entropy2(double a, double b) {
  const double n = a + b;
  if (n <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : {a, b}) {
    if (c > 0.0) h -= c / n * std::log2(c / n);
  }
  return h;
}

double entropy_of(const std::vector<double>& weights) {
  const double n = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (n <= 0.0) return 0.0;
  double h = 0.0;
  for (double w : weights) {
    if (w > 0.0) h -= w / n * std::log2(w / n);
  }
  return h;
}

struct Candidate {
  int column = -1;
  bool numeric = false;
  double threshold = 0.0;
  double gain = 0.0;
  double ratio = 0.0;
};

class Builder {
 public:
  Builder(const Table& t, const Labels& y, const TreeParams& p, Rng* rng)
      : t_(t), y_(y), p_(p), rng_(rng) {}

  std::vector<DecisionTree::Node> build(std::vector<std::size_t> idx) {
    grow(std::move(idx));
    return std::move(nodes_);
  }

 private:
  std::array<double, 2> counts(const std::vector<std::size_t>& idx) const {
    std::array<double, 2> c{0.0, 0.0};
    for (std::size_t i : idx) c[y_[i]] += 1.0;
    return c;
  }

  std::optional<Candidate> evaluate_categorical(std::size_t col, const std::vector<std::size_t>& idx,
                                                double parent_h) const {
    const std::size_t r = t_.columns[col].n_levels();
    std::vector<std::array<double, 2>> branch(r, {0.0, 0.0});
    for (std::size_t i : idx) branch[static_cast<std::size_t>(t_.rows[i][col])][y_[i]] += 1.0;
    std::size_t big_enough = 0;
    double child_h = 0.0;
    std::vector<double> sizes;
    const double n = static_cast<double>(idx.size());
    for (const auto& b : branch) {
      const double m = b[0] + b[1];
      if (m >= static_cast<double>(p_.min_leaf)) ++big_enough;
      child_h += m / n * entropy2(b[0], b[1]);
      sizes.push_back(m);
    }
    if (big_enough < 2) return std::nullopt;
    Candidate c;
    c.column = static_cast<int>(col);
    c.gain = parent_h - child_h;
    const double split_info = entropy_of(sizes);
    c.ratio = split_info > 0.0 ? c.gain / split_info : 0.0;
    return c;
  }

  std::optional<Candidate> evaluate_numeric(std::size_t col, const std::vector<std::size_t>& idx,
                                            double parent_h) const {
    std::vector<std::size_t> order = idx;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return t_.rows[a][col] < t_.rows[b][col]; });
    const auto total = counts(idx);
    const double n = static_cast<double>(idx.size());
    std::array<double, 2> left{0.0, 0.0};
    std::optional<Candidate> best;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      left[y_[order[k]]] += 1.0;
      const double xa = t_.rows[order[k]][col];
      const double xb = t_.rows[order[k + 1]][col];
      if (xa == xb) continue;
      const double nl = static_cast<double>(k + 1);
      const double nr = n - nl;
      if (nl < static_cast<double>(p_.min_leaf) || nr < static_cast<double>(p_.min_leaf)) continue;
      const double gain = parent_h - nl / n * entropy2(left[0], left[1]) -
                          nr / n * entropy2(total[0] - left[0], total[1] - left[1]);
      if (!best || gain > best->gain) {
        Candidate c;
        c.column = static_cast<int>(col);
        c.numeric = true;
        c.threshold = 0.5 * (xa + xb);
        c.gain = gain;
        const double split_info = entropy2(nl, nr);
        c.ratio = split_info > 0.0 ? gain / split_info : 0.0;
        best = c;
      }
    }
    return best;
  }

  std::vector<std::size_t> candidate_columns() {
    std::vector<std::size_t> cols(t_.n_cols());
    std::iota(cols.begin(), cols.end(), 0);
    if (p_.features_per_split == 0 || p_.features_per_split >= cols.size() || rng_ == nullptr) return cols;
    rng_->shuffle(cols);
    cols.resize(p_.features_per_split);
    std::sort(cols.begin(), cols.end());
    return cols;
  }

  std::size_t make_leaf(const std::array<double, 2>& c) {
    DecisionTree::Node leaf;
    leaf.counts = c;
    nodes_.push_back(std::move(leaf));
    return nodes_.size() - 1;
  }

  std::size_t grow(std::vector<std::size_t> idx) {
    const auto c = counts(idx);
    const double n = c[0] + c[1];
    if (c[0] == 0.0 || c[1] == 0.0 || n < 2.0 * static_cast<double>(p_.min_leaf)) return make_leaf(c);

    const double parent_h = entropy2(c[0], c[1]);
    std::vector<Candidate> cands;
    for (std::size_t col : candidate_columns()) {
      auto cand = t_.columns[col].categorical ? evaluate_categorical(col, idx, parent_h)
                                              : evaluate_numeric(col, idx, parent_h);
      if (cand && cand->gain >= -1e-12) cands.push_back(*cand);
    }
    if (cands.empty()) return make_leaf(c);

    // Only tests with at least average gain compete on gain ratio.
    double avg = 0.0;
    for (const auto& cd : cands) avg += cd.gain;
    avg /= static_cast<double>(cands.size());
    const Candidate* best = nullptr;
    for (const auto& cd : cands) {
      if (cd.gain < avg - 1e-12) continue;
      if (!best || cd.ratio > best->ratio) best = &cd;
    }
    const Candidate chosen = *best;

    const std::size_t self = make_leaf(c);
    nodes_[self].column = chosen.column;
    nodes_[self].numeric = chosen.numeric;
    nodes_[self].threshold = chosen.threshold;
    const auto col = static_cast<std::size_t>(chosen.column);
    const std::size_t branches = chosen.numeric ? 2 : t_.columns[col].n_levels();
    std::vector<std::vector<std::size_t>> parts(branches);
    for (std::size_t i : idx) {
      const double x = t_.rows[i][col];
      const std::size_t b = chosen.numeric ? (x <= chosen.threshold ? 0 : 1) : static_cast<std::size_t>(x);
      parts[b].push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    std::vector<std::size_t> children;
    for (auto& part : parts) {
      // Empty branches inherit the parent's class counts.
      children.push_back(part.empty() ? make_leaf(c) : grow(std::move(part)));
    }
    nodes_[self].children = std::move(children);
    return self;
  }

  const Table& t_;
  const Labels& y_;
  const TreeParams& p_;
  Rng* rng_;
  std::vector<DecisionTree::Node> nodes_;
};

double leaf_errors(const std::array<double, 2>& c) { return std::min(c[0], c[1]); }

// Returns the estimated errors of the (possibly pruned) subtree.
double prune_node(std::vector<DecisionTree::Node>& nodes, std::size_t id, double cf) {
  auto& node = nodes[id];
  const double n = node.counts[0] + node.counts[1];
  const double e = leaf_errors(node.counts);
  const double as_leaf = e + pessimistic_extra_errors(n, e, cf);
  if (node.children.empty()) return as_leaf;
  double subtree = 0.0;
  const auto children = node.children;
  for (std::size_t ch : children) subtree += prune_node(nodes, ch, cf);
  if (as_leaf <= subtree + 0.1) {
    nodes[id].children.clear();
    nodes[id].column = -1;
    return as_leaf;
  }
  return subtree;
}

// Drops nodes no longer reachable from the root and renumbers.
std::vector<DecisionTree::Node> compact(const std::vector<DecisionTree::Node>& nodes) {
  std::vector<DecisionTree::Node> out;
  std::vector<std::pair<std::size_t, std::size_t>> stack;  // (old id, new id)
  out.push_back(nodes[0]);
  stack.emplace_back(0, 0);
  while (!stack.empty()) {
    auto [old_id, new_id] = stack.back();
    stack.pop_back();
    std::vector<std::size_t> kids;
    for (std::size_t ch : nodes[old_id].children) {
      out.push_back(nodes[ch]);
      kids.push_back(out.size() - 1);
      stack.emplace_back(ch, out.size() - 1);
    }
    out[new_id].children = kids;
  }
  return out;
}

}  // namespace

double pessimistic_extra_errors(double n, double e, double cf) {
  if (n <= 0.0) return 0.0;
  if (e < 1.0) {
    const double base = n * (1.0 - std::pow(cf, 1.0 / n));
    if (e == 0.0) return base;
    return base + e * (pessimistic_extra_errors(n, 1.0, cf) - base);
  }
  if (e + 0.5 >= n) return std::max(n - e, 0.0);
  static const boost::math::normal standard;
  const double z = boost::math::quantile(standard, 1.0 - cf);
  const double f = (e + 0.5) / n;
  const double r =
      (f + z * z / (2.0 * n) + z * std::sqrt(f / n - f * f / n + z * z / (4.0 * n * n))) / (1.0 + z * z / n);
  return r * n - e;
}

DecisionTree DecisionTree::fit(const Table& train, const Labels& labels, const TreeParams& p, Rng* rng) {
  detail::check_training(train, labels);
  std::vector<std::size_t> idx(train.n_rows());
  std::iota(idx.begin(), idx.end(), 0);
  DecisionTree tree;
  tree.nodes_ = Builder(train, labels, p, rng).build(std::move(idx));
  if (p.prune) {
    prune_node(tree.nodes_, 0, p.prune_cf);
    tree.nodes_ = compact(tree.nodes_);
  }
  return tree;
}

const DecisionTree::Node& DecisionTree::leaf_for(std::span<const double> row) const {
  const Node* node = &nodes_[0];
  while (!node->children.empty()) {
    const double x = row[static_cast<std::size_t>(node->column)];
    const std::size_t b = node->numeric ? (x <= node->threshold ? 0 : 1) : static_cast<std::size_t>(x);
    node = &nodes_[node->children.at(b)];
  }
  return *node;
}

ClassDistribution DecisionTree::predict(std::span<const double> row) const {
  const auto& c = leaf_for(row).counts;
  return ClassDistribution::from_scores(c[0] + 1.0, c[1] + 1.0);
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t best = 0;
  // Children always have larger ids than their parent.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t ch : nodes_[i].children) d[ch] = d[i] + 1;
    best = std::max(best, d[i]);
  }
  return best;
}

std::size_t DecisionTree::n_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.children.empty(); }));
}

json DecisionTree::parameters() const {
  json nodes = json::array();
  for (const auto& n : nodes_) {
    json jn = {{"counts", n.counts}};
    if (!n.children.empty()) {
      jn["column"] = n.column;
      jn["numeric"] = n.numeric;
      if (n.numeric) jn["threshold"] = n.threshold;
      jn["children"] = n.children;
    }
    nodes.push_back(std::move(jn));
  }
  return {{"nodes", nodes}};
}

DecisionTree DecisionTree::from_json(const json& j) {
  DecisionTree t;
  for (const auto& jn : j.at("nodes")) {
    Node n;
    n.counts = jn.at("counts").get<std::array<double, 2>>();
    if (jn.contains("children")) {
      n.column = jn.at("column").get<int>();
      n.numeric = jn.at("numeric").get<bool>();
      if (n.numeric) n.threshold = jn.at("threshold").get<double>();
      n.children = jn.at("children").get<std::vector<std::size_t>>();
    }
    t.nodes_.push_back(std::move(n));
  }
  return t;
}

Model fit_tree(const Table& train, const Labels& labels, const TreeParams& p) {
  ModelSpec spec = make_spec(Method::Tree, {{"min_leaf", static_cast<double>(p.min_leaf)},
                                            {"prune_cf", p.prune_cf},
                                            {"prune", p.prune ? 1.0 : 0.0}});
  return Model(spec, train.columns, std::make_shared<DecisionTree>(DecisionTree::fit(train, labels, p)));
}

RandomForest RandomForest::fit(const Table& train, const Labels& labels, const ForestParams& p,
                               std::uint64_t seed) {
  detail::check_training(train, labels);
  if (p.n_trees == 0) throw Error("random forest needs at least one tree");
  RandomForest f;
  Rng rng(seed);
  TreeParams tp;
  tp.min_leaf = 1;
  tp.prune = false;
  tp.features_per_split = p.features_per_split
                              ? p.features_per_split
                              : static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(train.n_cols())))) + 1;
  for (std::size_t t = 0; t < p.n_trees; ++t) {
    Table sample;
    Labels ys;
    if (p.bootstrap) {
      std::vector<std::size_t> idx(train.n_rows());
      for (auto& i : idx) i = rng.below(train.n_rows());
      sample = train.select_rows(idx);
      for (std::size_t i : idx) ys.push_back(labels[i]);
    } else {
      sample = train;
      ys = labels;
    }
    f.trees_.push_back(DecisionTree::fit(sample, ys, tp, &rng));
  }
  return f;
}

ClassDistribution RandomForest::predict(std::span<const double> row) const {
  double above = 0.0;
  for (const auto& t : trees_) above += t.predict(row).p_above;
  return ClassDistribution::from_p_above(above / static_cast<double>(trees_.size()));
}

json RandomForest::parameters() const {
  json trees = json::array();
  for (const auto& t : trees_) trees.push_back(t.parameters());
  return {{"trees", trees}};
}

RandomForest RandomForest::from_json(const json& j) {
  RandomForest f;
  for (const auto& jt : j.at("trees")) f.trees_.push_back(DecisionTree::from_json(jt));
  return f;
}

Model fit_random_forest(const Table& train, const Labels& labels, const ForestParams& p, std::uint64_t seed) {
  ModelSpec spec = make_spec(Method::RandomForest, {{"n_trees", static_cast<double>(p.n_trees)},
                                                    {"features_per_split", static_cast<double>(p.features_per_split)},
                                                    {"bootstrap", p.bootstrap ? 1.0 : 0.0}});
  return Model(spec, train.columns, std::make_shared<RandomForest>(RandomForest::fit(train, labels, p, seed)),
               seed);
}

}  // namespace ads
