#include "ads/select.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "ads/error.hpp"

namespace ads {

std::string to_string(Selector s) {
  switch (s) {
    case Selector::None: return "none";
    case Selector::Chi2: return "chi2";
    case Selector::ReliefF: return "relieff";
    case Selector::GainRatio: return "gain_ratio";
    case Selector::CfsSU: return "cfs_su";
  }
  return "?";
}

Selector parse_selector(const std::string& s) {
  for (Selector v : {Selector::None, Selector::Chi2, Selector::ReliefF, Selector::GainRatio, Selector::CfsSU}) {
    if (to_string(v) == s) return v;
  }
  throw ConfigError("unknown feature selector '" + s + "'");
}

CodedColumns code_for_scoring(const Table& t, std::size_t numeric_bins) {
  CodedColumns out;
  const std::size_t n = t.n_rows();
  for (std::size_t c = 0; c < t.n_cols(); ++c) {
    std::vector<std::size_t> codes(n);
    if (t.columns[c].categorical) {
      for (std::size_t i = 0; i < n; ++i) codes[i] = static_cast<std::size_t>(t.rows[i][c]);
      out.cardinality.push_back(t.columns[c].n_levels());
    } else {
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t.rows[a][c] < t.rows[b][c]; });
      // Tied values share the bin of their first sorted position.
      std::size_t first = 0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k > 0 && t.rows[order[k]][c] != t.rows[order[k - 1]][c]) first = k;
        codes[order[k]] = first * numeric_bins / n;
      }
      out.cardinality.push_back(numeric_bins);
    }
    out.codes.push_back(std::move(codes));
  }
  return out;
}

double entropy(const std::vector<std::size_t>& codes, std::size_t cardinality) {
  std::vector<double> counts(cardinality, 0.0);
  for (std::size_t v : codes) counts[v] += 1.0;
  const double n = static_cast<double>(codes.size());
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) h -= c / n * std::log2(c / n);
  }
  return h;
}

double conditional_entropy(const std::vector<std::size_t>& a, std::size_t card_a, const std::vector<std::size_t>& b,
                           std::size_t card_b) {
  std::vector<double> joint(card_a * card_b, 0.0), marg(card_b, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[b[i] * card_a + a[i]] += 1.0;
    marg[b[i]] += 1.0;
  }
  const double n = static_cast<double>(a.size());
  double h = 0.0;
  for (std::size_t vb = 0; vb < card_b; ++vb) {
    for (std::size_t va = 0; va < card_a; ++va) {
      const double c = joint[vb * card_a + va];
      if (c > 0.0) h -= c / n * std::log2(c / marg[vb]);
    }
  }
  return h;
}

double symmetric_uncertainty(const std::vector<std::size_t>& a, std::size_t card_a, const std::vector<std::size_t>& b,
                             std::size_t card_b) {
  const double ha = entropy(a, card_a), hb = entropy(b, card_b);
  if (ha + hb <= 0.0) return 0.0;
  const double ig = ha - conditional_entropy(a, card_a, b, card_b);
  return std::clamp(2.0 * ig / (ha + hb), 0.0, 1.0);
}

namespace {

std::vector<std::size_t> label_codes(const Labels& labels) {
  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = static_cast<std::size_t>(labels[i]);
  return out;
}

std::vector<FeatureScore> ranked(const Table& t, const std::vector<double>& scores, Selector method) {
  std::vector<FeatureScore> out;
  for (std::size_t c = 0; c < t.n_cols(); ++c) out.push_back({t.columns[c].name, scores[c], method});
  std::sort(out.begin(), out.end(), [](const FeatureScore& a, const FeatureScore& b) {
    return a.score > b.score || (a.score == b.score && a.name < b.name);
  });
  return out;
}

}  // namespace

std::vector<FeatureScore> chi2_rank(const Table& t, const Labels& labels) {
  const auto coded = code_for_scoring(t);
  const double n = static_cast<double>(labels.size());
  std::array<double, 2> class_n{0.0, 0.0};
  for (int y : labels) class_n[y] += 1.0;
  std::vector<double> scores;
  for (std::size_t c = 0; c < t.n_cols(); ++c) {
    const std::size_t r = coded.cardinality[c];
    std::vector<std::array<double, 2>> table(r, {0.0, 0.0});
    for (std::size_t i = 0; i < labels.size(); ++i) table[coded.codes[c][i]][labels[i]] += 1.0;
    double chi2 = 0.0;
    for (const auto& row : table) {
      const double rn = row[0] + row[1];
      for (int k = 0; k < 2; ++k) {
        const double expected = rn * class_n[k] / n;
        if (expected > 0.0) chi2 += (row[k] - expected) * (row[k] - expected) / expected;
      }
    }
    scores.push_back(chi2);
  }
  return ranked(t, scores, Selector::Chi2);
}

std::vector<FeatureScore> gain_ratio_rank(const Table& t, const Labels& labels) {
  const auto coded = code_for_scoring(t);
  const auto y = label_codes(labels);
  const double hy = entropy(y, 2);
  std::vector<double> scores;
  for (std::size_t c = 0; c < t.n_cols(); ++c) {
    const double split = entropy(coded.codes[c], coded.cardinality[c]);
    const double gain = hy - conditional_entropy(y, 2, coded.codes[c], coded.cardinality[c]);
    scores.push_back(split > 0.0 ? gain / split : 0.0);
  }
  return ranked(t, scores, Selector::GainRatio);
}

std::vector<double> relieff_weights(const Table& t, const Labels& labels, const ReliefParams& p,
                                    kernels::Execution exec) {
  const std::size_t n = t.n_rows(), cols = t.n_cols();
  std::vector<double> range(cols, 0.0);
  for (std::size_t c = 0; c < cols; ++c) {
    if (t.columns[c].categorical || n == 0) continue;
    double lo = t.rows[0][c], hi = lo;
    for (const auto& r : t.rows) {
      lo = std::min(lo, r[c]);
      hi = std::max(hi, r[c]);
    }
    range[c] = hi - lo;
  }
  auto diff = [&](std::size_t c, double a, double b) {
    if (t.columns[c].categorical) return a != b ? 1.0 : 0.0;
    return range[c] > 0.0 ? std::abs(a - b) / range[c] : 0.0;
  };
  std::array<double, 2> prior{0.0, 0.0};
  for (int y : labels) prior[y] += 1.0 / static_cast<double>(n);

  // Per-instance contributions are independent; they are summed in index
  // order afterwards so both execution paths agree bit for bit.
  std::vector<std::vector<double>> contrib(n, std::vector<double>(cols, 0.0));
  auto one = [&](std::size_t i) {
    std::vector<std::pair<double, std::size_t>> hits, misses;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double d = 0.0;
      for (std::size_t c = 0; c < cols; ++c) d += diff(c, t.rows[i][c], t.rows[j][c]);
      (labels[j] == labels[i] ? hits : misses).emplace_back(d, j);
    }
    auto nearest = [&](std::vector<std::pair<double, std::size_t>>& v) {
      const std::size_t k = std::min(p.k_neighbors, v.size());
      std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
      v.resize(k);
    };
    nearest(hits);
    nearest(misses);
    const double own = prior[labels[i]];
    const double miss_weight = own < 1.0 ? prior[1 - labels[i]] / (1.0 - own) : 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      double h = 0.0, m = 0.0;
      for (const auto& [_, j] : hits) h += diff(c, t.rows[i][c], t.rows[j][c]);
      for (const auto& [_, j] : misses) m += diff(c, t.rows[i][c], t.rows[j][c]);
      double w = 0.0;
      if (!hits.empty()) w -= h / static_cast<double>(hits.size());
      if (!misses.empty()) w += miss_weight * m / static_cast<double>(misses.size());
      contrib[i][c] = w;
    }
  };
  const auto ln = static_cast<long>(n);
  if (exec == kernels::Execution::Serial) {
    for (long i = 0; i < ln; ++i) one(static_cast<std::size_t>(i));
  } else {
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < ln; ++i) one(static_cast<std::size_t>(i));
  }
  std::vector<double> w(cols, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < cols; ++c) w[c] += contrib[i][c];
  }
  for (double& x : w) x /= static_cast<double>(n);
  return w;
}

std::vector<FeatureScore> relieff_rank(const Table& t, const Labels& labels, const ReliefParams& p) {
  return ranked(t, relieff_weights(t, labels, p), Selector::ReliefF);
}

double cfs_merit(const std::vector<std::size_t>& subset, const std::vector<double>& su_class,
                 const std::vector<std::vector<double>>& su_pair) {
  const double k = static_cast<double>(subset.size());
  if (subset.empty()) return 0.0;
  double rcf = 0.0;
  for (std::size_t f : subset) rcf += su_class[f];
  rcf /= k;
  double rff = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      rff += su_pair[subset[a]][subset[b]];
      ++pairs;
    }
  }
  if (pairs) rff /= static_cast<double>(pairs);
  const double denom = std::sqrt(k + k * (k - 1.0) * rff);
  return denom > 0.0 ? k * rcf / denom : 0.0;
}

FeatureSubset su_cfs_subset(const Table& t, const Labels& labels, const CfsParams& p) {
  const std::size_t cols = t.n_cols();
  FeatureSubset result;
  if (cols == 0) return result;
  const auto coded = code_for_scoring(t);
  const auto y = label_codes(labels);
  std::vector<double> su_class(cols);
  std::vector<std::vector<double>> su_pair(cols, std::vector<double>(cols, 1.0));
  for (std::size_t a = 0; a < cols; ++a) {
    su_class[a] = symmetric_uncertainty(coded.codes[a], coded.cardinality[a], y, 2);
    for (std::size_t b = a + 1; b < cols; ++b) {
      su_pair[a][b] = su_pair[b][a] =
          symmetric_uncertainty(coded.codes[a], coded.cardinality[a], coded.codes[b], coded.cardinality[b]);
    }
  }

  struct State {
    std::vector<std::size_t> subset;
    double merit;
    std::size_t order;
  };
  auto worse = [](const State& a, const State& b) {
    return a.merit < b.merit || (a.merit == b.merit && a.order > b.order);
  };
  std::vector<State> open{{{}, 0.0, 0}};
  std::set<std::vector<std::size_t>> seen{{}};
  std::size_t counter = 1;
  std::vector<std::size_t> best;
  double best_merit = -1.0;
  std::size_t stale = 0;
  while (!open.empty() && stale < p.stop_after) {
    auto it = std::max_element(open.begin(), open.end(), worse);
    State cur = std::move(*it);
    open.erase(it);
    ++result.expansions;
    bool improved = false;
    for (std::size_t f = 0; f < cols; ++f) {
      if (std::find(cur.subset.begin(), cur.subset.end(), f) != cur.subset.end()) continue;
      auto next = cur.subset;
      next.insert(std::upper_bound(next.begin(), next.end(), f), f);
      if (!seen.insert(next).second) continue;
      const double m = cfs_merit(next, su_class, su_pair);
      if (m > best_merit) {
        best_merit = m;
        best = next;
        improved = true;
      }
      open.push_back({std::move(next), m, counter++});
    }
    stale = improved ? 0 : stale + 1;
  }
  for (std::size_t f : best) result.selected.push_back(t.columns[f].name);
  result.merit = best_merit;
  return result;
}

std::vector<std::string> select_features(Selector s, const Table& t, const Labels& labels) {
  std::vector<std::string> names;
  if (s == Selector::None) {
    for (const auto& c : t.columns) names.push_back(c.name);
    return names;
  }
  if (s == Selector::CfsSU) return su_cfs_subset(t, labels).selected;
  std::vector<FeatureScore> scores;
  if (s == Selector::Chi2) scores = chi2_rank(t, labels);
  else if (s == Selector::GainRatio) scores = gain_ratio_rank(t, labels);
  else scores = relieff_rank(t, labels);
  const std::size_t keep = (t.n_cols() + 1) / 2;
  std::set<std::string> kept;
  for (std::size_t i = 0; i < keep && i < scores.size(); ++i) kept.insert(scores[i].name);
  for (const auto& c : t.columns) {
    if (kept.count(c.name)) names.push_back(c.name);
  }
  return names;
}

}  // namespace ads
