#include <algorithm>
#include <cmath>
#include <set>

#include "ads/combine.hpp"
#include "ads/metrics.hpp"
#include "ads/rng.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ads;

namespace {

ClassDistribution dist(double above) { return ClassDistribution::from_scores(1.0 - above, above); }

std::vector<double> mean_scores(const std::vector<std::vector<double>>& m, const std::vector<std::size_t>& sel) {
  std::vector<double> out(m[0].size(), 0.0);
  for (auto s : sel)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += m[s][i];
  for (auto& v : out) v /= static_cast<double>(sel.size());
  return out;
}

}  // namespace

TEST_CASE("library members are base learners") {
  const auto& lib = library_methods();
  CHECK(lib.size() >= 5);
  for (auto m : lib) {
    CHECK(m != Method::Ensemble);
    CHECK(m != Method::Vote);
  }
}

TEST_CASE("ensemble selection on a four-record hand case") {
  const Labels y{1, 1, 0, 0};
  const std::vector<std::vector<double>> m{{0.9, 0.4, 0.5, 0.1}, {0.6, 0.9, 0.8, 0.2}, {0.1, 0.2, 0.9, 0.8}};
  const auto t = ensemble_select(m, y);
  CHECK(t.best_single_auc == 0.75);
  CHECK(t.selection == std::vector<std::size_t>{0, 1});
  CHECK(t.ensemble_auc == 0.875);
  CHECK(t.auc_after_step.back() == t.ensemble_auc);
}

TEST_CASE("a perfect member stops selection immediately") {
  const Labels y{1, 0, 1, 0};
  const std::vector<std::vector<double>> m{{0.4, 0.6, 0.5, 0.5}, {0.9, 0.1, 0.8, 0.2}};
  const auto t = ensemble_select(m, y);
  CHECK(t.selection == std::vector<std::size_t>{1});
  CHECK(t.ensemble_auc == 1.0);
}

TEST_CASE("selected ensemble never scores below its best member on the hillclimb set") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 20 + rng.below(60), members = 2 + rng.below(6);
    Labels y;
    for (std::size_t i = 0; i < n; ++i) y.push_back(i % 2);
    std::vector<std::vector<double>> m(members, std::vector<double>(n));
    for (auto& row : m) {
      const double signal = rng.uniform(-0.5, 1.5);
      for (std::size_t i = 0; i < n; ++i) row[i] = 1.0 / (1.0 + std::exp(-(rng.normal() + signal * y[i])));
    }
    const auto t = ensemble_select(m, y);
    double best = 0.0;
    for (const auto& row : m) best = std::max(best, auc(row, y));
    CHECK(t.best_single_auc == best);
    CHECK(t.ensemble_auc >= t.best_single_auc);
    CHECK(std::abs(auc(mean_scores(m, t.selection), y) - t.ensemble_auc) < 1e-12);
    for (std::size_t s = 1; s < t.auc_after_step.size(); ++s) CHECK(t.auc_after_step[s] > t.auc_after_step[s - 1]);
    CHECK(t.selection.size() <= 51);
  }
}

TEST_CASE("ensemble prediction averages with repeats") {
  const std::vector<ClassDistribution> out{dist(0.2), dist(0.8), dist(0.5)};
  const std::vector<std::size_t> sel{1, 1, 0};
  CHECK(std::abs(ensemble_predict(out, sel).p_above - 0.6) < 1e-12);
}

TEST_CASE("voting takes the single most confident member") {
  const std::vector<ClassDistribution> out{dist(0.7), dist(0.1), dist(0.8)};
  CHECK(vote_winner(out) == 1);
  CHECK(vote_predict(out).p_above == out[1].p_above);
  const std::vector<ClassDistribution> tie{dist(0.8), dist(0.2)};
  CHECK(vote_winner(tie) == 0);
  const std::vector<ClassDistribution> flat{dist(0.5), dist(0.5)};
  CHECK(vote_winner(flat) == 0);
  CHECK(vote_predict(flat).p_above == 0.5);
}

TEST_CASE("stratified split partitions each class") {
  Labels y;
  for (int i = 0; i < 100; ++i) y.push_back(i < 30);
  const auto [train, hold] = stratified_split(y, 0.2, 4);
  std::set<std::size_t> all(train.begin(), train.end());
  all.insert(hold.begin(), hold.end());
  CHECK(all.size() == 100);
  CHECK(train.size() + hold.size() == 100);
  CHECK(std::count_if(hold.begin(), hold.end(), [&](std::size_t i) { return y[i] == 1; }) == 6);
  CHECK(hold.size() == 20);
}

TEST_CASE("fitted ensemble and vote models") {
  Rng rng(5);
  Table t;
  t.columns = {testing::num("a"), testing::num("b")};
  Labels y;
  for (int i = 0; i < 150; ++i) {
    const int label = rng.uniform() < 0.5;
    t.rows.push_back({rng.normal() + label, rng.normal()});
    y.push_back(label);
  }
  const auto ens = fit_ensemble(t, y, {}, 6);
  const auto* e = ens.as<EnsembleModel>();
  REQUIRE(e != nullptr);
  CHECK(e->library().size() == library_methods().size());
  CHECK(e->composition().size() == e->trace().selection.size());
  CHECK(e->trace().ensemble_auc >= e->trace().best_single_auc);
  const auto vote = fit_vote(t, y, 6);
  REQUIRE(vote.as<VoteModel>() != nullptr);
  for (const auto& row : t.rows) {
    const auto p = ens.predict_proba(row), q = vote.predict_proba(row);
    CHECK(std::abs(p.p_above + p.p_below - 1.0) < 1e-12);
    CHECK(std::abs(q.p_above + q.p_below - 1.0) < 1e-12);
  }
}
