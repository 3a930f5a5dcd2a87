#include <algorithm>
#include <cmath>
#include <numeric>

#include "ads/rng.hpp"
#include "ads/select.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ads;

namespace {

// Columns: signal (numeric copy of the label plus jitter), label copy as a
// category, constant, and `noise` numeric noise columns.
struct Fixture {
  Table t;
  Labels y;
};

Fixture make_fixture(std::uint64_t seed, std::size_t n, std::size_t noise) {
  Rng rng(seed);
  Fixture f;
  f.t.columns = {testing::num("label_num"), testing::cat("label_cat", 2), testing::num("constant")};
  for (std::size_t k = 0; k < noise; ++k) f.t.columns.push_back(testing::num("noise" + std::to_string(k)));
  for (std::size_t i = 0; i < n; ++i) {
    const int y = rng.uniform() < 0.5;
    std::vector<double> row{static_cast<double>(y), static_cast<double>(y), 3.0};
    for (std::size_t k = 0; k < noise; ++k) row.push_back(rng.normal());
    f.t.rows.push_back(std::move(row));
    f.y.push_back(y);
  }
  return f;
}

double score_of(const std::vector<FeatureScore>& s, const std::string& name) {
  for (const auto& f : s)
    if (f.name == name) return f.score;
  FAIL("missing feature " << name);
  return 0.0;
}

Fixture permute(const Fixture& f, std::uint64_t seed) {
  std::vector<std::size_t> idx(f.y.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);
  Fixture g;
  g.t = f.t.select_rows(idx);
  for (auto i : idx) g.y.push_back(f.y[i]);
  return g;
}

}  // namespace

TEST_CASE("selector names round-trip") {
  for (auto s : {Selector::None, Selector::Chi2, Selector::ReliefF, Selector::GainRatio, Selector::CfsSU})
    CHECK(parse_selector(to_string(s)) == s);
  CHECK_THROWS(parse_selector("lasso"));
}

TEST_CASE("chi2 of a pure feature is n and of an independent feature is zero") {
  Table t;
  t.columns = {testing::cat("pure", 2), testing::cat("indep", 2)};
  Labels y;
  for (int i = 0; i < 40; ++i) {
    const int label = i % 2;
    t.rows.push_back({static_cast<double>(label), static_cast<double>((i / 2) % 2)});
    y.push_back(label);
  }
  const auto s = chi2_rank(t, y);
  CHECK(std::abs(score_of(s, "pure") - 40.0) < 1e-9);
  CHECK(std::abs(score_of(s, "indep")) < 1e-9);
  CHECK(s.front().name == "pure");
}

TEST_CASE("gain ratio on an eight-row hand case") {
  Table t;
  t.columns = {testing::cat("a", 2), testing::cat("b", 3)};
  const std::vector<double> a{0, 0, 0, 0, 1, 1, 1, 1};
  const std::vector<double> b{0, 0, 1, 1, 1, 2, 2, 2};
  const Labels y{1, 1, 1, 0, 0, 0, 0, 1};
  for (int i = 0; i < 8; ++i) t.rows.push_back({a[i], b[i]});
  const auto h = [](std::vector<double> p) {
    double s = 0;
    for (double v : p)
      if (v > 0) s -= v * std::log2(v);
    return s;
  };
  // a: halves split 3:1 and 1:3.
  const double gr_a = (1.0 - h({0.75, 0.25})) / 1.0;
  // b: {1,1}, {1,0,0}, {0,0,1} over sizes 2, 3, 3.
  const double cond_b = 2.0 / 8 * 0.0 + 3.0 / 8 * h({1.0 / 3, 2.0 / 3}) + 3.0 / 8 * h({1.0 / 3, 2.0 / 3});
  const double gr_b = (1.0 - cond_b) / h({2.0 / 8, 3.0 / 8, 3.0 / 8});
  const auto s = gain_ratio_rank(t, y);
  CHECK(std::abs(score_of(s, "a") - gr_a) < 1e-12);
  CHECK(std::abs(score_of(s, "b") - gr_b) < 1e-12);
}

TEST_CASE("entropy helpers") {
  const std::vector<std::size_t> a{0, 0, 1, 1}, b{0, 1, 0, 1};
  CHECK(std::abs(entropy(a, 2) - 1.0) < 1e-12);
  CHECK(std::abs(conditional_entropy(a, 2, a, 2)) < 1e-12);
  CHECK(std::abs(conditional_entropy(a, 2, b, 2) - 1.0) < 1e-12);
  CHECK(std::abs(symmetric_uncertainty(a, 2, a, 2) - 1.0) < 1e-12);
  CHECK(std::abs(symmetric_uncertainty(a, 2, b, 2)) < 1e-12);
}

TEST_CASE("equal-frequency coding keeps tied values together") {
  Table t;
  t.columns = {testing::num("x")};
  for (double v : {1.0, 1.0, 1.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0}) t.rows.push_back({v});
  const auto coded = code_for_scoring(t, 5);
  for (int i = 1; i < 4; ++i) CHECK(coded.codes[0][i] == coded.codes[0][0]);
  for (int i = 4; i < 10; ++i) CHECK(coded.codes[0][i] >= coded.codes[0][i - 1]);
}

TEST_CASE("relief-f weights: label copy is one, constant is zero, noise is small") {
  const auto f = make_fixture(5, 500, 4);
  const auto w = relieff_weights(f.t, f.y);
  CHECK(std::abs(w[0] - 1.0) < 1e-9);
  CHECK(std::abs(w[1] - 1.0) < 1e-9);
  CHECK(w[2] == 0.0);
  for (std::size_t k = 3; k < w.size(); ++k) CHECK(std::abs(w[k]) < 0.1);
}

TEST_CASE("relief-f serial and parallel agree exactly") {
  const auto f = make_fixture(6, 300, 5);
  CHECK(relieff_weights(f.t, f.y, {}, kernels::Execution::Serial) ==
        relieff_weights(f.t, f.y, {}, kernels::Execution::Parallel));
}

TEST_CASE("scores are invariant to row order") {
  const auto f = make_fixture(7, 200, 3);
  const auto g = permute(f, 99);
  const auto c1 = chi2_rank(f.t, f.y), c2 = chi2_rank(g.t, g.y);
  const auto g1 = gain_ratio_rank(f.t, f.y), g2 = gain_ratio_rank(g.t, g.y);
  const auto w1 = relieff_weights(f.t, f.y), w2 = relieff_weights(g.t, g.y);
  for (std::size_t c = 0; c < f.t.n_cols(); ++c) {
    const auto& name = f.t.columns[c].name;
    CHECK(std::abs(score_of(c1, name) - score_of(c2, name)) < 1e-9);
    CHECK(std::abs(score_of(g1, name) - score_of(g2, name)) < 1e-9);
    CHECK(std::abs(w1[c] - w2[c]) < 1e-9);
  }
  CHECK(su_cfs_subset(f.t, f.y).selected == su_cfs_subset(g.t, g.y).selected);
}

TEST_CASE("duplicated features score equally") {
  auto f = make_fixture(8, 200, 2);
  f.t.columns.push_back(testing::num("noise0_copy"));
  for (auto& row : f.t.rows) row.push_back(row[3]);
  const auto c = chi2_rank(f.t, f.y);
  const auto g = gain_ratio_rank(f.t, f.y);
  const auto w = relieff_weights(f.t, f.y);
  CHECK(score_of(c, "noise0") == score_of(c, "noise0_copy"));
  CHECK(score_of(g, "noise0") == score_of(g, "noise0_copy"));
  CHECK(std::abs(w[3] - w.back()) < 1e-12);
}

TEST_CASE("cfs merit of a single feature is its class SU") {
  const std::vector<double> su_class{0.37, 0.1};
  const std::vector<std::vector<double>> su_pair{{1.0, 0.2}, {0.2, 1.0}};
  CHECK(std::abs(cfs_merit({0}, su_class, su_pair) - 0.37) < 1e-12);
  const double two = 2 * 0.235 / std::sqrt(2 + 2 * 0.2);
  CHECK(std::abs(cfs_merit({0, 1}, su_class, su_pair) - two) < 1e-12);
}

TEST_CASE("cfs keeps one of a duplicated pair and drops the constant") {
  const auto f = make_fixture(9, 300, 3);
  const auto sub = su_cfs_subset(f.t, f.y);
  const auto has = [&](const std::string& n) {
    return std::find(sub.selected.begin(), sub.selected.end(), n) != sub.selected.end();
  };
  CHECK(has("label_num") != has("label_cat"));
  CHECK_FALSE(has("constant"));
  CHECK(std::abs(sub.merit - 1.0) < 1e-9);
}

TEST_CASE("cfs on a single informative column returns it with merit SU") {
  Table t;
  t.columns = {testing::cat("a", 2)};
  const Labels y{1, 1, 1, 0, 0, 0, 0, 1};
  for (double v : {0, 0, 0, 0, 1, 1, 1, 1}) t.rows.push_back({v});
  const auto coded = code_for_scoring(t);
  std::vector<std::size_t> yc(y.begin(), y.end());
  const auto sub = su_cfs_subset(t, y);
  REQUIRE(sub.selected == std::vector<std::string>{"a"});
  CHECK(std::abs(sub.merit - symmetric_uncertainty(coded.codes[0], 2, yc, 2)) < 1e-12);
}

TEST_CASE("rankers keep the top half in table order") {
  const auto f = make_fixture(10, 200, 4);  // 7 columns -> 4 kept
  for (auto s : {Selector::Chi2, Selector::ReliefF, Selector::GainRatio}) {
    const auto kept = select_features(s, f.t, f.y);
    CHECK(kept.size() == 4);
    CHECK(kept[0] == "label_num");
    CHECK(kept[1] == "label_cat");
    std::vector<std::size_t> pos;
    for (const auto& k : kept)
      for (std::size_t c = 0; c < f.t.n_cols(); ++c)
        if (f.t.columns[c].name == k) pos.push_back(c);
    CHECK(std::is_sorted(pos.begin(), pos.end()));
  }
  CHECK(select_features(Selector::None, f.t, f.y).size() == f.t.n_cols());
}
