#include <algorithm>
#include <cmath>

#include "ads/error.hpp"
#include "ads/preprocess.hpp"
#include "ads/rng.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ads;
using testing::record;
using testing::small_schema;

namespace {

// Cohort over small_schema with the given (baseline, followup) pairs.
Cohort outcomes(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<Record> rows;
  for (const auto& [b, f] : pairs) rows.push_back(record({"r", b, 0.0, std::string("Urban"), std::string("therapy"), f}));
  return Cohort(small_schema(), rows);
}

// Max caim over every subset of candidates leaving at least `min_intervals`
// intervals, plus the arg max.
std::pair<double, std::vector<double>> exhaustive_caim(const std::vector<double>& values, const Labels& labels,
                                                       std::size_t min_intervals) {
  std::vector<double> distinct = values;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<double> cand;
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) cand.push_back((distinct[i] + distinct[i + 1]) / 2.0);
  double best = -1.0;
  std::vector<double> arg;
  for (std::uint64_t mask = 0; mask < (1ULL << cand.size()); ++mask) {
    CutPoints cp;
    for (std::size_t k = 0; k < cand.size(); ++k) {
      if (mask >> k & 1) cp.boundaries.push_back(cand[k]);
    }
    if (cp.n_intervals() < min_intervals) continue;
    const double s = caim_score(interval_counts(cp, values, labels, 2));
    if (s > best + 1e-12) {
      best = s;
      arg = cp.boundaries;
    }
  }
  return {best, arg};
}

}  // namespace

TEST_CASE("binarizer threshold is the mean change") {
  const Cohort c = outcomes({{0, -2}, {0, 0}, {0, 2}, {0, 4}});
  const auto b = fit_binarizer(c);
  CHECK(b.threshold == 1.0);
  CHECK(b.labels(c) == Labels{kBelow, kBelow, kAbove, kAbove});
}

TEST_CASE("binarizer ties go above") {
  const Cohort c = outcomes({{1, 3}, {2, 4}, {5, 7}});
  const auto b = fit_binarizer(c);
  CHECK(b.threshold == 2.0);
  CHECK(b.labels(c) == Labels{kAbove, kAbove, kAbove});
  const Cohort sym = outcomes({{0, -1}, {0, 0}, {0, 1}});
  CHECK(fit_binarizer(sym).labels(sym) == Labels{kBelow, kAbove, kAbove});
}

TEST_CASE("binarizer follow-up mode and errors") {
  const Cohort c = outcomes({{10, 1}, {-10, 3}});
  const auto b = fit_binarizer(c, TargetMode::FollowUp);
  CHECK(b.threshold == 2.0);
  CHECK(b.labels(c) == Labels{kBelow, kAbove});
  CHECK_THROWS(fit_binarizer(outcomes({})));
  std::vector<Record> rows{record({"r", 1.0, 0.0, std::string("Urban"), std::string("therapy"), Missing{}})};
  CHECK_THROWS_AS(fit_binarizer(Cohort(small_schema(), rows)), SchemaError);
}

TEST_CASE("binarizer labels partition random cohorts") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Cohort c = testing::random_cohort(seed, 50, 0.0);
    const Labels y = fit_binarizer(c).labels(c);
    CHECK(y.size() == c.size());
    CHECK(std::count(y.begin(), y.end(), kAbove) + std::count(y.begin(), y.end(), kBelow) == 50);
  }
}

TEST_CASE("z-score uses sample sd") {
  std::vector<Record> rows;
  for (double x : {2.0, 4.0, 6.0}) rows.push_back(record({"r", 1.0, x, std::string("Urban"), std::string("therapy"), 0.0}));
  const Cohort c(small_schema(), rows);
  const auto z = fit_zscore(c);
  const auto at = [&](double x) {
    Record r = rows[0];
    r.values[2] = x;
    return std::get<double>(apply_zscore(z, r).values[2]);
  };
  CHECK(at(4.0) == 0.0);
  CHECK(at(6.0) == 1.0);
  // Baseline is constant.
  CHECK(std::get<double>(apply_zscore(z, rows[0]).values[1]) == 0.0);
  Record miss = rows[0];
  miss.values[2] = Missing{};
  CHECK(is_missing(apply_zscore(z, miss).values[2]));
}

TEST_CASE("imputation fills mean and mode") {
  std::vector<Record> rows{
      record({"a", 1.0, 1.0, std::string("Urban"), std::string("therapy"), 0.0}),
      record({"b", 1.0, 2.0, std::string("Urban"), std::string("medical"), 0.0}),
      record({"c", 1.0, Missing{}, std::string("Rural"), Missing{}, 0.0}),
  };
  const auto p = fit_impute(Cohort(small_schema(), rows));
  const Record filled = apply_impute(p, rows[2]);
  CHECK(std::get<double>(filled.values[2]) == 1.5);
  CHECK(std::get<std::string>(filled.values[4]) == "therapy");  // tie: first declared
  Record r = rows[2];
  r.values[3] = Missing{};
  CHECK(std::get<std::string>(apply_impute(p, r).values[3]) == "Urban");
  CHECK(apply_impute(p, rows[0]) == rows[0]);

  std::vector<Record> empty_x{record({"a", 1.0, Missing{}, std::string("Urban"), std::string("therapy"), 0.0})};
  CHECK_THROWS(fit_impute(Cohort(small_schema(), empty_x)));
}

TEST_CASE("caim score hand values") {
  CHECK(caim_score({{1, 3}}) == 2.25);
  CHECK(caim_score({{5, 0}, {0, 5}}) == 5.0);
  CHECK(caim_score({{4, 4}, {2, 2}}) == doctest::Approx((8.0 / 4 + 4.0 / 4) / 2));
  CHECK_THROWS(caim_score({{3, 1}, {0, 0}}));
}

TEST_CASE("caim finds the single class boundary") {
  std::vector<double> v;
  Labels y;
  for (int i = 1; i <= 10; ++i) {
    v.push_back(i);
    y.push_back(i <= 5 ? kBelow : kAbove);
  }
  const auto cp = caim_fit(v, y);
  CHECK(cp.boundaries == std::vector<double>{5.5});
  const auto [best, arg] = exhaustive_caim(v, y, 2);
  CHECK(arg == std::vector<double>{5.5});
  CHECK(caim_score(interval_counts(cp, v, y, 2)) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("caim degenerate inputs") {
  CHECK(caim_fit({1, 2, 3, 4}, {kAbove, kAbove, kAbove, kAbove}).boundaries.empty());
  CHECK(caim_fit({2, 2, 2}, {kAbove, kBelow, kAbove}).boundaries.empty());
}

namespace {

struct Planted {
  std::vector<double> values;
  Labels labels;
  std::vector<double> boundaries;
};

// Two records per integer value; segment s covers plan[s].first values.
Planted plant(const std::vector<std::pair<int, int>>& plan) {
  Planted p;
  int x = 0;
  for (std::size_t s = 0; s < plan.size(); ++s) {
    for (int k = 0; k < plan[s].first; ++k) {
      ++x;
      for (int rep = 0; rep < 2; ++rep) {
        p.values.push_back(x);
        p.labels.push_back(plan[s].second);
      }
    }
    if (s + 1 < plan.size()) p.boundaries.push_back(x + 0.5);
  }
  return p;
}

}  // namespace

TEST_CASE("caim recovers planted segments and is globally optimal") {
  // At most 12 distinct values, so at most 11 candidates for the oracle.
  const std::vector<std::vector<std::pair<int, int>>> plans{
      {{4, kBelow}, {4, kAbove}, {4, kBelow}},
      {{3, kAbove}, {5, kBelow}, {4, kAbove}},
      {{4, kBelow}, {3, kAbove}, {4, kBelow}},
      {{6, kAbove}, {6, kBelow}},
  };
  for (const auto& plan : plans) {
    const Planted p = plant(plan);
    const auto cp = caim_fit(p.values, p.labels);
    CHECK(cp.boundaries == p.boundaries);
    const auto [best, arg] = exhaustive_caim(p.values, p.labels, 2);
    CHECK(arg == p.boundaries);
    CHECK(caim_score(interval_counts(cp, p.values, p.labels, 2)) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("caim merges a short segment when that scores higher") {
  // A short middle segment costs more in the mean than it gains.
  const Planted p = plant({{2, kBelow}, {6, kAbove}, {3, kBelow}});
  const auto cp = caim_fit(p.values, p.labels);
  const auto [best, arg] = exhaustive_caim(p.values, p.labels, 2);
  CHECK(cp.boundaries == std::vector<double>{8.5});
  CHECK(arg == cp.boundaries);
  CHECK(caim_score(interval_counts(cp, p.values, p.labels, 2)) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("caim apply uses right-closed intervals") {
  const CutPoints one{{5.5}};
  CHECK(caim_apply(one, 5.5) == 0);
  CHECK(caim_apply(one, 7.0) == 1);
  CHECK(caim_apply(one, -1e9) == 0);
  CHECK(caim_apply(CutPoints{}, 123.0) == 0);
  CHECK(one.labels().size() == 2);
}

TEST_CASE("caim apply is total and order preserving") {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> v;
    Labels y;
    for (int i = 0; i < 60; ++i) {
      v.push_back(std::round(rng.uniform(-5, 5) * 4) / 4);
      y.push_back(rng.uniform() < 0.5 + 0.08 * v.back() ? kAbove : kBelow);
    }
    const auto cp = caim_fit(v, y);
    CHECK(std::is_sorted(cp.boundaries.begin(), cp.boundaries.end()));
    CHECK(std::adjacent_find(cp.boundaries.begin(), cp.boundaries.end()) == cp.boundaries.end());
    for (int k = 0; k < 20; ++k) {
      double a = rng.uniform(-8, 8), b = rng.uniform(-8, 8);
      if (a > b) std::swap(a, b);
      CHECK(caim_apply(cp, a) <= caim_apply(cp, b));
      CHECK(caim_apply(cp, b) < cp.n_intervals());
    }
  }
}

TEST_CASE("caim is invariant under affine rescaling") {
  Rng rng(9);
  std::vector<double> v, w;
  Labels y;
  for (int i = 0; i < 80; ++i) {
    v.push_back(std::floor(rng.uniform(0, 20)));
    w.push_back(3.0 * v.back() - 7.0);
    y.push_back(v.back() > 12 || v.back() < 4 ? kAbove : kBelow);
  }
  const auto a = caim_fit(v, y), b = caim_fit(w, y);
  REQUIRE(a.boundaries.size() == b.boundaries.size());
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(caim_apply(a, v[i]) == caim_apply(b, w[i]));
}

TEST_CASE("preprocess modes") {
  const Cohort c = testing::random_cohort(3, 60, 0.1);
  const Labels y = fit_binarizer(screen(c, {"baseline", "followup"}).cohort).labels(screen(c, {"baseline", "followup"}).cohort);
  const Cohort s = screen(c, {"baseline", "followup"}).cohort;
  const auto bt = fit_preprocess(s, y, BinningMode::BinTarget);
  const auto ca = fit_preprocess(s, y, BinningMode::CAIM);
  CHECK(bt.cutpoints.empty());
  CHECK(ca.cutpoints.size() == ca.zscore.features.size());
  CHECK(ca.zscore.features.size() == 2);
  const auto bc = bt.columns(), cc = ca.columns();
  REQUIRE(bc.size() == 4);
  CHECK_FALSE(bc[0].categorical);
  CHECK(cc[0].categorical);
  CHECK(cc[2].categorical);
  CHECK(fingerprint(bc) != fingerprint(cc));
  const Table tb = apply_preprocess(bt, s);
  const Table tc = apply_preprocess(ca, s);
  CHECK(tb.n_rows() == s.size());
  for (const auto& row : tc.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      CHECK(row[j] >= 0);
      CHECK(row[j] < static_cast<double>(cc[j].n_levels()));
    }
  }
}

TEST_CASE("preprocess state ignores records outside the training set") {
  const Cohort c = screen(testing::random_cohort(4, 80, 0.1), {"baseline", "followup"}).cohort;
  const Labels y = fit_binarizer(c).labels(c);
  std::vector<std::size_t> train_idx;
  for (std::size_t i = 0; i < c.size(); i += 2) train_idx.push_back(i);
  Labels ty;
  for (std::size_t i : train_idx) ty.push_back(y[i]);
  const auto a = fit_preprocess(c.subset(train_idx), ty, BinningMode::CAIM);
  std::vector<Record> perturbed = c.records();
  for (std::size_t i = 1; i < perturbed.size(); i += 2) {
    if (auto* d = std::get_if<double>(&perturbed[i].values[2])) *d += 100.0;
  }
  const auto b = fit_preprocess(Cohort(c.schema(), perturbed).subset(train_idx), ty, BinningMode::CAIM);
  CHECK(a == b);
}

TEST_CASE("preprocess state JSON round-trip") {
  const Cohort c = screen(testing::random_cohort(6, 70, 0.1), {"baseline", "followup"}).cohort;
  const Labels y = fit_binarizer(c).labels(c);
  for (auto mode : {BinningMode::BinTarget, BinningMode::CAIM}) {
    const auto s = fit_preprocess(c, y, mode);
    nlohmann::json j = s;
    const auto back = preprocess_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back == s);
    for (const auto& r : c.records()) CHECK(apply_preprocess(back, r) == apply_preprocess(s, r));
  }
  const auto b = fit_binarizer(c);
  nlohmann::json bj = b;
  const auto b2 = bj.get<TargetBinarizer>();
  CHECK(b2.threshold == b.threshold);
  CHECK(b2.mode == b.mode);
}

TEST_CASE("mode names") {
  CHECK(to_string(BinningMode::BinTarget) == "Bin Target");
  CHECK(parse_binning_mode("CAIM") == BinningMode::CAIM);
  CHECK(parse_target_mode("followup") == TargetMode::FollowUp);
  CHECK_THROWS_AS(parse_binning_mode("equal-width"), ConfigError);
}
