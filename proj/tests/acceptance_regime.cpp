#include <chrono>

#include "ads/evaluate.hpp"
#include "ads/synth.hpp"
#include "doctest.h"

using namespace ads;

namespace {

struct Regime {
  GridResult grid;
  double oracle_auc = 0.0;
  double oracle_accuracy = 0.0;
  double seconds = 0.0;
};

const std::filesystem::path kData = ADS_DATA_DIR;

Cohort default_cohort() {
  const auto schema = load_schema(kData / "cohort.schema.json");
  return screen(load_cohort(kData / "cohort.csv", schema), {schema.baseline_name(), schema.followup_name()}).cohort;
}

const Regime& regime() {
  static const Regime r = [] {
    Regime out;
    const auto spec = load_gen_spec(kData / "cohort.spec.json");
    const auto cohort = default_cohort();
    const auto start = std::chrono::steady_clock::now();
    out.grid = run_grid(cohort, default_grid(), GridOptions{});
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    PredictionLog log;
    log.labels = fit_binarizer(cohort).labels(cohort);
    for (const auto& rec : cohort.records()) log.p_above.push_back(oracle_p_above(spec, cohort.schema(), rec));
    log.fold.assign(log.labels.size(), 0);
    out.oracle_auc = auc(log);
    out.oracle_accuracy = accuracy(log);
    return out;
  }();
  return r;
}

}  // namespace

TEST_CASE("regime: committed cohort is the default generator output") {
  const auto spec = load_gen_spec(kData / "cohort.spec.json");
  const auto schema = load_schema(kData / "cohort.schema.json");
  CHECK(spec.seed == GenSpec{}.seed);
  CHECK(spec.n == 423);
  const auto generated = generate(spec);
  CHECK(write_cohort_csv(load_cohort(kData / "cohort.csv", schema)) == write_cohort_csv(generated));
}

TEST_CASE("regime: full grid tracks the oracle") {
  const auto& r = regime();
  REQUIRE_FALSE(r.grid.partial());
  CHECK(r.grid.rows.size() == default_grid().size());
  const double best = r.grid.rows.front().auc;
  MESSAGE("oracle auc " << r.oracle_auc << ", oracle accuracy " << r.oracle_accuracy << ", best auc " << best
                        << " (" << r.grid.rows.front().model << ", " << r.grid.rows.front().binning << "), grid "
                        << r.seconds << " s");
  CHECK(r.oracle_accuracy > 0.70);
  CHECK(r.oracle_accuracy < 0.76);
  CHECK(best >= r.oracle_auc - 0.05);
  for (const auto& row : r.grid.rows) {
    CAPTURE(row.model);
    CHECK(row.auc <= r.oracle_auc + 0.01);
  }
  CHECK(r.seconds < 300.0);
}

TEST_CASE("coherence: auc and h rank the grid alike") {
  const auto& r = regime();
  const auto a = r.grid.column("AUC"), h = r.grid.column("H");
  REQUIRE(a.size() >= 12);
  const auto s = spearman(a, h);
  REQUIRE(s.rho.has_value());
  MESSAGE("spearman rho " << *s.rho << " over " << a.size() << " cells");
  CHECK(*s.rho >= 0.9);
}
