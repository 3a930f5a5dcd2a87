#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ads/cohort.hpp"
#include "ads/kernels.hpp"
#include "ads/metrics.hpp"
#include "ads/model.hpp"
#include "ads/preprocess.hpp"
#include "ads/select.hpp"
#include "json.hpp"

namespace ads {

struct FoldPlan {
  std::size_t n_folds = 10;
  std::uint64_t seed = 0;
  bool stratified = true;
  std::vector<std::size_t> assignment;  // record index -> fold id

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
};

// Shuffles within each class, then deals records to folds round-robin.
FoldPlan make_folds(const Labels& labels, std::uint64_t seed, bool stratified = true, std::size_t n_folds = 10);

struct GridCell {
  BinningMode mode = BinningMode::BinTarget;
  ModelSpec spec;
  Selector selector = Selector::None;

  // Report label, e.g. "Naive Bayes" or "Naive Bayes + chi2".
  std::string name() const;
};

void to_json(nlohmann::json& j, const GridCell& c);
void from_json(const nlohmann::json& j, GridCell& c);

// Everything fitted inside one training fold.
struct FoldFit {
  PreprocessState state;
  std::vector<std::string> selected;
  Model model;
};

FoldFit fit_fold(const Cohort& train, const Labels& train_labels, const GridCell& cell, std::uint64_t seed);
std::vector<double> predict_fold(const FoldFit& fit, const Cohort& test);

struct FoldDetail {
  std::size_t fold = 0;
  std::optional<double> accuracy;
  std::optional<double> auc;
  std::vector<std::string> selected;
  std::vector<std::string> composition;  // ensemble members, when applicable
};

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

struct MetricRow {
  std::string model;
  std::string binning;
  double accuracy = 0.0;
  double auc = 0.0;
  double tp_rate = 0.0;
  double fp_rate = 0.0;
  double h_measure = 0.0;
  MeanSd fold_accuracy;
  MeanSd fold_auc;
  std::vector<FoldDetail> folds;
};

struct CellResult {
  PredictionLog log;
  MetricRow row;
};

// Seeds for fold f are derived from (seed, f) only, so a cell's result
// does not depend on which other cells share the grid.
CellResult run_cell(const Cohort& cohort, const Labels& labels, const FoldPlan& plan, const GridCell& cell,
                    std::uint64_t seed);
MetricRow metric_row(const GridCell& cell, const PredictionLog& log);

struct GridOptions {
  std::uint64_t seed = 1;
  std::size_t n_folds = 10;
  bool stratified = true;
  TargetMode target = TargetMode::ChangeScore;
  kernels::Execution exec = kernels::Execution::Serial;  // across cells
};

struct CellFailure {
  std::string cell;
  std::string message;
};

struct GridResult {
  std::vector<MetricRow> rows;  // descending AUC, then name
  std::uint64_t seed = 0;
  std::string fingerprint;
  double threshold = 0.0;  // binarizer threshold
  std::vector<CellFailure> failures;

  bool partial() const { return !failures.empty(); }
  std::vector<double> column(const std::string& metric) const;
};

std::string config_fingerprint(const std::vector<GridCell>& cells, const GridOptions& opts, const Cohort& cohort);
GridResult run_grid(const Cohort& cohort, const std::vector<GridCell>& cells, const GridOptions& opts);

// Bin Target rows for every learner that accepts continuous inputs, CAIM
// rows for every learner, each without feature selection.
std::vector<GridCell> default_grid();

std::string grid_to_csv(const GridResult& g);
nlohmann::json grid_to_json(const GridResult& g);
GridResult grid_from_json(const nlohmann::json& j);

}  // namespace ads
