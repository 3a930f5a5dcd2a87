#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ads/cohort.hpp"
#include "ads/table.hpp"
#include "json.hpp"

namespace ads {

// How the raw outcome pair becomes the quantity that is binarised.
enum class TargetMode { ChangeScore, FollowUp };

enum class BinningMode { BinTarget, CAIM };

std::string to_string(BinningMode mode);
BinningMode parse_binning_mode(const std::string& s);
std::string to_string(TargetMode mode);
TargetMode parse_target_mode(const std::string& s);

// Splits the outcome at its cohort mean; ties go to "above".
struct TargetBinarizer {
  TargetMode mode = TargetMode::ChangeScore;
  double threshold = 0.0;

  // Outcome value for a record; nullopt when either score is missing.
  std::optional<double> outcome(const CohortSchema& schema, const Record& r) const;
  int label(double outcome) const { return outcome >= threshold ? kAbove : kBelow; }
  Labels labels(const Cohort& cohort) const;
};

TargetBinarizer fit_binarizer(const Cohort& cohort, TargetMode mode = TargetMode::ChangeScore);

struct ZScoreParams {
  // Indexed by schema position; only numeric predictors are populated.
  std::vector<std::size_t> features;
  std::vector<double> mean;
  std::vector<double> sd;

  double transform(std::size_t k, double x) const {
    return sd[k] > 0.0 ? (x - mean[k]) / sd[k] : 0.0;
  }
  bool operator==(const ZScoreParams&) const = default;
};

// Sample mean and sd over observed training values.
ZScoreParams fit_zscore(const Cohort& train);
Record apply_zscore(const ZScoreParams& params, const Record& record);

struct ImputeParams {
  std::vector<std::size_t> features;  // every predictor
  std::vector<Value> fill;

  bool operator==(const ImputeParams&) const = default;
};

// Training mean for numerics, training mode for categoricals (first
// declared category wins ties).
ImputeParams fit_impute(const Cohort& train);
Record apply_impute(const ImputeParams& params, const Record& record);

// Boundaries b1 < b2 < ... < bk splitting the line into k+1 intervals
// (-inf,b1], (b1,b2], ..., (bk,inf).
struct CutPoints {
  std::vector<double> boundaries;

  std::size_t n_intervals() const { return boundaries.size() + 1; }
  std::vector<std::string> labels() const;
  bool operator==(const CutPoints&) const = default;
};

// Contingency of interval x class counts.
using Contingency = std::vector<std::vector<std::size_t>>;

// Mean over intervals of max_r^2 / M_r. Throws on an empty interval.
double caim_score(const Contingency& counts);

// Greedy boundary insertion maximising caim_score. Candidates are
// midpoints between consecutive distinct values.
CutPoints caim_fit(const std::vector<double>& values, const Labels& labels);

// 0-based interval index.
std::size_t caim_apply(const CutPoints& cuts, double value);

Contingency interval_counts(const CutPoints& cuts, const std::vector<double>& values,
                            const Labels& labels, std::size_t n_classes);

struct PreprocessState {
  BinningMode mode = BinningMode::BinTarget;
  CohortSchema schema;
  ImputeParams impute;
  ZScoreParams zscore;
  // Parallel to zscore.features; set in CAIM mode only.
  std::vector<CutPoints> cutpoints;

  // Column layout of apply_preprocess output.
  std::vector<Column> columns() const;
  bool operator==(const PreprocessState&) const = default;
};

// Impute -> z-score -> (CAIM) discretise numerics. Labels are the
// training labels, used by CAIM only.
PreprocessState fit_preprocess(const Cohort& train, const Labels& labels, BinningMode mode);
std::vector<double> apply_preprocess(const PreprocessState& state, const Record& record);
Table apply_preprocess(const PreprocessState& state, const Cohort& cohort);

void to_json(nlohmann::json& j, const PreprocessState& s);
PreprocessState preprocess_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const TargetBinarizer& b);
void from_json(const nlohmann::json& j, TargetBinarizer& b);

}  // namespace ads
