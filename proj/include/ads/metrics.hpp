#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ads/table.hpp"

namespace ads {

// Out-of-fold predictions, one entry per record.
struct PredictionLog {
  std::vector<double> p_above;
  Labels labels;
  std::vector<std::size_t> fold;

  std::size_t size() const { return p_above.size(); }
};

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

// Predict "above" when p_above >= threshold.
Confusion confusion(std::span<const double> p_above, const Labels& labels, double threshold = 0.5);

double accuracy(const PredictionLog& log, double threshold = 0.5);
// Unset when the log lacks positives (tp) or negatives (fp).
std::optional<double> tp_rate(const PredictionLog& log, double threshold = 0.5);
std::optional<double> fp_rate(const PredictionLog& log, double threshold = 0.5);

// Mann-Whitney AUC with half credit for ties. Throws on a single-class log.
double auc(std::span<const double> scores, const Labels& labels);
inline double auc(const PredictionLog& log) { return auc(log.p_above, log.labels); }

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// Empirical ROC from (0,0) to (1,1), one point per distinct score.
std::vector<RocPoint> roc_points(std::span<const double> scores, const Labels& labels);
// Upper convex hull of the ROC points, ordered by fpr.
std::vector<RocPoint> roc_hull(const std::vector<RocPoint>& points);

// Hand's H with a Beta(2,2) severity-ratio distribution, integrated in
// closed form over the ROC convex hull.
double h_measure(std::span<const double> scores, const Labels& labels);
inline double h_measure(const PredictionLog& log) { return h_measure(log.p_above, log.labels); }

struct SpearmanResult {
  std::optional<double> rho;      // unset when either rank vector is constant
  std::optional<double> p_value;  // two-sided, Student-t approximation
};

std::vector<double> average_ranks(std::span<const double> x);
SpearmanResult spearman(std::span<const double> x, std::span<const double> y);

}  // namespace ads
