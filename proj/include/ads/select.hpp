#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ads/kernels.hpp"
#include "ads/table.hpp"

namespace ads {

enum class Selector { None, Chi2, ReliefF, GainRatio, CfsSU };

std::string to_string(Selector s);
Selector parse_selector(const std::string& s);

struct FeatureScore {
  std::string name;
  double score = 0.0;
  Selector method = Selector::None;
};

struct FeatureSubset {
  std::vector<std::string> selected;  // in table column order
  double merit = 0.0;
  std::size_t expansions = 0;
};

// Integer codes used by the count-based scorers: categorical columns keep
// their levels, numeric columns are cut into equal-frequency bins.
struct CodedColumns {
  std::vector<std::vector<std::size_t>> codes;  // [column][row]
  std::vector<std::size_t> cardinality;
};
CodedColumns code_for_scoring(const Table& t, std::size_t numeric_bins = 10);

double entropy(const std::vector<std::size_t>& codes, std::size_t cardinality);
double conditional_entropy(const std::vector<std::size_t>& a, std::size_t card_a,
                           const std::vector<std::size_t>& b, std::size_t card_b);  // H(a | b)
double symmetric_uncertainty(const std::vector<std::size_t>& a, std::size_t card_a,
                             const std::vector<std::size_t>& b, std::size_t card_b);

// Rankings are descending by score, ties broken by name.
std::vector<FeatureScore> chi2_rank(const Table& t, const Labels& labels);
std::vector<FeatureScore> gain_ratio_rank(const Table& t, const Labels& labels);

struct ReliefParams {
  std::size_t k_neighbors = 10;
};
// Raw Relief-F weights in table column order.
std::vector<double> relieff_weights(const Table& t, const Labels& labels, const ReliefParams& p = {},
                                    kernels::Execution exec = kernels::Execution::Parallel);
std::vector<FeatureScore> relieff_rank(const Table& t, const Labels& labels, const ReliefParams& p = {});

// k * mean SU(feature, class) / sqrt(k + k(k-1) * mean SU(feature, feature)).
double cfs_merit(const std::vector<std::size_t>& subset, const std::vector<double>& su_class,
                 const std::vector<std::vector<double>>& su_pair);

struct CfsParams {
  std::size_t stop_after = 5;
};
FeatureSubset su_cfs_subset(const Table& t, const Labels& labels, const CfsParams& p = {});

// Column names kept by a selector; rankers keep the top ceil(p/2).
std::vector<std::string> select_features(Selector s, const Table& t, const Labels& labels);

}  // namespace ads
