#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ads/model.hpp"
#include "ads/table.hpp"
#include "json.hpp"

namespace ads {

// Methods making up the ensemble and voting library, in member order.
const std::vector<Method>& library_methods();

// Fits every library member on the same training table. Member i uses
// seed + i.
std::vector<Model> fit_library(const Table& train, const Labels& labels, std::uint64_t seed);

struct SelectionTrace {
  // Member indices in the order they were added; repeats allowed.
  std::vector<std::size_t> selection;
  double best_single_auc = 0.0;
  double ensemble_auc = 0.0;
  std::vector<double> auc_after_step;
};

// Greedy forward selection with replacement on a held-out hillclimb set.
// member_scores[m][i] is member m's p_above on hillclimb record i. Starts
// at the best single member and keeps adding while AUC strictly improves.
SelectionTrace ensemble_select(const std::vector<std::vector<double>>& member_scores,
                               const Labels& hillclimb_labels, std::size_t max_iters = 50);

// Mean of the selected members' distributions.
ClassDistribution ensemble_predict(std::span<const ClassDistribution> member_outputs,
                                   std::span<const std::size_t> selection);

// The single largest class probability over all members wins and that
// member's distribution is returned. Ties: earlier member, then "above".
ClassDistribution vote_predict(std::span<const ClassDistribution> member_outputs);
std::size_t vote_winner(std::span<const ClassDistribution> member_outputs);

class EnsembleModel final : public Classifier {
 public:
  EnsembleModel(std::vector<Model> library, SelectionTrace trace);
  static EnsembleModel from_json(const nlohmann::json& j);

  ClassDistribution predict(std::span<const double> row) const override;
  nlohmann::json parameters() const override;

  const std::vector<Model>& library() const { return library_; }
  const SelectionTrace& trace() const { return trace_; }
  // Member display names, one per selection entry.
  std::vector<std::string> composition() const;

 private:
  std::vector<Model> library_;
  SelectionTrace trace_;
};

class VoteModel final : public Classifier {
 public:
  explicit VoteModel(std::vector<Model> members);
  static VoteModel from_json(const nlohmann::json& j);

  ClassDistribution predict(std::span<const double> row) const override;
  nlohmann::json parameters() const override;

  const std::vector<Model>& members() const { return members_; }

 private:
  std::vector<Model> members_;
};

struct EnsembleParams {
  std::size_t max_iters = 50;
  double hillclimb_fraction = 0.2;
};

// Members are trained on a stratified (1 - fraction) share of the
// training rows; selection runs on the remaining share.
Model fit_ensemble(const Table& train, const Labels& labels, const EnsembleParams& p = {},
                   std::uint64_t seed = 0);
Model fit_vote(const Table& train, const Labels& labels, std::uint64_t seed = 0);

// Stratified split of 0..n-1 into (train, holdout) with roughly the given
// holdout share per class.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(const Labels& labels,
                                                                                double holdout_fraction,
                                                                                std::uint64_t seed);

}  // namespace ads
