#include "ads/combine.hpp"

#include <algorithm>
#include <cmath>

#include "ads/error.hpp"
#include "ads/metrics.hpp"
#include "ads/rng.hpp"

namespace ads {

using nlohmann::json;

const std::vector<Method>& library_methods() {
  static const std::vector<Method> methods{Method::NaiveBayes, Method::MLP, Method::RandomForest, Method::KNN,
                                           Method::LogReg};
  return methods;
}

std::vector<Model> fit_library(const Table& train, const Labels& labels, std::uint64_t seed) {
  std::vector<Model> out;
  const auto& methods = library_methods();
  for (std::size_t i = 0; i < methods.size(); ++i) {
    ModelSpec spec = make_spec(methods[i]);
    if (methods[i] == Method::KNN) {
      spec.hyperparams["k"] = std::min(spec.param("k"), static_cast<double>(train.n_rows()));
    }
    out.push_back(fit_model(spec, train, labels, seed + i));
  }
  return out;
}

SelectionTrace ensemble_select(const std::vector<std::vector<double>>& member_scores,
                               const Labels& hillclimb_labels, std::size_t max_iters) {
  if (member_scores.empty()) throw Error("ensemble selection needs a non-empty library");
  const std::size_t n = hillclimb_labels.size();
  SelectionTrace trace;

  std::size_t best = 0;
  double best_auc = -1.0;
  for (std::size_t m = 0; m < member_scores.size(); ++m) {
    const double a = auc(member_scores[m], hillclimb_labels);
    if (a > best_auc) {
      best_auc = a;
      best = m;
    }
  }
  trace.selection.push_back(best);
  trace.best_single_auc = best_auc;
  trace.ensemble_auc = best_auc;
  trace.auc_after_step.push_back(best_auc);

  std::vector<double> sum = member_scores[best];
  std::vector<double> mean(n);
  for (std::size_t iter = 1; iter < max_iters; ++iter) {
    const double k = static_cast<double>(trace.selection.size() + 1);
    double step_auc = -1.0;
    std::size_t step_member = 0;
    for (std::size_t m = 0; m < member_scores.size(); ++m) {
      for (std::size_t i = 0; i < n; ++i) mean[i] = (sum[i] + member_scores[m][i]) / k;
      const double a = auc(mean, hillclimb_labels);
      if (a > step_auc) {
        step_auc = a;
        step_member = m;
      }
    }
    if (!(step_auc > trace.ensemble_auc)) break;
    trace.selection.push_back(step_member);
    trace.ensemble_auc = step_auc;
    trace.auc_after_step.push_back(step_auc);
    for (std::size_t i = 0; i < n; ++i) sum[i] += member_scores[step_member][i];
  }
  return trace;
}

ClassDistribution ensemble_predict(std::span<const ClassDistribution> member_outputs,
                                   std::span<const std::size_t> selection) {
  if (selection.empty()) throw Error("ensemble has no members");
  double above = 0.0, below = 0.0;
  for (std::size_t m : selection) {
    above += member_outputs[m].p_above;
    below += member_outputs[m].p_below;
  }
  return ClassDistribution::from_scores(below, above);
}

std::size_t vote_winner(std::span<const ClassDistribution> member_outputs) {
  if (member_outputs.empty()) throw Error("vote needs at least one member");
  std::size_t winner = 0;
  double best = -1.0;
  for (std::size_t m = 0; m < member_outputs.size(); ++m) {
    // "above" is checked first so it wins an exact within-member tie.
    for (double p : {member_outputs[m].p_above, member_outputs[m].p_below}) {
      if (p > best) {
        best = p;
        winner = m;
      }
    }
  }
  return winner;
}

ClassDistribution vote_predict(std::span<const ClassDistribution> member_outputs) {
  return member_outputs[vote_winner(member_outputs)];
}

EnsembleModel::EnsembleModel(std::vector<Model> library, SelectionTrace trace)
    : library_(std::move(library)), trace_(std::move(trace)) {
  if (library_.empty() || trace_.selection.empty()) throw Error("ensemble is empty");
  for (const auto& m : library_) {
    if (m.fingerprint() != library_.front().fingerprint()) throw Error("ensemble members disagree on columns");
  }
}

ClassDistribution EnsembleModel::predict(std::span<const double> row) const {
  std::vector<ClassDistribution> outs;
  outs.reserve(library_.size());
  for (const auto& m : library_) outs.push_back(m.predict_proba(row));
  return ensemble_predict(outs, trace_.selection);
}

std::vector<std::string> EnsembleModel::composition() const {
  std::vector<std::string> out;
  for (std::size_t m : trace_.selection) out.push_back(display_name(library_[m].spec().method));
  return out;
}

json EnsembleModel::parameters() const {
  json members = json::array();
  for (const auto& m : library_) members.push_back(model_to_json(m));
  return {{"library", members},
          {"selection", trace_.selection},
          {"best_single_auc", trace_.best_single_auc},
          {"ensemble_auc", trace_.ensemble_auc},
          {"auc_after_step", trace_.auc_after_step}};
}

EnsembleModel EnsembleModel::from_json(const json& j) {
  std::vector<Model> library;
  for (const auto& jm : j.at("library")) library.push_back(model_from_json(jm));
  SelectionTrace t;
  t.selection = j.at("selection").get<std::vector<std::size_t>>();
  t.best_single_auc = j.at("best_single_auc").get<double>();
  t.ensemble_auc = j.at("ensemble_auc").get<double>();
  t.auc_after_step = j.at("auc_after_step").get<std::vector<double>>();
  return EnsembleModel(std::move(library), std::move(t));
}

VoteModel::VoteModel(std::vector<Model> members) : members_(std::move(members)) {
  if (members_.empty()) throw Error("vote needs at least one member");
}

ClassDistribution VoteModel::predict(std::span<const double> row) const {
  std::vector<ClassDistribution> outs;
  outs.reserve(members_.size());
  for (const auto& m : members_) outs.push_back(m.predict_proba(row));
  return vote_predict(outs);
}

json VoteModel::parameters() const {
  json members = json::array();
  for (const auto& m : members_) members.push_back(model_to_json(m));
  return {{"members", members}};
}

VoteModel VoteModel::from_json(const json& j) {
  std::vector<Model> members;
  for (const auto& jm : j.at("members")) members.push_back(model_from_json(jm));
  return VoteModel(std::move(members));
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(const Labels& labels,
                                                                                double holdout_fraction,
                                                                                std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> train, holdout;
  for (int cls : {kBelow, kAbove}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) idx.push_back(i);
    }
    rng.shuffle(idx);
    const auto n_hold = static_cast<std::size_t>(std::llround(holdout_fraction * static_cast<double>(idx.size())));
    for (std::size_t k = 0; k < idx.size(); ++k) (k < n_hold ? holdout : train).push_back(idx[k]);
  }
  std::sort(train.begin(), train.end());
  std::sort(holdout.begin(), holdout.end());
  return {train, holdout};
}

Model fit_ensemble(const Table& train, const Labels& labels, const EnsembleParams& p, std::uint64_t seed) {
  auto [fit_idx, hill_idx] = stratified_split(labels, p.hillclimb_fraction, seed);
  Labels hill_labels;
  for (std::size_t i : hill_idx) hill_labels.push_back(labels[i]);
  const bool usable = std::count(hill_labels.begin(), hill_labels.end(), kAbove) > 0 &&
                      std::count(hill_labels.begin(), hill_labels.end(), kBelow) > 0 && !fit_idx.empty();
  if (!usable) {
    // Too few rows to hold any out; select on the training rows themselves.
    fit_idx.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) fit_idx[i] = i;
    hill_idx = fit_idx;
    hill_labels = labels;
  }
  Labels fit_labels;
  for (std::size_t i : fit_idx) fit_labels.push_back(labels[i]);
  const Table fit_table = train.select_rows(fit_idx);
  auto library = fit_library(fit_table, fit_labels, seed + 1);

  std::vector<std::vector<double>> scores(library.size());
  for (std::size_t m = 0; m < library.size(); ++m) {
    for (std::size_t i : hill_idx) scores[m].push_back(library[m].predict_proba(train.rows[i]).p_above);
  }
  auto trace = ensemble_select(scores, hill_labels, p.max_iters);
  if (trace.ensemble_auc < trace.best_single_auc) throw Error("ensemble selection lost AUC");

  ModelSpec spec = make_spec(Method::Ensemble, {{"max_iters", static_cast<double>(p.max_iters)},
                                                {"hillclimb_fraction", p.hillclimb_fraction}});
  return Model(spec, train.columns, std::make_shared<EnsembleModel>(std::move(library), std::move(trace)), seed);
}

Model fit_vote(const Table& train, const Labels& labels, std::uint64_t seed) {
  return Model(make_spec(Method::Vote), train.columns,
               std::make_shared<VoteModel>(fit_library(train, labels, seed + 1)), seed);
}

}  // namespace ads
