#include "ads/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "ads/error.hpp"

namespace ads {

using nlohmann::json;

std::string to_string(BinningMode mode) {
  return mode == BinningMode::CAIM ? "CAIM" : "Bin Target";
}

BinningMode parse_binning_mode(const std::string& s) {
  if (s == "CAIM" || s == "caim") return BinningMode::CAIM;
  if (s == "Bin Target" || s == "bin_target" || s == "bintarget" || s == "BinTarget") return BinningMode::BinTarget;
  throw ConfigError("unknown binning mode '" + s + "'");
}

std::string to_string(TargetMode mode) {
  return mode == TargetMode::ChangeScore ? "change" : "followup";
}

TargetMode parse_target_mode(const std::string& s) {
  if (s == "change") return TargetMode::ChangeScore;
  if (s == "followup") return TargetMode::FollowUp;
  throw ConfigError("unknown target mode '" + s + "'");
}

std::optional<double> TargetBinarizer::outcome(const CohortSchema& schema, const Record& r) const {
  const Value& follow = r.values.at(schema.followup_index());
  if (is_missing(follow)) return std::nullopt;
  if (mode == TargetMode::FollowUp) return std::get<double>(follow);
  const Value& base = r.values.at(schema.baseline_index());
  if (is_missing(base)) return std::nullopt;
  return std::get<double>(follow) - std::get<double>(base);
}

Labels TargetBinarizer::labels(const Cohort& cohort) const {
  Labels out;
  out.reserve(cohort.size());
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    auto y = outcome(cohort.schema(), cohort[i]);
    if (!y) throw SchemaError("record " + std::to_string(i + 1) + " lacks an outcome; screen first");
    out.push_back(label(*y));
  }
  return out;
}

TargetBinarizer fit_binarizer(const Cohort& cohort, TargetMode mode) {
  if (cohort.size() == 0) throw Error("cannot fit target threshold on an empty cohort");
  TargetBinarizer b;
  b.mode = mode;
  double sum = 0.0;
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    auto y = b.outcome(cohort.schema(), cohort[i]);
    if (!y) throw SchemaError("record " + std::to_string(i + 1) + " lacks an outcome; screen first");
    sum += *y;
  }
  b.threshold = sum / static_cast<double>(cohort.size());
  return b;
}

ZScoreParams fit_zscore(const Cohort& train) {
  ZScoreParams p;
  const auto& schema = train.schema();
  for (std::size_t f : schema.predictor_indices()) {
    if (!schema.at(f).is_numeric()) continue;
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : train.records()) {
      if (const double* d = std::get_if<double>(&r.values[f])) {
        sum += *d;
        ++n;
      }
    }
    const double mean = n ? sum / n : 0.0;
    double ss = 0.0;
    for (const auto& r : train.records()) {
      if (const double* d = std::get_if<double>(&r.values[f])) ss += (*d - mean) * (*d - mean);
    }
    p.features.push_back(f);
    p.mean.push_back(mean);
    p.sd.push_back(n > 1 ? std::sqrt(ss / (n - 1)) : 0.0);
  }
  return p;
}

Record apply_zscore(const ZScoreParams& params, const Record& record) {
  Record out = record;
  for (std::size_t k = 0; k < params.features.size(); ++k) {
    Value& v = out.values.at(params.features[k]);
    if (double* d = std::get_if<double>(&v)) *d = params.transform(k, *d);
  }
  return out;
}

ImputeParams fit_impute(const Cohort& train) {
  ImputeParams p;
  const auto& schema = train.schema();
  for (std::size_t f : schema.predictor_indices()) {
    const FeatureSpec& spec = schema.at(f);
    std::size_t n = 0;
    double sum = 0.0;
    std::vector<std::size_t> counts(spec.categories.size(), 0);
    for (const auto& r : train.records()) {
      const Value& v = r.values[f];
      if (is_missing(v)) continue;
      ++n;
      if (const double* d = std::get_if<double>(&v)) sum += *d;
      else ++counts[*spec.category_index(std::get<std::string>(v))];
    }
    if (n == 0) throw Error("cannot impute '" + spec.name + "': no observed training values");
    p.features.push_back(f);
    if (spec.is_numeric()) {
      p.fill.emplace_back(sum / static_cast<double>(n));
    } else {
      const auto best = std::max_element(counts.begin(), counts.end()) - counts.begin();
      p.fill.emplace_back(spec.categories[best]);
    }
  }
  return p;
}

Record apply_impute(const ImputeParams& params, const Record& record) {
  Record out = record;
  for (std::size_t k = 0; k < params.features.size(); ++k) {
    Value& v = out.values.at(params.features[k]);
    if (is_missing(v)) v = params.fill[k];
  }
  return out;
}

std::vector<std::string> CutPoints::labels() const {
  auto fmt = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return std::string(buf);
  };
  std::vector<std::string> out;
  std::string lo = "-inf";
  for (double b : boundaries) {
    out.push_back("(" + lo + "," + fmt(b) + "]");
    lo = fmt(b);
  }
  out.push_back("(" + lo + ",inf)");
  return out;
}

double caim_score(const Contingency& counts) {
  if (counts.empty()) throw Error("caim_score: no intervals");
  double total = 0.0;
  for (const auto& interval : counts) {
    std::size_t m = 0, mx = 0;
    for (std::size_t c : interval) {
      m += c;
      mx = std::max(mx, c);
    }
    if (m == 0) throw Error("caim_score: empty interval");
    total += static_cast<double>(mx) * static_cast<double>(mx) / static_cast<double>(m);
  }
  return total / static_cast<double>(counts.size());
}

namespace {

// caim over the partition whose right ends are the given positions into
// the sorted distinct values (last position implicit).
double caim_for_positions(const std::vector<std::vector<std::size_t>>& cumulative,
                          const std::vector<std::size_t>& cuts, std::size_t n_classes) {
  double total = 0.0;
  std::size_t prev = 0;
  bool first = true;
  const std::size_t last = cumulative.size() - 1;
  auto add_interval = [&](std::size_t end) {
    std::size_t m = 0, mx = 0;
    for (std::size_t c = 0; c < n_classes; ++c) {
      const std::size_t count = cumulative[end][c] - (first ? 0 : cumulative[prev][c]);
      m += count;
      mx = std::max(mx, count);
    }
    total += static_cast<double>(mx) * static_cast<double>(mx) / static_cast<double>(m);
    prev = end;
    first = false;
  };
  for (std::size_t end : cuts) add_interval(end);
  add_interval(last);
  return total / static_cast<double>(cuts.size() + 1);
}

}  // namespace

CutPoints caim_fit(const std::vector<double>& values, const Labels& labels) {
  if (values.size() != labels.size()) throw Error("caim_fit: values and labels differ in length");
  if (values.empty()) return {};
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });

  std::map<int, std::size_t> class_index;
  for (int y : labels) class_index.emplace(y, 0);
  std::size_t k = 0;
  for (auto& [_, idx] : class_index) idx = k++;
  const std::size_t n_classes = class_index.size();

  std::vector<double> distinct;
  std::vector<std::vector<std::size_t>> cumulative;
  std::vector<std::size_t> running(n_classes, 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double x = values[order[i]];
    ++running[class_index[labels[order[i]]]];
    const bool last_of_value = i + 1 == order.size() || values[order[i + 1]] != x;
    if (last_of_value) {
      distinct.push_back(x);
      cumulative.push_back(running);
    }
  }

  std::vector<std::size_t> accepted;  // positions into distinct, sorted
  std::vector<bool> used(distinct.size(), false);
  double global = caim_for_positions(cumulative, accepted, n_classes);
  while (accepted.size() + 1 < distinct.size()) {
    double best = -1.0;
    std::size_t best_pos = 0;
    for (std::size_t pos = 0; pos + 1 < distinct.size(); ++pos) {
      if (used[pos]) continue;
      std::vector<std::size_t> trial = accepted;
      trial.insert(std::upper_bound(trial.begin(), trial.end(), pos), pos);
      const double s = caim_for_positions(cumulative, trial, n_classes);
      if (s > best) {
        best = s;
        best_pos = pos;
      }
    }
    const std::size_t n_intervals = accepted.size() + 1;
    if (best > global || n_intervals < n_classes) {
      accepted.insert(std::upper_bound(accepted.begin(), accepted.end(), best_pos), best_pos);
      used[best_pos] = true;
      global = best;
    } else {
      break;
    }
  }

  CutPoints cuts;
  for (std::size_t pos : accepted) cuts.boundaries.push_back(0.5 * (distinct[pos] + distinct[pos + 1]));
  return cuts;
}

std::size_t caim_apply(const CutPoints& cuts, double value) {
  // First boundary >= value; intervals are right-closed.
  return static_cast<std::size_t>(
      std::lower_bound(cuts.boundaries.begin(), cuts.boundaries.end(), value) -
      cuts.boundaries.begin());
}

Contingency interval_counts(const CutPoints& cuts, const std::vector<double>& values,
                            const Labels& labels, std::size_t n_classes) {
  Contingency out(cuts.n_intervals(), std::vector<std::size_t>(n_classes, 0));
  for (std::size_t i = 0; i < values.size(); ++i) {
    ++out[caim_apply(cuts, values[i])][static_cast<std::size_t>(labels[i])];
  }
  return out;
}

PreprocessState fit_preprocess(const Cohort& train, const Labels& labels, BinningMode mode) {
  if (labels.size() != train.size()) throw Error("fit_preprocess: label count mismatch");
  PreprocessState s;
  s.mode = mode;
  s.schema = train.schema();
  s.impute = fit_impute(train);

  std::vector<Record> imputed;
  imputed.reserve(train.size());
  for (const auto& r : train.records()) imputed.push_back(apply_impute(s.impute, r));
  // z-score statistics come from observed values only; imputed cells sit
  // at the mean and do not shift it.
  s.zscore = fit_zscore(train);

  if (mode == BinningMode::CAIM) {
    for (std::size_t k = 0; k < s.zscore.features.size(); ++k) {
      std::vector<double> xs;
      xs.reserve(imputed.size());
      const std::size_t f = s.zscore.features[k];
      for (const auto& r : imputed) xs.push_back(s.zscore.transform(k, std::get<double>(r.values[f])));
      s.cutpoints.push_back(caim_fit(xs, labels));
    }
  }
  return s;
}

std::vector<Column> PreprocessState::columns() const {
  std::vector<Column> out;
  std::size_t k = 0;
  for (std::size_t f : schema.predictor_indices()) {
    const FeatureSpec& spec = schema.at(f);
    Column c;
    c.name = spec.name;
    if (spec.is_numeric()) {
      if (mode == BinningMode::CAIM) {
        c.categorical = true;
        c.levels = cutpoints.at(k).labels();
      }
      ++k;
    } else {
      c.categorical = true;
      c.levels = spec.categories;
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<double> apply_preprocess(const PreprocessState& state, const Record& record) {
  if (record.values.size() != state.schema.size()) throw SchemaError("record width does not match schema");
  const Record filled = apply_impute(state.impute, record);
  std::vector<double> row;
  std::size_t k = 0;
  for (std::size_t f : state.schema.predictor_indices()) {
    const FeatureSpec& spec = state.schema.at(f);
    const Value& v = filled.values[f];
    if (spec.is_numeric()) {
      const double z = state.zscore.transform(k, std::get<double>(v));
      if (state.mode == BinningMode::CAIM) {
        row.push_back(static_cast<double>(caim_apply(state.cutpoints[k], z)));
      } else {
        row.push_back(z);
      }
      ++k;
    } else {
      row.push_back(static_cast<double>(*spec.category_index(std::get<std::string>(v))));
    }
  }
  return row;
}

Table apply_preprocess(const PreprocessState& state, const Cohort& cohort) {
  Table t;
  t.columns = state.columns();
  t.rows.reserve(cohort.size());
  for (const auto& r : cohort.records()) t.rows.push_back(apply_preprocess(state, r));
  return t;
}

namespace {

json value_to_json(const Value& v) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  if (const std::string* s = std::get_if<std::string>(&v)) return *s;
  return nullptr;
}

Value value_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  return Missing{};
}

}  // namespace

void to_json(json& j, const PreprocessState& s) {
  json fill = json::array();
  for (const auto& v : s.impute.fill) fill.push_back(value_to_json(v));
  json cuts = json::array();
  for (const auto& c : s.cutpoints) cuts.push_back(c.boundaries);
  j = json{{"mode", to_string(s.mode)},
           {"schema", s.schema},
           {"impute", {{"features", s.impute.features}, {"fill", fill}}},
           {"zscore", {{"features", s.zscore.features}, {"mean", s.zscore.mean}, {"sd", s.zscore.sd}}},
           {"cutpoints", cuts}};
}

PreprocessState preprocess_from_json(const json& j) {
  PreprocessState s;
  s.mode = parse_binning_mode(j.at("mode").get<std::string>());
  s.schema = j.at("schema").get<CohortSchema>();
  s.impute.features = j.at("impute").at("features").get<std::vector<std::size_t>>();
  for (const auto& v : j.at("impute").at("fill")) s.impute.fill.push_back(value_from_json(v));
  const auto& z = j.at("zscore");
  s.zscore.features = z.at("features").get<std::vector<std::size_t>>();
  s.zscore.mean = z.at("mean").get<std::vector<double>>();
  s.zscore.sd = z.at("sd").get<std::vector<double>>();
  for (const auto& c : j.at("cutpoints")) s.cutpoints.push_back({c.get<std::vector<double>>()});
  if (s.mode == BinningMode::CAIM && s.cutpoints.size() != s.zscore.features.size()) {
    throw Error("preprocess state: CAIM mode without cut points for every numeric predictor");
  }
  return s;
}

void to_json(json& j, const TargetBinarizer& b) {
  j = json{{"mode", to_string(b.mode)}, {"threshold", b.threshold}};
}

void from_json(const json& j, TargetBinarizer& b) {
  b.mode = parse_target_mode(j.at("mode").get<std::string>());
  b.threshold = j.at("threshold").get<double>();
}

}  // namespace ads
