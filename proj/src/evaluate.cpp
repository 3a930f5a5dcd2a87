#include "ads/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "ads/combine.hpp"
#include "ads/error.hpp"
#include "ads/rng.hpp"

namespace ads {

using nlohmann::json;

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan make_folds(const Labels& labels, std::uint64_t seed, bool stratified, std::size_t n_folds) {
  if (n_folds < 2) throw ConfigError("n_folds must be at least 2");
  if (labels.size() < n_folds) {
    throw Error("cannot make " + std::to_string(n_folds) + " folds from " + std::to_string(labels.size()) + " records");
  }
  FoldPlan plan;
  plan.n_folds = n_folds;
  plan.seed = seed;
  plan.stratified = stratified;
  plan.assignment.assign(labels.size(), 0);
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> groups(stratified ? 2 : 1);
  for (std::size_t i = 0; i < labels.size(); ++i) groups[stratified ? labels[i] : 0].push_back(i);
  std::size_t next = 0;
  for (auto& g : groups) {
    rng.shuffle(g);
    for (std::size_t i : g) {
      plan.assignment[i] = next;
      next = (next + 1) % n_folds;
    }
  }
  return plan;
}

std::string GridCell::name() const {
  std::string n = display_name(spec.method);
  if (selector != Selector::None) n += " + " + to_string(selector);
  return n;
}

void to_json(json& j, const GridCell& c) {
  j = json{{"binning", to_string(c.mode)}, {"model", c.spec}, {"selector", to_string(c.selector)}};
}

void from_json(const json& j, GridCell& c) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "binning" && it.key() != "model" && it.key() != "selector") {
      throw ConfigError("unknown key '" + it.key() + "' in grid cell");
    }
  }
  c.mode = parse_binning_mode(j.at("binning").get<std::string>());
  c.spec = j.at("model").get<ModelSpec>();
  c.selector = j.contains("selector") ? parse_selector(j.at("selector").get<std::string>()) : Selector::None;
  if (c.spec.requires_discrete() && c.mode != BinningMode::CAIM) {
    throw ConfigError(display_name(c.spec.method) + " requires CAIM binning");
  }
}

FoldFit fit_fold(const Cohort& train, const Labels& train_labels, const GridCell& cell, std::uint64_t seed) {
  if (cell.spec.requires_discrete() && cell.mode != BinningMode::CAIM) {
    throw ConfigError(display_name(cell.spec.method) + " requires CAIM binning");
  }
  FoldFit fit;
  fit.state = fit_preprocess(train, train_labels, cell.mode);
  Table table = apply_preprocess(fit.state, train);
  fit.selected = select_features(cell.selector, table, train_labels);
  if (fit.selected.empty()) throw Error("feature selection kept no columns");
  table = table.select_columns(fit.selected);
  fit.model = fit_model(cell.spec, table, train_labels, seed);
  return fit;
}

std::vector<double> predict_fold(const FoldFit& fit, const Cohort& test) {
  const Table table = apply_preprocess(fit.state, test).select_columns(fit.selected);
  std::vector<double> out;
  for (const auto& d : fit.model.predict_proba(table)) out.push_back(d.p_above);
  return out;
}

namespace {

MeanSd mean_sd(const std::vector<double>& v) {
  MeanSd r;
  if (v.empty()) return r;
  r.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return r;
}

bool both_classes(const Labels& y) {
  return std::count(y.begin(), y.end(), kAbove) > 0 && std::count(y.begin(), y.end(), kBelow) > 0;
}

}  // namespace

MetricRow metric_row(const GridCell& cell, const PredictionLog& log) {
  MetricRow row;
  row.model = cell.name();
  row.binning = to_string(cell.mode);
  row.accuracy = accuracy(log);
  row.auc = auc(log);
  row.tp_rate = tp_rate(log).value();
  row.fp_rate = fp_rate(log).value();
  row.h_measure = h_measure(log);
  return row;
}

CellResult run_cell(const Cohort& cohort, const Labels& labels, const FoldPlan& plan, const GridCell& cell,
                    std::uint64_t seed) {
  if (labels.size() != cohort.size() || plan.assignment.size() != cohort.size()) {
    throw Error("labels, fold plan and cohort sizes differ");
  }
  CellResult result;
  PredictionLog& log = result.log;
  log.p_above.assign(cohort.size(), 0.0);
  log.labels = labels;
  log.fold = plan.assignment;
  std::vector<double> fold_acc, fold_auc;
  std::vector<FoldDetail> details;
  for (std::size_t f = 0; f < plan.n_folds; ++f) {
    const auto train_idx = plan.train_indices(f);
    const auto test_idx = plan.test_indices(f);
    if (test_idx.empty()) continue;
    Labels train_y, test_y;
    for (std::size_t i : train_idx) train_y.push_back(labels[i]);
    for (std::size_t i : test_idx) test_y.push_back(labels[i]);
    FoldDetail detail;
    detail.fold = f;
    try {
      const FoldFit fit = fit_fold(cohort.subset(train_idx), train_y, cell, seed * 1000003ULL + f);
      const auto p = predict_fold(fit, cohort.subset(test_idx));
      for (std::size_t k = 0; k < test_idx.size(); ++k) log.p_above[test_idx[k]] = p[k];
      detail.selected = fit.selected;
      if (const auto* e = fit.model.as<EnsembleModel>()) detail.composition = e->composition();
      detail.accuracy = accuracy(PredictionLog{p, test_y, {}});
      fold_acc.push_back(*detail.accuracy);
      if (both_classes(test_y)) {
        detail.auc = auc(p, test_y);
        fold_auc.push_back(*detail.auc);
      }
    } catch (const std::exception& e) {
      throw Error(cell.name() + " (" + to_string(cell.mode) + ") failed in fold " + std::to_string(f) + ": " + e.what());
    }
    details.push_back(std::move(detail));
  }
  result.row = metric_row(cell, log);
  result.row.fold_accuracy = mean_sd(fold_acc);
  result.row.fold_auc = mean_sd(fold_auc);
  result.row.folds = std::move(details);
  return result;
}

std::vector<double> GridResult::column(const std::string& metric) const {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (metric == "Accuracy") out.push_back(r.accuracy);
    else if (metric == "AUC") out.push_back(r.auc);
    else if (metric == "TP rate") out.push_back(r.tp_rate);
    else if (metric == "FP rate") out.push_back(r.fp_rate);
    else if (metric == "H") out.push_back(r.h_measure);
    else throw Error("unknown metric column '" + metric + "'");
  }
  return out;
}

std::string config_fingerprint(const std::vector<GridCell>& cells, const GridOptions& opts, const Cohort& cohort) {
  json j{{"cells", cells},
         {"seed", opts.seed},
         {"n_folds", opts.n_folds},
         {"stratified", opts.stratified},
         {"target", to_string(opts.target)},
         {"schema", cohort.schema()},
         {"cohort", digest(write_cohort_csv(cohort))}};
  return digest(j.dump());
}

GridResult run_grid(const Cohort& cohort, const std::vector<GridCell>& cells, const GridOptions& opts) {
  if (cells.empty()) throw ConfigError("grid has no cells");
  const TargetBinarizer bin = fit_binarizer(cohort, opts.target);
  const Labels labels = bin.labels(cohort);
  const FoldPlan plan = make_folds(labels, opts.seed, opts.stratified, opts.n_folds);

  std::vector<std::optional<MetricRow>> rows(cells.size());
  std::vector<std::string> errors(cells.size());
  auto one = [&](std::size_t c) {
    try {
      rows[c] = run_cell(cohort, labels, plan, cells[c], opts.seed).row;
    } catch (const std::exception& e) {
      errors[c] = e.what();
    }
  };
  const auto n = static_cast<long>(cells.size());
  if (opts.exec == kernels::Execution::Serial) {
    for (long c = 0; c < n; ++c) one(static_cast<std::size_t>(c));
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (long c = 0; c < n; ++c) one(static_cast<std::size_t>(c));
  }

  GridResult g;
  g.seed = opts.seed;
  g.fingerprint = config_fingerprint(cells, opts, cohort);
  g.threshold = bin.threshold;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (rows[c]) g.rows.push_back(std::move(*rows[c]));
    else g.failures.push_back({cells[c].name() + " (" + to_string(cells[c].mode) + ")", errors[c]});
  }
  std::stable_sort(g.rows.begin(), g.rows.end(), [](const MetricRow& a, const MetricRow& b) {
    if (a.auc != b.auc) return a.auc > b.auc;
    if (a.model != b.model) return a.model < b.model;
    return a.binning < b.binning;
  });
  return g;
}

std::vector<GridCell> default_grid() {
  const std::vector<Method> continuous{Method::NaiveBayes, Method::Tree, Method::RandomForest,
                                       Method::LogReg,     Method::KNN,  Method::MLP,
                                       Method::LinRegClassifier, Method::Ensemble, Method::Vote};
  const std::vector<Method> discrete{Method::NaiveBayes, Method::AODE, Method::BayesNetK2, Method::Tree,
                                     Method::RandomForest, Method::LogReg, Method::KNN, Method::MLP,
                                     Method::LinRegClassifier, Method::Ensemble, Method::Vote};
  std::vector<GridCell> cells;
  for (Method m : continuous) cells.push_back({BinningMode::BinTarget, make_spec(m), Selector::None});
  for (Method m : discrete) cells.push_back({BinningMode::CAIM, make_spec(m), Selector::None});
  return cells;
}

namespace {

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json mean_sd_json(const MeanSd& m) { return {{"mean", m.mean}, {"sd", m.sd}}; }

}  // namespace

std::string grid_to_csv(const GridResult& g) {
  std::ostringstream out;
  out << "# positive_class=above seed=" << g.seed << " config=" << g.fingerprint << "\n";
  out << "Model,Binning,Accuracy,AUC,TP rate,FP rate,H,Accuracy fold mean,Accuracy fold sd,AUC fold mean,AUC fold sd\n";
  for (const auto& r : g.rows) {
    out << csv_field(r.model) << ',' << csv_field(r.binning) << ',' << fixed(r.accuracy) << ',' << fixed(r.auc)
        << ',' << fixed(r.tp_rate) << ',' << fixed(r.fp_rate) << ',' << fixed(r.h_measure) << ','
        << fixed(r.fold_accuracy.mean) << ',' << fixed(r.fold_accuracy.sd) << ',' << fixed(r.fold_auc.mean) << ','
        << fixed(r.fold_auc.sd) << "\n";
  }
  for (const auto& f : g.failures) out << "# failed: " << f.cell << ": " << f.message << "\n";
  return out.str();
}

json grid_to_json(const GridResult& g) {
  json rows = json::array();
  for (const auto& r : g.rows) {
    json folds = json::array();
    for (const auto& f : r.folds) {
      json fj{{"fold", f.fold}, {"selected", f.selected}};
      fj["accuracy"] = f.accuracy ? json(*f.accuracy) : json(nullptr);
      fj["auc"] = f.auc ? json(*f.auc) : json(nullptr);
      if (!f.composition.empty()) fj["composition"] = f.composition;
      folds.push_back(fj);
    }
    rows.push_back({{"Model", r.model},
                    {"Binning", r.binning},
                    {"Accuracy", r.accuracy},
                    {"AUC", r.auc},
                    {"TP rate", r.tp_rate},
                    {"FP rate", r.fp_rate},
                    {"H", r.h_measure},
                    {"fold_accuracy", mean_sd_json(r.fold_accuracy)},
                    {"fold_auc", mean_sd_json(r.fold_auc)},
                    {"folds", folds}});
  }
  json failures = json::array();
  for (const auto& f : g.failures) failures.push_back({{"cell", f.cell}, {"message", f.message}});
  return {{"positive_class", "above"}, {"seed", g.seed},         {"fingerprint", g.fingerprint},
          {"threshold", g.threshold},  {"partial", g.partial()}, {"failures", failures},
          {"rows", rows}};
}

GridResult grid_from_json(const json& j) {
  GridResult g;
  g.seed = j.at("seed").get<std::uint64_t>();
  g.fingerprint = j.at("fingerprint").get<std::string>();
  g.threshold = j.at("threshold").get<double>();
  for (const auto& f : j.at("failures")) g.failures.push_back({f.at("cell"), f.at("message")});
  for (const auto& rj : j.at("rows")) {
    MetricRow r;
    r.model = rj.at("Model");
    r.binning = rj.at("Binning");
    r.accuracy = rj.at("Accuracy");
    r.auc = rj.at("AUC");
    r.tp_rate = rj.at("TP rate");
    r.fp_rate = rj.at("FP rate");
    r.h_measure = rj.at("H");
    r.fold_accuracy = {rj.at("fold_accuracy").at("mean"), rj.at("fold_accuracy").at("sd")};
    r.fold_auc = {rj.at("fold_auc").at("mean"), rj.at("fold_auc").at("sd")};
    for (const auto& fj : rj.at("folds")) {
      FoldDetail f;
      f.fold = fj.at("fold");
      f.selected = fj.at("selected").get<std::vector<std::string>>();
      if (!fj.at("accuracy").is_null()) f.accuracy = fj.at("accuracy").get<double>();
      if (!fj.at("auc").is_null()) f.auc = fj.at("auc").get<double>();
      if (fj.contains("composition")) f.composition = fj.at("composition").get<std::vector<std::string>>();
      r.folds.push_back(std::move(f));
    }
    g.rows.push_back(std::move(r));
  }
  return g;
}

}  // namespace ads
