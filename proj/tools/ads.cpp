#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "ads/artifact.hpp"
#include "ads/config.hpp"
#include "ads/error.hpp"
#include "ads/evaluate.hpp"
#include "ads/recommend.hpp"
#include "ads/service.hpp"
#include "ads/synth.hpp"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ads::Error("cannot read " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ads::Error(p.string() + ": " + e.what());
  }
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ads::Error("cannot write " + p.string());
  out << text;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct Common {
  std::string config, schema, cohort;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "Run config JSON");
  app->add_option("--schema", c.schema, "Cohort schema JSON");
  app->add_option("--cohort", c.cohort, "Cohort CSV");
  app->add_option("--seed", c.seed, "Seed");
}

ads::RunConfig resolve(const Common& c) {
  ads::RunConfig cfg = c.config.empty() ? ads::RunConfig{} : ads::load_run_config(c.config);
  if (!c.schema.empty()) cfg.schema = c.schema;
  if (!c.cohort.empty()) cfg.cohort = c.cohort;
  if (c.seed) cfg.grid.seed = *c.seed;
  return cfg;
}

ads::Cohort load(const ads::RunConfig& cfg) {
  if (cfg.schema.empty()) throw ads::ConfigError("config key 'schema' (or --schema) is required");
  if (cfg.cohort.empty()) throw ads::ConfigError("config key 'cohort' (or --cohort) is required");
  const ads::CohortSchema schema = ads::load_schema(cfg.schema);
  ads::ScreenResult s =
      ads::screen(ads::load_cohort(cfg.cohort, schema), {schema.baseline_name(), schema.followup_name()});
  if (s.report.dropped() > 0) {
    std::cerr << "screened " << s.report.input_count << " records, kept " << s.report.retained_count << "\n";
    for (const auto& [reason, count] : s.report.drop_reasons) std::cerr << "  " << reason << ": " << count << "\n";
  }
  return std::move(s.cohort);
}

std::string report_text(const json& grid) {
  const ads::GridResult g = ads::grid_from_json(grid);
  std::ostringstream out;
  char line[256];
  out << "positive class: above; seed " << g.seed << "; config " << g.fingerprint << "\n\n";
  std::snprintf(line, sizeof line, "%-36s %-10s %8s %8s %8s %8s %8s %16s\n", "Model", "Binning", "Accuracy", "AUC",
                "TP rate", "FP rate", "H", "fold AUC");
  out << line;
  for (const auto& r : g.rows) {
    std::snprintf(line, sizeof line, "%-36s %-10s %8.4f %8.4f %8.4f %8.4f %8.4f %8.4f+-%.4f\n", r.model.c_str(),
                  r.binning.c_str(), r.accuracy, r.auc, r.tp_rate, r.fp_rate, r.h_measure, r.fold_auc.mean,
                  r.fold_auc.sd);
    out << line;
  }
  const auto a = g.column("AUC"), h = g.column("H");
  out << "\nSpearman(AUC, H) over " << a.size() << " rows: ";
  if (a.size() < 3) {
    out << "undefined (fewer than 3 rows)\n";
  } else {
    const auto s = ads::spearman(a, h);
    if (!s.rho) {
      out << "undefined (constant ranks)\n";
    } else {
      std::snprintf(line, sizeof line, "rho = %.4f", *s.rho);
      out << line;
      if (s.p_value) {
        std::snprintf(line, sizeof line, ", p ~ %.3g (t approximation)", *s.p_value);
        out << line;
      }
      out << "\n";
    }
  }
  out << "\nPer-fold detail\n";
  for (const auto& r : g.rows) {
    out << r.model << " [" << r.binning << "]\n";
    for (const auto& f : r.folds) {
      std::snprintf(line, sizeof line, "  fold %2zu  acc %s  auc %s", f.fold,
                    f.accuracy ? std::to_string(*f.accuracy).c_str() : "n/a",
                    f.auc ? std::to_string(*f.auc).c_str() : "n/a");
      out << line << "  features " << f.selected.size();
      if (!f.composition.empty()) {
        out << "  members";
        for (const auto& m : f.composition) out << " " << m;
      }
      out << "\n";
    }
  }
  for (const auto& f : g.failures) out << "FAILED " << f.cell << ": " << f.message << "\n";
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive decision support: cohort modelling and service-package what-if"};
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "Write a synthetic cohort, its schema and its generator spec");
  std::string synth_out = "synth", synth_spec;
  std::optional<std::uint64_t> synth_seed;
  std::optional<std::size_t> synth_n;
  synth->add_option("--out", synth_out, "Output stem")->capture_default_str();
  synth->add_option("--spec", synth_spec, "Generator spec JSON");
  synth->add_option("--seed", synth_seed, "Seed");
  synth->add_option("--n", synth_n, "Number of records");

  Common train_c;
  auto* train = app.add_subcommand("train", "Fit one cell on the whole cohort and write a model artifact");
  add_common(train, train_c);
  std::string train_method, train_binning, train_selector, train_out;
  train->add_option("--method", train_method, "Learner id (default k2)");
  train->add_option("--binning", train_binning, "'Bin Target' or CAIM");
  train->add_option("--selector", train_selector, "none, chi2, relieff, gain_ratio, cfs_su");
  train->add_option("--out", train_out, "Artifact path");

  Common grid_c;
  auto* grid = app.add_subcommand("grid", "Cross-validate the model grid and write CSV and JSON reports");
  add_common(grid, grid_c);
  std::string grid_csv, grid_json;
  bool grid_parallel = false;
  grid->add_option("--csv", grid_csv, "CSV report path");
  grid->add_option("--json", grid_json, "JSON report path");
  grid->add_flag("--parallel", grid_parallel, "Run cells in parallel");

  auto* report = app.add_subcommand("report", "Render a grid report with Spearman(AUC, H) and per-fold detail");
  std::string report_in;
  report->add_option("grid", report_in, "JSON grid report")->required();

  auto* recommend = app.add_subcommand("recommend", "Rank service packages for a client");
  std::string rec_artifact, rec_client, rec_catalog;
  bool rec_json = false;
  recommend->add_option("--artifact", rec_artifact, "Model artifact")->required();
  recommend->add_option("--client", rec_client, "Client JSON object")->required();
  recommend->add_option("--catalog", rec_catalog, "Package catalog JSON");
  recommend->add_flag("--json", rec_json, "Print the /whatif response body");

  Common serve_c;
  auto* serve = app.add_subcommand("serve", "Serve /health /schema /packages /whatif /grid");
  add_common(serve, serve_c);
  std::string serve_artifact, serve_catalog, serve_grid, serve_host;
  std::optional<int> serve_port;
  serve->add_option("--artifact", serve_artifact, "Model artifact");
  serve->add_option("--catalog", serve_catalog, "Package catalog JSON");
  serve->add_option("--grid", serve_grid, "JSON grid report");
  serve->add_option("--host", serve_host, "Bind address");
  serve->add_option("--port", serve_port, "Port");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      ads::GenSpec spec = synth_spec.empty() ? ads::GenSpec{} : ads::load_gen_spec(synth_spec);
      if (synth_seed) spec.seed = *synth_seed;
      if (synth_n) spec.n = *synth_n;
      const ads::Cohort cohort = ads::generate(spec);
      ads::write_synth(synth_out, spec, cohort);
      std::cout << "wrote " << synth_out << ".csv (" << cohort.size() << " records), " << synth_out
                << ".schema.json, " << synth_out << ".spec.json\n";
    } else if (*train) {
      ads::RunConfig cfg = resolve(train_c);
      if (!train_method.empty()) cfg.train.spec = ads::make_spec(ads::parse_method(train_method));
      if (!train_binning.empty()) cfg.train.mode = ads::parse_binning_mode(train_binning);
      if (!train_selector.empty()) cfg.train.selector = ads::parse_selector(train_selector);
      if (!train_out.empty()) cfg.artifact = train_out;
      if (cfg.train.spec.requires_discrete() && cfg.train.mode != ads::BinningMode::CAIM) {
        throw ads::ConfigError(ads::display_name(cfg.train.spec.method) + " requires --binning CAIM");
      }
      const ads::Cohort cohort = load(cfg);
      ads::ModelArtifact a = ads::train_artifact(cohort, cfg.train, cfg.grid.seed, cfg.grid.target);
      a.metadata["created_utc"] = utc_now();
      ads::save_artifact(cfg.artifact, a);
      std::cout << "wrote " << cfg.artifact.string() << " (" << cfg.train.name() << ", "
                << ads::to_string(cfg.train.mode) << ")\n";
    } else if (*grid) {
      ads::RunConfig cfg = resolve(grid_c);
      if (!grid_csv.empty()) cfg.report_csv = grid_csv;
      if (!grid_json.empty()) cfg.report_json = grid_json;
      if (grid_parallel) cfg.grid.exec = ads::kernels::Execution::Parallel;
      const ads::Cohort cohort = load(cfg);
      const ads::GridResult g = ads::run_grid(cohort, cfg.cells, cfg.grid);
      write_text(cfg.report_csv, ads::grid_to_csv(g));
      write_text(cfg.report_json, ads::grid_to_json(g).dump(2) + "\n");
      std::cout << ads::grid_to_csv(g);
      if (g.partial()) {
        std::cerr << "ads: error: " << g.failures.size() << " grid cell(s) failed; see report\n";
        return 1;
      }
    } else if (*report) {
      std::cout << report_text(read_json(report_in));
    } else if (*recommend) {
      const ads::ModelArtifact a = ads::load_artifact(rec_artifact);
      const ads::PackageCatalog catalog =
          rec_catalog.empty() ? ads::default_catalog() : ads::load_catalog(rec_catalog, a.schema);
      const ads::Record client = ads::record_from_json(a.schema, read_json(rec_client));
      const auto recs = ads::what_if(a, client, catalog);
      if (rec_json) std::cout << ads::recommendations_to_json(recs).dump() << "\n";
      else std::cout << ads::recommendations_table(recs);
    } else if (*serve) {
      ads::RunConfig cfg = serve_c.config.empty() ? ads::RunConfig{} : ads::load_run_config(serve_c.config);
      if (!serve_artifact.empty()) cfg.artifact = serve_artifact;
      if (!serve_catalog.empty()) cfg.catalog = serve_catalog;
      if (!serve_grid.empty()) cfg.report_json = serve_grid;
      if (!serve_host.empty()) cfg.host = serve_host;
      if (serve_port) cfg.port = *serve_port;
      std::optional<ads::ModelArtifact> artifact;
      if (fs::exists(cfg.artifact)) artifact = ads::load_artifact(cfg.artifact);
      else std::cerr << "ads: warning: no artifact at " << cfg.artifact.string() << "; /schema and /whatif return 503\n";
      ads::PackageCatalog catalog = ads::default_catalog();
      if (cfg.catalog) {
        catalog = artifact ? ads::load_catalog(*cfg.catalog, artifact->schema)
                           : ads::catalog_from_json(read_json(*cfg.catalog));
      }
      std::optional<json> grid_report;
      if (fs::exists(cfg.report_json)) grid_report = read_json(cfg.report_json);
      const ads::Service service(std::move(artifact), std::move(catalog), std::move(grid_report));
      ads::HttpServer server(service);
      const int port = server.bind(cfg.host, cfg.port);
      if (port < 0) throw ads::ConfigError("cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
      std::cout << "listening on " << cfg.host << ":" << port << std::endl;
      server.listen();
    }
  } catch (const std::exception& e) {
    std::cerr << "ads: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
