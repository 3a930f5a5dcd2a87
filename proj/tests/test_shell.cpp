#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "ads/artifact.hpp"
#include "ads/config.hpp"
#include "ads/error.hpp"
#include "ads/service.hpp"
#include "ads/synth.hpp"
#include "doctest.h"
#include "httplib.h"

using namespace ads;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const Cohort& cohort() {
  static const Cohort c = [] {
    GenSpec s;
    s.n = 160;
    s.seed = 17;
    return screen(generate(s), {"baseline_carla", "followup_carla"}).cohort;
  }();
  return c;
}

const ModelArtifact& nb_artifact() {
  static const ModelArtifact a =
      train_artifact(cohort(), GridCell{BinningMode::CAIM, make_spec(Method::NaiveBayes), Selector::Chi2}, 5);
  return a;
}

json client() {
  json j = json::object();
  const auto& r = cohort()[0];
  const auto& schema = cohort().schema();
  for (std::size_t k : schema.predictor_indices()) {
    const auto& v = r.values[k];
    if (std::holds_alternative<double>(v)) j[schema.at(k).name] = std::get<double>(v);
    else if (std::holds_alternative<std::string>(v)) j[schema.at(k).name] = std::get<std::string>(v);
  }
  return j;
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("ads_shell_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("artifacts round-trip bit-equal for every learner") {
  const auto dir = scratch("roundtrip");
  for (Method m : {Method::NaiveBayes, Method::AODE, Method::BayesNetK2, Method::Tree, Method::RandomForest,
                   Method::LogReg, Method::KNN, Method::MLP, Method::LinRegClassifier, Method::Ensemble,
                   Method::Vote}) {
    const auto mode = requires_discrete(m) ? BinningMode::CAIM : BinningMode::BinTarget;
    const auto a = train_artifact(cohort(), GridCell{mode, make_spec(m), Selector::None}, 9);
    CAPTURE(to_string(m));
    save_artifact(dir / "a.json", a);
    const auto b = load_artifact(dir / "a.json");
    CHECK(artifact_to_json(b).dump() == artifact_to_json(a).dump());
    for (const auto& r : cohort().records()) CHECK(a.p_above(r) == b.p_above(r));
  }
  fs::remove_all(dir);
}

TEST_CASE("artifact loading rejects tampering") {
  const json j = artifact_to_json(nb_artifact());
  json v = j;
  v["format_version"] = 2;
  CHECK_THROWS(artifact_from_json(v));
  json f = j;
  f["schema_fingerprint"] = "0000000000000000";
  CHECK_THROWS(artifact_from_json(f));
  json s = j;
  s["schema"]["features"][1]["name"] = "renamed";
  CHECK_THROWS(artifact_from_json(s));
  CHECK_NOTHROW(artifact_from_json(j));
}

TEST_CASE("artifact prediction validates the client record") {
  const auto& a = nb_artifact();
  const auto r = record_from_json(a.schema, client());
  const double p = a.p_above(r);
  CHECK(p >= 0.0);
  CHECK(p <= 1.0);
  Record wrong = r;
  wrong.values.pop_back();
  CHECK_THROWS(a.predict(wrong));
}

TEST_CASE("run config") {
  const json j{{"schema", "s.json"},
               {"cohort", "/abs/c.csv"},
               {"seed", 4},
               {"folds", 5},
               {"train", {{"binning", "caim"}, {"model", {{"method", "aode"}}}}},
               {"outputs", {{"report_csv", "out/g.csv"}}},
               {"serve", {{"port", 9000}}}};
  const auto c = parse_run_config(j, "/base");
  CHECK(c.schema == fs::path("/base/s.json"));
  CHECK(c.cohort == fs::path("/abs/c.csv"));
  CHECK(c.grid.seed == 4);
  CHECK(c.grid.n_folds == 5);
  CHECK(c.train.spec.method == Method::AODE);
  CHECK(c.report_csv == fs::path("/base/out/g.csv"));
  CHECK(c.port == 9000);
  json bad = j;
  bad["sede"] = 1;
  CHECK_THROWS_WITH_AS(parse_run_config(bad), doctest::Contains("sede"), ConfigError);
  json nested = j;
  nested["serve"]["hots"] = "x";
  CHECK_THROWS_WITH_AS(parse_run_config(nested), doctest::Contains("hots"), ConfigError);
}

TEST_CASE("service endpoints") {
  const Service svc(nb_artifact(), default_catalog(), json{{"rows", json::array()}});
  auto health = svc.handle("GET", "/health");
  CHECK(health.status == 200);
  CHECK(json::parse(health.body)["artifact_loaded"] == true);

  const auto schema = json::parse(svc.handle("GET", "/schema").body);
  CHECK(schema["fields"].size() == 14);
  for (const auto& f : schema["fields"])
    if (f["kind"] != "numeric") CHECK(f.contains("categories"));

  const auto pk = json::parse(svc.handle("GET", "/packages").body);
  CHECK(pk["packages"].size() == 8);

  const auto w = svc.handle("POST", "/whatif", client().dump());
  REQUIRE(w.status == 200);
  const auto recs = json::parse(w.body);
  REQUIRE(recs.size() == 8);
  CHECK(recs[0]["rank"] == 1);
  const auto direct = what_if(nb_artifact(), record_from_json(nb_artifact().schema, client()), default_catalog());
  CHECK(w.body == recommendations_to_json(direct).dump());

  CHECK(svc.handle("POST", "/whatif", "{not json").status == 400);
  json unknown = client();
  unknown["shoe_size"] = 3;
  CHECK(svc.handle("POST", "/whatif", unknown.dump()).status == 400);
  json bad_cat = client();
  bad_cat["diagnosis"] = "gout";
  CHECK(svc.handle("POST", "/whatif", bad_cat.dump()).status == 422);
  CHECK(svc.handle("GET", "/grid").status == 200);
  CHECK(svc.handle("GET", "/nope").status == 404);
  CHECK(svc.handle("GET", "/whatif").status == 404);
}

TEST_CASE("service without an artifact or report") {
  const Service svc(std::nullopt, default_catalog());
  CHECK(json::parse(svc.handle("GET", "/health").body)["artifact_loaded"] == false);
  CHECK(svc.handle("GET", "/schema").status == 503);
  CHECK(svc.handle("POST", "/whatif", client().dump()).status == 503);
  CHECK(svc.handle("GET", "/grid").status == 404);
  CHECK(svc.handle("GET", "/packages").status == 200);
}

TEST_CASE("http server on an ephemeral port") {
  const Service svc(nb_artifact(), default_catalog());
  HttpServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread t([&] { server.listen(); });
  httplib::Client cli("127.0.0.1", port);
  auto h = cli.Get("/health");
  for (int i = 0; !h && i < 50; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    h = cli.Get("/health");
  }
  REQUIRE(h);
  CHECK(h->status == 200);
  const auto w = cli.Post("/whatif", client().dump(), "application/json");
  REQUIRE(w);
  CHECK(w->status == 200);
  CHECK(w->body == svc.handle("POST", "/whatif", client().dump()).body);
  const auto bad = cli.Post("/whatif", "{", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  server.stop();
  t.join();
}

TEST_CASE("cli recommend prints the whatif body") {
  const auto dir = scratch("cli");
  save_artifact(dir / "model.json", nb_artifact());
  std::ofstream(dir / "client.json") << client().dump();
  const std::string cmd = std::string(ADS_CLI) + " recommend --artifact " + (dir / "model.json").string() +
                          " --client " + (dir / "client.json").string() + " --json > " +
                          (dir / "out.txt").string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  const Service svc(nb_artifact(), default_catalog());
  CHECK(slurp(dir / "out.txt") == svc.handle("POST", "/whatif", client().dump()).body + "\n");
  fs::remove_all(dir);
}

TEST_CASE("cli end to end: synth, grid, train") {
  const auto dir = scratch("e2e");
  const auto ads = std::string(ADS_CLI);
  const auto d = dir.string();
  REQUIRE(std::system((ads + " synth --out " + d + "/c --n 120 --seed 3 > /dev/null").c_str()) == 0);
  const json cfg{{"schema", "c.schema.json"},
                 {"cohort", "c.csv"},
                 {"seed", 2},
                 {"cells", json::array({{{"binning", "caim"}, {"model", {{"method", "naive_bayes"}}}},
                                        {{"binning", "bin_target"}, {"model", {{"method", "logreg"}}}}})},
                 {"outputs", {{"report_csv", "g.csv"}, {"report_json", "g.json"}, {"artifact", "m.json"}}}};
  std::ofstream(dir / "run.json") << cfg.dump();
  REQUIRE(std::system((ads + " grid --config " + d + "/run.json > " + d + "/stdout.txt").c_str()) == 0);
  const auto csv = slurp(dir / "g.csv");
  CHECK(csv == slurp(dir / "stdout.txt"));
  CHECK(csv.rfind("# positive_class=above seed=2", 0) == 0);
  REQUIRE(std::system((ads + " grid --config " + d + "/run.json > /dev/null").c_str()) == 0);
  CHECK(slurp(dir / "g.csv") == csv);
  REQUIRE(std::system((ads + " report " + d + "/g.json > /dev/null").c_str()) == 0);
  REQUIRE(std::system((ads + " train --config " + d + "/run.json > /dev/null").c_str()) == 0);
  CHECK(load_artifact(dir / "m.json").cell.spec.method == Method::BayesNetK2);
  CHECK(std::system((ads + " grid --config " + d + "/missing.json 2> /dev/null").c_str()) != 0);
  fs::remove_all(dir);
}
