#include "ads/synth.hpp"

#include <cmath>
#include <fstream>

#include <boost/math/distributions/normal.hpp>

#include "ads/error.hpp"
#include "ads/rng.hpp"

namespace ads {

using nlohmann::json;

namespace {

struct Marginal {
  std::vector<std::string> levels;
  std::vector<double> weights;
};

const Marginal kDiagnosis{{"depressive", "bipolar", "anxiety", "psychotic", "substance"}, {0.35, 0.15, 0.2, 0.1, 0.2}};
const Marginal kProfile{{"therapy", "medical", "case-management", "therapy+medical"}, {0.35, 0.25, 0.2, 0.2}};
const Marginal kVolume{{"low", "high"}, {0.5, 0.5}};
const Marginal kGender{{"female", "male"}, {0.58, 0.42}};
const Marginal kRace{{"white", "black", "other"}, {0.75, 0.2, 0.05}};
const Marginal kCrisis{{"no", "yes"}, {0.85, 0.15}};
const Marginal kPayor{{"safety-net", "medicaid", "private", "self-pay"}, {0.4, 0.35, 0.15, 0.1}};
const Marginal kLocation{{"clinic-a", "clinic-b", "clinic-c", "clinic-d", "clinic-e"}, {0.3, 0.25, 0.2, 0.15, 0.1}};
const Marginal kCounty{{"davidson", "rutherford", "montgomery", "maury", "dickson", "coffee", "bedford", "warren"},
                       {0.25, 0.18, 0.14, 0.12, 0.1, 0.08, 0.07, 0.06}};
const Marginal kRegion{{"Urban", "Rural"}, {0.6, 0.4}};

constexpr double kBaselineMean = 3.0, kBaselineSd = 0.8;
constexpr int kAgeLo = 18, kAgeHi = 70;
constexpr double kAgeMean = 44.0, kAgeScale = 15.0;
constexpr double kSymptomMean = 30.0, kSymptomSd = 8.0;
constexpr double kFunctionMean = 25.0, kFunctionSd = 6.0;

FeatureSpec numeric(const std::string& name) { return {name, FeatureKind::Numeric, FeatureRole::Predictor, false, {}}; }
FeatureSpec categorical(const std::string& name, const Marginal& m, bool service = false) {
  return {name, FeatureKind::Categorical, FeatureRole::Predictor, service, m.levels};
}
FeatureSpec binary(const std::string& name, const Marginal& m) {
  return {name, FeatureKind::Binary, FeatureRole::Predictor, false, m.levels};
}

const std::string& draw(Rng& rng, const Marginal& m) { return m.levels[rng.categorical(m.weights)]; }

double get_number(const CohortSchema& schema, const Record& r, const std::string& name) {
  const Value& v = r.values.at(schema.require_index(name));
  if (!std::holds_alternative<double>(v)) throw Error("oracle needs a value for '" + name + "'");
  return std::get<double>(v);
}

const std::string& get_label(const CohortSchema& schema, const Record& r, const std::string& name) {
  const Value& v = r.values.at(schema.require_index(name));
  if (!std::holds_alternative<std::string>(v)) throw Error("oracle needs a value for '" + name + "'");
  return std::get<std::string>(v);
}

double lookup(const std::map<std::string, double>& m, const std::string& key) {
  auto it = m.find(key);
  return it == m.end() ? 0.0 : it->second;
}

double profile_effect(const GenCoefficients& c, const std::string& d, const std::string& p) {
  auto it = c.profile_effect.find(d);
  return it == c.profile_effect.end() ? 0.0 : lookup(it->second, p);
}

}  // namespace

GenSpec::GenSpec() {
  coef.diagnosis = {{"depressive", 0.2}, {"bipolar", -0.2}, {"anxiety", 0.3}, {"psychotic", -0.4}, {"substance", -0.1}};
  coef.profile_effect = {{"depressive", {{"therapy", 0.4}}},
                         {"anxiety", {{"therapy", 0.3}}},
                         {"psychotic", {{"medical", 0.5}}},
                         {"bipolar", {{"therapy+medical", 0.4}}},
                         {"substance", {{"case-management", 0.4}}}};
}

void GenSpec::validate() const {
  if (n < 1) throw ConfigError("synth: n must be at least 1");
  if (!(noise_sd > 0.0) || !std::isfinite(noise_sd)) throw ConfigError("synth: noise_sd must be positive");
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) throw ConfigError("synth: missing_rate must be in [0,1)");
  for (double x : {coef.baseline, coef.age, coef.symptom, coef.crisis, coef.high_volume, coef.baseline_x_high}) {
    if (!std::isfinite(x)) throw ConfigError("synth: coefficients must be finite");
  }
  auto known = [](const Marginal& m, const std::string& s) {
    return std::find(m.levels.begin(), m.levels.end(), s) != m.levels.end();
  };
  for (const auto& [d, v] : coef.diagnosis) {
    if (!known(kDiagnosis, d) || !std::isfinite(v)) throw ConfigError("synth: bad diagnosis effect '" + d + "'");
  }
  for (const auto& [d, row] : coef.profile_effect) {
    if (!known(kDiagnosis, d)) throw ConfigError("synth: unknown diagnosis '" + d + "'");
    for (const auto& [p, v] : row) {
      if (!known(kProfile, p) || !std::isfinite(v)) throw ConfigError("synth: bad profile effect '" + p + "'");
    }
  }
}

void to_json(json& j, const GenSpec& s) {
  j = json{{"seed", s.seed},
           {"n", s.n},
           {"noise_sd", s.noise_sd},
           {"missing_rate", s.missing_rate},
           {"coefficients",
            {{"baseline", s.coef.baseline},
             {"age", s.coef.age},
             {"symptom", s.coef.symptom},
             {"crisis", s.coef.crisis},
             {"high_volume", s.coef.high_volume},
             {"baseline_x_high", s.coef.baseline_x_high},
             {"diagnosis", s.coef.diagnosis},
             {"profile_effect", s.coef.profile_effect}}}};
}

void from_json(const json& j, GenSpec& s) {
  static const std::vector<std::string> top{"seed", "n", "noise_sd", "missing_rate", "coefficients"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(top.begin(), top.end(), it.key()) == top.end()) {
      throw ConfigError("unknown key '" + it.key() + "' in synth spec");
    }
  }
  GenSpec out;
  if (j.contains("seed")) out.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("n")) out.n = j.at("n").get<std::size_t>();
  if (j.contains("noise_sd")) out.noise_sd = j.at("noise_sd").get<double>();
  if (j.contains("missing_rate")) out.missing_rate = j.at("missing_rate").get<double>();
  if (j.contains("coefficients")) {
    const json& c = j.at("coefficients");
    for (auto it = c.begin(); it != c.end(); ++it) {
      const std::string& k = it.key();
      if (k == "baseline") out.coef.baseline = *it;
      else if (k == "age") out.coef.age = *it;
      else if (k == "symptom") out.coef.symptom = *it;
      else if (k == "crisis") out.coef.crisis = *it;
      else if (k == "high_volume") out.coef.high_volume = *it;
      else if (k == "baseline_x_high") out.coef.baseline_x_high = *it;
      else if (k == "diagnosis") out.coef.diagnosis = it->get<std::map<std::string, double>>();
      else if (k == "profile_effect") out.coef.profile_effect = it->get<std::map<std::string, std::map<std::string, double>>>();
      else throw ConfigError("unknown key 'coefficients." + k + "' in synth spec");
    }
  }
  out.validate();
  s = std::move(out);
}

CohortSchema synth_schema() {
  std::vector<FeatureSpec> f{
      {"client_id", FeatureKind::Categorical, FeatureRole::Identifier, false, {}},
      numeric("baseline_carla"),
      binary("gender", kGender),
      categorical("race", kRace),
      numeric("age"),
      numeric("toms_symptom"),
      numeric("toms_function"),
      binary("mobile_crisis", kCrisis),
      categorical("diagnosis", kDiagnosis),
      categorical("payor", kPayor),
      categorical("location", kLocation),
      categorical("county", kCounty),
      binary("region_type", kRegion),
      categorical("service_profile", kProfile, true),
      categorical("service_volume", kVolume, true),
      {"followup_carla", FeatureKind::Numeric, FeatureRole::TargetRaw, false, {}},
  };
  return CohortSchema(std::move(f), "baseline_carla", "followup_carla");
}

Cohort generate(const GenSpec& spec) {
  spec.validate();
  const CohortSchema schema = synth_schema();
  Rng rng(spec.seed);
  std::vector<Record> records;
  records.reserve(spec.n);
  auto maybe = [&](Value v) -> Value { return rng.uniform() < spec.missing_rate ? Value{Missing{}} : v; };
  for (std::size_t i = 0; i < spec.n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "C%05zu", i + 1);
    const double baseline = kBaselineMean + kBaselineSd * rng.normal();
    Record r;
    r.values = {
        std::string(id),
        baseline,
        draw(rng, kGender),
        Value{},
        static_cast<double>(kAgeLo + static_cast<int>(rng.below(kAgeHi - kAgeLo + 1))),
        kSymptomMean + kSymptomSd * rng.normal(),
        Value{},
        draw(rng, kCrisis),
        draw(rng, kDiagnosis),
        Value{},
        draw(rng, kLocation),
        draw(rng, kCounty),
        draw(rng, kRegion),
        draw(rng, kProfile),
        draw(rng, kVolume),
        Value{},
    };
    r.values[3] = maybe(draw(rng, kRace));
    r.values[6] = maybe(kFunctionMean + kFunctionSd * rng.normal());
    r.values[9] = maybe(draw(rng, kPayor));
    const double change = oracle_score(spec, schema, r) + spec.noise_sd * rng.normal();
    r.values[15] = baseline + change;
    records.push_back(std::move(r));
  }
  return Cohort(schema, std::move(records));
}

double oracle_score(const GenSpec& spec, const CohortSchema& schema, const Record& r) {
  const auto& c = spec.coef;
  const double zb = (get_number(schema, r, "baseline_carla") - kBaselineMean) / kBaselineSd;
  const double za = (get_number(schema, r, "age") - kAgeMean) / kAgeScale;
  const double zs = (get_number(schema, r, "toms_symptom") - kSymptomMean) / kSymptomSd;
  const std::string& d = get_label(schema, r, "diagnosis");
  const std::string& p = get_label(schema, r, "service_profile");
  const double crisis = get_label(schema, r, "mobile_crisis") == "yes" ? 1.0 : 0.0;
  const double high = get_label(schema, r, "service_volume") == "high" ? 1.0 : 0.0;
  return c.baseline * zb + c.age * za + c.symptom * zs + lookup(c.diagnosis, d) + c.crisis * crisis +
         profile_effect(c, d, p) + c.high_volume * high + c.baseline_x_high * zb * high;
}

double population_mean_score(const GenSpec& spec) {
  // Every z-scored term has mean zero (age is uniform on integers centred
  // at kAgeMean) and the categorical draws are independent.
  const auto& c = spec.coef;
  double m = 0.0;
  for (std::size_t i = 0; i < kDiagnosis.levels.size(); ++i) {
    const std::string& d = kDiagnosis.levels[i];
    m += kDiagnosis.weights[i] * lookup(c.diagnosis, d);
    for (std::size_t k = 0; k < kProfile.levels.size(); ++k) {
      m += kDiagnosis.weights[i] * kProfile.weights[k] * profile_effect(c, d, kProfile.levels[k]);
    }
  }
  m += kCrisis.weights[1] * c.crisis;
  m += kVolume.weights[1] * c.high_volume;
  return m;
}

double oracle_p_above(const GenSpec& spec, const CohortSchema& schema, const Record& record) {
  const boost::math::normal_distribution<double> phi;
  const double z = (oracle_score(spec, schema, record) - population_mean_score(spec)) / spec.noise_sd;
  return boost::math::cdf(phi, z);
}

void write_synth(const std::filesystem::path& stem, const GenSpec& spec, const Cohort& cohort) {
  auto with = [&](const std::string& suffix) {
    auto p = stem;
    p += suffix;
    return p;
  };
  save_cohort(with(".csv"), cohort);
  auto write = [](const std::filesystem::path& p, const json& j) {
    std::ofstream out(p);
    if (!out) throw Error("cannot write " + p.string());
    out << j.dump(2) << "\n";
  };
  write(with(".schema.json"), json(cohort.schema()));
  write(with(".spec.json"), json(spec));
}

GenSpec load_gen_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  try {
    return json::parse(in).get<GenSpec>();
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace ads
