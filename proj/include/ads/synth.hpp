#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ads/cohort.hpp"
#include "json.hpp"

namespace ads {

// Latent improvement model:
//   score = baseline * z(baseline) + age * z(age) + symptom * z(symptom)
//         + diagnosis[d] + crisis * [crisis] + profile[d][p]
//         + high_volume * [high] + baseline_x_high * z(baseline) * [high]
//   change = score + N(0, noise_sd^2)
struct GenCoefficients {
  double baseline = -0.6;
  double age = -0.2;
  double symptom = -0.25;
  double crisis = -0.3;
  double high_volume = 0.35;
  double baseline_x_high = -0.1;
  std::map<std::string, double> diagnosis;                             // main effects
  std::map<std::string, std::map<std::string, double>> profile_effect;  // diagnosis -> profile -> effect
};

struct GenSpec {
  std::uint64_t seed = 20100601;
  std::size_t n = 423;
  double noise_sd = 0.92;
  // Missingness rate of the fields with no effect on the outcome.
  double missing_rate = 0.03;
  GenCoefficients coef;

  GenSpec();
  void validate() const;
};

void to_json(nlohmann::json& j, const GenSpec& s);
void from_json(const nlohmann::json& j, GenSpec& s);

// The 14 predictors plus client_id and followup_carla.
CohortSchema synth_schema();

Cohort generate(const GenSpec& spec);

// Noise-free improvement score; throws when a field it uses is missing.
double oracle_score(const GenSpec& spec, const CohortSchema& schema, const Record& record);
// Population mean of oracle_score under the sampling marginals.
double population_mean_score(const GenSpec& spec);
// Probability that the observed change lands at or above the population
// mean score.
double oracle_p_above(const GenSpec& spec, const CohortSchema& schema, const Record& record);

// Writes <stem>.csv, <stem>.schema.json and <stem>.spec.json.
void write_synth(const std::filesystem::path& stem, const GenSpec& spec, const Cohort& cohort);
GenSpec load_gen_spec(const std::filesystem::path& path);

}  // namespace ads
