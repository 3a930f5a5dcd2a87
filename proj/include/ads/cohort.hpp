#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace ads {

enum class FeatureKind { Numeric, Categorical, Binary };
enum class FeatureRole { Predictor, TargetRaw, Identifier };

std::string to_string(FeatureKind kind);
std::string to_string(FeatureRole role);
FeatureKind parse_feature_kind(const std::string& s);
FeatureRole parse_feature_role(const std::string& s);

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::Numeric;
  FeatureRole role = FeatureRole::Predictor;
  bool service_field = false;
  // Allowed labels for categorical and binary features, in declaration order.
  std::vector<std::string> categories;

  bool is_numeric() const { return kind == FeatureKind::Numeric; }
  std::optional<std::size_t> category_index(const std::string& label) const;
  bool operator==(const FeatureSpec&) const = default;
};

// Declares the columns of a cohort and which pair of columns carries the
// outcome (baseline score, follow-up score).
class CohortSchema {
 public:
  CohortSchema() = default;
  CohortSchema(std::vector<FeatureSpec> features, std::string baseline_name,
               std::string followup_name);

  const std::vector<FeatureSpec>& features() const { return features_; }
  const std::string& baseline_name() const { return baseline_; }
  const std::string& followup_name() const { return followup_; }

  std::size_t size() const { return features_.size(); }
  const FeatureSpec& at(std::size_t i) const { return features_.at(i); }
  std::optional<std::size_t> index_of(const std::string& name) const;
  std::size_t require_index(const std::string& name) const;
  std::size_t baseline_index() const { return require_index(baseline_); }
  std::size_t followup_index() const { return require_index(followup_); }

  // Indices of predictor features in schema order.
  std::vector<std::size_t> predictor_indices() const;
  std::vector<std::size_t> service_indices() const;

  bool operator==(const CohortSchema&) const = default;

 private:
  void validate() const;

  std::vector<FeatureSpec> features_;
  std::string baseline_;
  std::string followup_;
};

void to_json(nlohmann::json& j, const CohortSchema& schema);
void from_json(const nlohmann::json& j, CohortSchema& schema);
CohortSchema load_schema(const std::filesystem::path& path);

struct Missing {
  bool operator==(const Missing&) const = default;
};

// A cell: missing, a number, or a category label.
using Value = std::variant<Missing, double, std::string>;

inline bool is_missing(const Value& v) { return std::holds_alternative<Missing>(v); }

// One client row. Values are stored in schema order.
struct Record {
  std::vector<Value> values;

  bool operator==(const Record&) const = default;
};

// Checks one value against its spec; returns an error message or nullopt.
std::optional<std::string> check_value(const FeatureSpec& spec, const Value& v);

class Cohort {
 public:
  Cohort() = default;
  // Validates every record against the schema.
  Cohort(CohortSchema schema, std::vector<Record> records);

  const CohortSchema& schema() const { return schema_; }
  const std::vector<Record>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  const Record& operator[](std::size_t i) const { return records_[i]; }

  const Value& value(std::size_t record, const std::string& feature) const;

  // Records at the given positions, in that order.
  Cohort subset(const std::vector<std::size_t>& indices) const;

  bool operator==(const Cohort&) const = default;

 private:
  CohortSchema schema_;
  std::vector<Record> records_;
};

// CSV ingestion: first row is a header (any column order), empty or NA
// cells are missing. Errors name the 1-based data row and column.
Cohort load_cohort(const std::filesystem::path& path, const CohortSchema& schema);
Cohort parse_cohort_csv(const std::string& text, const CohortSchema& schema);
std::string write_cohort_csv(const Cohort& cohort);
void save_cohort(const std::filesystem::path& path, const Cohort& cohort);

struct ScreenReport {
  std::size_t input_count = 0;
  std::size_t retained_count = 0;
  // Keyed "missing:<feature>"; a record is charged to the first required
  // feature it lacks.
  std::map<std::string, std::size_t> drop_reasons;

  std::size_t dropped() const;
};

struct ScreenResult {
  Cohort cohort;
  ScreenReport report;
};

ScreenResult screen(const Cohort& cohort, const std::vector<std::string>& required);

struct FeatureSummary {
  std::string name;
  FeatureKind kind = FeatureKind::Numeric;
  std::size_t count = 0;  // observed (non-missing)
  double missing_rate = 0.0;
  std::optional<double> mean;  // unset when undefined
  std::optional<double> sd;    // sample sd; unset when count < 2
  std::map<std::string, std::size_t> frequencies;
};

std::vector<FeatureSummary> summarize(const Cohort& cohort);

}  // namespace ads
