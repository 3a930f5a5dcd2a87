#include "ads/cohort.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "ads/error.hpp"
#include "json.hpp"

namespace ads {

using nlohmann::json;

std::string to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Numeric: return "numeric";
    case FeatureKind::Categorical: return "categorical";
    case FeatureKind::Binary: return "binary";
  }
  return "?";
}

std::string to_string(FeatureRole role) {
  switch (role) {
    case FeatureRole::Predictor: return "predictor";
    case FeatureRole::TargetRaw: return "target_raw";
    case FeatureRole::Identifier: return "identifier";
  }
  return "?";
}

FeatureKind parse_feature_kind(const std::string& s) {
  if (s == "numeric") return FeatureKind::Numeric;
  if (s == "categorical") return FeatureKind::Categorical;
  if (s == "binary") return FeatureKind::Binary;
  throw ConfigError("unknown feature kind '" + s + "'");
}

FeatureRole parse_feature_role(const std::string& s) {
  if (s == "predictor") return FeatureRole::Predictor;
  if (s == "target_raw") return FeatureRole::TargetRaw;
  if (s == "identifier") return FeatureRole::Identifier;
  throw ConfigError("unknown feature role '" + s + "'");
}

std::optional<std::size_t> FeatureSpec::category_index(const std::string& label) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == label) return i;
  }
  return std::nullopt;
}

CohortSchema::CohortSchema(std::vector<FeatureSpec> features, std::string baseline_name,
                           std::string followup_name)
    : features_(std::move(features)),
      baseline_(std::move(baseline_name)),
      followup_(std::move(followup_name)) {
  validate();
}

void CohortSchema::validate() const {
  std::set<std::string> names;
  std::size_t predictors = 0, services = 0;
  for (const auto& f : features_) {
    if (f.name.empty()) throw SchemaError("feature with empty name");
    if (!names.insert(f.name).second) throw SchemaError("duplicate feature '" + f.name + "'");
    if (f.kind == FeatureKind::Numeric) {
      if (!f.categories.empty()) {
        throw SchemaError("numeric feature '" + f.name + "' declares categories");
      }
    } else if (!(f.role == FeatureRole::Identifier && f.categories.empty())) {
      if (f.categories.size() < 2) {
        throw SchemaError("feature '" + f.name + "' needs at least 2 categories");
      }
      if (f.kind == FeatureKind::Binary && f.categories.size() != 2) {
        throw SchemaError("binary feature '" + f.name + "' must have exactly 2 categories");
      }
      std::set<std::string> cats(f.categories.begin(), f.categories.end());
      if (cats.size() != f.categories.size()) {
        throw SchemaError("feature '" + f.name + "' has duplicate categories");
      }
    }
    if (f.service_field && f.role != FeatureRole::Predictor) {
      throw SchemaError("service field '" + f.name + "' must be a predictor");
    }
    if (f.role == FeatureRole::Predictor) ++predictors;
    if (f.service_field) ++services;
  }
  if (predictors == 0) throw SchemaError("schema has no predictors");
  if (services == 0) throw SchemaError("schema has no service-field predictor");
  if (baseline_ == followup_) throw SchemaError("baseline and follow-up must differ");
  for (const auto* name : {&baseline_, &followup_}) {
    auto idx = index_of(*name);
    if (!idx) throw SchemaError("outcome column '" + *name + "' not declared");
    if (features_[*idx].kind != FeatureKind::Numeric) {
      throw SchemaError("outcome column '" + *name + "' must be numeric");
    }
  }
  if (features_[*index_of(followup_)].role != FeatureRole::TargetRaw) {
    throw SchemaError("follow-up column '" + followup_ + "' must have role target_raw");
  }
}

std::optional<std::size_t> CohortSchema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t CohortSchema::require_index(const std::string& name) const {
  auto idx = index_of(name);
  if (!idx) throw SchemaError("unknown feature '" + name + "'");
  return *idx;
}

std::vector<std::size_t> CohortSchema::predictor_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].role == FeatureRole::Predictor) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> CohortSchema::service_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].service_field) out.push_back(i);
  }
  return out;
}

void to_json(json& j, const CohortSchema& schema) {
  json features = json::array();
  for (const auto& f : schema.features()) {
    json jf = {{"name", f.name}, {"kind", to_string(f.kind)}, {"role", to_string(f.role)}};
    if (f.service_field) jf["service_field"] = true;
    if (!f.categories.empty()) jf["categories"] = f.categories;
    features.push_back(std::move(jf));
  }
  j = json{{"features", std::move(features)},
           {"target", {{"baseline", schema.baseline_name()}, {"followup", schema.followup_name()}}}};
}

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

}  // namespace

void from_json(const json& j, CohortSchema& schema) {
  if (!j.is_object()) throw ConfigError("schema must be an object");
  reject_unknown_keys(j, {"features", "target"}, "schema");
  if (!j.contains("features") || !j.contains("target")) {
    throw ConfigError("schema requires 'features' and 'target'");
  }
  std::vector<FeatureSpec> features;
  for (const auto& jf : j.at("features")) {
    reject_unknown_keys(jf, {"name", "kind", "role", "service_field", "categories"},
                        "schema feature");
    FeatureSpec f;
    f.name = jf.at("name").get<std::string>();
    f.kind = parse_feature_kind(jf.value("kind", std::string("numeric")));
    f.role = parse_feature_role(jf.value("role", std::string("predictor")));
    f.service_field = jf.value("service_field", false);
    if (jf.contains("categories")) f.categories = jf.at("categories").get<std::vector<std::string>>();
    features.push_back(std::move(f));
  }
  const auto& t = j.at("target");
  reject_unknown_keys(t, {"baseline", "followup"}, "schema target");
  schema = CohortSchema(std::move(features), t.at("baseline").get<std::string>(),
                        t.at("followup").get<std::string>());
}

CohortSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schema file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("schema file " + path.string() + ": " + e.what());
  }
  return j.get<CohortSchema>();
}

std::optional<std::string> check_value(const FeatureSpec& spec, const Value& v) {
  if (is_missing(v)) return std::nullopt;
  if (spec.kind == FeatureKind::Numeric) {
    const double* d = std::get_if<double>(&v);
    if (!d) return "expected a number for '" + spec.name + "'";
    if (!std::isfinite(*d)) return "non-finite number for '" + spec.name + "'";
    return std::nullopt;
  }
  const std::string* s = std::get_if<std::string>(&v);
  if (!s) return "expected a category label for '" + spec.name + "'";
  if (spec.role == FeatureRole::Identifier && spec.categories.empty()) return std::nullopt;
  if (!spec.category_index(*s)) {
    return "category '" + *s + "' not allowed for '" + spec.name + "'";
  }
  return std::nullopt;
}

Cohort::Cohort(CohortSchema schema, std::vector<Record> records)
    : schema_(std::move(schema)), records_(std::move(records)) {
  for (std::size_t r = 0; r < records_.size(); ++r) {
    if (records_[r].values.size() != schema_.size()) {
      throw SchemaError("record " + std::to_string(r + 1) + " has wrong width");
    }
    for (std::size_t c = 0; c < schema_.size(); ++c) {
      if (auto err = check_value(schema_.at(c), records_[r].values[c])) {
        throw SchemaError("record " + std::to_string(r + 1) + ": " + *err);
      }
    }
  }
}

const Value& Cohort::value(std::size_t record, const std::string& feature) const {
  return records_.at(record).values.at(schema_.require_index(feature));
}

Cohort Cohort::subset(const std::vector<std::size_t>& indices) const {
  Cohort out;
  out.schema_ = schema_;
  out.records_.reserve(indices.size());
  for (std::size_t i : indices) out.records_.push_back(records_.at(i));
  return out;
}

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_content = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_has_content || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        row_has_content = false;
        break;
      default:
        field.push_back(c);
        row_has_content = true;
    }
  }
  if (in_quotes) throw SchemaError("unterminated quoted field");
  if (row_has_content || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string format_number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos && s != "NA") return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

Cohort parse_cohort_csv(const std::string& text, const CohortSchema& schema) {
  auto rows = parse_csv(text);
  if (rows.empty()) throw SchemaError("CSV has no header row");
  const auto& header = rows.front();
  std::vector<std::size_t> column_to_feature(header.size());
  std::vector<bool> seen(schema.size(), false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = trim(header[c]);
    auto idx = schema.index_of(name);
    if (!idx) throw SchemaError("unknown column '" + name + "' (column " + std::to_string(c + 1) + ")");
    if (seen[*idx]) throw SchemaError("duplicate column '" + name + "'");
    seen[*idx] = true;
    column_to_feature[c] = *idx;
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (!seen[i]) throw SchemaError("missing column '" + schema.at(i).name + "'");
  }

  std::vector<Record> records;
  records.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where_row = "row " + std::to_string(r);
    if (row.size() != header.size()) {
      throw SchemaError(where_row + ": expected " + std::to_string(header.size()) + " fields, got " +
                        std::to_string(row.size()));
    }
    Record rec;
    rec.values.assign(schema.size(), Missing{});
    for (std::size_t c = 0; c < row.size(); ++c) {
      const FeatureSpec& spec = schema.at(column_to_feature[c]);
      const std::string cell = trim(row[c]);
      const std::string where = where_row + ", column '" + spec.name + "'";
      if (cell.empty() || cell == "NA") continue;
      if (spec.kind == FeatureKind::Numeric) {
        double x = 0.0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
        if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(x)) {
          throw SchemaError(where + ": unparseable number '" + cell + "'");
        }
        rec.values[column_to_feature[c]] = x;
      } else {
        if (!(spec.role == FeatureRole::Identifier && spec.categories.empty()) && !spec.category_index(cell)) {
          throw SchemaError(where + ": category '" + cell + "' not in allowed list");
        }
        rec.values[column_to_feature[c]] = cell;
      }
    }
    records.push_back(std::move(rec));
  }
  return Cohort(schema, std::move(records));
}

Cohort load_cohort(const std::filesystem::path& path, const CohortSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open cohort file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_cohort_csv(ss.str(), schema);
}

std::string write_cohort_csv(const Cohort& cohort) {
  std::string out;
  const auto& schema = cohort.schema();
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (c) out.push_back(',');
    out += quote_csv(schema.at(c).name);
  }
  out.push_back('\n');
  for (const auto& rec : cohort.records()) {
    for (std::size_t c = 0; c < rec.values.size(); ++c) {
      if (c) out.push_back(',');
      const Value& v = rec.values[c];
      if (const double* d = std::get_if<double>(&v)) out += format_number(*d);
      else if (const std::string* s = std::get_if<std::string>(&v)) out += quote_csv(*s);
    }
    out.push_back('\n');
  }
  return out;
}

void save_cohort(const std::filesystem::path& path, const Cohort& cohort) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write cohort file " + path.string());
  out << write_cohort_csv(cohort);
}

std::size_t ScreenReport::dropped() const {
  std::size_t total = 0;
  for (const auto& [_, n] : drop_reasons) total += n;
  return total;
}

ScreenResult screen(const Cohort& cohort, const std::vector<std::string>& required) {
  std::vector<std::size_t> idx;
  for (const auto& name : required) idx.push_back(cohort.schema().require_index(name));

  ScreenReport report;
  report.input_count = cohort.size();
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < cohort.size(); ++r) {
    const auto& values = cohort[r].values;
    std::optional<std::size_t> missing;
    for (std::size_t k = 0; k < idx.size() && !missing; ++k) {
      if (is_missing(values[idx[k]])) missing = k;
    }
    if (missing) {
      ++report.drop_reasons["missing:" + required[*missing]];
    } else {
      keep.push_back(r);
    }
  }
  report.retained_count = keep.size();
  return {cohort.subset(keep), std::move(report)};
}

std::vector<FeatureSummary> summarize(const Cohort& cohort) {
  std::vector<FeatureSummary> out;
  const auto& schema = cohort.schema();
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const FeatureSpec& spec = schema.at(c);
    FeatureSummary s;
    s.name = spec.name;
    s.kind = spec.kind;
    double sum = 0.0;
    std::vector<double> xs;
    for (const auto& rec : cohort.records()) {
      const Value& v = rec.values[c];
      if (is_missing(v)) continue;
      ++s.count;
      if (const double* d = std::get_if<double>(&v)) {
        xs.push_back(*d);
        sum += *d;
      } else {
        ++s.frequencies[std::get<std::string>(v)];
      }
    }
    s.missing_rate = cohort.size() ? 1.0 - static_cast<double>(s.count) / cohort.size() : 0.0;
    if (spec.is_numeric() && !xs.empty()) {
      const double mean = sum / xs.size();
      s.mean = mean;
      if (xs.size() >= 2) {
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        s.sd = std::sqrt(ss / (xs.size() - 1));
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace ads
