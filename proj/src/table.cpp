#include "ads/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ads/error.hpp"

namespace ads {

void to_json(nlohmann::json& j, const Column& c) {
  j = nlohmann::json{{"name", c.name}, {"categorical", c.categorical}};
  if (c.categorical) j["levels"] = c.levels;
}

void from_json(const nlohmann::json& j, Column& c) {
  c.name = j.at("name").get<std::string>();
  c.categorical = j.at("categorical").get<bool>();
  c.levels.clear();
  if (c.categorical) c.levels = j.at("levels").get<std::vector<std::string>>();
}

std::string digest(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fingerprint(const std::vector<Column>& columns) {
  // FNV-1a over a canonical text rendering.
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  };
  for (const auto& c : columns) {
    feed(c.name);
    feed(c.categorical ? "C" : "N");
    for (const auto& l : c.levels) feed(l);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool Table::all_categorical() const {
  return std::all_of(columns.begin(), columns.end(), [](const Column& c) { return c.categorical; });
}

bool Table::any_categorical() const {
  return std::any_of(columns.begin(), columns.end(), [](const Column& c) { return c.categorical; });
}

Table Table::select_rows(const std::vector<std::size_t>& idx) const {
  Table out;
  out.columns = columns;
  out.rows.reserve(idx.size());
  for (std::size_t i : idx) out.rows.push_back(rows.at(i));
  return out;
}

Table Table::select_columns(const std::vector<std::size_t>& idx) const {
  Table out;
  for (std::size_t c : idx) out.columns.push_back(columns.at(c));
  out.rows.reserve(rows.size());
  for (const auto& r : rows) {
    std::vector<double> nr;
    nr.reserve(idx.size());
    for (std::size_t c : idx) nr.push_back(r[c]);
    out.rows.push_back(std::move(nr));
  }
  return out;
}

Table Table::select_columns(const std::vector<std::string>& names) const {
  std::vector<std::size_t> idx;
  for (const auto& n : names) {
    auto it = std::find_if(columns.begin(), columns.end(), [&](const Column& c) { return c.name == n; });
    if (it == columns.end()) throw SchemaError("unknown column '" + n + "'");
    idx.push_back(static_cast<std::size_t>(it - columns.begin()));
  }
  return select_columns(idx);
}

ClassDistribution ClassDistribution::from_scores(double below, double above) {
  const double total = below + above;
  if (!(total > 0.0) || !std::isfinite(total)) return {0.5, 0.5};
  ClassDistribution d;
  d.p_above = above / total;
  d.p_below = below / total;
  return d;
}

ClassDistribution ClassDistribution::from_p_above(double p) {
  p = std::clamp(p, 0.0, 1.0);
  return {1.0 - p, p};
}

OneHotEncoder::OneHotEncoder(const std::vector<Column>& columns) {
  for (const auto& c : columns) {
    offsets_.push_back(width_);
    levels_.push_back(c.categorical ? c.n_levels() : 0);
    width_ += c.categorical ? c.n_levels() : 1;
  }
}

void OneHotEncoder::encode(std::span<const double> row, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t c = 0; c < offsets_.size(); ++c) {
    if (levels_[c] == 0) {
      out[offsets_[c]] = row[c];
    } else {
      const auto level = static_cast<std::size_t>(row[c]);
      if (level < levels_[c]) out[offsets_[c] + level] = 1.0;
    }
  }
}

std::vector<double> OneHotEncoder::encode(std::span<const double> row) const {
  std::vector<double> out(width_);
  encode(row, out);
  return out;
}

}  // namespace ads
