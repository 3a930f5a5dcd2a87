#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace ads {

// Binary class labels. "Above" (average-or-better improvement) is the
// positive class everywhere.
inline constexpr int kBelow = 0;
inline constexpr int kAbove = 1;

using Labels = std::vector<int>;

// Column of a model-ready table. Categorical cells hold the level index
// as a double.
struct Column {
  std::string name;
  bool categorical = false;
  std::vector<std::string> levels;

  std::size_t n_levels() const { return levels.size(); }
  bool operator==(const Column&) const = default;
};

void to_json(nlohmann::json& j, const Column& c);
void from_json(const nlohmann::json& j, Column& c);

// 16-hex-digit FNV-1a digest.
std::string digest(const std::string& text);

// Stable hex digest of the column layout (names, kinds, levels).
std::string fingerprint(const std::vector<Column>& columns);

struct Table {
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;

  std::size_t n_rows() const { return rows.size(); }
  std::size_t n_cols() const { return columns.size(); }
  bool all_categorical() const;
  bool any_categorical() const;

  Table select_rows(const std::vector<std::size_t>& idx) const;
  Table select_columns(const std::vector<std::size_t>& idx) const;
  Table select_columns(const std::vector<std::string>& names) const;
};

struct ClassDistribution {
  double p_below = 0.5;
  double p_above = 0.5;

  // From an unnormalised pair of non-negative scores.
  static ClassDistribution from_scores(double below, double above);
  static ClassDistribution from_p_above(double p);
  int argmax() const { return p_above >= p_below ? kAbove : kBelow; }
  double operator[](int cls) const { return cls == kAbove ? p_above : p_below; }

  bool operator==(const ClassDistribution&) const = default;
};

// Numeric design matrix with an indicator per level of each categorical
// column. Shared by the linear, logistic and neural learners.
class OneHotEncoder {
 public:
  OneHotEncoder() = default;
  explicit OneHotEncoder(const std::vector<Column>& columns);

  std::size_t width() const { return width_; }
  void encode(std::span<const double> row, std::span<double> out) const;
  std::vector<double> encode(std::span<const double> row) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> levels_;  // 0 for numeric columns
  std::size_t width_ = 0;
};

}  // namespace ads
