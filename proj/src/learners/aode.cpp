#include <algorithm>
#include <cmath>

#include "ads/learners.hpp"
#include "common.hpp"

namespace ads {

using nlohmann::json;

std::size_t Aode::pair_offset(std::size_t i, std::size_t vi, std::size_t j) const {
  // Block for (i, vi) holds, for each j, levels_[j] cells.
  return offsets_[i] + vi * offsets_.back() + offsets_[j + levels_.size()];
}

Aode Aode::fit(const Table& train, const Labels& labels, const AodeParams& p) {
  detail::check_training(train, labels);
  require_all_categorical(train, "AODE");
  Aode m;
  m.params_ = p;
  const std::size_t cols = train.n_cols();
  for (const auto& c : train.columns) m.levels_.push_back(c.n_levels());
  m.n_ = train.n_rows();

  // offsets_[0..cols): start of the (i, *) region; offsets_[cols..2cols):
  // start of column j inside one (i, vi) block; offsets_.back(): block size.
  std::size_t block = 0;
  std::vector<std::size_t> inner(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    inner[j] = block;
    block += m.levels_[j];
  }
  m.offsets_.assign(2 * cols + 1, 0);
  std::size_t start = 0;
  for (std::size_t i = 0; i < cols; ++i) {
    m.offsets_[i] = start;
    start += m.levels_[i] * block;
  }
  for (std::size_t j = 0; j < cols; ++j) m.offsets_[cols + j] = inner[j];
  m.offsets_[2 * cols] = block;

  m.value_count_.resize(cols);
  m.class_value_count_.resize(cols);
  for (std::size_t i = 0; i < cols; ++i) {
    m.value_count_[i].assign(m.levels_[i], 0);
    m.class_value_count_[i] = {std::vector<std::size_t>(m.levels_[i], 0),
                               std::vector<std::size_t>(m.levels_[i], 0)};
  }
  m.triple_count_ = {std::vector<std::size_t>(start, 0), std::vector<std::size_t>(start, 0)};

  for (std::size_t r = 0; r < train.n_rows(); ++r) {
    const auto& row = train.rows[r];
    const int y = labels[r];
    ++m.class_count_[y];
    for (std::size_t i = 0; i < cols; ++i) {
      const auto vi = static_cast<std::size_t>(row[i]);
      ++m.value_count_[i][vi];
      ++m.class_value_count_[i][y][vi];
      for (std::size_t j = 0; j < cols; ++j) {
        ++m.triple_count_[y][m.pair_offset(i, vi, j) + static_cast<std::size_t>(row[j])];
      }
    }
  }
  return m;
}

std::array<double, 2> Aode::joint_scores(std::span<const double> row) const {
  const std::size_t cols = levels_.size();
  const double a = params_.alpha;
  const double n = static_cast<double>(n_);
  std::array<double, 2> score{0.0, 0.0};
  for (std::size_t i = 0; i < cols; ++i) {
    const auto vi = static_cast<std::size_t>(row[i]);
    if (value_count_[i][vi] < params_.freq_limit || value_count_[i][vi] == 0) continue;
    for (int y = 0; y < 2; ++y) {
      const double ny = static_cast<double>(class_count_[y]);
      const double nyi = static_cast<double>(class_value_count_[i][y][vi]);
      double term = (ny + a) / (n + 2.0 * a) * (nyi + a) / (ny + static_cast<double>(levels_[i]) * a);
      for (std::size_t j = 0; j < cols; ++j) {
        if (j == i) continue;
        const double nyij =
            static_cast<double>(triple_count_[y][pair_offset(i, vi, j) + static_cast<std::size_t>(row[j])]);
        term *= (nyij + a) / (nyi + static_cast<double>(levels_[j]) * a);
      }
      score[y] += term;
    }
  }
  return score;
}

ClassDistribution Aode::predict(std::span<const double> row) const {
  const auto s = joint_scores(row);
  if (s[0] + s[1] > 0.0) return ClassDistribution::from_scores(s[0], s[1]);

  // No qualifying super-parent: Naive Bayes with the same smoothing.
  const std::size_t cols = levels_.size();
  const double a = params_.alpha;
  const double n = static_cast<double>(n_);
  std::array<double, 2> lp{};
  for (int y = 0; y < 2; ++y) {
    const double ny = static_cast<double>(class_count_[y]);
    lp[y] = std::log((ny + a) / (n + 2.0 * a));
    for (std::size_t j = 0; j < cols; ++j) {
      const double nyj = static_cast<double>(class_value_count_[j][y][static_cast<std::size_t>(row[j])]);
      lp[y] += std::log((nyj + a) / (ny + static_cast<double>(levels_[j]) * a));
    }
  }
  const double mx = std::max(lp[0], lp[1]);
  return ClassDistribution::from_scores(std::exp(lp[0] - mx), std::exp(lp[1] - mx));
}

json Aode::parameters() const {
  json cv = json::array();
  for (const auto& c : class_value_count_) cv.push_back({c[0], c[1]});
  return {{"freq_limit", params_.freq_limit},
          {"alpha", params_.alpha},
          {"levels", levels_},
          {"n", n_},
          {"class_count", class_count_},
          {"value_count", value_count_},
          {"class_value_count", cv},
          {"offsets", offsets_},
          {"triple_count", {triple_count_[0], triple_count_[1]}}};
}

Aode Aode::from_json(const json& j) {
  Aode m;
  m.params_.freq_limit = j.at("freq_limit").get<std::size_t>();
  m.params_.alpha = j.at("alpha").get<double>();
  m.levels_ = j.at("levels").get<std::vector<std::size_t>>();
  m.n_ = j.at("n").get<std::size_t>();
  m.class_count_ = j.at("class_count").get<std::array<std::size_t, 2>>();
  m.value_count_ = j.at("value_count").get<std::vector<std::vector<std::size_t>>>();
  for (const auto& c : j.at("class_value_count")) {
    m.class_value_count_.push_back({c[0].get<std::vector<std::size_t>>(), c[1].get<std::vector<std::size_t>>()});
  }
  m.offsets_ = j.at("offsets").get<std::vector<std::size_t>>();
  m.triple_count_ = {j.at("triple_count")[0].get<std::vector<std::size_t>>(),
                     j.at("triple_count")[1].get<std::vector<std::size_t>>()};
  return m;
}

Model fit_aode(const Table& train, const Labels& labels, const AodeParams& p) {
  ModelSpec spec = make_spec(Method::AODE, {{"freq_limit", static_cast<double>(p.freq_limit)}, {"alpha", p.alpha}});
  return Model(spec, train.columns, std::make_shared<Aode>(Aode::fit(train, labels, p)));
}

}  // namespace ads
