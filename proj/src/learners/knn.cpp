#include <algorithm>
#include <numeric>

#include "ads/kernels.hpp"
#include "ads/learners.hpp"
#include "common.hpp"

namespace ads {

using nlohmann::json;

Knn Knn::fit(const Table& train, const Labels& labels, const KnnParams& p) {
  detail::check_training(train, labels);
  if (p.k == 0) throw Error("knn: k must be positive");
  if (p.k > train.n_rows()) {
    throw Error("knn: k=" + std::to_string(p.k) + " exceeds training size " + std::to_string(train.n_rows()));
  }
  Knn m;
  m.k_ = p.k;
  m.width_ = train.n_cols();
  for (const auto& c : train.columns) m.categorical_.push_back(c.categorical ? 1 : 0);
  m.rows_.reserve(train.n_rows() * m.width_);
  for (const auto& r : train.rows) m.rows_.insert(m.rows_.end(), r.begin(), r.end());
  m.labels_ = labels;
  return m;
}

std::vector<std::size_t> Knn::neighbours(std::span<const double> row) const {
  const std::size_t n = labels_.size();
  std::vector<double> dist(n);
  kernels::mixed_sq_distances(rows_, width_, categorical_, row, dist);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k_), idx.end(),
                    [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });
  idx.resize(k_);
  return idx;
}

ClassDistribution Knn::predict(std::span<const double> row) const {
  std::size_t above = 0;
  for (std::size_t i : neighbours(row)) above += labels_[i] == kAbove ? 1 : 0;
  const double k = static_cast<double>(k_);
  return {static_cast<double>(k_ - above) / k, static_cast<double>(above) / k};
}

json Knn::parameters() const {
  return {{"k", k_}, {"width", width_}, {"categorical", categorical_}, {"rows", rows_}, {"labels", labels_}};
}

Knn Knn::from_json(const json& j) {
  Knn m;
  m.k_ = j.at("k").get<std::size_t>();
  m.width_ = j.at("width").get<std::size_t>();
  m.categorical_ = j.at("categorical").get<std::vector<char>>();
  m.rows_ = j.at("rows").get<std::vector<double>>();
  m.labels_ = j.at("labels").get<Labels>();
  return m;
}

Model fit_knn(const Table& train, const Labels& labels, const KnnParams& p) {
  ModelSpec spec = make_spec(Method::KNN, {{"k", static_cast<double>(p.k)}});
  return Model(spec, train.columns, std::make_shared<Knn>(Knn::fit(train, labels, p)));
}

}  // namespace ads
