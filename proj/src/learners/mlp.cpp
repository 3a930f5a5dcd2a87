#include <cmath>

#include "ads/learners.hpp"
#include "ads/rng.hpp"
#include "common.hpp"

namespace ads {

using nlohmann::json;

namespace {

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

MlpNetwork::MlpNetwork(std::size_t inputs, std::size_t hidden)
    : inputs_(inputs), hidden_(hidden), w_(hidden * (inputs + 1) + 2 * (hidden + 1), 0.0) {}

std::array<double, 2> MlpNetwork::forward(std::span<const double> x) const {
  std::vector<double> h(hidden_);
  const std::size_t stride = inputs_ + 1;
  for (std::size_t u = 0; u < hidden_; ++u) {
    const double* wu = w_.data() + u * stride;
    double z = wu[inputs_];
    for (std::size_t j = 0; j < inputs_; ++j) z += wu[j] * x[j];
    h[u] = logistic(z);
  }
  const double* wo = w_.data() + hidden_ * stride;
  std::array<double, 2> o{};
  for (std::size_t k = 0; k < 2; ++k) {
    const double* wk = wo + k * (hidden_ + 1);
    double z = wk[hidden_];
    for (std::size_t u = 0; u < hidden_; ++u) z += wk[u] * h[u];
    o[k] = z;
  }
  const double m = std::max(o[0], o[1]);
  const double e0 = std::exp(o[0] - m), e1 = std::exp(o[1] - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

double MlpNetwork::loss(std::span<const double> x, int y) const {
  const auto p = forward(x);
  return -std::log(std::max(p[static_cast<std::size_t>(y)], 1e-300));
}

double MlpNetwork::loss_gradient(std::span<const double> x, int y, std::span<double> grad) const {
  const std::size_t stride = inputs_ + 1;
  std::vector<double> h(hidden_);
  for (std::size_t u = 0; u < hidden_; ++u) {
    const double* wu = w_.data() + u * stride;
    double z = wu[inputs_];
    for (std::size_t j = 0; j < inputs_; ++j) z += wu[j] * x[j];
    h[u] = logistic(z);
  }
  const std::size_t out_base = hidden_ * stride;
  std::array<double, 2> o{};
  for (std::size_t k = 0; k < 2; ++k) {
    const double* wk = w_.data() + out_base + k * (hidden_ + 1);
    double z = wk[hidden_];
    for (std::size_t u = 0; u < hidden_; ++u) z += wk[u] * h[u];
    o[k] = z;
  }
  const double m = std::max(o[0], o[1]);
  const double e0 = std::exp(o[0] - m), e1 = std::exp(o[1] - m);
  const std::array<double, 2> p{e0 / (e0 + e1), e1 / (e0 + e1)};

  // Softmax + cross-entropy: d loss / d o_k = p_k - 1[k = y].
  std::array<double, 2> delta_out{p[0] - (y == 0 ? 1.0 : 0.0), p[1] - (y == 1 ? 1.0 : 0.0)};
  std::vector<double> delta_hidden(hidden_, 0.0);
  for (std::size_t k = 0; k < 2; ++k) {
    const std::size_t base = out_base + k * (hidden_ + 1);
    for (std::size_t u = 0; u < hidden_; ++u) {
      grad[base + u] += delta_out[k] * h[u];
      delta_hidden[u] += delta_out[k] * w_[base + u];
    }
    grad[base + hidden_] += delta_out[k];
  }
  for (std::size_t u = 0; u < hidden_; ++u) {
    const double d = delta_hidden[u] * h[u] * (1.0 - h[u]);
    const std::size_t base = u * stride;
    for (std::size_t j = 0; j < inputs_; ++j) grad[base + j] += d * x[j];
    grad[base + inputs_] += d;
  }
  return -std::log(std::max(p[static_cast<std::size_t>(y)], 1e-300));
}

Mlp Mlp::fit(const Table& train, const Labels& labels, const MlpParams& p, std::uint64_t seed) {
  detail::check_training(train, labels);
  Mlp m;
  m.encoder_ = OneHotEncoder(train.columns);
  const std::size_t inputs = m.encoder_.width();
  const std::size_t hidden = p.hidden ? p.hidden : (inputs + 2 + 1) / 2;
  m.net_ = MlpNetwork(inputs, hidden);
  Rng rng(seed);
  for (double& w : m.net_.weights()) w = rng.uniform(-0.5, 0.5);

  std::vector<std::vector<double>> x;
  x.reserve(train.n_rows());
  for (const auto& r : train.rows) x.push_back(m.encoder_.encode(r));

  // Online updates, one full pass over the training rows per epoch.
  auto& w = m.net_.weights();
  std::vector<double> grad(w.size()), velocity(w.size(), 0.0);
  for (std::size_t epoch = 1; epoch <= p.epochs; ++epoch) {
    const double lr = p.decay ? p.learning_rate / static_cast<double>(epoch) : p.learning_rate;
    for (std::size_t i = 0; i < x.size(); ++i) {
      std::fill(grad.begin(), grad.end(), 0.0);
      m.net_.loss_gradient(x[i], labels[i], grad);
      for (std::size_t k = 0; k < w.size(); ++k) {
        velocity[k] = p.momentum * velocity[k] - lr * grad[k];
        w[k] += velocity[k];
      }
    }
  }
  return m;
}

ClassDistribution Mlp::predict(std::span<const double> row) const {
  const auto x = encoder_.encode(row);
  const auto p = net_.forward(x);
  return {p[0], p[1]};
}

json Mlp::parameters() const {
  return {{"inputs", net_.inputs()}, {"hidden", net_.hidden()}, {"weights", net_.weights()}};
}

Mlp Mlp::from_json(const json& j, const std::vector<Column>& columns) {
  Mlp m;
  m.encoder_ = OneHotEncoder(columns);
  m.net_ = MlpNetwork(j.at("inputs").get<std::size_t>(), j.at("hidden").get<std::size_t>());
  m.net_.weights() = j.at("weights").get<std::vector<double>>();
  if (m.net_.inputs() != m.encoder_.width()) throw Error("mlp: input width does not match columns");
  return m;
}

Model fit_mlp(const Table& train, const Labels& labels, const MlpParams& p, std::uint64_t seed) {
  ModelSpec spec = make_spec(Method::MLP, {{"hidden", static_cast<double>(p.hidden)},
                                           {"learning_rate", p.learning_rate},
                                           {"momentum", p.momentum},
                                           {"epochs", static_cast<double>(p.epochs)},
                                           {"decay", p.decay ? 1.0 : 0.0}});
  return Model(spec, train.columns, std::make_shared<Mlp>(Mlp::fit(train, labels, p, seed)), seed);
}

}  // namespace ads
