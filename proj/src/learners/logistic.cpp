#include <cmath>

#include <Eigen/Dense>

#include "ads/learners.hpp"
#include "common.hpp"

namespace ads {

using nlohmann::json;

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double linear(std::span<const double> beta, std::span<const double> x) {
  double z = beta[0];
  for (std::size_t j = 0; j < x.size(); ++j) z += beta[j + 1] * x[j];
  return z;
}

}  // namespace

double logistic_objective(const std::vector<std::vector<double>>& x, const Labels& y,
                          std::span<const double> beta, double ridge) {
  double f = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = linear(beta, x[i]);
    f += softplus(z) - static_cast<double>(y[i]) * z;
  }
  for (std::size_t j = 1; j < beta.size(); ++j) f += ridge * beta[j] * beta[j];
  return f;
}

std::vector<double> logistic_gradient(const std::vector<std::vector<double>>& x, const Labels& y,
                                      std::span<const double> beta, double ridge) {
  std::vector<double> g(beta.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = sigmoid(linear(beta, x[i])) - static_cast<double>(y[i]);
    g[0] += r;
    for (std::size_t j = 0; j < x[i].size(); ++j) g[j + 1] += r * x[i][j];
  }
  for (std::size_t j = 1; j < beta.size(); ++j) g[j] += 2.0 * ridge * beta[j];
  return g;
}

LogisticRegression LogisticRegression::fit(const Table& train, const Labels& labels, const LogRegParams& p) {
  detail::check_training(train, labels);
  LogisticRegression m;
  m.encoder_ = OneHotEncoder(train.columns);
  const std::size_t d = m.encoder_.width() + 1;
  std::vector<std::vector<double>> x;
  x.reserve(train.n_rows());
  for (const auto& r : train.rows) x.push_back(m.encoder_.encode(r));

  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    for (std::size_t j = 0; j + 1 < d; ++j) design(i, static_cast<Eigen::Index>(j + 1)) = x[i][j];
  }

  std::vector<double> beta(d, 0.0);
  double f = logistic_objective(x, labels, beta, p.ridge);
  for (m.iterations_ = 0; m.iterations_ < p.max_iter; ++m.iterations_) {
    auto g = logistic_gradient(x, labels, beta, p.ridge);
    double gmax = 0.0;
    for (double gi : g) gmax = std::max(gmax, std::abs(gi));
    if (gmax <= p.tol) {
      m.converged_ = true;
      break;
    }
    // Newton step on the penalised objective.
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double pi = sigmoid(linear(beta, x[i]));
      w(i) = pi * (1.0 - pi);
    }
    Eigen::MatrixXd h = design.transpose() * w.asDiagonal() * design;
    for (std::size_t j = 1; j < d; ++j) h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) += 2.0 * p.ridge;
    // Keeps the system positive definite when the ridge alone is too small.
    h.diagonal().array() += 1e-10;
    const Eigen::VectorXd step = h.ldlt().solve(Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(d)));

    double t = 1.0;
    std::vector<double> trial(d);
    bool moved = false;
    for (int halving = 0; halving < 40; ++halving) {
      for (std::size_t j = 0; j < d; ++j) trial[j] = beta[j] - t * step(static_cast<Eigen::Index>(j));
      const double ft = logistic_objective(x, labels, trial, p.ridge);
      if (std::isfinite(ft) && ft <= f) {
        beta = trial;
        f = ft;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  m.beta_ = std::move(beta);
  return m;
}

ClassDistribution LogisticRegression::predict(std::span<const double> row) const {
  const auto x = encoder_.encode(row);
  return ClassDistribution::from_p_above(sigmoid(linear(beta_, x)));
}

json LogisticRegression::parameters() const {
  return {{"beta", beta_}, {"converged", converged_}, {"iterations", iterations_}};
}

LogisticRegression LogisticRegression::from_json(const json& j, const std::vector<Column>& columns) {
  LogisticRegression m;
  m.encoder_ = OneHotEncoder(columns);
  m.beta_ = j.at("beta").get<std::vector<double>>();
  m.converged_ = j.at("converged").get<bool>();
  m.iterations_ = j.at("iterations").get<std::size_t>();
  return m;
}

Model fit_logreg(const Table& train, const Labels& labels, const LogRegParams& p) {
  ModelSpec spec = make_spec(Method::LogReg, {{"ridge", p.ridge}, {"tol", p.tol},
                                              {"max_iter", static_cast<double>(p.max_iter)}});
  return Model(spec, train.columns, std::make_shared<LogisticRegression>(LogisticRegression::fit(train, labels, p)));
}

LinRegClassifier LinRegClassifier::fit(const Table& train, const Labels& labels, const LinRegParams& p) {
  detail::check_training(train, labels);
  LinRegClassifier m;
  m.encoder_ = OneHotEncoder(train.columns);
  const auto d = static_cast<Eigen::Index>(m.encoder_.width() + 1);
  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd xi(d);
  for (std::size_t i = 0; i < train.n_rows(); ++i) {
    const auto enc = m.encoder_.encode(train.rows[i]);
    xi(0) = 1.0;
    for (Eigen::Index j = 1; j < d; ++j) xi(j) = enc[static_cast<std::size_t>(j - 1)];
    xtx.noalias() += xi * xi.transpose();
    xty += xi * static_cast<double>(labels[i]);
  }
  for (Eigen::Index j = 1; j < d; ++j) xtx(j, j) += p.ridge;
  const Eigen::VectorXd beta = xtx.ldlt().solve(xty);
  m.beta_.assign(beta.data(), beta.data() + beta.size());
  return m;
}

double LinRegClassifier::score(std::span<const double> row) const {
  const auto x = encoder_.encode(row);
  return linear(beta_, x);
}

ClassDistribution LinRegClassifier::predict(std::span<const double> row) const {
  return ClassDistribution::from_p_above(score(row));
}

json LinRegClassifier::parameters() const { return {{"beta", beta_}}; }

LinRegClassifier LinRegClassifier::from_json(const json& j, const std::vector<Column>& columns) {
  LinRegClassifier m;
  m.encoder_ = OneHotEncoder(columns);
  m.beta_ = j.at("beta").get<std::vector<double>>();
  return m;
}

Model fit_linreg_classifier(const Table& train, const Labels& labels, const LinRegParams& p) {
  ModelSpec spec = make_spec(Method::LinRegClassifier, {{"ridge", p.ridge}});
  return Model(spec, train.columns, std::make_shared<LinRegClassifier>(LinRegClassifier::fit(train, labels, p)));
}

}  // namespace ads
