#include "ads/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "ads/error.hpp"

namespace ads {

Confusion confusion(std::span<const double> p_above, const Labels& labels, double threshold) {
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pred = p_above[i] >= threshold;
    if (labels[i] == kAbove) (pred ? c.tp : c.fn)++;
    else (pred ? c.fp : c.tn)++;
  }
  return c;
}

double accuracy(const PredictionLog& log, double threshold) {
  if (log.size() == 0) throw Error("accuracy of an empty log");
  const auto c = confusion(log.p_above, log.labels, threshold);
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(log.size());
}

std::optional<double> tp_rate(const PredictionLog& log, double threshold) {
  const auto c = confusion(log.p_above, log.labels, threshold);
  if (c.tp + c.fn == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

std::optional<double> fp_rate(const PredictionLog& log, double threshold) {
  const auto c = confusion(log.p_above, log.labels, threshold);
  if (c.fp + c.tn == 0) return std::nullopt;
  return static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
}

double auc(std::span<const double> scores, const Labels& labels) {
  if (scores.size() != labels.size()) throw Error("auc: scores and labels differ in length");
  std::size_t n_pos = 0;
  for (int y : labels) n_pos += y == kAbove ? 1 : 0;
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw Error("auc: log needs both classes");
  const auto ranks = average_ranks(scores);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kAbove) rank_sum += ranks[i];
  }
  const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

std::vector<RocPoint> roc_points(std::span<const double> scores, const Labels& labels) {
  std::size_t n_pos = 0;
  for (int y : labels) n_pos += y == kAbove ? 1 : 0;
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw Error("roc: log needs both classes");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<RocPoint> pts{{0.0, 0.0}};
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    (labels[order[k]] == kAbove ? tp : fp)++;
    if (k + 1 == order.size() || scores[order[k + 1]] != scores[order[k]]) {
      pts.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                     static_cast<double>(tp) / static_cast<double>(n_pos)});
    }
  }
  return pts;
}

std::vector<RocPoint> roc_hull(const std::vector<RocPoint>& points) {
  std::vector<RocPoint> pts = points;
  std::sort(pts.begin(), pts.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.fpr < b.fpr || (a.fpr == b.fpr && a.tpr < b.tpr);
  });
  std::vector<RocPoint> hull;
  auto cross = [](const RocPoint& o, const RocPoint& a, const RocPoint& b) {
    return (a.fpr - o.fpr) * (b.tpr - o.tpr) - (a.tpr - o.tpr) * (b.fpr - o.fpr);
  };
  for (const auto& p : pts) {
    // Keep only clockwise turns: the upper hull.
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= 0.0) hull.pop_back();
    hull.push_back(p);
  }
  return hull;
}

namespace {

// Integral over [a, b] of (alpha + beta c) * 6 c (1 - c).
double weighted_linear_integral(double alpha, double beta, double a, double b) {
  auto prim = [&](double c) {
    const double c2 = c * c, c3 = c2 * c, c4 = c3 * c;
    return alpha * (3.0 * c2 - 2.0 * c3) + beta * (2.0 * c3 - 1.5 * c4);
  };
  return prim(b) - prim(a);
}

}  // namespace

double h_measure(std::span<const double> scores, const Labels& labels) {
  std::size_t n_pos = 0;
  for (int y : labels) n_pos += y == kAbove ? 1 : 0;
  const double pi1 = static_cast<double>(n_pos) / static_cast<double>(labels.size());
  const double pi0 = 1.0 - pi1;
  const auto hull = roc_hull(roc_points(scores, labels));

  // Vertex v has loss Q_v(c) = c pi0 fpr_v + (1 - c) pi1 (1 - tpr_v). Along
  // the hull from (1,1) down to (0,0) each vertex is optimal on one interval
  // of c; walk those intervals left to right.
  double l = 0.0;
  double c_lo = 0.0;
  for (std::size_t k = hull.size(); k-- > 0;) {
    double c_hi = 1.0;
    if (k > 0) {
      const double df = hull[k].fpr - hull[k - 1].fpr;
      const double dt = hull[k].tpr - hull[k - 1].tpr;
      c_hi = pi1 * dt / (pi0 * df + pi1 * dt);
    }
    c_hi = std::clamp(c_hi, c_lo, 1.0);
    const double alpha = pi1 * (1.0 - hull[k].tpr);
    const double beta = pi0 * hull[k].fpr - alpha;
    l += weighted_linear_integral(alpha, beta, c_lo, c_hi);
    c_lo = c_hi;
  }

  // Reference loss of the trivial classifiers: min(c pi0, (1 - c) pi1).
  const double c_star = pi1;
  const double l_ref = weighted_linear_integral(0.0, pi0, 0.0, c_star) + weighted_linear_integral(pi1, -pi1, c_star, 1.0);
  return std::clamp(1.0 - l / l_ref, 0.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("spearman: length mismatch");
  if (x.size() < 3) throw Error("spearman: need at least 3 pairs");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  SpearmanResult out;
  if (sxx == 0.0 || syy == 0.0) return out;
  const double rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  out.rho = rho;
  const double df = n - 2.0;
  if (std::abs(rho) >= 1.0) {
    out.p_value = 0.0;
  } else {
    const double t = rho * std::sqrt(df / (1.0 - rho * rho));
    boost::math::students_t dist(df);
    out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  }
  return out;
}

}  // namespace ads
