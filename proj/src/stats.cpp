#include "rtdyn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace rtdyn {

using Eigen::Index;

namespace {

void check_paired(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw std::invalid_argument("paired series: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("paired series: need at least two entries");
  if (!x.allFinite() || !y.allFinite()) throw std::invalid_argument("paired series: non-finite entry");
}

}  // namespace

PairCounts classify_pairs(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  check_paired(x, y);
  PairCounts c;
  for (Index i = 0; i < x.size(); ++i)
    for (Index j = i + 1; j < x.size(); ++j) {
      const double dx = x[j] - x[i], dy = y[j] - y[i];
      if (dx == 0 && dy == 0) ++c.tie_both;
      else if (dy == 0) ++c.tie_y;
      else if (dx == 0) ++c.tie_x;
      else if ((dx > 0) == (dy > 0)) ++c.concordant;
      else ++c.discordant;
    }
  return c;
}

std::optional<double> prediction_probability(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const PairCounts c = classify_pairs(x, y);
  const long den = c.concordant + c.discordant + c.tie_x;
  if (den == 0) return std::nullopt;
  return (c.concordant + 0.5 * c.tie_x) / den;
}

Eigen::VectorXd average_ranks(const Eigen::VectorXd& v) {
  std::vector<Index> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return v[a] < v[b]; });
  Eigen::VectorXd r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double mean = 0.5 * (i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = mean;
    i = j + 1;
  }
  return r;
}

double spearman(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  check_paired(x, y);
  const Eigen::ArrayXd rx = average_ranks(x).array() - (x.size() + 1) / 2.0;
  const Eigen::ArrayXd ry = average_ranks(y).array() - (y.size() + 1) / 2.0;
  const double sxx = rx.square().sum(), syy = ry.square().sum();
  if (sxx == 0 || syy == 0) throw std::domain_error("spearman: constant ranks");
  return (rx * ry).sum() / std::sqrt(sxx * syy);
}

double std_dev(const Eigen::VectorXd& v) {
  if (v.size() == 0) return 0.0;
  return std::sqrt((v.array() - v.mean()).square().mean());
}

double snr_db(const Eigen::VectorXd& signal, const Eigen::VectorXd& noise) {
  const double s = std_dev(signal), n = std_dev(noise);
  if (s == 0 || n == 0) throw std::domain_error("snr_db: zero standard deviation");
  return 20.0 * std::log10(s / n);
}

Eigen::VectorXd effect_site(const Eigen::VectorXd& times, const Eigen::VectorXd& c_et, double ke0_per_min, double c0,
                            InputHold hold) {
  if (times.size() != c_et.size()) throw std::invalid_argument("effect_site: length mismatch");
  if (ke0_per_min < 0) throw std::invalid_argument("effect_site: negative ke0");
  for (Index i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("effect_site: times must increase");
  const double k = ke0_per_min / 60.0;
  Eigen::VectorXd c(times.size());
  if (times.size() == 0) return c;
  c[0] = c0;
  for (Index i = 0; i + 1 < times.size(); ++i) {
    const double h = times[i + 1] - times[i], e = std::exp(-k * h);
    if (hold == InputHold::Constant || k == 0) {
      if (k == 0) c[i + 1] = c[i];
      else c[i + 1] = c_et[i] + (c[i] - c_et[i]) * e;
      continue;
    }
    // Input a + b s on the step: C(s) = a + b s - b/k + (C0 - a + b/k) e^{-k s}.
    const double a = c_et[i], b = (c_et[i + 1] - c_et[i]) / h;
    c[i + 1] = a + (c[i] - a) * e + b * (h + std::expm1(-k * h) / k);
  }
  return c;
}

double weighted_mean(const Eigen::VectorXd& values, const Eigen::VectorXd& weights) {
  if (values.size() != weights.size() || values.size() == 0) throw std::invalid_argument("weighted_mean: bad sizes");
  if ((weights.array() < 0).any() || weights.sum() <= 0) throw std::invalid_argument("weighted_mean: bad weights");
  return values.dot(weights) / weights.sum();
}

}  // namespace rtdyn
