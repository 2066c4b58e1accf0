#include "rtdyn/features.hpp"

#include "rtdyn/splines.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rtdyn {

using Eigen::Index;

namespace {

Eigen::MatrixXd log_normalized(const Eigen::MatrixXd& V) {
  if ((V.array() < 0).any()) throw std::invalid_argument("ridge: negative power");
  const double total = V.sum();
  Eigen::MatrixXd L(V.rows(), V.cols());
  for (Index i = 0; i < V.size(); ++i) {
    const double v = total > 0 ? V.data()[i] / total : 0.0;
    L.data()[i] = v > 0 ? std::max(std::log(v), kLogPowerFloor) : kLogPowerFloor;
  }
  return L;
}

// best[k] = max_j prev[j] - lambda (k - j)^2 with argmax, via the lower envelope of parabolas.
void max_plus_quadratic(const Eigen::VectorXd& prev, double lambda, Eigen::VectorXd& best, std::vector<int>& from) {
  const int n = static_cast<int>(prev.size());
  best.resize(n);
  from.assign(n, 0);
  if (lambda == 0.0) {
    Index j;
    const double mx = prev.maxCoeff(&j);
    best.setConstant(mx);
    std::fill(from.begin(), from.end(), static_cast<int>(j));
    return;
  }
  // Minimize (k - j)^2 + f(j), f = -prev / lambda.
  Eigen::VectorXd f = -prev / lambda;
  std::vector<int> v(n);
  std::vector<double> z(n + 1);
  int h = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  auto cross = [&](int q, int p) { return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p)); };
  for (int q = 1; q < n; ++q) {
    double s = cross(q, v[h]);
    while (s <= z[h]) s = cross(q, v[--h]);
    v[++h] = q;
    z[h] = s;
    z[h + 1] = std::numeric_limits<double>::infinity();
  }
  int e = 0;
  for (int k = 0; k < n; ++k) {
    while (z[e + 1] < k) ++e;
    from[k] = v[e];
    const double d = k - v[e];
    best[k] = prev[v[e]] - lambda * d * d;
  }
}

}  // namespace

double ridge_objective(const Eigen::MatrixXd& V, const std::vector<int>& bins, double lambda) {
  if (static_cast<Index>(bins.size()) != V.rows()) throw std::invalid_argument("ridge_objective: length mismatch");
  const Eigen::MatrixXd L = log_normalized(V);
  double s = 0;
  for (Index f = 0; f < V.rows(); ++f) {
    s += L(f, bins[f] - 1);
    if (f > 0) {
      const double d = bins[f] - bins[f - 1];
      s -= lambda * d * d;
    }
  }
  return s;
}

RidgeCurve extract_ridge(const Eigen::MatrixXd& V, double lambda) {
  if (V.rows() < 1 || V.cols() < 1) throw std::invalid_argument("extract_ridge: empty map");
  if (!(lambda >= 0)) throw std::invalid_argument("extract_ridge: lambda must be >= 0");
  const Eigen::MatrixXd L = log_normalized(V);
  const Index T = V.rows();
  std::vector<std::vector<int>> back(T);
  Eigen::VectorXd acc = L.row(0).transpose(), best;
  for (Index f = 1; f < T; ++f) {
    max_plus_quadratic(acc, lambda, best, back[f]);
    acc = best + L.row(f).transpose();
  }
  RidgeCurve r;
  r.lambda = lambda;
  Index k;
  r.score = acc.maxCoeff(&k);
  r.bins.assign(T, 0);
  int cur = static_cast<int>(k);
  for (Index f = T - 1; f >= 0; --f) {
    r.bins[f] = cur + 1;
    if (f > 0) cur = back[f][cur];
  }
  return r;
}

namespace {

// Bins k (0-based) inside any of the rhythmic bands of a frame.
std::vector<bool> band_mask(const Eigen::VectorXd& freqs, int ridge_bin, const NRRParams& p) {
  const Index n = freqs.size();
  std::vector<bool> in(n, false);
  if (n == 0) return in;
  const double dxi = n > 1 ? freqs[1] - freqs[0] : 1.0;
  const double w = p.half_width / dxi;
  for (int h = 1; h <= std::max(1, p.harmonics); ++h) {
    // Bin coordinate of h times the ridge frequency (fractional, 1-based).
    const double c = h == 1 ? ridge_bin : ridge_bin + (h * freqs[ridge_bin - 1] - freqs[ridge_bin - 1]) / dxi;
    const long lo = std::max<long>(1, static_cast<long>(std::floor(c - w)));
    const long hi = std::min<long>(n, static_cast<long>(std::ceil(c + w)));
    for (long k = lo; k <= hi; ++k) in[k - 1] = true;
  }
  return in;
}

}  // namespace

double rhythmic_power(const Eigen::MatrixXd& V, const Eigen::VectorXd& freqs, const RidgeCurve& ridge, Index frame,
                      const NRRParams& p) {
  const std::vector<bool> in = band_mask(freqs, ridge.bins.at(frame), p);
  double s = 0;
  for (Index k = 0; k < V.cols(); ++k)
    if (in[k] && freqs[k] >= p.floor_hz) s += V(frame, k);
  return s;
}

double nonrhythmic_power(const Eigen::MatrixXd& V, const Eigen::VectorXd& freqs, double p_r, Index frame,
                         const NRRParams& p) {
  double total = 0;
  for (Index k = 0; k < V.cols(); ++k)
    if (freqs[k] >= p.floor_hz) total += V(frame, k);
  return std::max(0.0, total - p_r);
}

std::optional<double> nrr(double p_nr, double p_r) {
  if (!(p_r > 0)) return std::nullopt;
  return std::log10(p_nr / p_r);
}

NRRSeries nrr_series(const Eigen::MatrixXd& V, const Eigen::VectorXd& freqs, const RidgeCurve& ridge,
                     const NRRParams& p) {
  if (freqs.size() != V.cols()) throw std::invalid_argument("nrr_series: frequency grid mismatch");
  NRRSeries s;
  s.p_r.resize(V.rows());
  s.p_nr.resize(V.rows());
  s.nrr.resize(V.rows());
  for (Index f = 0; f < V.rows(); ++f) {
    s.p_r[f] = rhythmic_power(V, freqs, ridge, f, p);
    s.p_nr[f] = nonrhythmic_power(V, freqs, s.p_r[f], f, p);
    s.nrr[f] = nrr(s.p_nr[f], s.p_r[f]).value_or(std::numeric_limits<double>::quiet_NaN());
  }
  return s;
}

RidgeCurve extract_ridge_above(const Eigen::MatrixXd& V, const Eigen::VectorXd& freqs, double lambda,
                               const NRRParams& p) {
  if (freqs.size() != V.cols()) throw std::invalid_argument("extract_ridge_above: frequency grid mismatch");
  Index first = 0;
  while (first < freqs.size() && freqs[first] < p.floor_hz) ++first;
  if (first == freqs.size()) throw std::invalid_argument("extract_ridge_above: no bins above the floor");
  RidgeCurve r = extract_ridge(V.rightCols(V.cols() - first), lambda);
  for (int& b : r.bins) b += static_cast<int>(first);
  return r;
}

NRRSeries nrr_from_map(const Eigen::MatrixXd& V, const Eigen::VectorXd& freqs, double lambda, const NRRParams& p) {
  return nrr_series(V, freqs, extract_ridge_above(V, freqs, lambda, p), p);
}

double ShapeModel::operator()(double u) const {
  double s = 0;
  for (int l = 1; l <= D; ++l) {
    const double x = 2 * std::numbers::pi * l * u;
    s += gamma[l - 1] * std::cos(x) + gamma[D + l - 1] * std::sin(x);
  }
  return s;
}

namespace {

Eigen::MatrixXd regressors(const Eigen::VectorXd& amp, const Eigen::VectorXd& phase, int D) {
  Eigen::MatrixXd c(2 * D, amp.size());
  for (int l = 1; l <= D; ++l) {
    const Eigen::ArrayXd x = 2 * std::numbers::pi * l * phase.array();
    c.row(l - 1) = (amp.array() * x.cos()).matrix().transpose();
    c.row(D + l - 1) = (amp.array() * x.sin()).matrix().transpose();
  }
  return c;
}

}  // namespace

Eigen::VectorXd ShapeModel::reconstruct(const Eigen::VectorXd& amp, const Eigen::VectorXd& phase) const {
  return regressors(amp, phase, D).transpose() * gamma;
}

ShapeModel estimate_shape(const Eigen::VectorXd& Y, const Eigen::VectorXd& amp, const Eigen::VectorXd& phase, int D) {
  if (D < 1) throw std::invalid_argument("estimate_shape: D must be >= 1");
  if (Y.size() != amp.size() || Y.size() != phase.size()) throw std::invalid_argument("estimate_shape: length mismatch");
  if (2 * D >= Y.size()) throw std::invalid_argument("estimate_shape: need more than 2D samples");
  if ((amp.array() <= 0).any()) throw std::invalid_argument("estimate_shape: amplitude must be positive");
  for (Index i = 1; i < phase.size(); ++i)
    if (!(phase[i] > phase[i - 1])) throw std::invalid_argument("estimate_shape: phase must be increasing");
  const Eigen::MatrixXd c = regressors(amp, phase, D);
  const Eigen::MatrixXd G = c * c.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
  const Eigen::VectorXd sv = svd.singularValues();
  if (!(sv[sv.size() - 1] > 1e-12 * sv[0])) throw std::domain_error("estimate_shape: regressor Gram matrix is singular");
  ShapeModel s;
  s.D = D;
  s.gamma = G.ldlt().solve(c * Y);
  return s;
}

std::vector<ShapeModel> estimate_shapes(const Eigen::VectorXd& Y, const std::vector<Eigen::VectorXd>& amps,
                                        const std::vector<Eigen::VectorXd>& phases, int D) {
  if (amps.size() != phases.size()) throw std::invalid_argument("estimate_shapes: component count mismatch");
  std::vector<ShapeModel> out;
  Eigen::VectorXd r = Y;
  for (std::size_t k = 0; k < amps.size(); ++k) {
    out.push_back(estimate_shape(r, amps[k], phases[k], D));
    r -= out.back().reconstruct(amps[k], phases[k]);
  }
  return out;
}

double almost_orthogonality(const std::function<double(double)>& f, const std::function<double(double)>& g, double a,
                            double b, int panels_per_unit) {
  if (!(b > a)) throw std::invalid_argument("almost_orthogonality: empty interval");
  Eigen::VectorXd x, w;
  gauss_legendre(16, x, w);
  const long panels = std::max<long>(1, std::lround((b - a) * panels_per_unit));
  const double h = (b - a) / panels;
  long double fg = 0, ff = 0, gg = 0;
  for (long p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (Index i = 0; i < x.size(); ++i) {
      const double t = c + 0.5 * h * x[i], wt = 0.5 * h * w[i];
      const double u = f(t), v = g(t);
      fg += wt * u * v;
      ff += wt * u * u;
      gg += wt * v * v;
    }
  }
  return static_cast<double>(std::abs(fg) / std::sqrt(ff * gg));
}

}  // namespace rtdyn
