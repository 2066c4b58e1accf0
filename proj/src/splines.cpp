#include "rtdyn/splines.hpp"

#include <limits>

namespace rtdyn {

KnotSequence::KnotSequence(Eigen::VectorXd knots, int m) : t_(std::move(knots)), m_(m) {
  if (m < 1) throw std::invalid_argument("KnotSequence: order must be >= 1");
  if (t_.size() < m + 1) throw std::invalid_argument("KnotSequence: need at least m+1 knots");
  for (Eigen::Index j = 0; j + 1 < t_.size(); ++j) {
    if (!std::isfinite(t_[j]) || t_[j + 1] < t_[j])
      throw std::invalid_argument("KnotSequence: knots must be finite and nondecreasing");
  }
  for (Eigen::Index j = 0; j + m < t_.size(); ++j) {
    if (!(t_[j + m] > t_[j])) throw std::domain_error("KnotSequence: knot repeated more than m times");
  }
}

KnotSequence KnotSequence::uniform(double first, double step, int count, int m) {
  Eigen::VectorXd t(count);
  for (int i = 0; i < count; ++i) t[i] = first + step * i;
  return KnotSequence(std::move(t), m);
}

KnotSequence KnotSequence::clamped(const Eigen::VectorXd& breaks, int m) {
  const Eigen::Index n = breaks.size();
  if (n < 2) throw std::invalid_argument("KnotSequence::clamped: need two breakpoints");
  Eigen::VectorXd t(n + 2 * (m - 1));
  t.head(m - 1).setConstant(breaks[0]);
  t.segment(m - 1, n) = breaks;
  t.tail(m - 1).setConstant(breaks[n - 1]);
  return KnotSequence(std::move(t), m);
}

double KnotSequence::mesh_ratio() const {
  double worst = 1.0;
  for (Eigen::Index j = 0; j + m_ < t_.size(); ++j) {
    double gmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = j; i < j + m_; ++i) {
      const double g = t_[i + 1] - t_[i];
      if (g > 0) gmin = std::min(gmin, g);
    }
    worst = std::max(worst, (t_[j + m_] - t_[j]) / gmin);
  }
  return worst;
}

Eigen::VectorXd derivative_coeffs(const Eigen::VectorXd& x, int m, const Eigen::VectorXd& c) {
  if (m < 2) throw std::domain_error("derivative_coeffs: order must be >= 2");
  const Eigen::Index nb = x.size() - m;
  if (c.size() != nb) throw std::invalid_argument("derivative_coeffs: coefficient count mismatch");
  Eigen::VectorXd d(nb + 1);
  for (Eigen::Index i = 0; i <= nb; ++i) {
    const double ci = (i < nb) ? c[i] : 0.0;
    const double cp = (i > 0) ? c[i - 1] : 0.0;
    const double h = x[i + m - 1] - x[i];
    d[i] = (h > 0) ? (m - 1) * (ci - cp) / h : 0.0;
  }
  return d;
}

double eval_spline_curve(const SplineCurve& curve, double t, bool* in_range) {
  const Eigen::VectorXd& x = curve.knots;
  const int m = curve.m;
  if (curve.coeffs.size() != x.size() - m)
    throw std::invalid_argument("eval_spline_curve: coefficient count mismatch");
  Eigen::Index first;
  Eigen::VectorXd vals;
  const bool ok = active_basis(x, m, t, first, vals);
  if (in_range) *in_range = ok;
  if (!ok) return 0.0;
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    const Eigen::Index j = first + i;
    if (j >= 0 && j < curve.coeffs.size()) s += curve.coeffs[j] * vals[i];
  }
  return s;
}

double eval_spline_derivative(const SplineCurve& curve, double t, int r) {
  if (r < 0 || r >= curve.m) throw std::domain_error("eval_spline_derivative: need 0 <= r < m");
  SplineCurve d = curve;
  for (int q = 0; q < r; ++q) {
    d.coeffs = derivative_coeffs(d.knots, d.m, d.coeffs);
    d.m -= 1;
  }
  return eval_spline_curve(d, t);
}

double eval_bspline_derivative(const Eigen::VectorXd& x, int m, Eigen::Index k, double t, int r) {
  if (r < 0 || r >= m) throw std::domain_error("eval_bspline_derivative: need 0 <= r < m");
  if (r == 0) return eval_bspline(x, m, k, t);
  if (k < 0 || k + m >= x.size()) throw std::invalid_argument("eval_bspline_derivative: invalid index");
  SplineCurve c{m, x, Eigen::VectorXd::Zero(x.size() - m)};
  c.coeffs[k] = 1.0;
  return eval_spline_derivative(c, t, r);
}

double CardinalTable::value(int v) const {
  if (v < 0 || v > r) return 0.0;
  return static_cast<double>(numerators[v]) / static_cast<double>(denominator);
}

CardinalTable cardinal_integer_values(int r) {
  if (r < 2) throw std::invalid_argument("cardinal_integer_values: r must be >= 2");
  if (r > 20) throw std::invalid_argument("cardinal_integer_values: r > 20 overflows 64-bit integers");
  // E_r(v) = (r-1)! N_r(v) obeys E_r(v) = v E_{r-1}(v) + (r-v) E_{r-1}(v-1).
  std::vector<std::int64_t> e{0, 1, 0};
  std::int64_t fact = 1;
  for (int q = 3; q <= r; ++q) {
    std::vector<std::int64_t> next(q + 1, 0);
    for (int v = 0; v <= q; ++v) {
      const std::int64_t a = (v <= q - 1) ? e[v] : 0;
      const std::int64_t b = (v >= 1) ? e[v - 1] : 0;
      next[v] = v * a + (q - v) * b;
    }
    e.swap(next);
    fact *= (q - 1);
  }
  return CardinalTable{r, e, fact};
}

void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  // Golub-Welsch: eigenvalues of the Jacobi matrix.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes = es.eigenvalues();
  weights = 2.0 * es.eigenvectors().row(0).transpose().array().square();
}

namespace {

struct GLRule {
  Eigen::VectorXd x, w;
};

const GLRule& gl_rule(int n) {
  static thread_local std::vector<GLRule> cache;
  if (static_cast<int>(cache.size()) <= n) cache.resize(n + 1);
  GLRule& r = cache[n];
  if (r.x.size() == 0) gauss_legendre(n, r.x, r.w);
  return r;
}

double integrate_product(const Eigen::VectorXd& x, int m, Eigen::Index k, Eigen::Index u, int l,
                         int nodes) {
  const Eigen::Index lo = std::max(k, u);
  const Eigen::Index hi = std::min(k, u) + m;
  const GLRule& g = gl_rule(nodes);
  double s = 0.0;
  for (Eigen::Index i = lo; i < hi; ++i) {
    const double a = x[i], b = x[i + 1];
    if (!(b > a)) continue;
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    for (int q = 0; q < nodes; ++q) {
      const double t = c + h * g.x[q];
      double f = eval_bspline(x, m, k, t);
      if (u != k) f *= eval_bspline(x, m, u, t);
      else f *= f;
      if (l > 0) f *= std::pow(t, l);
      s += h * g.w[q] * f;
    }
  }
  return s;
}

bool uniform_span(const Eigen::VectorXd& x, Eigen::Index lo, Eigen::Index hi, double& h) {
  h = x[lo + 1] - x[lo];
  if (!(h > 0)) return false;
  for (Eigen::Index i = lo; i < hi; ++i) {
    if (std::abs((x[i + 1] - x[i]) - h) > 1e-12 * h) return false;
  }
  return true;
}

}  // namespace

double inner_product_quadrature(const Eigen::VectorXd& x, int m, Eigen::Index k, Eigen::Index u) {
  if (k < 0 || u < 0 || k + m >= x.size() || u + m >= x.size())
    throw std::invalid_argument("inner_product: invalid index");
  if (std::abs(k - u) >= m) return 0.0;
  return integrate_product(x, m, k, u, 0, m);
}

double inner_product(const Eigen::VectorXd& x, int m, Eigen::Index k, Eigen::Index u) {
  if (k < 0 || u < 0 || k + m >= x.size() || u + m >= x.size())
    throw std::invalid_argument("inner_product: invalid index");
  if (std::abs(k - u) >= m) return 0.0;
  double h;
  if (2 * m <= 20 && uniform_span(x, std::min(k, u), std::max(k, u) + m, h)) {
    // Convolution of two cardinal B-splines: N_{2m}(m - u + k).
    return h * cardinal_integer_values(2 * m).value(static_cast<int>(m - u + k));
  }
  return integrate_product(x, m, k, u, 0, m);
}

double bspline_moment(const Eigen::VectorXd& x, int m, Eigen::Index k, int l) {
  if (k < 0 || k + m >= x.size()) throw std::invalid_argument("bspline_moment: invalid index");
  const GLRule& g = gl_rule((m + l) / 2 + 1);
  double s = 0.0;
  for (Eigen::Index i = k; i < k + m; ++i) {
    const double a = x[i], b = x[i + 1];
    if (!(b > a)) continue;
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    for (int q = 0; q < g.x.size(); ++q) {
      const double t = c + h * g.x[q];
      s += h * g.w[q] * eval_bspline(x, m, k, t) * std::pow(t, l);
    }
  }
  return s;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return n <= 60 ? std::round(r) : r;
}

Eigen::VectorXd marsden_coefficients(const Eigen::VectorXd& x, int m, int l) {
  if (l < 0 || l >= m) throw std::domain_error("marsden_coefficients: need 0 <= l < m");
  const Eigen::Index nb = x.size() - m;
  Eigen::VectorXd c(nb);
  const double denom = binomial(m - 1, l);
  for (Eigen::Index j = 0; j < nb; ++j) {
    // Elementary symmetric polynomial of degree l in x_{j+1..j+m-1}.
    Eigen::VectorXd e = Eigen::VectorXd::Zero(l + 1);
    e[0] = 1.0;
    for (int i = 1; i <= m - 1; ++i) {
      const double v = x[j + i];
      for (int d = std::min(i, l); d >= 1; --d) e[d] += v * e[d - 1];
    }
    c[j] = e[l] / denom;
  }
  return c;
}

}  // namespace rtdyn
