#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rtdyn {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Nondecreasing knots with multiplicity at most `m`.
///
/// Basis function k (0-based) of order m lives on [t[k], t[k+m]], so a
/// sequence of length K carries K - m B-splines.
class KnotSequence {
 public:
  KnotSequence() = default;
  KnotSequence(Eigen::VectorXd knots, int m);

  static KnotSequence uniform(double first, double step, int count, int m);
  /// Breakpoints with the two end knots repeated m times.
  static KnotSequence clamped(const Eigen::VectorXd& breaks, int m);

  const Eigen::VectorXd& knots() const { return t_; }
  int order() const { return m_; }
  Eigen::Index size() const { return t_.size(); }
  Eigen::Index basis_count() const { return t_.size() - m_; }
  double operator[](Eigen::Index i) const { return t_[i]; }
  double front() const { return t_[0]; }
  double back() const { return t_[t_.size() - 1]; }

  /// Largest ratio (t[j+m]-t[j]) / (smallest nonzero gap inside that span).
  double mesh_ratio() const;

 private:
  Eigen::VectorXd t_;
  int m_ = 1;
};

/// Order-m spline sum_k coeffs[k] N_{m,k}.
struct SplineCurve {
  int m = 1;
  Eigen::VectorXd knots;
  Eigen::VectorXd coeffs;
};

namespace detail {

template <typename Scalar>
Eigen::Index find_span(const VectorX<Scalar>& x, Scalar t) {
  const Eigen::Index K = x.size();
  const Scalar last = x[K - 1];
  if (t < x[0] || t > last) return -1;
  if (t == last) {
    // Left limit at the closing knot: last nonempty interval.
    Eigen::Index j = K - 2;
    while (j >= 0 && !(x[j] < x[j + 1])) --j;
    return j;
  }
  auto it = std::upper_bound(x.data(), x.data() + K, t);
  return static_cast<Eigen::Index>(it - x.data()) - 1;
}

}  // namespace detail

/// Values of the (up to m) B-splines of order m that are nonzero at t.
/// On return vals[i] = N_{m, first+i}(t) for i = 0..m-1 (entries for
/// indices outside [0, K-m) are zero). Returns false when t is off the knots.
template <typename Scalar>
bool active_basis(const VectorX<Scalar>& x, int m, Scalar t, Eigen::Index& first,
                  VectorX<Scalar>& vals) {
  vals.setZero(m);
  const Eigen::Index mu = detail::find_span(x, t);
  first = mu - m + 1;
  if (mu < 0) return false;
  const Eigen::Index K = x.size();
  // work[i] holds N_{first+i, r}(t) while r rises from 1 to m.
  VectorX<Scalar> work = VectorX<Scalar>::Zero(m + 1);
  work[m - 1] = Scalar(1);
  for (int r = 2; r <= m; ++r) {
    for (int i = m - r; i <= m - 1; ++i) {
      const Eigen::Index j = first + i;
      if (j < 0 || j + r >= K) {
        work[i] = Scalar(0);
        continue;
      }
      Scalar v(0);
      const Scalar dl = x[j + r - 1] - x[j];
      if (dl > Scalar(0)) v += (t - x[j]) / dl * work[i];
      const Scalar dr = x[j + r] - x[j + 1];
      if (dr > Scalar(0) && i + 1 <= m - 1) v += (x[j + r] - t) / dr * work[i + 1];
      work[i] = v;
    }
  }
  for (int i = 0; i < m; ++i) {
    const Eigen::Index j = first + i;
    if (j >= 0 && j + m < K) vals[i] = work[i];
  }
  return true;
}

/// N_{m,k}(t) on arbitrary knots via the de Boor-Cox recursion (0/0 := 0).
template <typename Scalar>
Scalar eval_bspline(const VectorX<Scalar>& x, int m, Eigen::Index k, Scalar t) {
  if (m < 1) throw std::invalid_argument("eval_bspline: order must be >= 1");
  if (k < 0 || k + m >= x.size()) throw std::invalid_argument("eval_bspline: invalid index");
  if (!(x[k + m] > x[k])) throw std::domain_error("eval_bspline: knot multiplicity exceeds order");
  if (t < x[k] || t > x[k + m]) return Scalar(0);
  Eigen::Index first;
  VectorX<Scalar> vals;
  if (!active_basis(x, m, t, first, vals)) return Scalar(0);
  const Eigen::Index i = k - first;
  return (i >= 0 && i < m) ? vals[i] : Scalar(0);
}

/// Cardinal B-spline N_m on knots 0..m.
template <typename Scalar>
Scalar cardinal_bspline(int m, Scalar t) {
  if (m < 1) throw std::invalid_argument("cardinal_bspline: order must be >= 1");
  if (!(t >= Scalar(0)) || !(t < Scalar(m))) return Scalar(0);
  // b[j] = N_r(t - j) for shifts j = s-r+1..s, s = floor(t); stored at j - (s-m+1).
  const int s = static_cast<int>(std::floor(t));
  VectorX<Scalar> b = VectorX<Scalar>::Zero(m + 1);
  b[m - 1] = Scalar(1);
  for (int r = 2; r <= m; ++r) {
    // N_r(u) = [u N_{r-1}(u) + (r-u) N_{r-1}(u-1)] / (r-1); N_{r-1}(u-1) sits at i+1.
    for (int i = m - r; i <= m - 1; ++i) {
      const Scalar u = t - Scalar(s - m + 1 + i);
      b[i] = (u * b[i] + (Scalar(r) - u) * b[i + 1]) / Scalar(r - 1);
    }
  }
  return b[m - 1 - s];
}

/// r-th derivative of N_{m,k} at t by the coefficient recurrence.
double eval_bspline_derivative(const Eigen::VectorXd& x, int m, Eigen::Index k, double t, int r);

/// Coefficients of d/dt of sum c_i N_{m,i}: an order m-1 spline on the same knots.
Eigen::VectorXd derivative_coeffs(const Eigen::VectorXd& x, int m, const Eigen::VectorXd& c);

/// Exact table (r-1)! N_r(v), v = 0..r.
struct CardinalTable {
  int r = 2;
  std::vector<std::int64_t> numerators;
  std::int64_t denominator = 1;
  double value(int v) const;
};

CardinalTable cardinal_integer_values(int r);

/// <N_{m,k}, N_{m,u}>; closed form on uniform spans, Gauss-Legendre otherwise.
double inner_product(const Eigen::VectorXd& x, int m, Eigen::Index k, Eigen::Index u);
/// Always the quadrature route.
double inner_product_quadrature(const Eigen::VectorXd& x, int m, Eigen::Index k, Eigen::Index u);
/// Integral of t^l N_{m,k}(t).
double bspline_moment(const Eigen::VectorXd& x, int m, Eigen::Index k, int l);

/// c^l with t^l = sum_u c^l_u N_{m,u}(t) inside the knot range.
Eigen::VectorXd marsden_coefficients(const Eigen::VectorXd& x, int m, int l);

/// Sum over the active basis functions; 0 off range, with *in_range cleared.
double eval_spline_curve(const SplineCurve& curve, double t, bool* in_range = nullptr);
/// r-th derivative of a spline curve.
double eval_spline_derivative(const SplineCurve& curve, double t, int r);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

double binomial(int n, int k);

}  // namespace rtdyn
