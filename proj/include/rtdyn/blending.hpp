#pragma once

#include "rtdyn/splines.hpp"

#include <deque>
#include <optional>

namespace rtdyn {

/// Weights of the local functional lambda_p(g) = sum_j a[j] g(t[first + j]).
/// p indexes the order-m B-splines on the clamped data knots (n + m - 1 of them).
struct QuasiCoeffRow {
  Eigen::Index p = 0;
  Eigen::Index first = 0;
  Eigen::VectorXd a;
};

/// Quasi-interpolation weights for B-spline p on data times t.
QuasiCoeffRow quasi_coeffs(const Eigen::VectorXd& t, int m, Eigen::Index p);

/// Quasi-interpolant Q_m g as a spline on the clamped data knots.
SplineCurve quasi_interpolate(const Eigen::VectorXd& t, const Eigen::VectorXd& g, int m);

/// Data times with the parity-dependent inserted knots (ends not repeated).
Eigen::VectorXd refine_knots(const Eigen::VectorXd& t, int m);

/// Precomputed blending operator for a fixed set of sample times.
class BlendingModel {
 public:
  BlendingModel(Eigen::VectorXd t, int m);

  int order() const { return m_; }
  const Eigen::VectorXd& times() const { return t_; }
  /// Refined knots with both ends repeated m times; the output spline's knots.
  const Eigen::VectorXd& s_knots() const { return s_; }
  /// Index of the refined B-spline behind L_j.
  Eigen::Index local_index(Eigen::Index j) const;
  double local_basis_eval(Eigen::Index j, double x) const;

  SplineCurve apply(const Eigen::VectorXd& g) const;

 private:
  Eigen::VectorXd t_;
  int m_;
  Eigen::VectorXd s_;
  std::vector<QuasiCoeffRow> rows_;       // lambda_p weights
  Eigen::MatrixXd blossom_;               // per s-coefficient, weights of lambda_{kfirst..kfirst+m-1}
  std::vector<Eigen::Index> blossom_first_;
  Eigen::MatrixXd d_;                     // d(k, i) = N_{T, k+i}(t_k)
  Eigen::VectorXd norm_;                  // N_{s, local_index(k)}(t_k)
};

/// P_m = Q_m + R_m(I - Q_m) on irregular samples; interpolates and reproduces degree < m.
SplineCurve blend_interpolate(const Eigen::VectorXd& t, const Eigen::VectorXd& x, int m);

/// Committed run of output coefficients.
struct StreamSegment {
  Eigen::Index first = 0;
  std::vector<double> coeffs;
};

/// Causal blending: coefficients are emitted once no later sample can change them.
class BlendingStream {
 public:
  explicit BlendingStream(int m);

  /// Throws std::invalid_argument on a non-increasing time.
  StreamSegment push(double t, double x);
  /// Closes the right end and flushes the remaining coefficients.
  StreamSegment finish();

  Eigen::Index samples() const { return count_; }
  Eigen::Index committed() const { return committed_; }
  /// Refined knots of the finished curve (valid after finish()).
  SplineCurve curve() const;

 private:
  double coefficient(Eigen::Index l, Eigen::Index last) const;
  std::optional<Eigen::Index> commit_limit() const;

  int m_;
  std::deque<double> t_, g_;
  Eigen::Index offset_ = 0;
  Eigen::Index count_ = 0;
  Eigen::Index committed_ = 0;
  bool finished_ = false;
  std::vector<double> all_t_;
  std::vector<double> out_;
};

}  // namespace rtdyn
