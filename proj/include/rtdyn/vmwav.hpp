#pragma once

#include "rtdyn/splines.hpp"

#include <complex>

namespace rtdyn {

enum class WaveletKind { Interior, BoundaryLeft, BoundaryRight, General };

/// Spline wavelet sum_k q[k] N_{m,k} on a local knot vector.
struct VMWavelet {
  int m = 1;
  int n = 0;
  Eigen::VectorXd knots;
  Eigen::VectorXd q;
  WaveletKind kind = WaveletKind::General;

  double operator()(double x) const;
  double support_begin() const { return knots[0]; }
  double support_end() const { return knots[knots.size() - 1]; }
  /// Integral of x^l psi(x), Gauss-Legendre per knot interval.
  double moment(int l) const;
  SplineCurve curve() const { return SplineCurve{m, knots, q}; }
};

/// psi_{m;n}(x) = N^{(n)}_{m+n}(x / spacing) up to the chain-rule factor;
/// spacing 0.5 gives the half-integer form N^{(n)}_{m+n}(2x), q_k = (-1)^k C(n,k).
VMWavelet interior_vm(int m, int n, double spacing = 0.5);

/// N^{(n)}_{m+n,k} on arbitrary knots.
VMWavelet vm_general_knots(const Eigen::VectorXd& knots, int m, int n, Eigen::Index k);

/// Exact derivative: order m-1, one more vanishing moment.
VMWavelet vm_derivative(const VMWavelet& w);

/// Half-integer knots on [0, N] with both ends repeated m times.
Eigen::VectorXd half_integer_knots(int m, int N);

/// Moment matrix d(l, i) = integral x^l N_{m, first+i}, l < n, i <= n.
Eigen::MatrixXd boundary_moment_matrix(const Eigen::VectorXd& knots, int m, int n, Eigen::Index first);

/// Null vector of the moment conditions on B-splines first..first+n, unit l2 norm,
/// largest-magnitude entry positive. Throws std::domain_error if the null space is not 1-D.
VMWavelet boundary_vm(const Eigen::VectorXd& knots, int m, int n, Eigen::Index first);

/// Left-end wavelet number j in {-(m-1), ..., -1} on half_integer_knots(m, N).
VMWavelet boundary_vm_left(int m, int N, int j);

/// Hilbert transform (1/pi) p.v. integral N_m(s) / (t - s) ds.
double hilbert_cardinal(int m, double t);
/// Same quantity by the order recursion started from H N_1.
double hilbert_cardinal_recursive(int m, double t);

/// Integer-knot wavelet sum_k (-1)^k C(n,k) N_m(t - k), support [0, m+n].
double vm_integer(int m, int n, double t);
/// Its Hilbert transform.
double vm_integer_hilbert(int m, int n, double t);

/// psi + i H psi on the integer-knot wavelet.
Eigen::VectorXcd analytic_vm(int m, int n, const Eigen::VectorXd& grid);

struct SpectrumReport {
  Eigen::VectorXd omega;      // radians per unit knot spacing
  Eigen::VectorXd magnitude;  // |psi^(omega)|
  double slr_db = 0.0;
};

/// |psi^| of a spline wavelet at angular frequency omega (convention int h e^{-i x w} dx).
double wavelet_spectrum(const VMWavelet& w, double omega);

/// Spectrum on [0, 64 pi] and the side-lobe ratio, with frequency normalized
/// to the wavelet's knot spacing; `density` nodes per unit of omega.
SpectrumReport spectrum_and_slr(const VMWavelet& w, int density = 16);

/// L2 distance between sigma^{n+1} psi_{m;n}(sqrt(M/48) x + M/4) and the n-th
/// derivative of the standard Gaussian, sigma = sqrt(M/12), M = m + n.
double gaussian_asymptotics_distance(int m, int n);

struct BoundaryScalePlan {
  double a_max = 0.0;       // largest interior scale clear of the boundary wavelets
  double a_boundary = 0.0;  // scale of the refined knots near t = N
  Eigen::VectorXd y;        // refined knots y_1..y_K
  int interior_count = 0;   // translated interior wavelets among the refined ones
};

BoundaryScalePlan boundary_scale_plan(int N, int m, int K);

/// Support of the scaled center wavelet psi_{m;m} at scale a, centered at N/2.
std::pair<double, double> scaled_center_support(int N, int m, double a);

}  // namespace rtdyn
