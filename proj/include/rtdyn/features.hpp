#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace rtdyn {

/// Log of normalized power used where a bin carries no energy.
inline constexpr double kLogPowerFloor = -50.0;

struct RidgeCurve {
  std::vector<int> bins;  // 1-based, one per frame
  double lambda = 0.0;
  double score = 0.0;     // objective value at the optimum
};

/// Ridge score of a given bin path on V (frames x n_xi): sum of log(V / total) minus
/// lambda * sum of squared bin jumps.
double ridge_objective(const Eigen::MatrixXd& V, const std::vector<int>& bins, double lambda);

/// Exact maximizer of ridge_objective by dynamic programming over bins.
RidgeCurve extract_ridge(const Eigen::MatrixXd& V, double lambda);

struct NRRParams {
  double half_width = 0.02;  // Hz, rhythmic band around the ridge
  double floor_hz = 0.1;     // lower edge of the power sums
  int harmonics = 1;         // bands at multiples of the ridge frequency
};

/// Sum of V(l, k) over bins [floor(f_r - w/dxi), ceil(f_r + w/dxi)] (and multiples), restricted
/// to bins at or above floor_hz. `freqs` holds the bin centers.
double rhythmic_power(const Eigen::MatrixXd& V, const Eigen::VectorXd& freqs, const RidgeCurve& ridge,
                      Eigen::Index frame, const NRRParams& p = {});

/// Total power at or above floor_hz minus P_r, floored at zero.
double nonrhythmic_power(const Eigen::MatrixXd& V, const Eigen::VectorXd& freqs, double p_r, Eigen::Index frame,
                         const NRRParams& p = {});

/// log10(P_nr / P_r); empty when P_r is not positive.
std::optional<double> nrr(double p_nr, double p_r);

struct NRRSeries {
  Eigen::VectorXd p_r, p_nr, nrr;  // nrr is NaN where undefined
};

NRRSeries nrr_series(const Eigen::MatrixXd& V, const Eigen::VectorXd& freqs, const RidgeCurve& ridge,
                     const NRRParams& p = {});

/// Ridge restricted to bins at or above p.floor_hz (reported in full-grid bin numbers).
RidgeCurve extract_ridge_above(const Eigen::MatrixXd& V, const Eigen::VectorXd& freqs, double lambda,
                               const NRRParams& p = {});

/// Ridge above the floor followed by nrr_series.
NRRSeries nrr_from_map(const Eigen::MatrixXd& V, const Eigen::VectorXd& freqs, double lambda,
                       const NRRParams& p = {});

/// 1-periodic shape sum_l alpha_l cos(2 pi l u) + beta_l sin(2 pi l u).
struct ShapeModel {
  int D = 0;
  Eigen::VectorXd gamma;  // [alpha_1..alpha_D, beta_1..beta_D]
  double operator()(double u) const;
  /// gamma^T c for given amplitude and phase samples.
  Eigen::VectorXd reconstruct(const Eigen::VectorXd& amp, const Eigen::VectorXd& phase) const;
};

/// Least-squares regression of Y on A cos(2 pi l phi), A sin(2 pi l phi), l = 1..D.
ShapeModel estimate_shape(const Eigen::VectorXd& Y, const Eigen::VectorXd& amp, const Eigen::VectorXd& phase, int D);

/// Sequential extraction: fit component 1, subtract, fit component 2, ...
std::vector<ShapeModel> estimate_shapes(const Eigen::VectorXd& Y, const std::vector<Eigen::VectorXd>& amps,
                                        const std::vector<Eigen::VectorXd>& phases, int D);

/// |integral f g| / (||f|| ||g||) over [a, b] by composite Gauss-Legendre quadrature.
double almost_orthogonality(const std::function<double(double)>& f, const std::function<double(double)>& g, double a,
                            double b, int panels_per_unit = 8);

}  // namespace rtdyn
