#pragma once

#include <Eigen/Dense>

#include <deque>
#include <limits>
#include <memory>
#include <optional>

namespace rtdyn {

/// Streaming synchrosqueezing parameters. Times in seconds, frequencies in Hz.
struct SSTConfig {
  double dt = 0.25;   // sample period
  double lag = 45.0;  // L; frames are emitted M = floor(L/dt) samples late
  int m = 11;         // spline order of the analysis wavelet
  int n = 11;         // vanishing moments
  int n_xi = 2000;    // frequency bins
  double gamma_rel = 1e-8;      // threshold relative to frame RMS
  double gamma_abs = 0.0;       // absolute floor for the threshold
  double scale_exponent = -0.5; // mass weight a^exponent

  int M() const;
  int N() const { return 2 * M(); }
  int rows() const { return N() - m - n + 1; }
  double f_lo() const { return 1.0 / (2.0 * lag); }
  double f_hi() const { return 1.0 / (2.0 * dt); }
  double bin_width() const { return (f_hi() - f_lo()) / n_xi; }
  /// Center frequency of bin k, 1 <= k <= n_xi.
  double bin_freq(int k) const { return f_lo() + k * bin_width(); }
  /// Throws std::invalid_argument on any violated constraint.
  void validate() const;
};

/// Conjugated analytic-wavelet samples; row i has scale a_i = (N - i + 1) / (m + n) in samples.
struct AnalysisMatrices {
  Eigen::MatrixXcd psi;     // rows x N
  Eigen::MatrixXcd lambda;  // companion psi_{m-1;n+1}
  Eigen::VectorXd scale;    // a_i
};

AnalysisMatrices build_matrices(const SSTConfig& cfg);

struct FrameOutput {
  double time = 0.0;
  Eigen::VectorXcd W, Z;
  Eigen::VectorXd omega;  // Hz, -inf where |W| <= threshold
  Eigen::VectorXcd S;     // n_xi bins
  Eigen::VectorXd V;      // |S|^2
};

inline constexpr double kNoFrequency = -std::numeric_limits<double>::infinity();

/// W = Psi * window, Z = Lambda * window.
std::pair<Eigen::VectorXcd, Eigen::VectorXcd> cwt_frame(const AnalysisMatrices& mats, const Eigen::VectorXd& window);

/// Re(i Z / (2 pi W)) where |W| > gamma, sentinel otherwise. Unit: cycles per unit of wavelet argument.
Eigen::VectorXd reassign(const Eigen::VectorXcd& W, const Eigen::VectorXcd& Z, double gamma);

/// Reassignment converted to Hz using the row scales.
Eigen::VectorXd reassign_hz(const Eigen::VectorXcd& W, const Eigen::VectorXcd& Z, double gamma,
                            const Eigen::VectorXd& scale, double dt);

/// Bin index round((omega - f_lo) / (f_hi - f_lo) * n_xi); 0 for the sentinel.
long squeeze_bin(double omega, const SSTConfig& cfg);

/// Hard-binned synchrosqueezing of one frame into (S, V).
std::pair<Eigen::VectorXcd, Eigen::VectorXd> squeeze(const Eigen::VectorXcd& W, const Eigen::VectorXd& omega,
                                                    const Eigen::VectorXd& scale, const SSTConfig& cfg);

/// Threshold used for a window: max(gamma_abs, gamma_rel * rms(window)).
double frame_threshold(const SSTConfig& cfg, const Eigen::VectorXd& window);

/// Full computation for one window of N samples.
FrameOutput compute_frame(const SSTConfig& cfg, const AnalysisMatrices& mats, const Eigen::VectorXd& window,
                          double time);

struct TFMap {
  Eigen::VectorXd times;  // frame times
  Eigen::VectorXd freqs;  // bin centers
  Eigen::MatrixXcd S;     // frames x n_xi
  Eigen::MatrixXd V;      // |S|^2
};

/// Fixed-lag streaming engine: one frame per sample once N samples have arrived.
class SSTEngine {
 public:
  explicit SSTEngine(const SSTConfig& cfg, double t0 = 0.0);
  SSTEngine(const SSTConfig& cfg, std::shared_ptr<const AnalysisMatrices> mats, double t0 = 0.0);

  std::optional<FrameOutput> push(double sample);
  const SSTConfig& config() const { return cfg_; }
  const AnalysisMatrices& matrices() const { return *mats_; }
  long samples_seen() const { return count_; }

 private:
  SSTConfig cfg_;
  std::shared_ptr<const AnalysisMatrices> mats_;
  double t0_;
  long count_ = 0;
  std::deque<double> buf_;
};

/// Offline computation over a uniformly sampled signal starting at t0.
TFMap sst_batch(const SSTConfig& cfg, const Eigen::VectorXd& signal, double t0 = 0.0);
TFMap sst_batch(const SSTConfig& cfg, const AnalysisMatrices& mats, const Eigen::VectorXd& signal, double t0 = 0.0);

}  // namespace rtdyn
