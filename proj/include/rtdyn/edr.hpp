#pragma once

#include "rtdyn/blending.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace rtdyn {

struct ECGRecord {
  double fs = 500.0;  // Hz
  double t0 = 0.0;    // time of the first sample
  Eigen::VectorXd samples;
  std::string lead = "II";
};

enum class Polarity { R, S };

struct PeakList {
  std::vector<double> times;
  std::vector<double> amplitudes;
  Polarity polarity = Polarity::R;
  std::size_t size() const { return times.size(); }
};

/// Input minus its running median over a centered window (edges use shrinking windows).
ECGRecord remove_baseline(const ECGRecord& ecg, double window_s = 0.1);

struct PeakDetectorParams {
  double refractory_ms = 250.0;
  double threshold_fraction = 0.5;  // of the rolling percentile
  double percentile = 95.0;         // of the rectified signal
  double window_s = 2.0;            // centered percentile window
};

/// Local extrema of the chosen polarity above the adaptive threshold, at least one refractory
/// period apart (the larger one wins). Amplitudes are the signed sample values.
PeakList detect_peaks(const ECGRecord& ecg, Polarity polarity, const PeakDetectorParams& p = {});

/// Drops beats whose interval since the last kept beat is below ratio * median of the last `history` accepted
/// intervals. The long interval after a dropped beat is not added to the history. ratio 0 disables.
PeakList exclude_pvc(const PeakList& peaks, double prematurity_ratio = 0.7, int history = 8);

struct EDRWaveform {
  SplineCurve curve;          // blending interpolant of (time, amplitude)
  double t0 = 0.0, dt = 0.0;  // uniform grid t0 + j dt
  Eigen::VectorXd values;
  double at(double t) const { return eval_spline_curve(curve, t); }
};

/// Blending interpolation of the peak amplitudes resampled at eta Hz from the first peak.
EDRWaveform build_edr(const PeakList& peaks, int m = 4, double eta = 4.0);

/// Causal EDR: uniform samples are released as soon as every coefficient they depend on is final.
class EDRStream {
 public:
  EDRStream(int m = 4, double eta = 4.0);

  /// Feeds one retained peak; returns newly final (time, value) samples.
  std::vector<std::pair<double, double>> push(double t, double amplitude);
  /// Closes the stream and returns the remaining samples up to the last peak.
  std::vector<std::pair<double, double>> finish();

 private:
  std::vector<std::pair<double, double>> drain(bool closed);
  double eval(double tau, bool closed) const;

  int m_;
  double eta_;
  BlendingStream stream_;
  std::vector<double> times_;
  std::vector<double> inner_;  // refined knots so far
  std::vector<double> coeffs_;
  long next_ = 0;              // next grid index
  bool finished_ = false;
};

struct SyntheticECG {
  ECGRecord ecg;
  std::vector<double> beat_times;  // R-peak centers
  std::vector<double> beat_amps;   // R amplitude before baseline wander
  double resp_hz = 0.25;
  double mod_depth = 0.2;
  std::function<double(double)> custom;  // overrides the sinusoid when set
  /// True amplitude modulation: custom(t), else 1 + depth sin(2 pi f t).
  double modulation(double t) const;
};

struct SyntheticECGParams {
  double fs = 500.0;
  double duration = 120.0;
  double heart_rate = 70.0;     // beats per minute
  double hrv_jitter = 0.05;     // relative sd of RR intervals
  double resp_hz = 0.25;
  double mod_depth = 0.2;
  double baseline_amp = 0.3;    // mV, wander at baseline_hz
  double baseline_hz = 0.3;
  double noise_sd = 0.0;
  std::uint64_t seed = 1;
  std::function<double(double)> modulation;  // replaces the respiratory sinusoid when set
};

/// Gaussian QRS complexes with respiratory amplitude modulation, small S and T waves, baseline wander.
SyntheticECG synthetic_ecg(const SyntheticECGParams& p);

}  // namespace rtdyn
