#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <vector>

namespace rtdyn {

/// Brownian path sampled at l*dt, l = 1..M, convolved with a unit-mass Gaussian of standard
/// deviation sigma seconds (truncated at 4 sigma, renormalized at the ends).
Eigen::VectorXd smoothed_brownian(int M, double dt, double sigma, std::uint64_t seed);

/// Normalized rate 2 (x + 2 max|x|) / (max x + 2 max|x|), which lies in [2/3, 2].
Eigen::VectorXd normalized_rate(const Eigen::VectorXd& tilde);

/// Cumulative dt * sum of the normalized rate: strictly increasing.
Eigen::VectorXd phase_from(const Eigen::VectorXd& tilde, double dt);

struct ComponentSpec {
  double sigma_phase = 2.0;  // s
  double sigma_amp = 4.0;    // s
  double freq_scale = 1.0;   // multiplies the phase, so the IF lies in [2/3, 2] * freq_scale
  double active_from = -std::numeric_limits<double>::infinity();
  double active_to = std::numeric_limits<double>::infinity();
};

struct SimConfig {
  double dt = 1.0 / 32.0;
  double duration = 25.0;
  std::vector<ComponentSpec> components;
  bool trend = true;
  double sigma_trend = 4.0;
  double snr_db = std::numeric_limits<double>::infinity();  // infinity: no noise
  std::uint64_t seed = 1;

  /// Two-component layout: component 1 until 18.75 s, component 2 from 6.25 s at three times the rate.
  static SimConfig two_component();
};

struct SimComponent {
  Eigen::VectorXd amp, phase, inst_freq, mask, values;
};

struct SyntheticSignal {
  double dt = 0.0;
  Eigen::VectorXd times;
  std::vector<SimComponent> components;
  Eigen::VectorXd trend, noise, oscillatory, Y;
};

/// Y = sum of masked components + trend + white noise scaled to the target SNR, where
/// SNR = 20 log10(std(sum of components) / std(noise)).
SyntheticSignal compose(double dt, std::vector<SimComponent> components, const Eigen::VectorXd& trend,
                        std::uint64_t noise_seed, double target_snr_db);

SyntheticSignal simulate(const SimConfig& cfg);

}  // namespace rtdyn
