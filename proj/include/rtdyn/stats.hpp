#pragma once

#include <Eigen/Dense>

#include <optional>

namespace rtdyn {

struct PairCounts {
  long concordant = 0, discordant = 0, tie_x = 0, tie_y = 0, tie_both = 0;
};

/// Classification of all unordered pairs (i < j).
PairCounts classify_pairs(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// P_K = (P_c + P_tx / 2) / (P_c + P_d + P_tx); empty when every pair ties in y.
std::optional<double> prediction_probability(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Average ranks (1-based) with ties sharing the mean rank.
Eigen::VectorXd average_ranks(const Eigen::VectorXd& v);

/// Spearman rank correlation; std::domain_error if either rank vector is constant.
double spearman(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Population standard deviation.
double std_dev(const Eigen::VectorXd& v);

/// 20 log10(std(signal) / std(noise)).
double snr_db(const Eigen::VectorXd& signal, const Eigen::VectorXd& noise);

enum class InputHold { Constant, Linear };

/// Effect-site concentration for dC/dt = ke0 (C_et - C). Times in seconds, ke0 per minute.
/// Exact per step for the chosen interpolation of C_et between samples.
Eigen::VectorXd effect_site(const Eigen::VectorXd& times, const Eigen::VectorXd& c_et, double ke0_per_min,
                            double c0 = 0.0, InputHold hold = InputHold::Constant);

/// Mean of values weighted by record lengths.
double weighted_mean(const Eigen::VectorXd& values, const Eigen::VectorXd& weights);

}  // namespace rtdyn
