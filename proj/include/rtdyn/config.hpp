#pragma once

#include "rtdyn/edr.hpp"
#include "rtdyn/features.hpp"
#include "rtdyn/sst.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace rtdyn {

/// Every tunable of the pipelines, one key per field.
struct PipelineConfig {
  // synchrosqueezing
  double dt = 0.25;
  double lag = 45.0;
  int m = 11;
  int n = 11;
  int n_xi = 2000;
  double gamma_rel = 1e-8;
  double gamma_abs = 0.0;
  double scale_exponent = -0.5;
  // ridge and NRR
  double lambda = 0.5;
  double half_width = 0.02;
  double floor_hz = 0.1;
  int harmonics = 1;
  // interpolation and EDR
  int order = 4;
  double eta = 4.0;
  std::string polarity = "R";
  bool pvc = true;
  double pvc_ratio = 0.7;
  int pvc_history = 8;
  double refractory_ms = 250.0;
  double threshold_fraction = 0.5;
  double baseline_window = 0.1;
  // effect site
  double ke0 = 0.2;  // per minute
  // simulation
  std::uint64_t seed = 1;
  double sim_dt = 1.0 / 32.0;
  double sim_duration = 25.0;
  double snr_db = std::numeric_limits<double>::infinity();

  SSTConfig sst() const;
  NRRParams nrr() const;
  PeakDetectorParams detector() const;
  Polarity peak_polarity() const { return polarity == "S" ? Polarity::S : Polarity::R; }
  /// Throws std::invalid_argument naming the offending key.
  void validate() const;
};

/// Keys in canonical order.
const std::vector<std::string>& config_keys();

/// Assigns one key from text; throws std::invalid_argument on unknown key or bad value.
void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value);
std::string get_config_value(const PipelineConfig& cfg, std::string_view key);

/// key=value lines, '#' starts a comment. Defaults fill unspecified keys; the result is validated.
PipelineConfig parse_config(std::string_view text);
/// Applies the lines of `text` on top of `base` without validating.
void apply_config_text(PipelineConfig& base, std::string_view text);

/// Every key in canonical order with shortest round-trip numbers.
std::string canonical_config(const PipelineConfig& cfg);

}  // namespace rtdyn
