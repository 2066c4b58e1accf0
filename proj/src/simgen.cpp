#include "rtdyn/simgen.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace rtdyn {

using Eigen::Index;

namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

Eigen::VectorXd white(Index M, std::uint64_t seed, std::uint64_t stream) {
  auto rng = make_rng(seed, stream);
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(M);
  for (auto& x : v) x = nd(rng);
  return v;
}

Eigen::VectorXd smooth(const Eigen::VectorXd& x, double dt, double sigma) {
  const Index M = x.size();
  const long half = static_cast<long>(std::ceil(4 * sigma / dt));
  Eigen::VectorXd k(2 * half + 1);
  for (long j = -half; j <= half; ++j) k[j + half] = std::exp(-0.5 * std::pow(j * dt / sigma, 2));
  Eigen::VectorXd y(M);
  for (Index l = 0; l < M; ++l) {
    const long lo = std::max<long>(0, l - half), hi = std::min<long>(M - 1, l + half);
    const auto w = k.segment(lo - l + half, hi - lo + 1);
    y[l] = x.segment(lo, hi - lo + 1).dot(w) / w.sum();
  }
  return y;
}

}  // namespace

Eigen::VectorXd smoothed_brownian(int M, double dt, double sigma, std::uint64_t seed) {
  if (M < 2) throw std::invalid_argument("smoothed_brownian: M must exceed 1");
  if (!(sigma > 0) || !(dt > 0)) throw std::invalid_argument("smoothed_brownian: sigma and dt must be positive");
  Eigen::VectorXd w = white(M, seed, 0) * std::sqrt(dt);
  for (Index l = 1; l < M; ++l) w[l] += w[l - 1];
  return smooth(w, dt, sigma);
}

Eigen::VectorXd normalized_rate(const Eigen::VectorXd& tilde) {
  if (tilde.size() == 0) throw std::invalid_argument("normalized_rate: empty input");
  const double big = tilde.cwiseAbs().maxCoeff();
  const double den = tilde.maxCoeff() + 2 * big;
  if (!(den > 0)) throw std::invalid_argument("normalized_rate: input is identically zero");
  return (2.0 * (tilde.array() + 2 * big) / den).matrix();
}

Eigen::VectorXd phase_from(const Eigen::VectorXd& tilde, double dt) {
  Eigen::VectorXd p = dt * normalized_rate(tilde);
  for (Index l = 1; l < p.size(); ++l) p[l] += p[l - 1];
  return p;
}

SimConfig SimConfig::two_component() {
  SimConfig c;
  ComponentSpec a, b;
  a.active_to = 18.75;
  b.active_from = 6.25;
  b.freq_scale = 3.0;
  c.components = {a, b};
  return c;
}

SyntheticSignal compose(double dt, std::vector<SimComponent> components, const Eigen::VectorXd& trend,
                        std::uint64_t noise_seed, double target_snr_db) {
  SyntheticSignal s;
  s.dt = dt;
  const Index M = trend.size();
  s.times = Eigen::VectorXd::LinSpaced(M, dt, M * dt);
  s.oscillatory = Eigen::VectorXd::Zero(M);
  for (auto& c : components) {
    if (c.amp.size() != M || c.phase.size() != M || c.mask.size() != M)
      throw std::invalid_argument("compose: series lengths differ");
    c.values = (c.amp.array() * (2 * std::numbers::pi * c.phase.array()).cos() * c.mask.array()).matrix();
    s.oscillatory += c.values;
  }
  s.components = std::move(components);
  s.trend = trend;
  s.noise = Eigen::VectorXd::Zero(M);
  if (std::isfinite(target_snr_db)) {
    const double so = (s.oscillatory.array() - s.oscillatory.mean()).square().mean();
    if (!(so > 0)) throw std::invalid_argument("compose: oscillatory part has zero variance");
    Eigen::VectorXd z = white(M, noise_seed, 1);
    const double sz = std::sqrt((z.array() - z.mean()).square().mean());
    s.noise = z * (std::sqrt(so) / sz / std::pow(10.0, target_snr_db / 20.0));
  }
  s.Y = s.oscillatory + s.trend + s.noise;
  return s;
}

SyntheticSignal simulate(const SimConfig& cfg) {
  const int M = static_cast<int>(std::lround(cfg.duration / cfg.dt));
  if (M < 2) throw std::invalid_argument("simulate: duration too short");
  std::vector<SimComponent> comps;
  std::uint64_t stream = 0;
  auto next_seed = [&] { return cfg.seed * 1000003ULL + (++stream); };
  for (const ComponentSpec& spec : cfg.components) {
    SimComponent c;
    const Eigen::VectorXd pt = smoothed_brownian(M, cfg.dt, spec.sigma_phase, next_seed());
    c.inst_freq = spec.freq_scale * normalized_rate(pt);
    c.phase = spec.freq_scale * phase_from(pt, cfg.dt);
    c.amp = phase_from(smoothed_brownian(M, cfg.dt, spec.sigma_amp, next_seed()), cfg.dt);
    c.mask.resize(M);
    for (int l = 0; l < M; ++l) {
      const double t = (l + 1) * cfg.dt;
      c.mask[l] = (t >= spec.active_from && t <= spec.active_to) ? 1.0 : 0.0;
    }
    comps.push_back(std::move(c));
  }
  Eigen::VectorXd trend = Eigen::VectorXd::Zero(M);
  if (cfg.trend) {
    trend = phase_from(smoothed_brownian(M, cfg.dt, cfg.sigma_trend, next_seed()), cfg.dt);
    trend.array() -= trend.mean();
  }
  return compose(cfg.dt, std::move(comps), trend, next_seed(), cfg.snr_db);
}

}  // namespace rtdyn
