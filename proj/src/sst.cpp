#include "rtdyn/sst.hpp"

#include "rtdyn/vmwav.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rtdyn {

using Eigen::Index;

int SSTConfig::M() const {
  // Tolerance keeps L/dt = integer from rounding down.
  return static_cast<int>(std::floor(lag / dt + 1e-9));
}

void SSTConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("sst: dt must be positive");
  if (m < 3) throw std::invalid_argument("sst: m must be >= 3");
  if (n < 1) throw std::invalid_argument("sst: n must be >= 1");
  if (!(lag > (m + n) * dt / 2.0)) throw std::invalid_argument("sst: lag must exceed (m+n)*dt/2");
  if (N() <= m + n) throw std::invalid_argument("sst: window 2*floor(lag/dt) must exceed m+n");
  if (n_xi < 1) throw std::invalid_argument("sst: n_xi must be positive");
  if (!(f_hi() > f_lo())) throw std::invalid_argument("sst: empty frequency range");
  if (gamma_rel < 0.0 || gamma_abs < 0.0) throw std::invalid_argument("sst: threshold must be >= 0");
}

AnalysisMatrices build_matrices(const SSTConfig& cfg) {
  cfg.validate();
  const int m = cfg.m, n = cfg.n, N = cfg.N(), R = cfg.rows();
  AnalysisMatrices out;
  out.psi.resize(R, N);
  out.lambda.resize(R, N);
  out.scale.resize(R);
  for (int i = 1; i <= R; ++i) {
    const double a = static_cast<double>(N - i + 1) / (m + n);
    out.scale[i - 1] = a;
    for (int l = 1; l <= N; ++l) {
      const double x = (m + n) * static_cast<double>(l - i) / (N - i + 1);
      out.psi(i - 1, l - 1) = {vm_integer(m, n, x), -vm_integer_hilbert(m, n, x)};
      out.lambda(i - 1, l - 1) = {vm_integer(m - 1, n + 1, x), -vm_integer_hilbert(m - 1, n + 1, x)};
    }
  }
  return out;
}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> cwt_frame(const AnalysisMatrices& mats, const Eigen::VectorXd& window) {
  if (window.size() != mats.psi.cols()) throw std::invalid_argument("cwt_frame: window length mismatch");
  const Eigen::VectorXcd w = window.cast<std::complex<double>>();
  return {mats.psi * w, mats.lambda * w};
}

Eigen::VectorXd reassign(const Eigen::VectorXcd& W, const Eigen::VectorXcd& Z, double gamma) {
  if (W.size() != Z.size()) throw std::invalid_argument("reassign: length mismatch");
  const std::complex<double> i_over(0.0, 0.5 / std::numbers::pi);
  Eigen::VectorXd om(W.size());
  for (Index j = 0; j < W.size(); ++j)
    om[j] = std::abs(W[j]) > gamma && W[j] != 0.0 ? std::real(i_over * Z[j] / W[j]) : kNoFrequency;
  return om;
}

Eigen::VectorXd reassign_hz(const Eigen::VectorXcd& W, const Eigen::VectorXcd& Z, double gamma,
                            const Eigen::VectorXd& scale, double dt) {
  Eigen::VectorXd om = reassign(W, Z, gamma);
  for (Index j = 0; j < om.size(); ++j)
    if (std::isfinite(om[j])) om[j] /= scale[j] * dt;
  return om;
}

long squeeze_bin(double omega, const SSTConfig& cfg) {
  if (!std::isfinite(omega)) return 0;
  const double r = (omega - cfg.f_lo()) / (cfg.f_hi() - cfg.f_lo()) * cfg.n_xi;
  if (r < -1.0 || r > cfg.n_xi + 1.0) return r < 0 ? -1 : cfg.n_xi + 1;
  return std::lround(r);
}

std::pair<Eigen::VectorXcd, Eigen::VectorXd> squeeze(const Eigen::VectorXcd& W, const Eigen::VectorXd& omega,
                                                    const Eigen::VectorXd& scale, const SSTConfig& cfg) {
  Eigen::VectorXcd S = Eigen::VectorXcd::Zero(cfg.n_xi);
  for (Index j = 0; j < W.size(); ++j) {
    const long k = squeeze_bin(omega[j], cfg);
    if (k >= 1 && k <= cfg.n_xi) S[k - 1] += W[j] * std::pow(scale[j], cfg.scale_exponent);
  }
  Eigen::VectorXd V = S.cwiseAbs2();
  return {std::move(S), std::move(V)};
}

double frame_threshold(const SSTConfig& cfg, const Eigen::VectorXd& window) {
  const double rms = window.size() ? window.norm() / std::sqrt(static_cast<double>(window.size())) : 0.0;
  return std::max(cfg.gamma_abs, cfg.gamma_rel * rms);
}

FrameOutput compute_frame(const SSTConfig& cfg, const AnalysisMatrices& mats, const Eigen::VectorXd& window,
                          double time) {
  FrameOutput f;
  f.time = time;
  std::tie(f.W, f.Z) = cwt_frame(mats, window);
  f.omega = reassign_hz(f.W, f.Z, frame_threshold(cfg, window), mats.scale, cfg.dt);
  std::tie(f.S, f.V) = squeeze(f.W, f.omega, mats.scale, cfg);
  return f;
}

SSTEngine::SSTEngine(const SSTConfig& cfg, double t0)
    : SSTEngine(cfg, std::make_shared<const AnalysisMatrices>(build_matrices(cfg)), t0) {}

SSTEngine::SSTEngine(const SSTConfig& cfg, std::shared_ptr<const AnalysisMatrices> mats, double t0)
    : cfg_(cfg), mats_(std::move(mats)), t0_(t0) {
  cfg_.validate();
  if (!mats_ || mats_->psi.cols() != cfg_.N() || mats_->psi.rows() != cfg_.rows())
    throw std::invalid_argument("SSTEngine: matrices do not match config");
}

std::optional<FrameOutput> SSTEngine::push(double sample) {
  buf_.push_back(sample);
  ++count_;
  const int N = cfg_.N();
  if (static_cast<int>(buf_.size()) > N) buf_.pop_front();
  if (static_cast<int>(buf_.size()) < N) return std::nullopt;
  Eigen::VectorXd window(N);
  std::copy(buf_.begin(), buf_.end(), window.data());
  // Newest sample has index count_-1; the frame sits M samples behind it.
  const double time = t0_ + static_cast<double>(count_ - 1 - cfg_.M()) * cfg_.dt;
  return compute_frame(cfg_, *mats_, window, time);
}

TFMap sst_batch(const SSTConfig& cfg, const Eigen::VectorXd& signal, double t0) {
  return sst_batch(cfg, build_matrices(cfg), signal, t0);
}

TFMap sst_batch(const SSTConfig& cfg, const AnalysisMatrices& mats, const Eigen::VectorXd& signal, double t0) {
  cfg.validate();
  const int N = cfg.N();
  const Index frames = std::max<Index>(0, signal.size() - N + 1);
  TFMap map;
  map.times.resize(frames);
  map.freqs.resize(cfg.n_xi);
  for (int k = 1; k <= cfg.n_xi; ++k) map.freqs[k - 1] = cfg.bin_freq(k);
  map.S.resize(frames, cfg.n_xi);
  map.V.resize(frames, cfg.n_xi);
  for (Index f = 0; f < frames; ++f) {
    const FrameOutput out = compute_frame(cfg, mats, signal.segment(f, N), 0.0);
    map.times[f] = t0 + static_cast<double>(f + N - 1 - cfg.M()) * cfg.dt;
    map.S.row(f) = out.S.transpose();
    map.V.row(f) = out.V.transpose();
  }
  return map;
}

}  // namespace rtdyn
