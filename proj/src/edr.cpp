#include "rtdyn/edr.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace rtdyn {

namespace {

double percentile_of(std::vector<double>& v, double pct) {
  const std::size_t k = std::min(v.size() - 1, static_cast<std::size_t>(std::floor(pct / 100.0 * (v.size() - 1) + 0.5)));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

// Refined-knot position of data time k; matches the blending layout.
long knot_pos(long k, int m) {
  if (m % 2 == 0) return k * (m / 2);
  return (k / 2) * m + ((k % 2) ? (m + 1) / 2 : 0);
}

}  // namespace

ECGRecord remove_baseline(const ECGRecord& ecg, double window_s) {
  if (!(ecg.fs > 0)) throw std::invalid_argument("remove_baseline: fs must be positive");
  const long half = static_cast<long>(std::floor(0.5 * window_s * ecg.fs));
  const long n = ecg.samples.size();
  if (n < 2 * half + 1) throw std::invalid_argument("remove_baseline: record shorter than the median window");
  ECGRecord out = ecg;
  std::vector<double> buf;
  buf.reserve(2 * half + 1);
  for (long i = 0; i < n; ++i) {
    const long lo = std::max(0L, i - half), hi = std::min(n - 1, i + half);
    buf.assign(ecg.samples.data() + lo, ecg.samples.data() + hi + 1);
    const auto mid = buf.begin() + static_cast<std::ptrdiff_t>(buf.size() / 2);
    std::nth_element(buf.begin(), mid, buf.end());
    double med = *mid;
    if (buf.size() % 2 == 0) med = 0.5 * (med + *std::max_element(buf.begin(), mid));
    out.samples[i] = ecg.samples[i] - med;
  }
  return out;
}

PeakList detect_peaks(const ECGRecord& ecg, Polarity polarity, const PeakDetectorParams& p) {
  if (!(ecg.fs > 0)) throw std::invalid_argument("detect_peaks: fs must be positive");
  if (p.refractory_ms < 0 || p.threshold_fraction < 0 || p.percentile < 0 || p.percentile > 100 || !(p.window_s > 0))
    throw std::invalid_argument("detect_peaks: invalid parameters");
  const Eigen::VectorXd& x = ecg.samples;
  const long n = x.size();
  PeakList out;
  out.polarity = polarity;
  if (n < 3) return out;
  const double sign = polarity == Polarity::R ? 1.0 : -1.0;

  // Threshold refreshed every quarter second from a centered window of |x|.
  const long stride = std::max(1L, static_cast<long>(std::lround(ecg.fs / 4)));
  const long half = std::max(1L, static_cast<long>(std::lround(0.5 * p.window_s * ecg.fs)));
  std::vector<double> thr((n + stride - 1) / stride);
  std::vector<double> buf;
  for (std::size_t b = 0; b < thr.size(); ++b) {
    const long c = static_cast<long>(b) * stride + stride / 2;
    const long lo = std::max(0L, c - half), hi = std::min(n - 1, c + half);
    buf.resize(hi - lo + 1);
    for (long i = lo; i <= hi; ++i) buf[i - lo] = std::abs(x[i]);
    thr[b] = p.threshold_fraction * percentile_of(buf, p.percentile);
  }

  const long refractory = static_cast<long>(std::floor(p.refractory_ms * 1e-3 * ecg.fs));
  std::vector<long> idx;
  for (long i = 1; i + 1 < n; ++i) {
    const double s = sign * x[i];
    if (!(s > thr[i / stride]) || !(s > sign * x[i - 1]) || !(s >= sign * x[i + 1])) continue;
    if (!idx.empty() && i - idx.back() < refractory) {
      if (s > sign * x[idx.back()]) idx.back() = i;
      continue;
    }
    idx.push_back(i);
  }
  for (long i : idx) {
    out.times.push_back(ecg.t0 + static_cast<double>(i) / ecg.fs);
    out.amplitudes.push_back(x[i]);
  }
  return out;
}

PeakList exclude_pvc(const PeakList& peaks, double prematurity_ratio, int history) {
  if (prematurity_ratio < 0 || history < 1) throw std::invalid_argument("exclude_pvc: invalid parameters");
  if (peaks.times.size() != peaks.amplitudes.size()) throw std::invalid_argument("exclude_pvc: size mismatch");
  if (prematurity_ratio == 0 || peaks.size() < 3) return peaks;
  PeakList out;
  out.polarity = peaks.polarity;
  std::deque<double> rr;
  bool skip_next = false;
  out.times.push_back(peaks.times[0]);
  out.amplitudes.push_back(peaks.amplitudes[0]);
  for (std::size_t i = 1; i < peaks.size(); ++i) {
    const double interval = peaks.times[i] - out.times.back();
    if (!rr.empty()) {
      std::vector<double> h(rr.begin(), rr.end());
      const double med = percentile_of(h, 50.0);
      if (interval < prematurity_ratio * med) {
        skip_next = true;  // the compensatory pause is not a normal interval either
        continue;
      }
    }
    if (skip_next) {
      skip_next = false;
    } else {
      rr.push_back(interval);
      if (static_cast<int>(rr.size()) > history) rr.pop_front();
    }
    out.times.push_back(peaks.times[i]);
    out.amplitudes.push_back(peaks.amplitudes[i]);
  }
  return out;
}

EDRWaveform build_edr(const PeakList& peaks, int m, double eta) {
  if (!(eta > 0)) throw std::invalid_argument("build_edr: eta must be positive");
  const auto n = static_cast<Eigen::Index>(peaks.size());
  if (static_cast<std::size_t>(n) != peaks.amplitudes.size()) throw std::invalid_argument("build_edr: size mismatch");
  const Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(peaks.times.data(), n);
  const Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(peaks.amplitudes.data(), n);
  EDRWaveform w;
  w.curve = blend_interpolate(t, a, m);
  w.t0 = t[0];
  w.dt = 1.0 / eta;
  const long count = static_cast<long>(std::floor((t[n - 1] - t[0]) * eta + 1e-9)) + 1;
  w.values.resize(count);
  for (long j = 0; j < count; ++j) w.values[j] = w.at(w.t0 + j * w.dt);
  return w;
}

EDRStream::EDRStream(int m, double eta) : m_(m), eta_(eta), stream_(m) {
  if (m < 3) throw std::invalid_argument("EDRStream: order must be >= 3");
  if (!(eta > 0)) throw std::invalid_argument("EDRStream: eta must be positive");
}

std::vector<std::pair<double, double>> EDRStream::push(double t, double amplitude) {
  if (finished_) throw std::logic_error("EDRStream: push after finish");
  const StreamSegment seg = stream_.push(t, amplitude);
  coeffs_.resize(seg.first);
  coeffs_.insert(coeffs_.end(), seg.coeffs.begin(), seg.coeffs.end());
  times_.push_back(t);
  const long k = static_cast<long>(times_.size()) - 1;
  if (k == 0) {
    inner_.assign(m_, t);  // left end with full multiplicity
  } else {
    const long p0 = knot_pos(k - 1, m_), p1 = knot_pos(k, m_);
    const double a = times_[k - 1];
    for (long q = p0 + 1; q <= p1; ++q)
      inner_.push_back(a + (t - a) * (static_cast<double>(q - p0) / static_cast<double>(p1 - p0)));
  }
  return drain(false);
}

std::vector<std::pair<double, double>> EDRStream::finish() {
  if (finished_) return {};
  finished_ = true;
  if (times_.empty()) return {};
  const StreamSegment seg = stream_.finish();
  coeffs_.resize(seg.first);
  coeffs_.insert(coeffs_.end(), seg.coeffs.begin(), seg.coeffs.end());
  return drain(true);
}

double EDRStream::eval(double tau, bool closed) const {
  if (closed) return eval_spline_curve(stream_.curve(), tau);
  const auto it = std::upper_bound(inner_.begin(), inner_.end(), tau);
  const long i = static_cast<long>(it - inner_.begin()) - 1;
  const Eigen::VectorXd local = Eigen::Map<const Eigen::VectorXd>(inner_.data() + (i - m_ + 1), 2 * m_);
  Eigen::Index first;
  Eigen::VectorXd vals;
  active_basis(local, m_, tau, first, vals);
  return Eigen::Map<const Eigen::VectorXd>(coeffs_.data() + (i - m_ + 1), m_).dot(vals);
}

std::vector<std::pair<double, double>> EDRStream::drain(bool closed) {
  std::vector<std::pair<double, double>> out;
  if (times_.empty()) return out;
  const double t0 = times_.front(), tl = times_.back();
  for (;; ++next_) {
    const double tau = t0 + static_cast<double>(next_) / eta_;
    if (closed) {
      if (tau > tl + 1e-9 / eta_) break;
      out.emplace_back(tau, eval(std::min(tau, tl), true));
      continue;
    }
    if (!(tau < tl)) break;
    const auto it = std::upper_bound(inner_.begin(), inner_.end(), tau);
    const long i = static_cast<long>(it - inner_.begin()) - 1;
    // Knots i+1..i+m must be final and coefficients up to i committed.
    if (i + m_ > static_cast<long>(inner_.size()) - 1 || i >= static_cast<long>(coeffs_.size())) break;
    out.emplace_back(tau, eval(tau, false));
  }
  return out;
}

double SyntheticECG::modulation(double t) const {
  return custom ? custom(t) : 1.0 + mod_depth * std::sin(2 * M_PI * resp_hz * t);
}

SyntheticECG synthetic_ecg(const SyntheticECGParams& p) {
  if (!(p.fs > 0) || !(p.duration > 0) || !(p.heart_rate > 0)) throw std::invalid_argument("synthetic_ecg: invalid parameters");
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SyntheticECG out;
  out.resp_hz = p.resp_hz;
  out.mod_depth = p.mod_depth;
  out.custom = p.modulation;
  const double rr = 60.0 / p.heart_rate;
  for (double t = 0.5 * rr; t < p.duration - 0.5;) {
    out.beat_times.push_back(t);
    out.beat_amps.push_back(out.modulation(t));
    t += rr * std::max(0.5, 1.0 + p.hrv_jitter * gauss(rng));
  }
  const long n = static_cast<long>(std::floor(p.duration * p.fs));
  out.ecg.fs = p.fs;
  out.ecg.samples.resize(n);
  auto bump = [](double u, double sd) { return std::exp(-0.5 * u * u / (sd * sd)); };
  for (long i = 0; i < n; ++i) {
    const double t = i / p.fs;
    double v = p.baseline_amp * std::sin(2 * M_PI * p.baseline_hz * t);
    // Only beats within half a second contribute.
    auto it = std::lower_bound(out.beat_times.begin(), out.beat_times.end(), t - 0.6);
    for (; it != out.beat_times.end() && *it < t + 0.3; ++it) {
      const double u = t - *it, a = out.beat_amps[it - out.beat_times.begin()];
      v += a * bump(u, 0.012) - 0.2 * a * bump(u - 0.035, 0.01) + 0.15 * bump(u - 0.3, 0.04) +
           0.1 * bump(u + 0.18, 0.025);
    }
    out.ecg.samples[i] = v;
  }
  if (p.noise_sd > 0)
    for (long i = 0; i < n; ++i) out.ecg.samples[i] += p.noise_sd * gauss(rng);
  return out;
}

}  // namespace rtdyn
