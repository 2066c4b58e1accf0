#include "doctest.h"
#include "rtdyn/edr.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace rtdyn;

namespace {

ECGRecord record(const Eigen::VectorXd& x, double fs = 500.0) {
  ECGRecord r;
  r.fs = fs;
  r.samples = x;
  return r;
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd da = a.array() - a.mean(), db = b.array() - b.mean();
  return (da * db).sum() / std::sqrt(da.square().sum() * db.square().sum());
}

PeakList regular_peaks(int count, double rr, double t0 = 0.3) {
  PeakList p;
  for (int i = 0; i < count; ++i) {
    p.times.push_back(t0 + i * rr);
    p.amplitudes.push_back(1.0 + 0.1 * std::sin(0.7 * i));
  }
  return p;
}

}  // namespace

TEST_CASE("baseline removal") {
  const double fs = 500;
  SUBCASE("constant input vanishes") {
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(2000, 3.7);
    CHECK(remove_baseline(record(x)).samples.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("slow wander attenuated, narrow spike kept") {
    const long n = 10000;
    Eigen::VectorXd wander(n), spike = Eigen::VectorXd::Zero(n);
    for (long i = 0; i < n; ++i) wander[i] = std::sin(2 * std::numbers::pi * 0.3 * i / fs);
    for (long i = 4995; i <= 5005; ++i) spike[i] = 2.0 * std::exp(-0.5 * std::pow((i - 5000) / 3.0, 2));
    const Eigen::VectorXd y = remove_baseline(record(wander)).samples;
    const double att_db = 10 * std::log10(wander.squaredNorm() / y.squaredNorm());
    CHECK(att_db >= 20.0);
    const Eigen::VectorXd z = remove_baseline(record(wander + spike)).samples;
    CHECK(std::abs(z[5000] - 2.0) <= 0.05 * 2.0);
  }
  SUBCASE("record shorter than the window") {
    CHECK_THROWS_AS(remove_baseline(record(Eigen::VectorXd::Zero(20))), std::invalid_argument);
  }
}

TEST_CASE("peak detection on impulse trains") {
  const double fs = 250;
  const long n = 5000;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<long> at;
  std::vector<double> amp;
  for (long i = 100, k = 0; i < n - 50; i += 200, ++k) {
    at.push_back(i);
    amp.push_back(1.0 + 0.25 * std::cos(0.4 * k));
    x[i] = amp.back();
  }
  const PeakList r = detect_peaks(record(x, fs), Polarity::R);
  REQUIRE(r.size() == at.size());
  double err_t = 0, err_a = 0;
  for (std::size_t k = 0; k < at.size(); ++k) {
    err_t = std::max(err_t, std::abs(r.times[k] - at[k] / fs));
    err_a = std::max(err_a, std::abs(r.amplitudes[k] - amp[k]));
  }
  CHECK(err_t < 1e-12);
  CHECK(err_a == 0.0);

  SUBCASE("S polarity mirrors R on the negated trace") {
    const PeakList s = detect_peaks(record(-x, fs), Polarity::S);
    REQUIRE(s.size() == r.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
      CHECK(s.times[k] == r.times[k]);
      CHECK(s.amplitudes[k] == -r.amplitudes[k]);
    }
    CHECK(s.polarity == Polarity::S);
  }
  SUBCASE("refractory period keeps the larger peak") {
    Eigen::VectorXd y = x;
    y[at[5] + 20] = 2.0 * amp[5];  // 80 ms later
    const PeakList q = detect_peaks(record(y, fs), Polarity::R);
    REQUIRE(q.size() == at.size());
    CHECK(q.amplitudes[5] == 2.0 * amp[5]);
    CHECK(q.times[5] == doctest::Approx((at[5] + 20) / fs));
  }
}

TEST_CASE("premature beat exclusion") {
  PeakList p = regular_peaks(30, 0.8);
  // Premature beat at half an interval after beat 14.
  p.times.insert(p.times.begin() + 15, p.times[14] + 0.4);
  p.amplitudes.insert(p.amplitudes.begin() + 15, 5.0);
  const PeakList q = exclude_pvc(p);
  REQUIRE(q.size() == 30);
  for (double a : q.amplitudes) CHECK(a < 2.0);
  CHECK(exclude_pvc(regular_peaks(30, 0.8)).times == regular_peaks(30, 0.8).times);
  CHECK(exclude_pvc(p, 0.0).size() == p.size());
  CHECK_THROWS_AS(exclude_pvc(p, -1.0), std::invalid_argument);
}

TEST_CASE("EDR interpolates the peak amplitudes") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.6, 1.1);
  PeakList p;
  double t = 0.2;
  for (int i = 0; i < 60; ++i) {
    p.times.push_back(t);
    p.amplitudes.push_back(std::sin(0.3 * t) + 0.2 * u(rng));
    t += u(rng);
  }
  for (int m : {3, 4, 5}) {
    const EDRWaveform w = build_edr(p, m, 4.0);
    double err = 0;
    for (std::size_t k = 0; k < p.size(); ++k) err = std::max(err, std::abs(w.at(p.times[k]) - p.amplitudes[k]));
    CHECK(err <= 1e-10);
    CHECK(w.dt == 0.25);
    CHECK(w.values.size() == static_cast<Eigen::Index>(std::floor((p.times.back() - p.times.front()) * 4)) + 1);
  }
}

TEST_CASE("EDR stream matches the batch curve and is causal") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.55, 1.2);
  PeakList p;
  double t = 1.0;
  for (int i = 0; i < 400; ++i) {
    p.times.push_back(t);
    p.amplitudes.push_back(std::cos(0.5 * t) + 0.3 * u(rng));
    t += u(rng);
  }
  for (int m : {3, 4, 5, 6}) {
    const EDRWaveform w = build_edr(p, m, 4.0);
    EDRStream s(m, 4.0);
    std::vector<std::pair<double, double>> got;
    bool causal = true;
    for (std::size_t k = 0; k < p.size(); ++k) {
      for (const auto& tv : s.push(p.times[k], p.amplitudes[k])) {
        causal = causal && tv.first < p.times[k];
        got.push_back(tv);
      }
    }
    const std::size_t streamed = got.size();
    for (const auto& tv : s.finish()) got.push_back(tv);
    CHECK(causal);
    CHECK(streamed + 40 > got.size());  // bounded latency: only the tail waits for finish()
    REQUIRE(got.size() == static_cast<std::size_t>(w.values.size()));
    double err = 0;
    for (std::size_t j = 0; j < got.size(); ++j) {
      err = std::max(err, std::abs(got[j].second - w.values[static_cast<Eigen::Index>(j)]));
      err = std::max(err, std::abs(got[j].first - (w.t0 + j * w.dt)));
    }
    CHECK(err <= 1e-12);
  }
}

TEST_CASE("synthetic ECG recovers the respiratory modulation") {
  SyntheticECGParams sp;
  sp.duration = 120;
  sp.noise_sd = 0.01;
  const SyntheticECG sig = synthetic_ecg(sp);
  const ECGRecord clean = remove_baseline(sig.ecg);
  const PeakList peaks = exclude_pvc(detect_peaks(clean, Polarity::R));
  CHECK(peaks.size() == sig.beat_times.size());
  std::size_t matched = 0;
  for (double tb : sig.beat_times)
    for (double tp : peaks.times)
      if (std::abs(tp - tb) <= 0.01) {
        ++matched;
        break;
      }
  CHECK(matched == sig.beat_times.size());
  const EDRWaveform w = build_edr(peaks, 4, 4.0);
  Eigen::VectorXd truth(w.values.size());
  for (Eigen::Index j = 0; j < truth.size(); ++j) truth[j] = sig.modulation(w.t0 + j * w.dt);
  CHECK(pearson(w.values, truth) >= 0.95);
}
