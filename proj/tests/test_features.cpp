#include "doctest.h"
#include "rtdyn/features.hpp"
#include "rtdyn/sst.hpp"

#include <numbers>
#include <random>

using namespace rtdyn;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent objective: log of globally normalized power with the -50 floor.
double oracle_score(const Eigen::MatrixXd& V, const std::vector<int>& path, double lambda) {
  const double tot = V.sum();
  double s = 0;
  for (std::size_t f = 0; f < path.size(); ++f) {
    const double v = V(f, path[f]) / tot;
    s += v > 0 ? std::max(-50.0, std::log(v)) : -50.0;
    if (f) s -= lambda * std::pow(path[f] - path[f - 1], 2);
  }
  return s;
}

std::pair<double, std::vector<int>> exhaustive(const Eigen::MatrixXd& V, double lambda) {
  const int T = V.rows(), K = V.cols();
  std::vector<int> path(T, 0), best;
  double bs = -1e300;
  while (true) {
    const double s = oracle_score(V, path, lambda);
    if (s > bs) {
      bs = s;
      best = path;
    }
    int f = 0;
    while (f < T && ++path[f] == K) path[f++] = 0;
    if (f == T) break;
  }
  return {bs, best};
}

SSTConfig small_config() {
  SSTConfig c;
  c.dt = 0.05;
  c.lag = 5.0;
  c.m = 4;
  c.n = 4;
  c.n_xi = 200;
  return c;
}

const AnalysisMatrices& small_mats() {
  static const AnalysisMatrices m = build_matrices(small_config());
  return m;
}

}  // namespace

TEST_CASE("ridge dynamic programming equals exhaustive search") {
  std::mt19937 rng(17);
  std::exponential_distribution<double> ex(1.0);
  const std::pair<int, int> shapes[] = {{6, 6}, {12, 4}, {3, 8}, {5, 7}, {12, 1}};
  for (auto [K, T] : shapes) {
    for (double lambda : {0.0, 0.05, 0.5, 3.0}) {
      Eigen::MatrixXd V(T, K);
      for (int i = 0; i < V.size(); ++i) V.data()[i] = ex(rng) * (rng() % 5 == 0 ? 0.0 : 1.0);
      const RidgeCurve r = extract_ridge(V, lambda);
      const auto [bs, bp] = exhaustive(V, lambda);
      std::vector<int> got(T);
      for (int f = 0; f < T; ++f) got[f] = r.bins[f] - 1;
      CHECK(oracle_score(V, got, lambda) == doctest::Approx(bs).epsilon(1e-12));
      CHECK(r.score == doctest::Approx(bs).epsilon(1e-12));
      CHECK(ridge_objective(V, r.bins, lambda) == doctest::Approx(bs).epsilon(1e-12));
    }
  }
}

TEST_CASE("ridge special cases") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd V(10, 30);
  for (int i = 0; i < V.size(); ++i) V.data()[i] = u(rng);
  const RidgeCurve r0 = extract_ridge(V, 0.0);
  for (int f = 0; f < 10; ++f) {
    Eigen::Index k;
    V.row(f).maxCoeff(&k);
    CHECK(r0.bins[f] == k + 1);
  }
  Eigen::MatrixXd tone = Eigen::MatrixXd::Constant(10, 30, 1e-3);
  tone.col(11).setConstant(5.0);
  for (int f = 0; f < 10; ++f) tone(f, (3 * f) % 30) = 2.0;
  for (int b : extract_ridge(tone, 0.5).bins) CHECK(b == 12);

  // Shifting all energy up by b bins shifts the ridge by b.
  Eigen::MatrixXd pad = Eigen::MatrixXd::Zero(10, 40);
  pad.leftCols(30) = V;
  Eigen::MatrixXd shifted = Eigen::MatrixXd::Zero(10, 40);
  shifted.middleCols(7, 30) = V;
  const RidgeCurve a = extract_ridge(pad, 0.3), b = extract_ridge(shifted, 0.3);
  for (int f = 0; f < 10; ++f) CHECK(b.bins[f] == a.bins[f] + 7);

  CHECK_THROWS_AS(extract_ridge(V, -1.0), std::invalid_argument);
  const RidgeCurve z = extract_ridge(Eigen::MatrixXd::Zero(3, 4), 1.0);
  CHECK(z.bins.size() == 3);
}

TEST_CASE("ridge tracks a noisy chirp") {
  const SSTConfig c = small_config();
  std::mt19937 rng(4);
  std::normal_distribution<double> nd;
  const int count = 1600;
  Eigen::VectorXd clean(count), noise(count);
  // IF = 1 + 0.005 t Hz. Slow enough that the end-anchored analysis windows, which see the signal
  // up to a few seconds after the frame time, stay within a bin of the IF at the frame time.
  for (int i = 0; i < count; ++i) {
    const double t = i * c.dt;
    clean[i] = std::cos(2 * kPi * (t + 0.0025 * t * t));
    noise[i] = nd(rng);
  }
  const double sd = std::sqrt((clean.array() - clean.mean()).square().mean());
  noise *= sd / std::pow(10.0, 0.25) / std::sqrt((noise.array() - noise.mean()).square().mean());
  const TFMap map = sst_batch(c, small_mats(), clean + noise);
  const RidgeCurve r = extract_ridge(map.V, 0.5);
  int ok = 0;
  for (Eigen::Index f = 0; f < map.V.rows(); ++f) {
    const double fi = 1 + 0.005 * map.times[f];
    ok += std::abs(map.freqs[r.bins[f] - 1] - fi) <= 3 * c.bin_width();
  }
  CHECK(ok >= 0.9 * map.V.rows());
}

TEST_CASE("rhythmic and nonrhythmic power") {
  // Grid with 0.01 Hz bins: the band spans 5 bins around the ridge.
  const int K = 300;
  Eigen::VectorXd freqs(K);
  for (int k = 0; k < K; ++k) freqs[k] = 0.01 * (k + 1);
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(3, K);
  V.row(0).setOnes();
  RidgeCurve r;
  r.bins = {50, 50, 50};
  CHECK(rhythmic_power(V, freqs, r, 0) == doctest::Approx(5.0));
  CHECK(rhythmic_power(V, freqs, r, 1) == 0.0);
  // Below 0.1 Hz: bins 1..9 excluded from the total.
  CHECK(nonrhythmic_power(V, freqs, 5.0, 0) == doctest::Approx(K - 9 - 5.0));
  // Tone on the ridge.
  V(1, 49) = 10.0;
  V(1, 2) = 7.0;
  const double pr = rhythmic_power(V, freqs, r, 1);
  CHECK(pr == 10.0);
  CHECK(nonrhythmic_power(V, freqs, pr, 1) == 0.0);
  // Harmonic bands.
  V(2, 99) = 4.0;
  V(2, 49) = 1.0;
  NRRParams h;
  h.harmonics = 2;
  CHECK(rhythmic_power(V, freqs, r, 2) == 1.0);
  CHECK(rhythmic_power(V, freqs, r, 2, h) == 5.0);
  const NRRSeries s = nrr_series(V, freqs, r);
  CHECK(s.p_r[0] + s.p_nr[0] <= V.row(0).tail(K - 9).sum() + 1e-12);
  CHECK(std::isnan(s.nrr[0]) == false);
}

TEST_CASE("nrr values") {
  CHECK(*nrr(2.0, 2.0) == 0.0);
  CHECK(*nrr(10.0, 1.0) == doctest::Approx(1.0));
  CHECK_FALSE(nrr(1.0, 0.0).has_value());
  CHECK(*nrr(1.0, 2.0) > *nrr(1.0, 4.0));
}

TEST_CASE("tone and broadband through the full chain") {
  // Default analysis settings: dt = 0.25 s, L = 45 s, m = n = 11, 2000 bins.
  const SSTConfig c;
  static const AnalysisMatrices mats = build_matrices(c);
  const int count = 1000;
  std::mt19937 rng(9);
  std::normal_distribution<double> nd;
  Eigen::VectorXd tone(count), white(count);
  for (int i = 0; i < count; ++i) {
    tone[i] = std::cos(2 * kPi * 0.3 * i * c.dt);
    white[i] = nd(rng);
  }
  const TFMap mt = sst_batch(c, mats, tone), mw = sst_batch(c, mats, white);
  const NRRSeries st = nrr_from_map(mt.V, mt.freqs, 0.5), sw = nrr_from_map(mw.V, mw.freqs, 0.5);
  double worst = 1;
  for (Eigen::Index f = 0; f < mt.V.rows(); ++f) {
    double above = 0;
    for (int k = 0; k < c.n_xi; ++k)
      if (mt.freqs[k] >= 0.1) above += mt.V(f, k);
    worst = std::min(worst, st.p_r[f] / above);
    CHECK(st.p_nr[f] <= 1e-3 * st.p_r[f]);
  }
  CHECK(worst >= 0.95);
  CHECK(sw.nrr.mean() - st.nrr.mean() >= 0.5);
}

TEST_CASE("white noise is mostly nonrhythmic") {
  // Under the a^{-1/2} mass weight white-noise power piles up just above the floor, where the ridge
  // band sits, and the median P_nr / P_r is only about 0.7. With a^{-3/2} the squeezed spectrum of
  // white noise is roughly flat and the broadband character shows.
  SSTConfig c;
  c.scale_exponent = -1.5;
  static const AnalysisMatrices mats = build_matrices(c);
  std::mt19937 rng(9);
  std::normal_distribution<double> nd;
  Eigen::VectorXd white(1000);
  for (auto& v : white) v = nd(rng);
  const TFMap mw = sst_batch(c, mats, white);
  const NRRSeries sw = nrr_from_map(mw.V, mw.freqs, 0.5);
  std::vector<double> ratio(sw.p_r.size());
  for (std::size_t f = 0; f < ratio.size(); ++f) ratio[f] = sw.p_nr[f] / sw.p_r[f];
  std::nth_element(ratio.begin(), ratio.begin() + ratio.size() / 2, ratio.end());
  CHECK(ratio[ratio.size() / 2] > 3.0);
}

TEST_CASE("shape regression") {
  const int N = 4000;
  const double dt = 0.01;
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(N, 0, (N - 1) * dt);
  Eigen::VectorXd A = (1.0 + 0.3 * (0.2 * t.array()).sin()).matrix();
  Eigen::VectorXd phi = (1.3 * t.array() + 0.1 * (0.5 * t.array()).sin()).matrix();
  Eigen::VectorXd Y = (A.array() * (2 * kPi * phi.array()).cos()).matrix();
  const ShapeModel one = estimate_shape(Y, A, phi, 4);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(8);
  e1[0] = 1;
  CHECK((one.gamma - e1).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(one(0.0) == doctest::Approx(1.0));

  Eigen::VectorXd Y2 = (A.array() * ((2 * kPi * phi.array()).cos() + 0.3 * (4 * kPi * phi.array()).cos())).matrix();
  const ShapeModel two = estimate_shape(Y2, A, phi, 4);
  CHECK(std::abs(two.gamma[0] - 1.0) <= 1e-2);
  CHECK(std::abs(two.gamma[1] - 0.3) <= 1e-2);
  CHECK(two.gamma.tail(6).cwiseAbs().maxCoeff() <= 1e-2);
  CHECK((Y2 - two.reconstruct(A, phi)).norm() / Y2.norm() <= 1e-6);

  CHECK_THROWS_AS(estimate_shape(Y, A, Eigen::VectorXd::Constant(N, 0.2), 2), std::invalid_argument);
  // Increasing but nearly constant phase: cos and sin rows become collinear.
  Eigen::VectorXd flat = Eigen::VectorXd::LinSpaced(N, 0.0, 1e-9);
  CHECK_THROWS_AS(estimate_shape(Y, A, flat, 2), std::domain_error);
}

TEST_CASE("shape regression noise decays with record length") {
  const double dt = 0.05;
  double err[3];
  const int sizes[3] = {1 << 10, 1 << 12, 1 << 14};
  for (int s = 0; s < 3; ++s) {
    const int N = sizes[s];
    double acc = 0;
    for (int seed = 0; seed < 40; ++seed) {
      std::mt19937 rng(1000 + seed);
      std::normal_distribution<double> nd;
      Eigen::VectorXd A(N), phi(N), Y(N);
      for (int i = 0; i < N; ++i) {
        const double t = i * dt;
        A[i] = 1.0;
        phi[i] = 0.9 * t;
        Y[i] = std::cos(2 * kPi * phi[i]) + 0.3 * std::cos(4 * kPi * phi[i]) + nd(rng);
      }
      const ShapeModel m = estimate_shape(Y, A, phi, 2);
      acc += std::pow(m.gamma[0] - 1.0, 2) + std::pow(m.gamma[1] - 0.3, 2);
    }
    err[s] = std::sqrt(acc / 40);
  }
  // Each 4x longer record halves the RMS error (within sampling spread).
  CHECK(err[0] / err[1] == doctest::Approx(2.0).epsilon(0.3));
  CHECK(err[1] / err[2] == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("sequential extraction of two components") {
  const int N = 6000;
  const double dt = 0.01;
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(N, 0, (N - 1) * dt);
  Eigen::VectorXd A1 = Eigen::VectorXd::Ones(N), A2 = (0.5 + 0.1 * t.array().cos()).matrix();
  Eigen::VectorXd p1 = t, p2 = (2.7 * t.array()).matrix();
  Eigen::VectorXd Y = (A1.array() * (2 * kPi * p1.array()).cos() + A2.array() * (2 * kPi * p2.array()).sin()).matrix();
  const auto models = estimate_shapes(Y, {A1, A2}, {p1, p2}, 2);
  REQUIRE(models.size() == 2);
  CHECK(std::abs(models[0].gamma[0] - 1.0) < 2e-2);
  CHECK(std::abs(models[1].gamma[2] - 1.0) < 2e-2);
}

TEST_CASE("almost orthogonality") {
  auto f1 = [](double t) { return std::cos(2 * kPi * t); };
  auto f2 = [](double t) { return std::cos(4 * kPi * t); };
  CHECK(almost_orthogonality(f1, f2, 0, 100) <= 0.05);
  CHECK(almost_orthogonality(f1, f1, 0, 100) == doctest::Approx(1.0));
  // Amplitude-modulated pair: the overlap is a boundary effect, so it halves with the interval.
  auto g1 = [](double t) { return (1 + 0.5 * std::exp(-t)) * std::cos(2 * kPi * t); };
  auto g2 = [](double t) { return (1 + 0.5 * std::exp(-t)) * std::cos(4 * kPi * t); };
  const double a = almost_orthogonality(g1, g2, 0, 100), b = almost_orthogonality(g1, g2, 0, 200);
  CHECK(a <= 0.05);
  CHECK(b / a == doctest::Approx(0.5).epsilon(0.2));
}
