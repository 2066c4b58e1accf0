#include "doctest.h"
#include "rtdyn/stats.hpp"

#include <cmath>
#include <functional>
#include <random>

using namespace rtdyn;

namespace {

// Pair classification written out directly from the five relationships.
double brute_pk(const std::vector<int>& x, const std::vector<int>& y, bool& defined) {
  int c = 0, d = 0, tx = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j <= i) continue;
      const bool xt = x[i] == x[j], yt = y[i] == y[j];
      if (yt) continue;
      if (xt) ++tx;
      else if ((x[i] < x[j]) == (y[i] < y[j])) ++c;
      else ++d;
    }
  defined = c + d + tx > 0;
  return defined ? (c + 0.5 * tx) / (c + d + tx) : 0.0;
}

Eigen::VectorXd vec(const std::vector<int>& v) {
  Eigen::VectorXd r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i];
  return r;
}

// Adaptive Runge-Kutta-Fehlberg 4(5) for y' = f(t, y).
double rkf45(const std::function<double(double, double)>& f, double t0, double y0, double t1, double tol) {
  double t = t0, y = y0, h = (t1 - t0) / 100;
  while (t < t1) {
    h = std::min(h, t1 - t);
    const double k1 = h * f(t, y);
    const double k2 = h * f(t + h / 4, y + k1 / 4);
    const double k3 = h * f(t + 3 * h / 8, y + 3 * k1 / 32 + 9 * k2 / 32);
    const double k4 = h * f(t + 12 * h / 13, y + 1932 * k1 / 2197 - 7200 * k2 / 2197 + 7296 * k3 / 2197);
    const double k5 = h * f(t + h, y + 439 * k1 / 216 - 8 * k2 + 3680 * k3 / 513 - 845 * k4 / 4104);
    const double k6 = h * f(t + h / 2, y - 8 * k1 / 27 + 2 * k2 - 3544 * k3 / 2565 + 1859 * k4 / 4104 - 11 * k5 / 40);
    const double y4 = y + 25 * k1 / 216 + 1408 * k3 / 2565 + 2197 * k4 / 4104 - k5 / 5;
    const double y5 = y + 16 * k1 / 135 + 6656 * k3 / 12825 + 28561 * k4 / 56430 - 9 * k5 / 50 + 2 * k6 / 55;
    const double err = std::abs(y5 - y4);
    if (err <= tol || h < 1e-12) {
      t += h;
      y = y5;
    }
    h *= std::clamp(0.9 * std::pow(tol / std::max(err, 1e-300), 0.2), 0.2, 4.0);
  }
  return y;
}

}  // namespace

TEST_CASE("prediction probability fixtures") {
  CHECK(*prediction_probability(vec({1, 2, 3}), vec({10, 20, 30})) == 1.0);
  CHECK(*prediction_probability(vec({1, 2, 3}), vec({30, 20, 10})) == 0.0);
  CHECK(*prediction_probability(vec({1, 1, 2}), vec({1, 2, 3})) == 5.0 / 6.0);
  CHECK_FALSE(prediction_probability(vec({1, 2, 3}), vec({4, 4, 4})).has_value());
  CHECK_THROWS_AS(prediction_probability(vec({1}), vec({1})), std::invalid_argument);
}

TEST_CASE("prediction probability equals brute force on all small inputs") {
  long cases = 0, mismatches = 0;
  for (int n = 2; n <= 6; ++n) {
    long total = 1;
    for (int i = 0; i < 2 * n; ++i) total *= 3;
    for (long code = 0; code < total; ++code) {
      std::vector<int> x(n), y(n);
      long c = code;
      for (int i = 0; i < n; ++i, c /= 3) x[i] = 1 + c % 3;
      for (int i = 0; i < n; ++i, c /= 3) y[i] = 1 + c % 3;
      bool def;
      const double ref = brute_pk(x, y, def);
      const auto got = prediction_probability(vec(x), vec(y));
      ++cases;
      if (got.has_value() != def || (def && *got != ref)) ++mismatches;
    }
  }
  CHECK(cases == 81 + 729 + 6561 + 59049 + 531441);
  CHECK(mismatches == 0);
}

TEST_CASE("prediction probability invariances") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> u(0, 20);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd x(15), y(15);
    for (int i = 0; i < 15; ++i) {
      x[i] = u(rng);
      y[i] = u(rng);
    }
    const double p = prediction_probability(x, y).value();
    // Scalar std::exp: Eigen's packet and scalar paths may round equal inputs differently.
    const Eigen::VectorXd tx = x.unaryExpr([](double v) { return 3 * std::exp(v) + 1; }), ty = y.array().cube();
    CHECK(prediction_probability(tx, ty).value() == doctest::Approx(p).epsilon(1e-15));
    // Without ties in x, P_K(x) + P_K(-x) = 1.
    Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(15, 0, 14);
    std::shuffle(xs.data(), xs.data() + 15, rng);
    CHECK(prediction_probability(xs, y).value() + prediction_probability(-xs, y).value() == doctest::Approx(1.0));
  }
}

TEST_CASE("spearman") {
  CHECK(spearman(vec({1, 2, 3, 4}), vec({2, 5, 7, 100})) == doctest::Approx(1.0));
  CHECK(spearman(vec({1, 2, 3, 4}), vec({4, 3, 2, 1})) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(spearman(vec({1, 1, 1}), vec({1, 2, 3})), std::domain_error);
  // No ties: rho = 1 - 6 sum d^2 / (n (n^2 - 1)).
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> p{1, 2, 3, 4, 5, 6};
    std::shuffle(p.begin(), p.end(), rng);
    double d2 = 0;
    for (int i = 0; i < 6; ++i) d2 += std::pow(p[i] - (i + 1), 2);
    CHECK(spearman(vec({10, 20, 30, 40, 50, 60}), vec(p)) == doctest::Approx(1 - 6 * d2 / (6 * 35.0)));
  }
  const Eigen::VectorXd r = average_ranks(vec({5, 1, 5, 2}));
  CHECK(r[0] == 3.5);
  CHECK(r[1] == 1.0);
  CHECK(r[3] == 2.0);
}

TEST_CASE("snr") {
  Eigen::VectorXd s(4), n(4);
  s << 1, -1, 1, -1;
  n << 0.1, -0.1, 0.1, -0.1;
  CHECK(snr_db(s, s) == doctest::Approx(0.0));
  CHECK(snr_db(s, n) == doctest::Approx(20.0));
  CHECK_THROWS_AS(snr_db(s, Eigen::VectorXd::Zero(4)), std::domain_error);
}

TEST_CASE("effect-site concentration") {
  const double ke0 = 0.20;
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(601, 0, 1200);
  Eigen::VectorXd cet = Eigen::VectorXd::Constant(601, 2.0);
  const Eigen::VectorXd c = effect_site(t, cet, ke0);
  for (int i = 0; i < 601; i += 50) CHECK(c[i] == doctest::Approx(2.0 * (1 - std::exp(-ke0 * t[i] / 60))).epsilon(1e-12));
  // Half-time ln 2 / ke0 minutes.
  const double half = std::log(2.0) / ke0;
  CHECK(half == doctest::Approx(3.4657).epsilon(1e-4));
  Eigen::VectorXd th(2);
  th << 0, half * 60;
  CHECK(effect_site(th, Eigen::VectorXd::Constant(2, 1.0), ke0)[1] == doctest::Approx(0.5).epsilon(1e-14));
  const Eigen::VectorXd fixed = effect_site(t, cet, ke0, 2.0);
  CHECK((fixed.array() - 2.0).abs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(effect_site(t, cet, -1.0), std::invalid_argument);
}

TEST_CASE("effect-site matches adaptive ODE oracle") {
  const double ke0 = 0.20, k = ke0 / 60;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> gap(0.5, 8.0);
  Eigen::VectorXd t(200);
  t[0] = 0;
  for (int i = 1; i < 200; ++i) t[i] = t[i - 1] + gap(rng);
  Eigen::VectorXd cet = (1.5 + (t.array() / 90).sin() + 0.3 * (t.array() / 17).cos()).matrix();
  for (InputHold hold : {InputHold::Linear, InputHold::Constant}) {
    const Eigen::VectorXd c = effect_site(t, cet, ke0, 0.4, hold);
    double y = 0.4, worst = 0;
    for (int i = 0; i + 1 < 200; ++i) {
      const double a = cet[i], b = (cet[i + 1] - cet[i]) / (t[i + 1] - t[i]);
      auto f = [&](double s, double v) {
        const double in = hold == InputHold::Linear ? a + b * (s - t[i]) : a;
        return k * (in - v);
      };
      y = rkf45(f, t[i], y, t[i + 1], 1e-13);
      worst = std::max(worst, std::abs(c[i + 1] - y));
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("weighted mean") {
  CHECK(weighted_mean(vec({1, 3}), vec({1, 3})) == doctest::Approx(2.5));
  CHECK_THROWS_AS(weighted_mean(vec({1}), vec({0})), std::invalid_argument);
}
