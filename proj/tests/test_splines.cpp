#include "doctest.h"
#include "oracles.hpp"
#include "rtdyn/splines.hpp"

#include <random>

using namespace rtdyn;

namespace {

Eigen::VectorXd cardinal_knots(int count) {
  Eigen::VectorXd x(count);
  for (int i = 0; i < count; ++i) x[i] = i;
  return x;
}

Eigen::VectorXd random_knots(std::mt19937& rng, int count) {
  std::uniform_real_distribution<double> gap(0.2, 1.5);
  Eigen::VectorXd x(count);
  x[0] = 0;
  for (int i = 1; i < count; ++i) x[i] = x[i - 1] + gap(rng);
  return x;
}

}  // namespace

TEST_CASE("bspline values on cardinal knots") {
  const Eigen::VectorXd x = cardinal_knots(12);
  CHECK(eval_bspline(x, 1, 0, 0.5) == 1.0);
  CHECK(eval_bspline(x, 8, 0, 4.0) == doctest::Approx(2416.0 / 5040.0).epsilon(1e-15));
  std::vector<double> xv(x.data(), x.data() + x.size());
  CHECK(std::abs(eval_bspline(x, 4, 0, 2.0) - oracle::bspline_truncated_power(xv, 4, 0, 2.0)) < 1e-12);
  CHECK(eval_bspline(x, 4, 0, 2.0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("bspline matches truncated-power oracle on random knots") {
  std::mt19937 rng(7);
  for (int m = 1; m <= 8; ++m) {
    const Eigen::VectorXd x = random_knots(rng, m + 6);
    std::vector<double> xv(x.data(), x.data() + x.size());
    std::uniform_real_distribution<double> u(x[0], x[x.size() - 1]);
    for (int s = 0; s < 50; ++s) {
      const double t = u(rng);
      for (int k = 0; k + m < x.size(); ++k) {
        const double v = eval_bspline(x, m, k, t);
        CHECK(v >= 0.0);
        CHECK(std::abs(v - oracle::bspline_truncated_power(xv, m, k, t)) < 1e-10);
      }
    }
  }
}

TEST_CASE("support, partition of unity, long double instantiation") {
  std::mt19937 rng(11);
  for (int m = 1; m <= 8; ++m) {
    const Eigen::VectorXd x = KnotSequence::clamped(random_knots(rng, 9), m).knots();
    std::uniform_real_distribution<double> u(x[0], x[x.size() - 1]);
    for (int s = 0; s < 40; ++s) {
      const double t = u(rng);
      double sum = 0;
      for (int k = 0; k + m < x.size(); ++k) {
        const double v = eval_bspline(x, m, k, t);
        if (t < x[k] || t > x[k + m]) CHECK(v == 0.0);
        sum += v;
      }
      CHECK(std::abs(sum - 1.0) < 1e-12);
    }
    // Closing knot uses the left limit so the sum is still one there.
    double end_sum = 0;
    for (int k = 0; k + m < x.size(); ++k) end_sum += eval_bspline(x, m, k, x[x.size() - 1]);
    CHECK(std::abs(end_sum - 1.0) < 1e-12);
  }
  VectorX<long double> xl(6);
  xl << 0, 1, 2, 3, 4, 5;
  CHECK(std::abs(eval_bspline<long double>(xl, 3, 0, 1.5L) - 0.75L) < 1e-18L);
}

TEST_CASE("bspline errors") {
  Eigen::VectorXd x(6);
  x << 0, 0, 0, 1, 2, 3;
  CHECK_THROWS_AS(eval_bspline(x, 2, 0, 0.5), std::domain_error);
  CHECK_THROWS_AS(eval_bspline(x, 2, 9, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(KnotSequence(x, 2), std::domain_error);
  CHECK_NOTHROW(KnotSequence(x, 3));
}

TEST_CASE("cardinal evaluator agrees with general evaluator") {
  for (int m = 1; m <= 12; ++m) {
    const Eigen::VectorXd x = cardinal_knots(m + 1);
    for (double t = -0.5; t < m + 0.5; t += 0.137) {
      CHECK(std::abs(cardinal_bspline(m, t) - eval_bspline(x, m, 0, t)) < 1e-13);
    }
  }
}

TEST_CASE("derivatives") {
  const Eigen::VectorXd x = cardinal_knots(8);
  CHECK(eval_bspline_derivative(x, 3, 1, 2.2, 0) == eval_bspline(x, 3, 1, 2.2));
  CHECK(eval_bspline_derivative(x, 2, 0, 0.5, 1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(eval_bspline_derivative(x, 3, 0, 0.5, 3), std::domain_error);

  std::mt19937 rng(3);
  for (int m = 2; m <= 7; ++m) {
    const Eigen::VectorXd y = random_knots(rng, m + 4);
    const double h = 1e-5;
    for (int k = 0; k + m < y.size(); ++k) {
      for (int s = 1; s < 20; ++s) {
        const double t = y[k] + (y[k + m] - y[k]) * s / 20.0 + 1.3e-4;
        const double fd = (eval_bspline(y, m, k, t + h) - eval_bspline(y, m, k, t - h)) / (2 * h);
        bool near_knot = false;
        for (int i = 0; i < y.size(); ++i) near_knot |= std::abs(y[i] - t) < 2 * h;
        if (near_knot) continue;
        CHECK(std::abs(eval_bspline_derivative(y, m, k, t, 1) - fd) < 1e-6);
      }
    }
  }
}

TEST_CASE("cardinal integer tables") {
  const CardinalTable t8 = cardinal_integer_values(8);
  CHECK(t8.denominator == 5040);
  const std::vector<std::int64_t> e8{0, 1, 120, 1191, 2416, 1191, 120, 1, 0};
  CHECK(t8.numerators == e8);
  const CardinalTable t10 = cardinal_integer_values(10);
  CHECK(t10.denominator == 362880);
  const std::vector<std::int64_t> e10{0, 1, 502, 14608, 88234, 156190, 88234, 14608, 502, 1, 0};
  CHECK(t10.numerators == e10);
  const CardinalTable t2 = cardinal_integer_values(2);
  CHECK(t2.numerators == std::vector<std::int64_t>{0, 1, 0});
  for (int r = 2; r <= 20; ++r) {
    const CardinalTable t = cardinal_integer_values(r);
    std::int64_t sum = 0;
    for (int v = 0; v <= r; ++v) {
      CHECK(t.numerators[v] == t.numerators[r - v]);
      sum += t.numerators[v];
    }
    CHECK(sum == t.denominator);
    if (r <= 14) {
      for (int v = 0; v <= r; ++v) CHECK(std::abs(t.value(v) - cardinal_bspline(r, double(v))) < 1e-14);
    }
  }
}

TEST_CASE("inner products") {
  const Eigen::VectorXd x = cardinal_knots(16);
  CHECK(inner_product(x, 4, 0, 0) == doctest::Approx(2416.0 / 5040.0).epsilon(1e-15));
  CHECK(inner_product(x, 4, 0, 4) == 0.0);
  for (int m = 1; m <= 6; ++m)
    for (int k = 0; k < 5; ++k)
      for (int u = 0; u < 5; ++u)
        CHECK(std::abs(inner_product(x, m, k, u) - inner_product_quadrature(x, m, k, u)) < 1e-10);

  std::mt19937 rng(5);
  const Eigen::VectorXd y = random_knots(rng, 12);
  for (int m = 2; m <= 5; ++m)
    for (int k = 0; k + m < y.size(); ++k)
      for (int u = k; u < std::min<int>(k + m, y.size() - m); ++u) {
        auto f = [&](double t) { return eval_bspline(y, m, k, t) * eval_bspline(y, m, u, t); };
        double ref = 0;
        for (int i = u; i < k + m; ++i) ref += oracle::adaptive_simpson(f, y[i], y[i + 1], 1e-13);
        CHECK(std::abs(inner_product(y, m, k, u) - ref) < 1e-10);
      }
}

TEST_CASE("Marsden coefficients reproduce monomials") {
  const Eigen::VectorXd x = cardinal_knots(10);
  const Eigen::VectorXd c1 = marsden_coefficients(x, 2, 1);
  for (int j = 0; j < c1.size(); ++j) CHECK(c1[j] == doctest::Approx(j + 1));
  CHECK_THROWS_AS(marsden_coefficients(x, 3, 3), std::domain_error);

  std::mt19937 rng(9);
  for (int m = 1; m <= 7; ++m) {
    const Eigen::VectorXd y = random_knots(rng, m + 10);
    for (int l = 0; l < m; ++l) {
      SplineCurve c{m, y, marsden_coefficients(y, m, l)};
      if (l == 0) CHECK((c.coeffs.array() == 1.0).all());
      for (int s = 0; s <= 200; ++s) {
        const double t = y[m - 1] + (y[y.size() - m] - y[m - 1]) * s / 200.0;
        CHECK(std::abs(eval_spline_curve(c, t) - std::pow(t, l)) < 1e-9 * (1 + std::pow(std::abs(t), l)));
      }
    }
  }
}

TEST_CASE("spline curve evaluation") {
  const Eigen::VectorXd x = cardinal_knots(10);
  SplineCurve ones{4, x, Eigen::VectorXd::Ones(6)};
  CHECK(eval_spline_curve(ones, 5.0) == doctest::Approx(1.0));
  SplineCurve single{4, x, Eigen::VectorXd::Zero(6)};
  single.coeffs[2] = 3.0;
  CHECK(eval_spline_curve(single, 4.3) == doctest::Approx(3.0 * eval_bspline(x, 4, 2, 4.3)));
  bool in = true;
  CHECK(eval_spline_curve(ones, 20.0, &in) == 0.0);
  CHECK_FALSE(in);
  SplineCurve sq{4, x, marsden_coefficients(x, 4, 2)};
  CHECK(eval_spline_curve(sq, 4.7) == doctest::Approx(4.7 * 4.7).epsilon(1e-12));
}

TEST_CASE("mesh ratio") {
  CHECK(KnotSequence(cardinal_knots(8), 3).mesh_ratio() == doctest::Approx(3.0));
}
