#include "rtdyn/vmwav.hpp"

#include <Eigen/SVD>

#include <map>
#include <mutex>
#include <numbers>

namespace rtdyn {

namespace {

using Index = Eigen::Index;
constexpr double kPi = std::numbers::pi;
constexpr long double kPiL = std::numbers::pi_v<long double>;

// Central moments of N_m (sum of m uniforms on [-1/2, 1/2]) up to order J.
std::vector<long double> central_moments(int m, int J) {
  std::vector<long double> u(J + 1, 0.0L);
  for (int j = 0; j <= J; j += 2) u[j] = std::pow(0.5L, j) / (j + 1);
  std::vector<long double> acc(J + 1, 0.0L);
  acc[0] = 1.0L;
  std::vector<std::vector<long double>> C(J + 1, std::vector<long double>(J + 1, 0.0L));
  for (int j = 0; j <= J; ++j) {
    C[j][0] = 1.0L;
    for (int i = 1; i <= j; ++i) C[j][i] = C[j - 1][i - 1] + (i <= j - 1 ? C[j - 1][i] : 0.0L);
  }
  for (int s = 0; s < m; ++s) {
    std::vector<long double> next(J + 1, 0.0L);
    for (int j = 0; j <= J; ++j)
      for (int i = 0; i <= j; ++i) next[j] += C[j][i] * acc[i] * u[j - i];
    acc.swap(next);
  }
  return acc;
}

constexpr int kMultipoleOrder = 200;

// Moments about (m+n)/2 of the integer-knot wavelet; n = 0 gives N_m itself.
const std::vector<long double>& wavelet_moments(int m, int n) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<long double>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({m, n});
  if (it != cache.end()) return it->second;
  const int J = kMultipoleOrder;
  const std::vector<long double> mu_m = central_moments(m, J);
  std::vector<long double> nu(J + 1, 0.0L);
  // Shift of term k relative to the wavelet center is k - n/2.
  for (int j = 0; j <= J; ++j) {
    long double s = 0.0L;
    for (int i = 0; i <= j; ++i) {
      if (mu_m[i] == 0.0L) continue;
      long double diff = 0.0L;
      for (int k = 0; k <= n; ++k) {
        const long double d = static_cast<long double>(k) - 0.5L * n;
        diff += ((k % 2) ? -1.0L : 1.0L) * static_cast<long double>(binomial(n, k)) * std::pow(d, j - i);
      }
      s += static_cast<long double>(binomial(j, i)) * mu_m[i] * diff;
    }
    nu[j] = s;
  }
  return cache.emplace(std::make_pair(m, n), std::move(nu)).first->second;
}

// Far-field expansion (1/pi) sum_j nu_j / u^{j+1}; returns false if it fails to converge.
bool multipole(const std::vector<long double>& nu, long double u, long double& out) {
  long double s = 0.0L, p = 1.0L / u;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    const long double term = nu[j] * p;
    s += term;
    if (j > 8 && std::abs(term) < 1e-21L * std::abs(s) && nu[j] != 0.0L) {
      out = s / kPiL;
      return true;
    }
    p /= u;
  }
  return false;
}

// (1/(pi (m-1)!)) sum_k (-1)^k C(r,k) (t-k)^{m-1} ln|t-k|; r = m gives H N_m, r = m + n gives
// H psi_{m;n} since the wavelet's difference stencil convolves the B-spline's into C(m+n, .).
long double hn_closed(int m, long double t, int r = 0) {
  if (r == 0) r = m;
  long double s = 0.0L;
  for (int k = 0; k <= r; ++k) {
    const long double d = t - k;
    if (d == 0.0L) {
      if (m == 1) throw std::domain_error("hilbert_cardinal: log singularity at a knot for m = 1");
      continue;  // d^{m-1} log|d| -> 0
    }
    const long double term = std::pow(d, m - 1) * std::log(std::abs(d));
    s += ((k % 2) ? -1.0L : 1.0L) * static_cast<long double>(binomial(r, k)) * term;
  }
  long double fact = 1.0L;
  for (int i = 2; i <= m - 1; ++i) fact *= i;
  return s / (fact * kPiL);
}

double far_threshold(int support) { return 0.75 * support + 1.0; }

}  // namespace

double VMWavelet::operator()(double x) const { return eval_spline_curve(curve(), x); }

double VMWavelet::moment(int l) const {
  Eigen::VectorXd gx, gw;
  gauss_legendre((m + l) / 2 + 2, gx, gw);
  double s = 0.0;
  const SplineCurve c = curve();
  for (Index i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i], b = knots[i + 1];
    if (!(b > a)) continue;
    const double h = 0.5 * (b - a), mid = 0.5 * (a + b);
    // Evaluate inside the interval so the right-continuous convention never bites.
    for (Index q = 0; q < gx.size(); ++q) {
      const double x = mid + h * gx[q];
      s += h * gw[q] * eval_spline_curve(c, x) * std::pow(x, l);
    }
  }
  return s;
}

VMWavelet interior_vm(int m, int n, double spacing) {
  if (m < 1 || n < 0) throw std::invalid_argument("interior_vm: need m >= 1, n >= 0");
  if (!(spacing > 0)) throw std::invalid_argument("interior_vm: spacing must be positive");
  VMWavelet w;
  w.m = m;
  w.n = n;
  w.kind = WaveletKind::Interior;
  w.knots.resize(m + n + 1);
  for (int i = 0; i <= m + n; ++i) w.knots[i] = spacing * i;
  w.q.resize(n + 1);
  for (int k = 0; k <= n; ++k) w.q[k] = ((k % 2) ? -1.0 : 1.0) * binomial(n, k);
  return w;
}

VMWavelet vm_general_knots(const Eigen::VectorXd& knots, int m, int n, Index k) {
  if (m < 1 || n < 0) throw std::invalid_argument("vm_general_knots: need m >= 1, n >= 0");
  if (k < 0 || k + m + n >= knots.size()) throw std::invalid_argument("vm_general_knots: insufficient knots");
  if (!(knots[k + m + n] > knots[k])) throw std::domain_error("vm_general_knots: degenerate span");
  VMWavelet w;
  w.m = m + n;
  w.n = 0;
  w.kind = WaveletKind::General;
  w.knots = knots.segment(k, m + n + 1);
  w.q = Eigen::VectorXd::Ones(1);
  for (int r = 0; r < n; ++r) w = vm_derivative(w);
  return w;
}

VMWavelet vm_derivative(const VMWavelet& w) {
  if (w.m < 2) throw std::domain_error("vm_derivative: order 1 has no spline derivative");
  VMWavelet d;
  d.m = w.m - 1;
  d.n = w.n + 1;
  d.kind = w.kind;
  d.knots = w.knots;
  d.q = derivative_coeffs(w.knots, w.m, w.q);
  return d;
}

Eigen::VectorXd half_integer_knots(int m, int N) {
  if (m < 1 || N < 1) throw std::invalid_argument("half_integer_knots: need m, N >= 1");
  Eigen::VectorXd k(2 * m + 2 * N - 1);
  Index i = 0;
  for (int r = 0; r < m; ++r) k[i++] = 0.0;
  for (int j = 1; j <= 2 * N - 1; ++j) k[i++] = 0.5 * j;
  for (int r = 0; r < m; ++r) k[i++] = N;
  return k;
}

Eigen::MatrixXd boundary_moment_matrix(const Eigen::VectorXd& knots, int m, int n, Index first) {
  const Index nb = knots.size() - m;
  if (first < 0 || first + n > nb - 1)
    throw std::invalid_argument("boundary_moment_matrix: index range outside the basis");
  Eigen::MatrixXd A(n, n + 1);
  // Marsden's identity holds on [knots[m-1], knots[K-m]].
  const double lo = knots[m - 1], hi = knots[knots.size() - m];
  std::vector<Eigen::VectorXd> marsden;
  for (int l = 0; l < std::min(n, m); ++l) marsden.push_back(marsden_coefficients(knots, m, l));
  for (int i = 0; i <= n; ++i) {
    const Index k = first + i;
    const bool inside = knots[k] >= lo && knots[k + m] <= hi;
    for (int l = 0; l < n; ++l) {
      if (l < m && inside) {
        double s = 0.0;
        for (Index u = std::max<Index>(0, k - m + 1); u <= std::min<Index>(nb - 1, k + m - 1); ++u)
          s += marsden[l][u] * inner_product(knots, m, k, u);
        A(l, i) = s;
      } else {
        A(l, i) = bspline_moment(knots, m, k, l);
      }
    }
  }
  return A;
}

VMWavelet boundary_vm(const Eigen::VectorXd& knots, int m, int n, Index first) {
  if (m < 1 || n < 1) throw std::invalid_argument("boundary_vm: need m, n >= 1");
  Eigen::MatrixXd A = boundary_moment_matrix(knots, m, n, first);
  for (Index r = 0; r < A.rows(); ++r) {
    const double nr = A.row(r).norm();
    if (nr > 0) A.row(r) /= nr;
  }
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n + 1, n + 1);
  P.topRows(n) = A;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(P, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (!(sv[n - 1] > 1e-10 * sv[0])) throw std::domain_error("boundary_vm: moment system is rank deficient");
  Eigen::VectorXd q = svd.matrixV().col(n);
  q /= q.norm();
  Index imax;
  q.cwiseAbs().maxCoeff(&imax);
  if (q[imax] < 0) q = -q;

  VMWavelet w;
  w.m = m;
  w.n = n;
  w.knots = knots.segment(first, m + n + 1);
  w.q = q;
  const bool left = knots[first] == knots[first + 1];
  const bool right = knots[first + m + n] == knots[first + m + n - 1];
  w.kind = left ? WaveletKind::BoundaryLeft : (right ? WaveletKind::BoundaryRight : WaveletKind::Interior);
  return w;
}

VMWavelet boundary_vm_left(int m, int N, int j) {
  if (j > -1 || j < -(m - 1)) throw std::invalid_argument("boundary_vm_left: j must lie in [-(m-1), -1]");
  return boundary_vm(half_integer_knots(m, N), m, m, j + m - 1);
}

double hilbert_cardinal(int m, double t) {
  if (m < 1) throw std::invalid_argument("hilbert_cardinal: m must be >= 1");
  const long double u = static_cast<long double>(t) - 0.5L * m;
  if (std::abs(u) > far_threshold(m)) {
    long double v;
    if (multipole(wavelet_moments(m, 0), u, v)) return static_cast<double>(v);
  }
  return static_cast<double>(hn_closed(m, t));
}

double hilbert_cardinal_recursive(int m, double t) {
  if (m < 1) throw std::invalid_argument("hilbert_cardinal_recursive: m must be >= 1");
  // h[j] = H N_r(t - j) for j = 0..m-r.
  std::vector<double> h(m);
  for (int j = 0; j < m; ++j) {
    const double x = t - j;
    if (x == 0.0 || x == 1.0) throw std::domain_error("hilbert_cardinal_recursive: evaluation at a knot");
    h[j] = std::log(std::abs(x / (x - 1.0))) / kPi;
  }
  for (int r = 2; r <= m; ++r) {
    for (int j = 0; j <= m - r; ++j) {
      const double x = t - j;
      h[j] = (x * h[j] + (r - x) * h[j + 1]) / (r - 1);
    }
  }
  return h[0];
}

double vm_integer(int m, int n, double t) {
  double s = 0.0;
  for (int k = 0; k <= n; ++k) s += ((k % 2) ? -1.0 : 1.0) * binomial(n, k) * cardinal_bspline(m, t - k);
  return s;
}

double vm_integer_hilbert(int m, int n, double t) {
  const long double u = static_cast<long double>(t) - 0.5L * (m + n);
  if (std::abs(u) > far_threshold(m + n)) {
    long double v;
    if (multipole(wavelet_moments(m, n), u, v)) return static_cast<double>(v);
  }
  return static_cast<double>(hn_closed(m, t, m + n));
}

Eigen::VectorXcd analytic_vm(int m, int n, const Eigen::VectorXd& grid) {
  Eigen::VectorXcd out(grid.size());
  for (Index i = 0; i < grid.size(); ++i)
    out[i] = std::complex<double>(vm_integer(m, n, grid[i]), vm_integer_hilbert(m, n, grid[i]));
  return out;
}

namespace {

// Jumps of psi^{(r)} at each distinct knot, r = 0..m-1.
struct JumpTable {
  std::vector<double> x;
  Eigen::MatrixXd jump;  // (distinct knots) x m
};

JumpTable jump_table(const VMWavelet& w) {
  const int m = w.m;
  const SplineCurve c = w.curve();
  std::vector<SplineCurve> deriv{c};
  for (int r = 1; r < m; ++r) {
    SplineCurve d = deriv.back();
    d.coeffs = derivative_coeffs(d.knots, d.m, d.coeffs);
    d.m -= 1;
    deriv.push_back(d);
  }
  JumpTable jt;
  for (Index i = 0; i < w.knots.size(); ++i)
    if (jt.x.empty() || w.knots[i] > jt.x.back()) jt.x.push_back(w.knots[i]);
  const Index K = static_cast<Index>(jt.x.size());
  // Right-continuous derivative values at the left end of every interval.
  Eigen::MatrixXd right = Eigen::MatrixXd::Zero(K, m);
  for (Index i = 0; i + 1 < K; ++i)
    for (int r = 0; r < m; ++r) right(i, r) = eval_spline_curve(deriv[r], jt.x[i]);
  jt.jump = Eigen::MatrixXd::Zero(K, m);
  for (Index i = 0; i < K; ++i) {
    for (int r = 0; r < m; ++r) {
      double leftlim = 0.0;
      if (i > 0) {
        // Taylor expansion of the previous piece to its right end.
        const double h = jt.x[i] - jt.x[i - 1];
        double fac = 1.0, hp = 1.0;
        for (int s = r; s < m; ++s) {
          leftlim += right(i - 1, s) * hp / fac;
          hp *= h;
          fac *= (s - r + 1);
        }
      }
      const double rv = (i + 1 < K) ? right(i, r) : 0.0;
      jt.jump(i, r) = rv - leftlim;
    }
  }
  return jt;
}

std::complex<double> spectrum_by_jumps(const JumpTable& jt, double omega) {
  using cd = std::complex<double>;
  const cd iw(0.0, omega);
  cd s = 0.0;
  for (std::size_t i = 0; i < jt.x.size(); ++i) {
    const cd e = std::exp(cd(0.0, -omega * jt.x[i]));
    cd p = 1.0 / iw;
    for (Index r = 0; r < jt.jump.cols(); ++r) {
      s += jt.jump(static_cast<Index>(i), r) * e * p;
      p /= iw;
    }
  }
  return s;
}

std::complex<double> spectrum_by_quadrature(const VMWavelet& w, double omega) {
  Eigen::VectorXd gx, gw;
  gauss_legendre(16, gx, gw);
  const SplineCurve c = w.curve();
  std::complex<double> s = 0.0;
  for (Index i = 0; i + 1 < w.knots.size(); ++i) {
    const double a = w.knots[i], b = w.knots[i + 1];
    if (!(b > a)) continue;
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(omega) * (b - a) / 2.0)));
    const double len = (b - a) / pieces;
    for (int p = 0; p < pieces; ++p) {
      const double lo = a + p * len, h = 0.5 * len, mid = lo + h;
      for (Index q = 0; q < gx.size(); ++q) {
        const double x = mid + h * gx[q];
        s += h * gw[q] * eval_spline_curve(c, x) * std::exp(std::complex<double>(0.0, -omega * x));
      }
    }
  }
  return s;
}

double mean_spacing(const VMWavelet& w) {
  int intervals = 0;
  for (Index i = 0; i + 1 < w.knots.size(); ++i)
    if (w.knots[i + 1] > w.knots[i]) ++intervals;
  return (w.support_end() - w.support_begin()) / intervals;
}

}  // namespace

double wavelet_spectrum(const VMWavelet& w, double omega) {
  const double h = mean_spacing(w);
  if (std::abs(omega) * h < 4.0) return std::abs(spectrum_by_quadrature(w, omega));
  return std::abs(spectrum_by_jumps(jump_table(w), omega));
}

SpectrumReport spectrum_and_slr(const VMWavelet& w, int density) {
  if (w.m < 2) throw std::invalid_argument("spectrum_and_slr: m must be >= 2");
  if (density < 1) throw std::invalid_argument("spectrum_and_slr: density must be >= 1");
  const double h = mean_spacing(w);
  const JumpTable jt = jump_table(w);
  auto mag = [&](double nu) {
    const double omega = nu / h;
    if (nu < 4.0) return std::abs(spectrum_by_quadrature(w, omega));
    return std::abs(spectrum_by_jumps(jt, omega));
  };
  Eigen::VectorXd gx, gw;
  gauss_legendre(8, gx, gw);
  const double wmax = 64.0 * kPi;
  const int panels = static_cast<int>(std::ceil(wmax * density / 8.0));
  const double width = wmax / panels;
  SpectrumReport rep;
  rep.omega.resize(static_cast<Index>(panels) * 8);
  rep.magnitude.resize(rep.omega.size());
  double main = 0.0, side = 0.0;
  // Panel edges are aligned so that pi falls on one of them.
  const int panels_main = std::max(1, static_cast<int>(std::round(kPi / width)));
  const double wmain = kPi / panels_main;
  const double wside = (wmax - kPi) / (panels - panels_main);
  Index idx = 0;
  for (int p = 0; p < panels; ++p) {
    const bool in_main = p < panels_main;
    const double lo = in_main ? p * wmain : kPi + (p - panels_main) * wside;
    const double hw = 0.5 * (in_main ? wmain : wside);
    for (Index q = 0; q < gx.size(); ++q) {
      const double nu = lo + hw * (1.0 + gx[q]);
      const double a = mag(nu);
      rep.omega[idx] = nu;
      rep.magnitude[idx] = a;
      ++idx;
      (in_main ? main : side) += hw * gw[q] * a * a;
    }
  }
  // Tail beyond 64 pi from the leading jump term: |psi^|^2 <= B / nu^{2m}.
  const double B = std::pow(jt.jump.col(w.m - 1).cwiseAbs().sum() * std::pow(h, w.m), 2.0);
  side += B * std::pow(wmax, 1.0 - 2.0 * w.m) / (2.0 * w.m - 1.0);
  rep.slr_db = 10.0 * std::log10(main / side);
  return rep;
}

double gaussian_asymptotics_distance(int m, int n) {
  if (m < 1 || n < 0) throw std::invalid_argument("gaussian_asymptotics_distance: need m >= 1, n >= 0");
  const int M = m + n;
  const double sigma = std::sqrt(M / 12.0);
  const double scale = std::sqrt(M / 48.0);
  Eigen::VectorXd gx, gw;
  gauss_legendre(10, gx, gw);
  const int panels = 1200;
  const double lo = -15.0, width = 30.0 / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    for (Index q = 0; q < gx.size(); ++q) {
      const double z = lo + width * (p + 0.5 * (1.0 + gx[q]));
      // psi_{m;n}(x) = integer-knot wavelet at 2x.
      const double x = scale * z + M / 4.0;
      const double lhs = std::pow(sigma, n + 1) * vm_integer(m, n, 2.0 * x);
      // (-1)^n He_n(z) phi(z)
      double h0 = 1.0, h1 = z;
      double he = (n == 0) ? 1.0 : z;
      for (int k = 2; k <= n; ++k) {
        he = z * h1 - (k - 1) * h0;
        h0 = h1;
        h1 = he;
      }
      const double g = ((n % 2) ? -1.0 : 1.0) * he * std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
      const double d = lhs - g;
      s += 0.5 * width * gw[q] * d * d;
    }
  }
  return std::sqrt(s);
}

BoundaryScalePlan boundary_scale_plan(int N, int m, int K) {
  if (m < 1) throw std::invalid_argument("boundary_scale_plan: m must be >= 1");
  if (K <= 2 * m - 1) throw std::invalid_argument("boundary_scale_plan: need K > 2m - 1");
  BoundaryScalePlan plan;
  plan.a_max = (N + 1.0) / m - 2.0;
  if (!(plan.a_max > 0)) throw std::invalid_argument("boundary_scale_plan: interval too short for any interior scale");
  plan.a_boundary = (2.0 * m - 1.0) / (2.0 * (K + 1));
  plan.y.resize(K);
  for (int k = 1; k <= K; ++k) plan.y[k - 1] = N - m + 0.5 + k * (m - 0.5) / (K + 1);
  plan.interior_count = K - 2 * m + 1;
  return plan;
}

std::pair<double, double> scaled_center_support(int N, int m, double a) {
  return {0.5 * N - 0.5 * a * m, 0.5 * N + 0.5 * a * m};
}

}  // namespace rtdyn
