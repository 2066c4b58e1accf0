#include "rtdyn/blending.hpp"

#include <Eigen/LU>

namespace rtdyn {

namespace {

using Index = Eigen::Index;
using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// Knot bookkeeping shared by the batch model and the stream. `Data` maps a
// global sample index to its time; `last` is the final index or -1 while open.
template <typename Data>
struct Layout {
  const Data& data;
  int m;
  Index last;

  double t(Index i) const { return data.t(i); }

  Index clampd(Index i) const {
    if (i < 0) return 0;
    if (last >= 0 && i > last) return last;
    return i;
  }

  // Clamped data knots: t_0 and t_n repeated m times.
  double T(Index q) const { return t(clampd(q - (m - 1))); }

  // Position of t_k inside the refined sequence.
  Index pos(Index k) const {
    if (m % 2 == 0) return k * (m / 2);
    return (k / 2) * m + ((k % 2) ? (m + 1) / 2 : 0);
  }

  // Data interval holding refined position q.
  Index interval(Index q) const {
    if (m % 2 == 0) return q / (m / 2);
    const Index j = q / m, r = q % m;
    return 2 * j + (r >= (m + 1) / 2 ? 1 : 0);
  }

  double s_inner(Index q) const {
    if (q <= 0) return t(0);
    if (last >= 0 && q >= pos(last)) return t(last);
    const Index k = interval(q);
    const Index p0 = pos(k), p1 = pos(k + 1);
    if (q == p0) return t(k);
    return t(k) + (t(k + 1) - t(k)) * (static_cast<double>(q - p0) / static_cast<double>(p1 - p0));
  }

  double S(Index Q) const { return s_inner(Q - (m - 1)); }

  Index s_basis_count() const { return pos(last) + m - 1; }
  Index t_basis_count() const { return last + m - 1; }

  // Refined B-spline carrying L_k.
  Index local_index(Index k) const {
    if (k == 0) return 0;
    if (last >= 0 && k == last) return s_basis_count() - 1;
    return pos(k - 1) + m - 1;
  }

  // Inverse of local_index, or -1.
  Index local_owner(Index l) const {
    if (l == 0) return 0;
    if (last >= 0 && l == s_basis_count() - 1) return last;
    const Index q = l - (m - 1);
    if (q < 0) return -1;
    const Index k = interval(q);
    if (pos(k) != q) return -1;
    if (last >= 0 && k + 1 >= last) return -1;
    return k + 1;
  }

  // Data interval used to express refined coefficient l through the T pieces.
  Index blossom_interval(Index l) const {
    const Index i = std::max<Index>(l, m - 1);
    return interval(i - (m - 1));
  }

  // Weights of lambda_p over data window [first, first + m).
  QuasiCoeffRow weights(Index p) const {
    Index first = p - m + 1;
    if (last >= 0) first = std::min<Index>(first, last - m + 1);
    first = std::max<Index>(first, 0);
    const long double c = t(first);
    const long double h = static_cast<long double>(t(first + m - 1)) - c;
    LMat V(m, m);
    for (int j = 0; j < m; ++j) {
      const long double u = (static_cast<long double>(t(first + j)) - c) / h;
      long double pw = 1.0L;
      for (int i = 0; i < m; ++i) {
        V(i, j) = pw;
        pw *= u;
      }
    }
    // Moment targets: symmetric functions of T_{p+1..p+m-1} in scaled coordinates.
    LVec e = LVec::Zero(m);
    e[0] = 1.0L;
    for (int i = 1; i <= m - 1; ++i) {
      const long double v = (static_cast<long double>(T(p + i)) - c) / h;
      for (int d = std::min(i, m - 1); d >= 1; --d) e[d] += v * e[d - 1];
    }
    for (int i = 0; i < m; ++i) e[i] /= static_cast<long double>(binomial(m - 1, i));
    Eigen::FullPivLU<LMat> lu(V);
    if (lu.rank() < m) throw std::domain_error("quasi_coeffs: degenerate Vandermonde system");
    const LVec w = lu.solve(e);
    QuasiCoeffRow row{p, first, w.cast<double>()};
    return row;
  }

  // Local T knots [T_k, ..., T_{k+2m-1}] around data interval k.
  Eigen::VectorXd t_local(Index k) const {
    Eigen::VectorXd x(2 * m);
    for (int i = 0; i < 2 * m; ++i) x[i] = T(k + i);
    return x;
  }

  // Arguments S_{l+1..l+m-1}.
  Eigen::VectorXd blossom_args(Index l) const {
    Eigen::VectorXd a(m - 1);
    for (int i = 0; i < m - 1; ++i) a[i] = S(l + 1 + i);
    return a;
  }

  double local_normalizer(Index k) const {
    const Index b = local_index(k);
    Eigen::VectorXd x(m + 1);
    for (int i = 0; i <= m; ++i) x[i] = S(b + i);
    return eval_bspline(x, m, 0, t(k));
  }
};

// de Boor with a different argument per level: the blossom of the piece on
// local interval m-1. Works column-wise so it can carry unit vectors too.
template <typename Derived>
void blossom_inplace(const Eigen::VectorXd& tl, int m, const Eigen::VectorXd& args,
                     Eigen::MatrixBase<Derived>& d) {
  for (int r = 1; r <= m - 1; ++r) {
    const double u = args[r - 1];
    for (int j = m - 1; j >= r; --j) {
      const double den = tl[j + m - r] - tl[j];
      const double a = (u - tl[j]) / den;
      d.row(j) = (1.0 - a) * d.row(j - 1) + a * d.row(j);
    }
  }
}

struct VecData {
  const Eigen::VectorXd& tv;
  double t(Index i) const { return tv[i]; }
};

struct DequeData {
  const std::deque<double>& tv;
  Index offset;
  double t(Index i) const { return tv[static_cast<std::size_t>(i - offset)]; }
};

void check_times(const Eigen::VectorXd& t) {
  for (Index i = 0; i + 1 < t.size(); ++i)
    if (!(t[i + 1] > t[i])) throw std::invalid_argument("blending: sample times must be strictly increasing");
}

}  // namespace

QuasiCoeffRow quasi_coeffs(const Eigen::VectorXd& t, int m, Index p) {
  if (m < 2) throw std::invalid_argument("quasi_coeffs: order must be >= 2");
  if (t.size() < m) throw std::invalid_argument("quasi_coeffs: need at least m samples");
  check_times(t);
  VecData data{t};
  Layout<VecData> lay{data, m, t.size() - 1};
  if (p < 0 || p >= lay.t_basis_count()) throw std::invalid_argument("quasi_coeffs: invalid index");
  return lay.weights(p);
}

SplineCurve quasi_interpolate(const Eigen::VectorXd& t, const Eigen::VectorXd& g, int m) {
  if (t.size() != g.size()) throw std::invalid_argument("quasi_interpolate: length mismatch");
  const Index n = t.size() - 1;
  SplineCurve c;
  c.m = m;
  c.knots = KnotSequence::clamped(t, m).knots();
  c.coeffs.resize(n + m - 1);
  for (Index p = 0; p < n + m - 1; ++p) {
    const QuasiCoeffRow r = quasi_coeffs(t, m, p);
    c.coeffs[p] = r.a.dot(g.segment(r.first, m));
  }
  return c;
}

Eigen::VectorXd refine_knots(const Eigen::VectorXd& t, int m) {
  if (m < 3) throw std::invalid_argument("refine_knots: order must be >= 3");
  check_times(t);
  VecData data{t};
  Layout<VecData> lay{data, m, t.size() - 1};
  const Index len = lay.pos(t.size() - 1) + 1;
  Eigen::VectorXd s(len);
  for (Index q = 0; q < len; ++q) s[q] = lay.s_inner(q);
  return s;
}

BlendingModel::BlendingModel(Eigen::VectorXd t, int m) : t_(std::move(t)), m_(m) {
  if (m < 3) throw std::invalid_argument("BlendingModel: order must be >= 3");
  if (t_.size() < 2 * m) throw std::invalid_argument("BlendingModel: need at least 2m samples");
  check_times(t_);
  VecData data{t_};
  const Index n = t_.size() - 1;
  Layout<VecData> lay{data, m, n};

  const Index ns = lay.s_basis_count();
  s_.resize(ns + m);
  for (Index q = 0; q < ns + m; ++q) s_[q] = lay.S(q);

  rows_.reserve(lay.t_basis_count());
  for (Index p = 0; p < lay.t_basis_count(); ++p) rows_.push_back(lay.weights(p));

  blossom_.resize(ns, m);
  blossom_first_.resize(ns);
  for (Index l = 0; l < ns; ++l) {
    const Index k = lay.blossom_interval(l);
    Eigen::MatrixXd unit = Eigen::MatrixXd::Identity(m, m);
    blossom_inplace(lay.t_local(k), m, lay.blossom_args(l), unit);
    blossom_.row(l) = unit.row(m - 1);
    blossom_first_[l] = k;
  }

  d_ = Eigen::MatrixXd::Zero(n + 1, m);
  for (Index k = 1; k < n; ++k) {
    Index first;
    Eigen::VectorXd vals;
    active_basis(lay.t_local(k), m, t_[k], first, vals);
    d_.row(k) = vals.transpose();
  }
  norm_.resize(n + 1);
  for (Index k = 0; k <= n; ++k) norm_[k] = lay.local_normalizer(k);
}

Index BlendingModel::local_index(Index j) const {
  VecData data{t_};
  Layout<VecData> lay{data, m_, t_.size() - 1};
  if (j < 0 || j >= t_.size()) throw std::invalid_argument("local_index: invalid index");
  return lay.local_index(j);
}

double BlendingModel::local_basis_eval(Index j, double x) const {
  const Index b = local_index(j);
  const double nz = norm_[j];
  if (nz == 0.0) throw std::domain_error("local_basis_eval: zero normalizer");
  return eval_bspline(s_, m_, b, x) / nz;
}

SplineCurve BlendingModel::apply(const Eigen::VectorXd& g) const {
  const Index n = t_.size() - 1;
  if (g.size() != n + 1) throw std::invalid_argument("BlendingModel::apply: length mismatch");
  Eigen::VectorXd lam(rows_.size());
  for (std::size_t p = 0; p < rows_.size(); ++p) lam[p] = rows_[p].a.dot(g.segment(rows_[p].first, m_));

  SplineCurve c;
  c.m = m_;
  c.knots = s_;
  c.coeffs.resize(blossom_.rows());
  for (Index l = 0; l < blossom_.rows(); ++l)
    c.coeffs[l] = blossom_.row(l).dot(lam.segment(blossom_first_[l], m_));

  VecData data{t_};
  Layout<VecData> lay{data, m_, n};
  for (Index k = 0; k <= n; ++k) {
    double q;
    if (k == 0) q = lam[0];
    else if (k == n) q = lam[lam.size() - 1];
    else q = d_.row(k).dot(lam.segment(k, m_));
    c.coeffs[lay.local_index(k)] += (g[k] - q) / norm_[k];
  }
  return c;
}

SplineCurve blend_interpolate(const Eigen::VectorXd& t, const Eigen::VectorXd& x, int m) {
  if (t.size() != x.size()) throw std::invalid_argument("blend_interpolate: length mismatch");
  return BlendingModel(t, m).apply(x);
}

BlendingStream::BlendingStream(int m) : m_(m) {
  if (m < 3) throw std::invalid_argument("BlendingStream: order must be >= 3");
}

double BlendingStream::coefficient(Index l, Index last) const {
  DequeData data{t_, offset_};
  Layout<DequeData> lay{data, m_, last};
  auto g = [&](Index i) { return g_[static_cast<std::size_t>(i - offset_)]; };
  auto lambda = [&](Index p) {
    const QuasiCoeffRow r = lay.weights(p);
    double s = 0.0;
    for (int j = 0; j < m_; ++j) s += r.a[j] * g(r.first + j);
    return s;
  };

  const Index k = lay.blossom_interval(l);
  Eigen::VectorXd d(m_);
  for (int j = 0; j < m_; ++j) d[j] = lambda(k + j);
  blossom_inplace(lay.t_local(k), m_, lay.blossom_args(l), d);
  double c = d[m_ - 1];

  const Index owner = lay.local_owner(l);
  if (owner >= 0) {
    double q;
    if (owner == 0) {
      q = lambda(0);
    } else if (last >= 0 && owner == last) {
      q = lambda(lay.t_basis_count() - 1);
    } else {
      Index first;
      Eigen::VectorXd vals;
      active_basis(lay.t_local(owner), m_, lay.t(owner), first, vals);
      q = 0.0;
      for (int i = 0; i < m_; ++i) q += vals[i] * lambda(owner + i);
    }
    c += (g(owner) - q) / lay.local_normalizer(owner);
  }
  return c;
}

std::optional<Index> BlendingStream::commit_limit() const {
  // Coefficient l is final once sample blossom_interval(l) + m + 1 has arrived.
  if (count_ == 0) return std::nullopt;
  DequeData data{t_, offset_};
  Layout<DequeData> lay{data, m_, -1};
  const Index newest = count_ - 1;
  Index l = committed_;
  while (lay.blossom_interval(l) + m_ + 1 <= newest) ++l;
  return l;
}

StreamSegment BlendingStream::push(double t, double x) {
  if (finished_) throw std::logic_error("BlendingStream: push after finish");
  if (!std::isfinite(t) || !std::isfinite(x)) throw std::invalid_argument("BlendingStream: non-finite sample");
  if (count_ > 0 && !(t > t_.back())) throw std::invalid_argument("BlendingStream: time must increase");
  t_.push_back(t);
  g_.push_back(x);
  all_t_.push_back(t);
  ++count_;

  StreamSegment seg{committed_, {}};
  const Index limit = *commit_limit();
  for (Index l = committed_; l < limit; ++l) {
    const double c = coefficient(l, -1);
    seg.coeffs.push_back(c);
    out_.push_back(c);
  }
  committed_ = limit;

  // Drop samples no pending coefficient can reach (window reaches m back from its interval).
  DequeData data{t_, offset_};
  Layout<DequeData> lay{data, m_, -1};
  const Index keep_from = std::max<Index>(0, lay.blossom_interval(committed_) - m_ - 1);
  while (offset_ < keep_from) {
    t_.pop_front();
    g_.pop_front();
    ++offset_;
  }
  return seg;
}

StreamSegment BlendingStream::finish() {
  if (finished_) return StreamSegment{committed_, {}};
  if (count_ < 2 * m_) throw std::invalid_argument("BlendingStream: need at least 2m samples");
  finished_ = true;
  const Index last = count_ - 1;
  DequeData data{t_, offset_};
  Layout<DequeData> lay{data, m_, last};
  StreamSegment seg{committed_, {}};
  for (Index l = committed_; l < lay.s_basis_count(); ++l) {
    const double c = coefficient(l, last);
    seg.coeffs.push_back(c);
    out_.push_back(c);
  }
  committed_ = lay.s_basis_count();
  return seg;
}

SplineCurve BlendingStream::curve() const {
  if (!finished_) throw std::logic_error("BlendingStream::curve: stream not finished");
  Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(all_t_.data(), static_cast<Index>(all_t_.size()));
  VecData data{t};
  Layout<VecData> lay{data, m_, t.size() - 1};
  SplineCurve c;
  c.m = m_;
  c.knots.resize(lay.s_basis_count() + m_);
  for (Index q = 0; q < c.knots.size(); ++q) c.knots[q] = lay.S(q);
  c.coeffs = Eigen::Map<const Eigen::VectorXd>(out_.data(), static_cast<Index>(out_.size()));
  return c;
}

}  // namespace rtdyn
