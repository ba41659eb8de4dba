#include "idamp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Eigenvalues>

namespace idamp {

namespace {

std::shared_ptr<GaussRule> make_rule(int q) {
  auto r = std::make_shared<GaussRule>();
  r->q = q;
  r->x.resize(q);
  r->w.resize(q);
  // Newton on P_q from the Chebyshev-like initial guess
  for (int i = 0; i < q; ++i) {
    double x = -std::cos(kPi * (i + 0.75) / (q + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int n = 2; n <= q; ++n) {
        double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      if (q == 1) p0 = 1.0;
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r->x[i] = x;
    r->w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  r->bary.resize(q);
  for (int j = 0; j < q; ++j) {
    double p = 1.0;
    for (int m = 0; m < q; ++m)
      if (m != j) p *= (r->x[j] - r->x[m]);
    r->bary[j] = 1.0 / p;
  }
  r->D = Eigen::MatrixXd::Zero(q, q);
  for (int i = 0; i < q; ++i) {
    double diag = 0.0;
    for (int j = 0; j < q; ++j) {
      if (i == j) continue;
      r->D(i, j) = (r->bary[j] / r->bary[i]) / (r->x[i] - r->x[j]);
      diag -= r->D(i, j);
    }
    r->D(i, i) = diag;
  }
  r->D2 = r->D * r->D;
  r->J.resize(q, q);
  std::vector<double> row(q);
  for (int i = 0; i < q; ++i) {
    r->basis_integral(r->x[i], row.data());
    for (int j = 0; j < q; ++j) r->J(i, j) = row[j];
  }
  return r;
}

}  // namespace

void GaussRule::basis(double s, double* out) const {
  double den = 0.0;
  for (int j = 0; j < q; ++j) {
    double d = s - x[j];
    if (d == 0.0) {
      for (int m = 0; m < q; ++m) out[m] = (m == j) ? 1.0 : 0.0;
      return;
    }
    out[j] = bary[j] / d;
    den += out[j];
  }
  for (int j = 0; j < q; ++j) out[j] /= den;
}

void GaussRule::basis_integral(double s, double* out) const {
  // q-point Gauss is exact for the degree q-1 basis
  std::vector<double> l(q);
  for (int j = 0; j < q; ++j) out[j] = 0.0;
  double half = 0.5 * (s + 1.0);
  for (int m = 0; m < q; ++m) {
    double sig = -1.0 + half * (x[m] + 1.0);
    basis(sig, l.data());
    for (int j = 0; j < q; ++j) out[j] += half * w[m] * l[j];
  }
}

std::shared_ptr<const GaussRule> gauss_rule(int q) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const GaussRule>> cache;
  if (q < 1 || q > 64) fail(ErrorCode::InvalidArgument, "panel order out of range");
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;
  auto r = make_rule(q);
  cache[q] = r;
  return r;
}

namespace {

// Modified Chebyshev algorithm on shifted monic Legendre polynomials, then
// Golub-Welsch.
std::shared_ptr<LogGaussRule> make_log_rule(int n) {
  const int m2 = 2 * n;
  std::vector<double> a(m2, 0.5), b(m2, 0.0), mom(m2);
  for (int l = 1; l < m2; ++l) b[l] = 0.25 * l * l / (4.0 * l * l - 1.0);
  // int_0^1 -log(x) p_l(x) dx, p_l monic: (-1)^l / (l (l+1)) * (l!)^2 / (2l)!
  mom[0] = 1.0;
  double ratio = 1.0;
  for (int l = 1; l < m2; ++l) {
    ratio *= static_cast<double>(l) * l / ((2.0 * l - 1.0) * (2.0 * l));
    mom[l] = ((l % 2) ? -1.0 : 1.0) / (l * (l + 1.0)) * ratio;
  }
  std::vector<double> alpha(n), beta(n);
  std::vector<double> sm1(m2, 0.0), s0 = mom, s1(m2, 0.0);
  alpha[0] = a[0] + mom[1] / mom[0];
  beta[0] = mom[0];
  for (int k = 1; k < n; ++k) {
    for (int l = k; l < m2 - k; ++l)
      s1[l] = s0[l + 1] - (alpha[k - 1] - a[l]) * s0[l] - beta[k - 1] * sm1[l] + b[l] * s0[l - 1];
    alpha[k] = a[k] + s1[k + 1] / s1[k] - s0[k] / s0[k - 1];
    beta[k] = s1[k] / s0[k - 1];
    sm1 = s0;
    s0 = s1;
  }
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) J(k, k) = alpha[k];
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(beta[k]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  auto r = std::make_shared<LogGaussRule>();
  for (int k = 0; k < n; ++k) {
    r->x.push_back(es.eigenvalues()[k]);
    double v = es.eigenvectors()(0, k);
    r->w.push_back(beta[0] * v * v);
  }
  return r;
}

}  // namespace

std::shared_ptr<const LogGaussRule> log_gauss_rule(int n) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const LogGaussRule>> cache;
  if (n < 1 || n > 40) fail(ErrorCode::InvalidArgument, "log rule order out of range");
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto r = make_log_rule(n);
  cache[n] = r;
  return r;
}

std::vector<double> graded_breakpoints(int base_panels, const std::vector<double>& centers, double h_floor) {
  if (base_panels < 1) fail(ErrorCode::InvalidArgument, "need at least one base panel");
  const double h0 = 1.0 / base_panels;
  std::vector<double> pts, zones;
  for (double c : centers) {
    if (!(c >= 0.0 && c <= 1.0)) fail(ErrorCode::InvalidArgument, "grading center outside [0,1]");
    double dmax = h_floor;
    while (dmax < h0) dmax *= 2.0;
    zones.push_back(dmax + 0.5 * h0);
    pts.push_back(c);
    for (double d = h_floor; d <= dmax * (1 + 1e-12); d *= 2.0) {
      if (c - d > 0.0) pts.push_back(c - d);
      if (c + d < 1.0) pts.push_back(c + d);
    }
  }
  // base points that would sit inside a graded zone are dropped
  for (int j = 0; j <= base_panels; ++j) {
    double u = static_cast<double>(j) / base_panels;
    bool keep = (j == 0 || j == base_panels);
    if (!keep) {
      keep = true;
      for (size_t i = 0; i < centers.size(); ++i)
        if (std::abs(u - centers[i]) < zones[i]) keep = false;
    }
    if (keep) pts.push_back(u);
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double p : pts) {
    p = std::clamp(p, 0.0, 1.0);
    if (out.empty() || p - out.back() > 1e-15) out.push_back(p);
  }
  if (out.front() != 0.0) out.insert(out.begin(), 0.0);
  if (out.back() != 1.0) {
    if (1.0 - out.back() <= 1e-15) out.back() = 1.0; else out.push_back(1.0);
  }
  return out;
}

void ChannelGrid::build() {
  rule_ = gauss_rule(q_);
  const int M = panels();
  nodes_.resize(static_cast<size_t>(M) * q_);
  weights_.resize(nodes_.size());
  for (int p = 0; p < M; ++p) {
    double a = bp_[p], hh = h(p);
    if (!(hh > 0.0)) fail(ErrorCode::InvalidArgument, "breakpoints must increase");
    for (int j = 0; j < q_; ++j) {
      nodes_[p * q_ + j] = a + 0.5 * hh * (rule_->x[j] + 1.0);
      weights_[p * q_ + j] = 0.5 * hh * rule_->w[j];
    }
  }
}

ChannelGrid ChannelGrid::from_breakpoints(std::vector<double> bp, int q) {
  if (bp.size() < 2 || bp.front() != 0.0 || bp.back() != 1.0)
    fail(ErrorCode::InvalidArgument, "breakpoints must run from 0 to 1");
  ChannelGrid g;
  g.q_ = q;
  g.bp_ = std::move(bp);
  g.build();
  return g;
}

ChannelGrid ChannelGrid::uniform(int panels, int q) {
  std::vector<double> bp(panels + 1);
  for (int j = 0; j <= panels; ++j) bp[j] = static_cast<double>(j) / panels;
  bp.back() = 1.0;
  return from_breakpoints(std::move(bp), q);
}

ChannelGrid ChannelGrid::graded(int base_panels, int q, const std::vector<double>& centers, double h_floor) {
  ChannelGrid g = from_breakpoints(graded_breakpoints(base_panels, centers, h_floor), q);
  if (centers.size() == 1) g.graded_about_ = centers[0];
  return g;
}

ChannelGrid ChannelGrid::with_total(int n_total, int q, double center, double h_floor) {
  int target = n_total / q;
  for (int m0 = target; m0 >= 1; --m0) {
    auto bp = graded_breakpoints(m0, {center}, h_floor);
    if (static_cast<int>(bp.size()) - 1 <= target || m0 == 1) {
      ChannelGrid g = from_breakpoints(std::move(bp), q);
      g.graded_about_ = center;
      return g;
    }
  }
  fail(ErrorCode::InvalidArgument, "cannot fit grid");
}

double ChannelGrid::h_min() const {
  double m = 1.0;
  for (int p = 0; p < panels(); ++p) m = std::min(m, h(p));
  return m;
}

int ChannelGrid::locate(double y) const {
  if (y <= bp_.front()) return 0;
  if (y >= bp_.back()) return panels() - 1;
  auto it = std::upper_bound(bp_.begin(), bp_.end(), y);
  return static_cast<int>(it - bp_.begin()) - 1;
}

int ChannelGrid::basis_row(double y, int d, double* out) const {
  int p = locate(y);
  double s = to_ref(p, y);
  const GaussRule& r = *rule_;
  std::vector<double> l(q_);
  r.basis(s, l.data());
  if (d == 0) {
    std::copy(l.begin(), l.end(), out);
    return p;
  }
  const Eigen::MatrixXd& Dm = (d == 1) ? r.D : r.D2;
  double scale = std::pow(2.0 / h(p), d);
  for (int j = 0; j < q_; ++j) {
    double acc = 0.0;
    for (int m = 0; m < q_; ++m) acc += l[m] * Dm(m, j);
    out[j] = acc * scale;
  }
  return p;
}

cplx ChannelGrid::interpolate(const CVector& v, double y, int d) const {
  std::vector<double> row(q_);
  int p = basis_row(y, d, row.data());
  cplx acc = 0.0;
  for (int j = 0; j < q_; ++j) acc += row[j] * v[p * q_ + j];
  return acc;
}

CVector ChannelGrid::interpolate(const CVector& v, const std::vector<double>& ys, int d) const {
  CVector out(ys.size());
  for (size_t i = 0; i < ys.size(); ++i) out[i] = interpolate(v, ys[i], d);
  return out;
}

CVector ChannelGrid::differentiate(const CVector& v, int order) const {
  CVector out(size());
  const Eigen::MatrixXd& Dm = (order == 1) ? rule_->D : rule_->D2;
  if (order != 1 && order != 2) fail(ErrorCode::InvalidArgument, "derivative order must be 1 or 2");
  for (int p = 0; p < panels(); ++p) {
    double scale = std::pow(2.0 / h(p), order);
    out.segment(p * q_, q_) = (Dm * v.segment(p * q_, q_)) * scale;
  }
  return out;
}

cplx ChannelGrid::integrate(const CVector& v) const {
  cplx acc = 0.0;
  for (int i = 0; i < size(); ++i) acc += weights_[i] * v[i];
  return acc;
}

}  // namespace idamp
