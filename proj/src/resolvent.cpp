#include "idamp/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "idamp/collocation.hpp"
#include "idamp/logint.hpp"

namespace idamp {

void validate(const SpectralPoint& pt) {
  if (pt.k == 0) fail(ErrorCode::InvalidArgument, "k must be nonzero");
  if (!(pt.y0 >= 0.0 && pt.y0 <= 1.0)) fail(ErrorCode::InvalidArgument, "y0 outside [0,1]");
  if (!(pt.eps >= 0.0 && pt.eps <= 0.25)) fail(ErrorCode::InvalidArgument, "eps outside [0,1/4]");
  if (pt.iota != 1 && pt.iota != -1) fail(ErrorCode::InvalidArgument, "iota must be +1 or -1");
}

LogWeight::LogWeight(const ShearProfile& p, const SpectralPoint& pt)
    : prof_(p), x0_(p.b(pt.y0)), eps_(pt.eps), iota_(pt.iota), center_(pt.y0) {}

LogWeight::LogWeight(const ShearProfile& p, cplx c) : prof_(p), x0_(c.real()), eps_(std::abs(c.imag())) {
  iota_ = c.imag() > 0.0 ? -1 : 1;
  double lo = std::min(p.b(0.0), p.b(1.0)), hi = std::max(p.b(0.0), p.b(1.0));
  center_ = b_inverse(p, std::clamp(x0_, lo, hi));
}

cplx LogWeight::operator()(double z) const {
  double x = prof_.b(z) - x0_;
  if (eps_ > 0.0) return std::log(cplx(x, iota_ * eps_));
  return cplx(std::log(std::abs(x)), x < 0.0 ? iota_ * kPi : 0.0);
}

cplx LogWeight::inv(double z) const {
  double x = prof_.b(z) - x0_;
  return 1.0 / cplx(x, iota_ * eps_);
}

cplx LogWeight::log_smooth(double z) const {
  const double d = z - center_;
  const double x = prof_.b(z) - x0_;
  double ratio = std::abs(d) < 1e-12 ? std::abs(prof_.db(center_)) : std::abs(x / d);
  return cplx(std::log(ratio), x < 0.0 ? iota_ * kPi : 0.0);
}

namespace {

void coef_T(double, KernelCoef& c) {
  c = KernelCoef{};
  c.c[0][kGz] = -1.0;
  c.c[1][kG] = -1.0;
}

void coef_dyT(double, KernelCoef& c) {
  c = KernelCoef{};
  c.c[0][kGp] = -1.0;
  c.c[1][kGy] = -1.0;
}


}  // namespace

ResolventOperator::ResolventOperator(const ShearProfile& prof, int k, const LogWeight& L, const ChannelGrid& grid,
                                     bool factorize, bool assemble)
    : prof_(prof), k_(k), L_(L), grid_(grid), green_(k) {
  if (L_.eps() == 0.0) {
    LogSplit sp;
    sp.center = L_.center();
    LogWeight lw = L_;  // by value: the operator may be moved
    sp.smooth = [lw](double z) { return lw.log_smooth(z); };
    split_ = sp;
  }
  const int n = grid_.size();
  db_.resize(n);
  d2b_.resize(n);
  for (int i = 0; i < n; ++i) {
    db_[i] = prof_.db(grid_.node(i));
    d2b_[i] = prof_.d2b(grid_.node(i));
  }
  // rows-only operators (shear-free profiles) skip the n x n assembly
  if (!assemble) return;
  T_ = T_rows(grid_.nodes());
  if (factorize) {
    lu_.compute(system_matrix());
    factored_ = true;
  }
}

CVector ResolventOperator::apply_S(const CVector& f) const { return -(T_ * (d2b_.cast<cplx>().cwiseProduct(f))); }

CMatrix ResolventOperator::system_matrix() const {
  CMatrix A = T_ * d2b_.cast<cplx>().asDiagonal();
  A.diagonal().array() += 1.0;
  return A;
}

CVector ResolventOperator::solve(const CVector& rhs) const {
  if (!factored_) fail(ErrorCode::Internal, "operator not factorized");
  return lu_.solve(rhs);
}

double ResolventOperator::cond() const {
  if (!factored_) fail(ErrorCode::Internal, "operator not factorized");
  double rc = lu_.rcond();
  return rc > 0 ? 1.0 / rc : HUGE_VAL;
}

double ResolventOperator::inverse_inf_norm() const {
  CMatrix inv = factored_ ? CMatrix(lu_.inverse()) : CMatrix(system_matrix().partialPivLu().inverse());
  return inv.cwiseAbs().rowwise().sum().maxCoeff();
}

CMatrix ResolventOperator::T_rows(const std::vector<double>& ys) const {
  CMatrix R = log_integral_rows(grid_, green_, ys, 1, coef_T, [this](double z) { return L_(z); }, 24,
                                 split_ ? &*split_ : nullptr);
  return R * db_.cwiseInverse().cast<cplx>().asDiagonal();
}

CMatrix ResolventOperator::dyT_rows(const std::vector<double>& ys) const {
  CMatrix R = log_integral_rows(grid_, green_, ys, 1, coef_dyT, [this](double z) { return L_(z); }, 24,
                                 split_ ? &*split_ : nullptr);
  const int q = grid_.q();
  std::vector<double> l(q);
  for (size_t t = 0; t < ys.size(); ++t) {
    int p = grid_.basis_row(ys[t], 0, l.data());
    cplx Ly = L_(ys[t]);
    for (int j = 0; j < q; ++j) R(static_cast<Eigen::Index>(t), p * q + j) -= l[j] * Ly;
  }
  return R * db_.cwiseInverse().cast<cplx>().asDiagonal();
}

CMatrix ResolventOperator::F2_rows(const std::vector<double>& ys) const {
  const double k2 = green_.kabs() * green_.kabs();
  const ShearProfile& pr = prof_;
  auto coef = [&pr, k2](double z, KernelCoef& c) {
    c = KernelCoef{};
    double d1 = pr.db(z), d2 = pr.d2b(z);
    c.c[0][kG] = -k2 / d1;
    c.c[0][kGz] = d2 / (d1 * d1);
    c.c[1][kGz] = -2.0 / d1;
    c.c[1][kG] = d2 / (d1 * d1);
    c.c[2][kG] = -1.0 / d1;
  };
  CMatrix R = log_integral_rows(grid_, green_, ys, 2, coef, [this](double z) { return L_(z); }, 24,
                                 split_ ? &*split_ : nullptr);
  const int q = grid_.q(), M = grid_.panels();
  std::vector<double> l(q), l0(q), l1(q);
  grid_.basis_row(0.0, 0, l0.data());
  grid_.basis_row(1.0, 0, l1.data());
  const cplx L0 = L_(0.0), L1 = L_(1.0);
  const double b0 = prof_.db(0.0), b1 = prof_.db(1.0);
  for (size_t t = 0; t < ys.size(); ++t) {
    const double y = ys[t];
    const Eigen::Index ti = static_cast<Eigen::Index>(t);
    int p = grid_.basis_row(y, 0, l.data());
    cplx loc = L_(y) / prof_.db(y);
    for (int j = 0; j < q; ++j) R(ti, p * q + j) += l[j] * loc;
    cplx c1 = green_.dz_at1(y) / b1 * L1;
    cplx c0 = green_.dz_at0(y) / b0 * L0;
    for (int j = 0; j < q; ++j) {
      R(ti, (M - 1) * q + j) += l1[j] * c1;
      R(ti, j) -= l0[j] * c0;
    }
  }
  return R * db_.cwiseInverse().cast<cplx>().asDiagonal();
}

void check_grading(const ShearProfile& prof, const SpectralPoint& pt, const ChannelGrid& grid) {
  validate(pt);
  const double ys = pt.y0;
  const auto& bp = grid.breakpoints();
  if (pt.eps == 0.0) {
    auto it = std::lower_bound(bp.begin(), bp.end(), ys - 1e-14);
    bool on = it != bp.end() && std::abs(*it - ys) <= 1e-14;
    if (!on) fail(ErrorCode::GradingMissing, "boundary value needs y0 as a grid breakpoint");
    size_t i = static_cast<size_t>(it - bp.begin());
    double hl = i > 0 ? bp[i] - bp[i - 1] : 0.0, hr = i + 1 < bp.size() ? bp[i + 1] - bp[i] : 0.0;
    if (std::max(hl, hr) > 1e-3) fail(ErrorCode::GradingMissing, "grid not graded about y0");
    return;
  }
  if (grid.graded_about() && std::abs(*grid.graded_about() - ys) < 1e-14) {
    if (pt.eps < 10.0 * grid.h_min()) fail(ErrorCode::GradingMissing, "eps below 10 h_min of the grid");
    return;
  }
  double width = pt.eps / std::abs(prof.db(ys));
  int p = grid.locate(ys);
  double h = grid.h(p);
  if (p > 0 && std::abs(ys - grid.a(p)) < 1e-14) h = std::max(h, grid.h(p - 1));
  if (h > 2.0 * width) fail(ErrorCode::GradingMissing, "grid not graded about y0 and eps below the panel size");
}

CVector apply_T(const ShearProfile& prof, const SpectralPoint& pt, const CVector& f, const ChannelGrid& grid) {
  check_grading(prof, pt, grid);
  ResolventOperator op(prof, pt.k, LogWeight(prof, pt), grid, false);
  return op.apply_T(f);
}

CVector apply_T_direct(const ShearProfile& prof, const SpectralPoint& pt, const CVector& f, const ChannelGrid& grid) {
  check_grading(prof, pt, grid);
  if (pt.eps == 0.0) fail(ErrorCode::InvalidArgument, "direct form needs eps > 0");
  LogWeight L(prof, pt);
  GreensKernel g(pt.k);
  auto coef = [](double, KernelCoef& c) {
    c = KernelCoef{};
    c.c[0][kG] = 1.0;
  };
  CMatrix R = log_integral_rows(grid, g, grid.nodes(), 0, coef, [&L](double z) { return L.inv(z); });
  return R * f;
}

CVector apply_S(const ShearProfile& prof, const SpectralPoint& pt, const CVector& f, const ChannelGrid& grid) {
  check_grading(prof, pt, grid);
  ResolventOperator op(prof, pt.k, LogWeight(prof, pt), grid, false);
  return op.apply_S(f);
}

ResolventSolution solve_psi(const ShearProfile& prof, const SpectralPoint& pt, const CVector& omega0,
                            const ChannelGrid& grid) {
  check_grading(prof, pt, grid);
  if (omega0.size() != grid.size()) fail(ErrorCode::InvalidArgument, "omega0 size does not match grid");
  ResolventOperator op(prof, pt.k, LogWeight(prof, pt), grid);
  ResolventSolution s;
  s.point = pt;
  s.grid = grid;
  s.omega0 = omega0;
  s.cond = op.cond();
  if (s.cond > 1e8) fail(ErrorCode::NearSingular, "condition estimate " + std::to_string(s.cond));
  CVector rhs = op.apply_T(omega0);
  s.psi = op.solve(rhs);
  CVector defect = op.system_matrix() * s.psi - rhs;
  s.residual = sup_norm(defect) / std::max(sup_norm(rhs), 1e-300);
  CVector f = omega0 - op.d2b_nodes().cast<cplx>().cwiseProduct(s.psi);
  s.dpsi_dy = op.dyT_rows(grid.nodes()) * f;
  return s;
}

ResolventSolution solve_psi_ode(const ShearProfile& prof, const SpectralPoint& pt, const CVector& omega0,
                                const ChannelGrid& grid) {
  check_grading(prof, pt, grid);
  if (pt.eps == 0.0) fail(ErrorCode::InvalidArgument, "the ODE backend needs eps > 0");
  LogWeight L(prof, pt);
  const int n = grid.size();
  const double k2 = static_cast<double>(pt.k) * pt.k;
  CVector p(n), r(n);
  for (int i = 0; i < n; ++i) {
    double z = grid.node(i);
    cplx inv = L.inv(z);
    p[i] = k2 + prof.d2b(z) * inv;
    r[i] = -omega0[i] * inv;
  }
  CollocationBVP bvp(grid, p);
  CVector coef = bvp.solve(r);
  ResolventSolution s;
  s.point = pt;
  s.grid = grid;
  s.omega0 = omega0;
  s.psi = bvp.values(coef);
  s.dpsi_dy.resize(n);
  for (int i = 0; i < n; ++i) s.dpsi_dy[i] = bvp.value(coef, grid.node(i), 1);
  s.cond = -1.0;
  s.residual = 0.0;
  return s;
}

CVector solve_dy0_psi(const ShearProfile& prof, const SpectralPoint& pt, const ResolventSolution& sol,
                      const ChannelGrid& grid) {
  check_grading(prof, pt, grid);
  if (pt.eps == 0.0) fail(ErrorCode::InvalidArgument, "the y0-derivative needs eps > 0");
  ResolventOperator op(prof, pt.k, LogWeight(prof, pt), grid);
  CVector g = sol.omega0 - op.d2b_nodes().cast<cplx>().cwiseProduct(sol.psi);
  CVector rhs = prof.db(pt.y0) * (op.F2_rows(grid.nodes()) * g);
  return op.solve(rhs);
}

BoundaryFunctionPair solve_boundary_Phi(const ShearProfile& prof, const SpectralPoint& pt, const ChannelGrid& grid) {
  check_grading(prof, pt, grid);
  ResolventOperator op(prof, pt.k, LogWeight(prof, pt), grid);
  if (op.cond() > 1e8) fail(ErrorCode::NearSingular, "boundary function solve");
  const double k = std::abs(static_cast<double>(pt.k));
  const double b0 = prof.db(0.0), b1 = prof.db(1.0);
  CVector r0(grid.size()), r1(grid.size());
  GreensKernel g(pt.k);
  for (int i = 0; i < grid.size(); ++i) {
    double y = grid.node(i);
    // sinh(k y)/sinh k = -dG/dz(y,1), sinh(k(1-y))/sinh k = dG/dz(y,0)
    r1[i] = -g.dz_at1(y) / (b1 * b1);
    r0[i] = g.dz_at0(y) / (b0 * b0);
  }
  (void)k;
  BoundaryFunctionPair out;
  out.phi0 = op.solve(r0);
  out.phi1 = op.solve(r1);
  CMatrix A = op.system_matrix();
  out.residual = std::max(sup_norm(A * out.phi0 - r0) / sup_norm(r0), sup_norm(A * out.phi1 - r1) / sup_norm(r1));
  return out;
}

ChannelGrid resolvent_grid(const ShearProfile&, const SpectralPoint& pt, int base_panels, int q, double h_floor) {
  double floor = pt.eps > 0.0 ? pt.eps / 16.0 : h_floor;
  return ChannelGrid::graded(base_panels, q, {pt.y0}, floor);
}

ChannelGrid resolvent_grid_total(const ShearProfile&, const SpectralPoint& pt, int n_total, int q, double h_floor) {
  double floor = pt.eps > 0.0 ? pt.eps / 16.0 : h_floor;
  return ChannelGrid::with_total(n_total, q, pt.y0, floor);
}

EpsLimit eps_limit(const std::vector<CVector>& fam, double eps0) {
  if (fam.size() < 4) fail(ErrorCode::InvalidArgument, "eps_limit needs at least 4 levels");
  EpsLimit out;
  const size_t J = fam.size() - 1;
  for (size_t j = 0; j <= J; ++j) out.report.eps.push_back(eps0 * std::ldexp(1.0, -static_cast<int>(j)));
  for (size_t j = 1; j <= J; ++j) out.report.diffs.push_back(sup_norm(fam[j] - fam[j - 1]));
  out.last = fam[J];
  const double scale = std::max(sup_norm(fam[J]), 1e-300);
  const double dJ = out.report.diffs[J - 1], dP = out.report.diffs[J - 2];
  bool all_zero = true;
  for (double d : out.report.diffs)
    if (d > 1e-14 * scale) all_zero = false;
  if (all_zero) {
    out.value = fam[J];
    out.report.flag = "exact";
    out.report.order = HUGE_VAL;
    return out;
  }
  if (dJ > dP * (1.0 + 1e-9) && dJ > 1e-12 * scale)
    fail(ErrorCode::NoConvergence, "successive differences do not decrease");
  double r = dP > 0 ? dJ / dP : 0.0;
  out.report.ratio = r;
  out.report.order = r > 0 ? -std::log2(r) : HUGE_VAL;
  if (r < 0.9) {
    out.value = fam[J] + (fam[J] - fam[J - 1]) * (r / (1.0 - r));
    out.report.error_estimate = dJ * r / (1.0 - r);
    out.report.flag = "converged";
  } else {
    out.value = fam[J];
    out.report.error_estimate = dJ * 10.0;
    out.report.flag = "slow";
  }
  return out;
}

std::string to_csv(const ResolventSolution& s) {
  std::ostringstream os;
  os << "y,re_psi,im_psi,re_dpsi_dy,im_dpsi_dy,re_dpsi_dy0,im_dpsi_dy0\n";
  char buf[512];
  for (int i = 0; i < s.grid.size(); ++i) {
    cplx d0 = s.dpsi_dy0.size() == s.psi.size() ? s.dpsi_dy0[i] : cplx(0.0);
    cplx dy = s.dpsi_dy.size() == s.psi.size() ? s.dpsi_dy[i] : cplx(0.0);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.grid.node(i), s.psi[i].real(),
                  s.psi[i].imag(), dy.real(), dy.imag(), d0.real(), d0.imag());
    os << buf;
  }
  return os.str();
}

}  // namespace idamp
