#include "idamp/greens.hpp"

#include <cmath>

#include "idamp/collocation.hpp"

namespace idamp {

GreensKernel::GreensKernel(int k) : k_(k), ka_(std::abs(static_cast<double>(k))) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "Green's function needs k != 0");
  expform_ = ka_ >= 30.0;
  if (!expform_) shk_ = std::sinh(ka_);
  e2k_ = std::exp(-2.0 * ka_);
}

GreensKernel::Point GreensKernel::point(double y) const {
  Point p{y, 0, 0, 0, 0};
  if (!expform_) {
    p.S = std::sinh(ka_ * y);
    p.C = std::cosh(ka_ * y);
    p.S2 = std::sinh(ka_ * (1.0 - y));
    p.C2 = std::cosh(ka_ * (1.0 - y));
  }
  return p;
}

GreensKernel::Values GreensKernel::eval_all(const Point& yp, const Point& zp) const {
  const bool below = yp.y <= zp.y;
  const Point& s = below ? yp : zp;
  const Point& l = below ? zp : yp;
  double ss, cs, sc, cc;
  if (!expform_) {
    ss = s.S * l.S2 / shk_;
    cs = s.C * l.S2 / shk_;
    sc = s.S * l.C2 / shk_;
    cc = s.C * l.C2 / shk_;
  } else {
    double E = std::exp(-ka_ * (l.y - s.y));
    double a = std::exp(-2.0 * ka_ * s.y), b = std::exp(-2.0 * ka_ * (1.0 - l.y));
    double oma = -std::expm1(-2.0 * ka_ * s.y), omb = -std::expm1(-2.0 * ka_ * (1.0 - l.y));
    double f = E / (-2.0 * std::expm1(-2.0 * ka_));
    ss = f * oma * omb;
    cs = f * (1.0 + a) * omb;
    sc = f * oma * (1.0 + b);
    cc = f * (1.0 + a) * (1.0 + b);
  }
  Values v;
  v.G = ss / ka_;
  v.Gp = -ka_ * cc;
  if (below) {
    v.Gy = cs;
    v.Gz = -sc;
  } else {
    v.Gy = -sc;
    v.Gz = cs;
  }
  return v;
}

// sinh(k u)/sinh(k) for u in [0,1]
static double sinh_ratio(double k, double u) {
  return std::exp(-k * (1.0 - u)) * (-std::expm1(-2.0 * k * u)) / (-std::expm1(-2.0 * k));
}

double GreensKernel::dz_at0(double y) const { return y > 0.0 ? sinh_ratio(ka_, 1.0 - y) : 0.0; }
double GreensKernel::dz_at1(double y) const { return -sinh_ratio(ka_, y); }

double GreensKernel::row_l1(double y) const {
  return (1.0 - sinh_ratio(ka_, y) - sinh_ratio(ka_, 1.0 - y)) / (ka_ * ka_);
}

double GreensKernel::op_norm() const { return row_l1(0.5); }

EllipticSolver::EllipticSolver(const ChannelGrid& grid, int k)
    : grid_(grid), k_(std::abs(static_cast<double>(k))) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "elliptic solve needs k != 0");
  const int n = grid_.size(), q = grid_.q();
  ea_.resize(n);
  eb_.resize(n);
  av_.resize(n);
  cv_.resize(n);
  for (int i = 0; i < n; ++i) {
    int p = i / q;
    double z = grid_.node(i);
    ea_[i] = std::exp(k_ * (z - grid_.a(p)));
    eb_[i] = std::exp(k_ * (grid_.b(p) - z));
    av_[i] = -std::expm1(-2.0 * k_ * z);
    cv_[i] = -std::expm1(-2.0 * k_ * (1.0 - z));
  }
  den_ = -2.0 * k_ * std::expm1(-2.0 * k_);
}

void EllipticSolver::sweeps(const CVector& g, std::vector<cplx>& Al, std::vector<cplx>& Br, CVector& F,
                            CVector& H) const {
  const int M = grid_.panels(), q = grid_.q();
  const GaussRule& r = grid_.rule();
  F.resize(grid_.size());
  H.resize(grid_.size());
  for (int i = 0; i < grid_.size(); ++i) {
    F[i] = ea_[i] * av_[i] * g[i];
    H[i] = eb_[i] * cv_[i] * g[i];
  }
  Al.assign(M + 1, 0.0);
  Br.assign(M + 1, 0.0);
  for (int p = 0; p < M; ++p) {
    double hh = 0.5 * grid_.h(p);
    cplx s = 0.0;
    for (int j = 0; j < q; ++j) s += r.w[j] * F[p * q + j];
    Al[p + 1] = std::exp(-k_ * grid_.h(p)) * (Al[p] + hh * s);
  }
  for (int p = M - 1; p >= 0; --p) {
    double hh = 0.5 * grid_.h(p);
    cplx s = 0.0;
    for (int j = 0; j < q; ++j) s += r.w[j] * H[p * q + j];
    Br[p] = std::exp(-k_ * grid_.h(p)) * (Br[p + 1] + hh * s);
  }
}

EllipticSolver::Result EllipticSolver::solve(const CVector& g) const {
  if (g.size() != grid_.size()) fail(ErrorCode::InvalidArgument, "rhs size does not match grid");
  std::vector<cplx> Al, Br;
  CVector F, H;
  sweeps(g, Al, Br, F, H);
  const int M = grid_.panels(), q = grid_.q();
  const GaussRule& r = grid_.rule();
  Result res;
  res.psi.resize(grid_.size());
  res.dpsi.resize(grid_.size());
  for (int p = 0; p < M; ++p) {
    double hh = 0.5 * grid_.h(p);
    cplx tot = 0.0;
    for (int j = 0; j < q; ++j) tot += r.w[j] * H[p * q + j];
    for (int i = 0; i < q; ++i) {
      cplx pf = 0.0, ph = 0.0;
      for (int j = 0; j < q; ++j) {
        pf += r.J(i, j) * F[p * q + j];
        ph += r.J(i, j) * H[p * q + j];
      }
      int idx = p * q + i;
      double z = grid_.node(idx);
      cplx A = (Al[p] + hh * pf) / ea_[idx];
      cplx B = (Br[p + 1] + hh * (tot - ph)) / eb_[idx];
      res.psi[idx] = -(cv_[idx] * A + av_[idx] * B) / den_;
      res.dpsi[idx] = -(-k_ * (1.0 + std::exp(-2.0 * k_ * (1.0 - z))) * A + k_ * (1.0 + std::exp(-2.0 * k_ * z)) * B) / den_;
    }
  }
  return res;
}

EllipticSolver::Result EllipticSolver::solve_at(const CVector& g, const std::vector<double>& ys) const {
  std::vector<cplx> Al, Br;
  CVector F, H;
  sweeps(g, Al, Br, F, H);
  const int q = grid_.q();
  const GaussRule& r = grid_.rule();
  std::vector<double> I(q);
  Result res;
  res.psi.resize(ys.size());
  res.dpsi.resize(ys.size());
  for (size_t t = 0; t < ys.size(); ++t) {
    double y = ys[t];
    int p = grid_.locate(y);
    double hh = 0.5 * grid_.h(p);
    r.basis_integral(grid_.to_ref(p, y), I.data());
    cplx pf = 0.0, ph = 0.0, tot = 0.0;
    for (int j = 0; j < q; ++j) {
      pf += I[j] * F[p * q + j];
      ph += I[j] * H[p * q + j];
      tot += r.w[j] * H[p * q + j];
    }
    cplx A = (Al[p] + hh * pf) * std::exp(-k_ * (y - grid_.a(p)));
    cplx B = (Br[p + 1] + hh * (tot - ph)) * std::exp(-k_ * (grid_.b(p) - y));
    double av = -std::expm1(-2.0 * k_ * y), cv = -std::expm1(-2.0 * k_ * (1.0 - y));
    res.psi[t] = -(cv * A + av * B) / den_;
    res.dpsi[t] = -(-k_ * (1.0 + std::exp(-2.0 * k_ * (1.0 - y))) * A + k_ * (1.0 + std::exp(-2.0 * k_ * y)) * B) / den_;
  }
  return res;
}

CVector elliptic_solve(int k, const CVector& rhs, const ChannelGrid& grid, EllipticMethod method) {
  if (method == EllipticMethod::Quadrature) return EllipticSolver(grid, k).solve(rhs).psi;
  CVector p = CVector::Constant(grid.size(), cplx(static_cast<double>(k) * k, 0.0));
  CollocationBVP bvp(grid, p);
  return bvp.values(bvp.solve(rhs));
}

CVector apply_laplacian(int k, const CVector& psi, const ChannelGrid& grid) {
  return grid.differentiate(psi, 2) - static_cast<double>(k) * k * psi;
}

}  // namespace idamp
