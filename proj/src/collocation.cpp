#include "idamp/collocation.hpp"

#include <cmath>
#include <vector>

namespace idamp {

void legendre_all(int n, double s, double* p, double* dp, double* d2p) {
  p[0] = 1.0;
  dp[0] = 0.0;
  d2p[0] = 0.0;
  if (n == 0) return;
  p[1] = s;
  dp[1] = 1.0;
  d2p[1] = 0.0;
  for (int m = 1; m < n; ++m) {
    p[m + 1] = ((2.0 * m + 1.0) * s * p[m] - m * p[m - 1]) / (m + 1.0);
    dp[m + 1] = dp[m - 1] + (2.0 * m + 1.0) * p[m];
    d2p[m + 1] = d2p[m - 1] + (2.0 * m + 1.0) * dp[m];
  }
}

CollocationBVP::CollocationBVP(const ChannelGrid& grid, const CVector& pn) : grid_(grid) {
  const int M = grid_.panels(), q = grid_.q();
  nb_ = q + 2;
  const int N = M * nb_;
  const GaussRule& r = grid_.rule();
  Pval_.resize(q, nb_);
  Eigen::MatrixXd P2(q, nb_);
  std::vector<double> p(nb_), dp(nb_), d2p(nb_);
  for (int i = 0; i < q; ++i) {
    legendre_all(nb_ - 1, r.x[i], p.data(), dp.data(), d2p.data());
    for (int m = 0; m < nb_; ++m) {
      Pval_(i, m) = p[m];
      P2(i, m) = d2p[m];
    }
  }
  std::vector<double> pr(nb_), dpr(nb_), pl(nb_), dpl(nb_);
  legendre_all(nb_ - 1, 1.0, pr.data(), dpr.data(), d2p.data());
  legendre_all(nb_ - 1, -1.0, pl.data(), dpl.data(), d2p.data());

  std::vector<Eigen::Triplet<cplx>> trip;
  int row = 0;
  for (int pp = 0; pp < M; ++pp) {
    const int c0 = pp * nb_;
    const double hh = 0.5 * grid_.h(pp);
    if (pp == 0) {
      for (int m = 0; m < nb_; ++m) trip.emplace_back(row, c0 + m, pl[m]);
      ++row;
    }
    for (int i = 0; i < q; ++i) {
      cplx pv = pn[pp * q + i] * (hh * hh);
      for (int m = 0; m < nb_; ++m) trip.emplace_back(row, c0 + m, P2(i, m) - pv * Pval_(i, m));
      ++row;
    }
    if (pp + 1 < M) {
      const int c1 = c0 + nb_;
      const double hn = 0.5 * grid_.h(pp + 1);
      for (int m = 0; m < nb_; ++m) {
        trip.emplace_back(row, c0 + m, pr[m]);
        trip.emplace_back(row, c1 + m, -pl[m]);
      }
      ++row;
      double sc = std::min(hh, hn);
      for (int m = 0; m < nb_; ++m) {
        trip.emplace_back(row, c0 + m, dpr[m] * sc / hh);
        trip.emplace_back(row, c1 + m, -dpl[m] * sc / hn);
      }
      ++row;
    } else {
      for (int m = 0; m < nb_; ++m) trip.emplace_back(row, c0 + m, pr[m]);
      ++row;
    }
  }
  Eigen::SparseMatrix<cplx> A(N, N);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  lu_.compute(A);
  if (lu_.info() != Eigen::Success) fail(ErrorCode::Numerical, "collocation matrix is singular");
}

CVector CollocationBVP::solve(const CVector& rn) const {
  const int M = grid_.panels(), q = grid_.q();
  CVector rhs = CVector::Zero(M * nb_);
  int row = 0;
  for (int pp = 0; pp < M; ++pp) {
    const double hh = 0.5 * grid_.h(pp);
    if (pp == 0) ++row;
    for (int i = 0; i < q; ++i) rhs[row++] = rn[pp * q + i] * (hh * hh);
    row += (pp + 1 < M) ? 2 : 1;
  }
  CVector c = lu_.solve(rhs);
  if (lu_.info() != Eigen::Success) fail(ErrorCode::Numerical, "collocation solve failed");
  return c;
}

CVector CollocationBVP::values(const CVector& coef) const {
  const int M = grid_.panels(), q = grid_.q();
  CVector v(grid_.size());
  for (int pp = 0; pp < M; ++pp) v.segment(pp * q, q) = Pval_ * coef.segment(pp * nb_, nb_);
  return v;
}

cplx CollocationBVP::value(const CVector& coef, double y, int d) const {
  int pp = grid_.locate(y);
  double s = grid_.to_ref(pp, y);
  std::vector<double> p(nb_), dp(nb_), d2p(nb_);
  legendre_all(nb_ - 1, s, p.data(), dp.data(), d2p.data());
  const double* src = d == 0 ? p.data() : (d == 1 ? dp.data() : d2p.data());
  double scale = std::pow(2.0 / grid_.h(pp), d);
  cplx acc = 0.0;
  for (int m = 0; m < nb_; ++m) acc += src[m] * coef[pp * nb_ + m];
  return acc * scale;
}

}  // namespace idamp
