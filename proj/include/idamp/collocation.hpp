#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "idamp/common.hpp"
#include "idamp/grid.hpp"

namespace idamp {

// u'' - p(y) u = r(y), u(0) = u(1) = 0. Gauss collocation at the panel nodes
// with one polynomial of degree q+1 per panel and C^1 matching. The sparse
// system is block banded.
class CollocationBVP {
 public:
  CollocationBVP(const ChannelGrid& grid, const CVector& p_nodes);

  // Legendre coefficients, (q+2) per panel.
  CVector solve(const CVector& r_nodes) const;

  CVector values(const CVector& coef) const;  // at the grid nodes
  cplx value(const CVector& coef, double y, int d = 0) const;

  const ChannelGrid& grid() const { return grid_; }

 private:
  ChannelGrid grid_;
  int nb_;
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>> lu_;
  Eigen::MatrixXd Pval_;  // P_m at reference nodes
};

// P_0..P_n and first two derivatives at s.
void legendre_all(int n, double s, double* p, double* dp, double* d2p);

}  // namespace idamp
