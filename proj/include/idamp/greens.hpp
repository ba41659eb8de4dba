#pragma once

#include <vector>

#include "idamp/common.hpp"
#include "idamp/grid.hpp"

namespace idamp {

// Dirichlet Green's function of d^2/dy^2 - k^2 on [0,1] (with the sign that
// makes it positive): G = sinh(k min) sinh(k(1-max)) / (k sinh k).
class GreensKernel {
 public:
  explicit GreensKernel(int k);

  int k() const { return k_; }
  double kabs() const { return ka_; }

  struct Values {
    double G, Gy, Gz, Gp;  // G, dG/dy, dG/dz, G' (mixed derivative off the diagonal)
  };

  // Per-point precomputation; cheap pairs for |k| < 30.
  struct Point {
    double y, S, C, S2, C2;
  };
  Point point(double y) const;
  // At y == z the one-sided derivatives of the branch y <= z are returned.
  Values eval_all(const Point& y, const Point& z) const;
  Values eval_all(double y, double z) const { return eval_all(point(y), point(z)); }

  double eval(double y, double z) const { return eval_all(y, z).G; }
  double eval_prime(double y, double z) const { return eval_all(y, z).Gp; }
  double eval_dy(double y, double z) const { return eval_all(y, z).Gy; }
  double eval_dz(double y, double z) const { return eval_all(y, z).Gz; }

  // dG/dz at z = 0 and z = 1
  double dz_at0(double y) const;
  double dz_at1(double y) const;

  // int_0^1 |G(y,z)| dz and its supremum over y
  double row_l1(double y) const;
  double op_norm() const;

 private:
  int k_;
  double ka_;
  bool expform_;
  double shk_ = 1.0, e2k_ = 0.0;
};

inline double green_eval(const GreensKernel& g, double y, double z) { return g.eval(y, z); }

// (d^2/dy^2 - k^2) psi = rhs with psi(0)=psi(1)=0, by integrating against G
// with the separable structure (cumulative panel integrals, O(n q)).
class EllipticSolver {
 public:
  EllipticSolver(const ChannelGrid& grid, int k);

  struct Result {
    CVector psi, dpsi;
  };
  Result solve(const CVector& rhs) const;
  // psi and dpsi at arbitrary points from nodal rhs
  Result solve_at(const CVector& rhs, const std::vector<double>& ys) const;

  const ChannelGrid& grid() const { return grid_; }

 private:
  void sweeps(const CVector& rhs, std::vector<cplx>& Aa, std::vector<cplx>& Bb, CVector& F, CVector& H) const;

  ChannelGrid grid_;
  double k_;
  std::vector<double> ea_, eb_, av_, cv_;  // e^{k(z-a)}, e^{k(b-z)}, 1-e^{-2kz}, 1-e^{-2k(1-z)} at nodes
  double den_;
};

enum class EllipticMethod { Quadrature, Banded };

CVector elliptic_solve(int k, const CVector& rhs, const ChannelGrid& grid,
                       EllipticMethod method = EllipticMethod::Quadrature);

// omega = (d^2/dy^2 - k^2) psi by panel-wise spectral differentiation.
CVector apply_laplacian(int k, const CVector& psi, const ChannelGrid& grid);

}  // namespace idamp
