#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "idamp/common.hpp"
#include "idamp/greens.hpp"
#include "idamp/logint.hpp"
#include "idamp/grid.hpp"
#include "idamp/profiles.hpp"

namespace idamp {

// Spectral parameter c = b(y0) - i*iota*eps. eps == 0 selects the boundary
// value reached from side iota (the limit eps -> 0+), evaluated exactly in
// the logarithmic form.
struct SpectralPoint {
  int k = 1;
  double y0 = 0.5;
  double eps = 1e-2;
  int iota = +1;
};

void validate(const SpectralPoint& pt);

// z -> log(b(z) - c) on the branch continuous along [0,1].
class LogWeight {
 public:
  LogWeight(const ShearProfile& p, const SpectralPoint& pt);
  // arbitrary complex shift c (scan); Im c == 0 is treated as eps = 0, iota = +1
  LogWeight(const ShearProfile& p, cplx c);

  cplx operator()(double z) const;
  cplx inv(double z) const;  // 1/(b(z) - c)
  // eps == 0 only: L(z) - log|z - center|, smooth across the center
  cplx log_smooth(double z) const;
  double center() const { return center_; }  // b^{-1} of the clamped real part
  double eps() const { return eps_; }
  int iota() const { return iota_; }
  cplx c() const { return cplx(x0_, -iota_ * eps_); }

 private:
  ShearProfile prof_;
  double x0_, eps_;
  int iota_;
  double center_;
};

// Nystrom discretization of T, S = -T b'' and I - S for one spectral
// parameter on one grid.
class ResolventOperator {
 public:
  ResolventOperator(const ShearProfile& prof, int k, const LogWeight& L, const ChannelGrid& grid,
                    bool factorize = true, bool assemble = true);

  const ChannelGrid& grid() const { return grid_; }
  const ShearProfile& profile() const { return prof_; }
  const LogWeight& weight() const { return L_; }
  int k() const { return k_; }

  const CMatrix& Tmat() const { return T_; }
  CVector apply_T(const CVector& f) const { return T_ * f; }
  CVector apply_S(const CVector& f) const;
  CMatrix system_matrix() const;  // I - S
  CVector solve(const CVector& rhs) const;
  double cond() const;
  // ||(I-S)^{-1}||_inf from the explicit inverse
  double inverse_inf_norm() const;

  // Rows acting on nodal f at arbitrary targets.
  CMatrix T_rows(const std::vector<double>& ys) const;
  CMatrix dyT_rows(const std::vector<double>& ys) const;
  // int G(y,z) g(z)/(b(z)-c)^2 dz after two integrations by parts
  CMatrix F2_rows(const std::vector<double>& ys) const;

  const RVector& db_nodes() const { return db_; }
  const RVector& d2b_nodes() const { return d2b_; }

 private:
  ShearProfile prof_;
  int k_;
  LogWeight L_;
  ChannelGrid grid_;
  GreensKernel green_;
  std::optional<LogSplit> split_;
  RVector db_, d2b_;
  CMatrix T_;
  Eigen::PartialPivLU<CMatrix> lu_;
  bool factored_ = false;
};

struct ResolventSolution {
  SpectralPoint point;
  ChannelGrid grid;
  CVector omega0, psi, dpsi_dy, dpsi_dy0;
  double residual = 0.0;
  double cond = 0.0;
};

struct BoundaryFunctionPair {
  CVector phi0, phi1;
  double residual = 0.0;
};

// Throws GradingMissing if the grid does not resolve the kernel at pt.
void check_grading(const ShearProfile& prof, const SpectralPoint& pt, const ChannelGrid& grid);

CVector apply_T(const ShearProfile& prof, const SpectralPoint& pt, const CVector& f, const ChannelGrid& grid);
// Pole kernel integrated directly (f interpolated); cross-check for eps >= 1e-2.
CVector apply_T_direct(const ShearProfile& prof, const SpectralPoint& pt, const CVector& f, const ChannelGrid& grid);
CVector apply_S(const ShearProfile& prof, const SpectralPoint& pt, const CVector& f, const ChannelGrid& grid);

ResolventSolution solve_psi(const ShearProfile& prof, const SpectralPoint& pt, const CVector& omega0,
                            const ChannelGrid& grid);
ResolventSolution solve_psi_ode(const ShearProfile& prof, const SpectralPoint& pt, const CVector& omega0,
                                const ChannelGrid& grid);
CVector solve_dy0_psi(const ShearProfile& prof, const SpectralPoint& pt, const ResolventSolution& sol,
                      const ChannelGrid& grid);
BoundaryFunctionPair solve_boundary_Phi(const ShearProfile& prof, const SpectralPoint& pt, const ChannelGrid& grid);

// Default Nystrom grid for a spectral point: graded about b^{-1}(Re c) down to
// h_floor (eps == 0) or eps/16.
ChannelGrid resolvent_grid(const ShearProfile& prof, const SpectralPoint& pt, int base_panels = 16, int q = 8,
                           double h_floor = 1e-6);
ChannelGrid resolvent_grid_total(const ShearProfile& prof, const SpectralPoint& pt, int n_total, int q = 8,
                                 double h_floor = 1e-6);

struct EpsReport {
  std::vector<double> eps;
  std::vector<double> diffs;  // sup-norm Cauchy differences
  double ratio = 0.0;
  double order = 0.0;
  double error_estimate = 0.0;
  std::string flag;  // "exact", "converged", "slow"
};

struct EpsLimit {
  CVector value;
  CVector last;
  EpsReport report;
};

// eps_j = eps0 * 2^-j. Throws NoConvergence when the last difference does not
// decrease.
EpsLimit eps_limit(const std::vector<CVector>& family, double eps0);

struct EpsSchedule {
  double eps0 = 1.0 / 16.0;
  int levels = 6;
  double at(int j) const { return eps0 * std::ldexp(1.0, -j); }
};

// CSV dump: y, Re psi, Im psi, Re dpsi_dy, Im dpsi_dy, Re dpsi_dy0, Im dpsi_dy0
std::string to_csv(const ResolventSolution& sol);

}  // namespace idamp
