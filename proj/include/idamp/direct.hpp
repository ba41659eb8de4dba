#pragma once

#include <memory>
#include <vector>

#include "idamp/common.hpp"
#include "idamp/greens.hpp"
#include "idamp/grid.hpp"
#include "idamp/profiles.hpp"
#include "idamp/spectral.hpp"

namespace idamp {

struct DirectConfig {
  int panels = 128;  // 128 x 8 = 1024 nodes
  int q = 8;
  double dt = 0.01;  // requested step, clipped to dt_max
};

// Mode-k problem on a fixed grid: profile samples and the elliptic solver.
class DirectProblem {
 public:
  DirectProblem(const ShearProfile& prof, int k, const DirectConfig& cfg = {});

  int k() const { return k_; }
  const ChannelGrid& grid() const { return grid_; }
  const EllipticSolver& elliptic() const { return es_; }
  const ShearProfile& profile() const { return prof_; }
  double dt_max() const { return dt_max_; }

  // df/dt = ik b'' e^{ikbt} psi, psi = elliptic(e^{-ikbt} f)
  CVector rhs(double t, const CVector& f) const;
  CVector omega(double t, const CVector& f) const;  // e^{-ikbt} f

 private:
  ShearProfile prof_;
  int k_;
  ChannelGrid grid_;
  EllipticSolver es_;
  RVector b_, d2b_;
  double dt_max_;
};

// f is the sheared unknown e^{ikb(y)t} omega_k(t,y) at the problem's nodes.
struct DirectState {
  int k = 1;
  double t = 0.0;
  CVector f;
  double dt = 0.01;  // may be negative (backward stepping)
};

DirectState direct_initial(const DirectProblem& pb, const ModeFn& omega0, double dt);
// One RK4 step. Throws StepTooLarge if |dt| > dt_max.
DirectState step(const DirectProblem& pb, const DirectState& s);

// Samples at arbitrary output points ys (Gauss nodes of the spectral output
// grid by default).
ModeTrajectory evolve_direct(const ShearProfile& prof, int k, const ModeFn& omega0,
                             const std::vector<double>& t_samples, const std::vector<double>& ys,
                             const DirectConfig& cfg = {});

}  // namespace idamp
