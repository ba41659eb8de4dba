#pragma once

#include <functional>
#include <string>
#include <vector>

#include "idamp/common.hpp"
#include "idamp/grid.hpp"
#include "idamp/profiles.hpp"
#include "idamp/resolvent.hpp"

namespace idamp {

using ModeFn = std::function<cplx(double)>;

struct DensityConfig {
  int out_panels = 6;   // output y grid
  int out_order = 8;
  int y0_order = 8;     // Gauss order of the y0 panels
  int diag_levels = 2;  // dyadic levels toward each output point
  int edge_levels = 8;  // extra levels toward y0 = 0 and y0 = 1
  int nys_base = 16;    // Nystrom grid per y0 node
  int nys_order = 8;
  double h_min = 1e-6;
  EpsSchedule eps{1.0 / 16.0, 5};
  int eps_checks = 3;  // y0 nodes cross-checked against the eps schedule
};

struct EpsCheck {
  double y0 = 0.0;
  EpsReport report;
  double deviation = 0.0;  // relative sup distance of the extrapolated limit from the boundary value
};

// lim_{eps->0} [psi^- - psi^+](y, y0) on output points y for y0 at the
// nodes of panels whose breakpoints include every output point.
struct SpectralDensity {
  int k = 1;
  ChannelGrid ygrid;
  std::vector<double> y0_bp;
  int y0_order = 8;
  std::vector<double> y0_nodes, y0_weights, jac, b_y0, db_y0;
  CMatrix D, Dy;  // (y0 node) x (output y)
  std::vector<EpsCheck> eps_report;

  const std::vector<double>& y() const { return ygrid.nodes(); }
};

std::vector<double> density_y0_breakpoints(const std::vector<double>& ys, int diag_levels, int edge_levels);

SpectralDensity build_density(const ShearProfile& prof, int k, const ModeFn& omega0, const DensityConfig& cfg = {});
// Several data sets sharing one factorization per y0 node.
std::vector<SpectralDensity> build_densities(const ShearProfile& prof, int k, const std::vector<ModeFn>& data,
                                             const DensityConfig& cfg = {});

CVector evolve_psi_k(const SpectralDensity& d, double t);
CVector evolve_dy_psi_k(const SpectralDensity& d, double t);

// omega_k = (d_yy - k^2) psi_k
CVector recover_omega_k(const CVector& psi, int k, const ChannelGrid& grid);

enum class TrajectorySource { Spectral, Direct };

struct ModeTrajectory {
  int k = 1;
  std::vector<double> times;
  std::vector<double> y;
  CMatrix psi, dpsi, omega;  // (time) x (y)
  TrajectorySource source = TrajectorySource::Spectral;
};

ModeTrajectory spectral_trajectory(const SpectralDensity& d, const std::vector<double>& times);
// Trajectory at -k for real physical data: conjugate of the one at k.
ModeTrajectory conjugate_trajectory(const ModeTrajectory& tr);

std::string to_csv(const ModeTrajectory& tr);

}  // namespace idamp
