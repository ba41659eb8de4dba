#pragma once

#include <string>
#include <vector>

#include "idamp/common.hpp"
#include "idamp/profiles.hpp"
#include "idamp/resolvent.hpp"
#include "idamp/spectral.hpp"

namespace idamp {

struct AsymptoticConfig {
  int nys_base = 16;
  int nys_order = 8;
  double h_min = 1e-6;
  EpsSchedule eps{1.0 / 16.0, 6};  // boundary jumps (phi3, phi4) and phi1 cross-checks
  int phi1_checks = 2;
};

// Which diagonal value multiplies b'' in the interior main term.
//   Corrected: psi^-(y,y) = phi1 + phi2 for k > 0, phi1 for k < 0
//   AsWritten: phi1 - phi2 * 1_{k<0}
enum class SwitchForm { Corrected, AsWritten };

struct AsymptoticProfile {
  int k = 1;
  std::vector<double> y;
  RVector b, db, d2b;
  CVector omega0;
  cplx omega0_at0 = 0.0, omega0_at1 = 0.0;
  double b0 = 0.0, b1 = 0.0, db0 = 1.0, db1 = 1.0;
  CVector phi1, phi2, phi3, phi4, phi5, phi6;
  CVector phi2_conj;              // conj(phi1) - phi1, real data only
  double phi2_path_diff = 0.0;    // sup |phi2 - phi2_conj| / sup |phi2|
  // schedule cross-check of phi3/phi4 (which are evaluated at eps = 0):
  // relative distance of the smallest-eps jump (or its extrapolation)
  EpsReport phi3_report, phi4_report;
  double phi3_schedule_dev = 0.0, phi4_schedule_dev = 0.0;
  std::vector<EpsCheck> phi1_checks;
  std::vector<std::pair<double, double>> residual_norms;  // (t, relative residual)
};

// y: output points (interior points get the diagonal solves, 0 and 1 are
// Dirichlet).
AsymptoticProfile compute_phis(const ShearProfile& prof, int k, const ModeFn& omega0, const std::vector<double>& y,
                               const AsymptoticConfig& cfg = {});

struct MainTermOptions {
  bool boundary_lines = true;
  SwitchForm form = SwitchForm::Corrected;
};

CVector main_term_psi(const AsymptoticProfile& ap, double t, const MainTermOptions& opt = {});
CVector main_term_dy_psi(const AsymptoticProfile& ap, double t, const MainTermOptions& opt = {});

struct ScatterEntry {
  int k = 1;
  std::vector<double> y;
  CVector F, integral, tail;
  double t_max = 0.0;
  double tail_estimate = 0.0;
};

// F_k = omega0 + int_0^inf ik b'' e^{ikbt} psi_k dt: trapezoid over the
// trajectory samples plus the main-term tail from t_max to infinity.
// Throws TailTooLarge if the tail exceeds 10% of the accumulated integral.
ScatterEntry scattering_profile(const ModeTrajectory& tr, const AsymptoticProfile& ap);

// E_1(z) for complex z off the negative real axis.
cplx expint_e1(cplx z);

// Psi(x, y) = C0 / |b'|^2 sum_k e^{ikx} / k^2 (b'' A_k - omega0_k), rows x.
CMatrix assemble_Psi(const std::vector<AsymptoticProfile>& aps, const std::vector<double>& xs);

struct DecayFit {
  std::string quantity;
  double t_lo = 0.0, t_hi = 0.0;
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
  int samples = 0;
};

// Log-log least squares of values against times inside [t_lo, t_hi].
// Throws PoorFit if r2 < 0.95 and InvalidArgument for < 10 samples.
DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values, double t_lo, double t_hi,
                   const std::string& quantity, bool require_fit = true);

enum class DecayQuantity { SupPsi, SupDyPsi };
DecayFit fit_decay(const ModeTrajectory& tr, DecayQuantity q, double t_lo, double t_hi, bool require_fit = true);

// sum_{a=0..3} |k|^{3-a} ||d^a omega0 / dy^a||_{L2}
double hk3_norm(int k, const ModeFn& omega0);

std::string to_json(const AsymptoticProfile& ap, const std::vector<DecayFit>& fits);

}  // namespace idamp
