#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "idamp/common.hpp"
#include "idamp/profiles.hpp"
#include "idamp/spectral.hpp"

namespace idamp {

inline constexpr const char* kSpecVersion = "1";

// Closed-form or tabulated initial vorticity shape, shared by every mode in
// k_set (times an optional per-mode amplitude). Data are taken real in
// physical space, so omega_{-k} = conj(omega_k).
struct InitialData {
  std::string kind = "sin_pi_y_poly";  // sin_pi_y | sin_pi_y_poly | affine_sine | polynomial | tabulated
  std::vector<double> values;          // coefficients or samples
  std::map<int, cplx> amplitude;
  bool boundary_vanishing = false;

  ModeFn mode(int k) const;
};

struct RunChecks {
  bool scan_certified = false;
  double cross_rel_tol = -1.0;  // spectral vs direct, relative sup
  double cross_t_max = 50.0;
  std::vector<double> psi_slope, dpsi_slope;  // [lo, hi] windows
  bool lemmas_bounded = false;
  double physical_real_tol = -1.0;    // max |Im| / max |value| of the physical fields
  double psi_limit_tol = -1.0;        // ||t^2 phi(t_max) - Psi|| <= tol ||Psi||
  double scatter_tail_factor = -1.0;  // ||f_k(t_max) - F_k|| <= factor * tail_estimate
};

struct RunConfig {
  nlohmann::json profile = "couette";
  std::vector<int> k_set;
  InitialData omega0;
  int n_total = 128;
  int order = 8;
  double h_min = 1e-6;
  int out_panels = 6;
  int direct_panels = 128;
  EpsSchedule eps{1.0 / 16.0, 4};
  std::vector<double> t_samples;
  std::vector<double> fit_window{20.0, 200.0};
  int x_resolution = 32;
  int norm_samples = 50;
  int norm_k_max = 32;
  std::uint64_t seed = 20240601;
  std::string outputs = "out";
  std::vector<std::string> tasks;
  RunChecks checks;
};

// Throws ConfigInvalid.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct TaskStatus {
  std::string task;
  std::string status;  // ok | skipped | error
  std::string detail;
  double seconds = 0.0;
};

struct ManifestEntry {
  std::string file;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunReport {
  std::vector<TaskStatus> tasks;
  std::vector<CheckResult> checks;
  std::vector<ManifestEntry> manifest;
  int exit_code = 0;  // 0 ok, 2 config, 3 acceptance, 4 numerical
};

RunReport run(const RunConfig& cfg);
// Loads, runs and maps errors to exit codes. tasks_override replaces the
// configured task list when nonempty.
RunReport run_file(const std::filesystem::path& config, const std::vector<std::string>& tasks_override = {});

// Real physical fields on an (x, y) grid per time sample.
struct PhysicalFields {
  std::vector<double> times, x, y;
  std::vector<CMatrix> phi, f;  // per time: (x) x (y)
  double max_imag = 0.0;        // max |Im| relative to max |value|
};

// phi = C0 sum_k e^{ik(b(y)t + x)} psi_k,  f = C0 sum_k e^{ik(b(y)t + x)} omega_k.
// All trajectories must share times and y.
PhysicalFields assemble_physical(const ShearProfile& prof, const std::vector<ModeTrajectory>& trs, int x_resolution);

// Verifies manifest hashes of an output directory and summarizes its report.
struct DirReport {
  std::string text;
  int exit_code = 0;
};
DirReport report_dir(const std::filesystem::path& dir);

std::string sha256_hex(const std::string& bytes);

}  // namespace idamp
