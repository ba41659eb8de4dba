#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "idamp/runner.hpp"
#include "idamp/svg.hpp"

using namespace idamp;
namespace fs = std::filesystem;

namespace {
nlohmann::json base_config(const std::string& out) {
  return {{"spec_version", "1"}, {"profile", "couette"}, {"k_set", {1}}, {"outputs", out}, {"tasks", {"scan"}}};
}
int config_error(const nlohmann::json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    return static_cast<int>(e.code());
  }
  return 0;
}
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}
}  // namespace

TEST_CASE("config validation") {
  const int invalid = static_cast<int>(ErrorCode::ConfigInvalid);
  CHECK(config_error(base_config("o")) == 0);
  auto j = base_config("o");
  j["k_set"] = {1, 0};
  CHECK(config_error(j) == invalid);
  j = base_config("o");
  j["eps_schedule"] = {{"eps0", 0.3}, {"levels", 4}};
  CHECK(config_error(j) == invalid);
  j = base_config("o");
  j.erase("spec_version");
  CHECK(config_error(j) == invalid);
  j = base_config("o");
  j["t_samples"] = {0.0, 2.0, 1.0};
  CHECK(config_error(j) == invalid);
  j = base_config("o");
  j["bogus"] = 1;
  CHECK(config_error(j) == invalid);
  j = base_config("o");
  j["profile"] = "sine-perturbed(1.5)";
  CHECK(config_error(j) == invalid);
  j = base_config("o");
  j["omega0"] = {{"kind", "sin_pi_y"}, {"boundary_vanishing", true}};
  CHECK(config_error(j) == 0);
  j["omega0"]["kind"] = "affine_sine";
  CHECK(config_error(j) == invalid);
  j = base_config("o");
  j["t_samples"] = {{"start", 0}, {"stop", 10}, {"count", 11}};
  CHECK(parse_config(j).t_samples[3] == doctest::Approx(3.0));
}

TEST_CASE("initial data modes are conjugate across k") {
  InitialData d;
  d.kind = "polynomial";
  d.values = {0.0, 1.0, -1.0};
  d.amplitude[2] = cplx(1.0, 2.0);
  CHECK(std::abs(d.mode(2)(0.5) - cplx(0.25, 0.5)) < 1e-15);
  CHECK(std::abs(d.mode(-2)(0.5) - cplx(0.25, -0.5)) < 1e-15);
  CHECK(std::abs(d.mode(1)(0.5) - 0.25) < 1e-15);
}

TEST_CASE("sha256 known answer") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("physical fields from a conjugate pair are real") {
  auto prof = make_sine_perturbed(0.1);
  ModeTrajectory a;
  a.k = 2;
  a.times = {0.0, 1.5};
  a.y = {0.2, 0.6};
  a.psi.resize(2, 2);
  a.psi << cplx(1, 2), cplx(0.5, -1), cplx(-0.3, 0.1), cplx(2, 2);
  a.dpsi = a.psi;
  a.omega = 3.0 * a.psi;
  ModeTrajectory b = a;
  b.k = -2;
  b.psi = a.psi.conjugate();
  b.omega = a.omega.conjugate();
  auto pf = assemble_physical(prof, {a, b}, 16);
  CHECK(pf.max_imag < 1e-10);
  CHECK(pf.phi.size() == 2);
  // phi at x = 0, t = 0, y = 0.2 is 2 c0 Re psi
  CHECK(pf.phi[0](0, 0).real() == doctest::Approx(2 * FourierConvention::c0 * 1.0));
  ModeTrajectory c = a;
  c.times = {0.0, 2.0};
  CHECK_THROWS_AS(assemble_physical(prof, {a, c}, 8), Error);
}

TEST_CASE("svg writers") {
  std::string s = svg_loglog({{"a", {1, 10, 100}, {1, 0.01, 1e-4}, false}}, "t", "x", "y");
  CHECK(s.find("<svg") == 0);
  CHECK(s.find("polyline") != std::string::npos);
  RMatrix z(2, 3);
  z << 1, 0.1, 0.01, 1, 1, 1;
  std::string h = svg_heatmap(z, {0, 1, 2}, {0, 1}, "h");
  CHECK(h.find("</svg>") != std::string::npos);
}

TEST_CASE("small end-to-end run is deterministic and fully manifested") {
  fs::path base = fs::temp_directory_path() / "idamp_runner_test";
  fs::remove_all(base);
  auto j = base_config((base / "a").string());
  j["tasks"] = {"evolve-direct"};
  j["t_samples"] = {0.0, 0.5, 1.0};
  j["grid"] = {{"direct_panels", 16}, {"out_panels", 2}};
  j["checks"] = {{"physical_real_tol", 1e-10}};
  auto cfg = parse_config(j);
  auto r1 = run(cfg);
  CHECK(r1.exit_code == 0);
  cfg.outputs = (base / "b").string();
  auto r2 = run(cfg);
  CHECK(r2.exit_code == 0);
  for (const char* f : {"traj_direct_k1.csv", "report.json", "physical.json"})
    CHECK(slurp(base / "a" / f) == slurp(base / "b" / f));
  size_t files = 0;
  for (auto& e : fs::directory_iterator(base / "a")) files += e.path().filename() != "manifest.json";
  CHECK(r1.manifest.size() == files);
  auto rep = report_dir(base / "a");
  CHECK(rep.exit_code == 0);
  // tampering is detected
  std::ofstream(base / "a" / "report.json", std::ios::app) << " ";
  CHECK(report_dir(base / "a").exit_code == 4);
  fs::remove_all(base);
}

TEST_CASE("failing acceptance check gives exit 3") {
  fs::path base = fs::temp_directory_path() / "idamp_runner_fail";
  fs::remove_all(base);
  auto j = base_config(base.string());
  j["tasks"] = {"evolve-direct"};
  j["t_samples"] = {{"start", 0}, {"stop", 20}, {"count", 21}};
  j["fit_window"] = {2.0, 20.0};
  j["grid"] = {{"direct_panels", 16}, {"out_panels", 2}};
  // psi decays, so a growing window cannot pass
  j["checks"] = {{"psi_slope", {5.0, 6.0}}};
  auto r = run(parse_config(j));
  REQUIRE(r.checks.size() == 1);
  CHECK(!r.checks[0].pass);
  CHECK(r.exit_code == 3);
  fs::remove_all(base);
}
