#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "idamp/resolvent.hpp"

using namespace idamp;

namespace {

// int_0^1 G(y,z) w(z) / (z - y0 + i eps) dz by adaptive Gauss-Kronrod,
// split at y and around y0
cplx couette_quadrature(int k, double y, double y0, double eps, const std::function<double(double)>& w) {
  GreensKernel g(k);
  std::vector<double> cuts{0.0, 1.0, y, y0};
  for (double d : {-4 * eps, -eps, eps, 4 * eps})
    if (y0 + d > 0 && y0 + d < 1) cuts.push_back(y0 + d);
  std::sort(cuts.begin(), cuts.end());
  cplx s = 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    double a = cuts[i], b = cuts[i + 1];
    if (b - a < 1e-15) continue;
    auto re = [&](double z) { return (g.eval(y, z) * w(z) / cplx(z - y0, eps)).real(); };
    auto im = [&](double z) { return (g.eval(y, z) * w(z) / cplx(z - y0, eps)).imag(); };
    s += cplx(GK::integrate(re, a, b, 12, 1e-13), GK::integrate(im, a, b, 12, 1e-13));
  }
  return s;
}

}  // namespace

TEST_CASE("couette solve_psi equals direct quadrature") {
  auto prof = make_couette();
  auto w = [](double z) { return std::sin(kPi * z) + 0.5 * z; };
  for (double eps : {1e-1, 1e-2}) {
    SpectralPoint pt{2, 0.37, eps, +1};
    auto grid = resolvent_grid_total(prof, pt, 512);
    CVector om = grid.sample([&](double z) { return cplx(w(z), 0.0); });
    auto sol = solve_psi(prof, pt, om, grid);
    double err = 0.0, ref = 0.0;
    for (int i = 0; i < grid.size(); i += 37) {
      cplx q = couette_quadrature(pt.k, grid.node(i), pt.y0, eps, w);
      err = std::max(err, std::abs(sol.psi[i] - q));
      ref = std::max(ref, std::abs(q));
    }
    CHECK(err / ref < 1e-8);
  }
}

TEST_CASE("direct pole quadrature agrees with the log form") {
  auto prof = make_sine_perturbed(0.1);
  SpectralPoint pt{3, 0.6, 0.05, +1};
  auto grid = resolvent_grid(prof, pt);
  CVector f = grid.sample([](double z) { return cplx(std::cos(2 * z), z); });
  CVector a = apply_T(prof, pt, f, grid), b = apply_T_direct(prof, pt, f, grid);
  CHECK(sup_norm(a - b) / sup_norm(a) < 1e-8);
}

TEST_CASE("Nystrom and collocation backends agree") {
  auto prof = make_sine_perturbed(0.1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int i = 0; i < 4; ++i) {
    SpectralPoint pt{1 + i * 3, u(rng), 1e-2, +1};
    auto grid = resolvent_grid(prof, pt);
    CVector om = grid.sample([](double z) { return cplx(std::sin(kPi * z) * (1 + z), 0.0); });
    auto a = solve_psi(prof, pt, om, grid);
    auto b = solve_psi_ode(prof, pt, om, grid);
    CHECK(sup_norm(a.psi - b.psi) < 1e-6 * std::max(1.0, sup_norm(a.psi)));
    CHECK(a.residual < 1e-10);
  }
}

TEST_CASE("opposite approach gives the conjugate for real data") {
  auto prof = make_sine_perturbed(0.1);
  SpectralPoint p{2, 0.4, 1e-2, +1}, m{2, 0.4, 1e-2, -1};
  auto grid = resolvent_grid(prof, p);
  CVector om = grid.sample([](double z) { return cplx(z * (1 - z) + 0.2, 0.0); });
  auto a = solve_psi(prof, p, om, grid), b = solve_psi(prof, m, om, grid);
  CHECK(sup_norm(a.psi.conjugate() - b.psi) < 1e-12 * sup_norm(a.psi));
}

TEST_CASE("boundary value at eps = 0 is the limit of the eps family") {
  auto prof = make_sine_perturbed(0.1);
  const double y0 = 0.45;
  auto om_fn = [](double z) { return cplx(std::sin(kPi * z), 0.0); };
  SpectralPoint p0{1, y0, 0.0, +1};
  auto g0 = resolvent_grid(prof, p0);
  auto s0 = solve_psi(prof, p0, g0.sample(om_fn), g0);
  std::vector<double> ys{0.1, 0.3, 0.7, 0.9};
  CVector v0 = g0.interpolate(s0.psi, ys);
  double prev = 1e300;
  for (double eps : {4e-3, 1e-3, 2.5e-4}) {
    SpectralPoint pe{1, y0, eps, +1};
    auto ge = resolvent_grid(prof, pe);
    auto se = solve_psi(prof, pe, ge.sample(om_fn), ge);
    double d = sup_norm(ge.interpolate(se.psi, ys) - v0);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 5e-3 * sup_norm(v0));
}

TEST_CASE("grading is enforced") {
  auto prof = make_couette();
  SpectralPoint pt{1, 0.5, 1e-4, +1};
  auto coarse = ChannelGrid::uniform(8, 8);
  CVector f = CVector::Ones(coarse.size());
  try {
    apply_T(prof, pt, f, coarse);
    FAIL("expected GradingMissing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GradingMissing);
  }
  SpectralPoint bad{0, 0.5, 1e-2, +1};
  CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("eps_limit extrapolates a linear family") {
  std::vector<CVector> fam;
  for (int j = 0; j < 5; ++j) {
    double e = 0.1 * std::ldexp(1.0, -j);
    CVector v(2);
    v << cplx(1.0 + e, 0.0), cplx(2.0 - 3 * e, e);
    fam.push_back(v);
  }
  auto lim = eps_limit(fam, 0.1);
  CHECK(std::abs(lim.value[0] - 1.0) < 1e-12);
  CHECK(std::abs(lim.value[1] - 2.0) < 1e-12);
  CHECK(lim.report.flag == "converged");
  std::vector<CVector> grow;
  for (int j = 0; j < 5; ++j) grow.push_back(CVector::Constant(1, cplx(j * j, 0)));
  CHECK_THROWS_AS(eps_limit(grow, 0.1), Error);
}

TEST_CASE("boundary functions solve their equations") {
  auto prof = make_sine_perturbed(0.1);
  SpectralPoint pt{2, 0.3, 1e-2, +1};
  auto grid = resolvent_grid(prof, pt);
  auto bf = solve_boundary_Phi(prof, pt, grid);
  CHECK(bf.residual < 1e-10);
  // vanishing at the walls
  CHECK(std::abs(grid.interpolate(bf.phi0, 1.0)) < 1e-8);
}
