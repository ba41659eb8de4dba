#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "doctest.h"
#include "idamp/asymptotics.hpp"
#include "idamp/greens.hpp"

using namespace idamp;

TEST_CASE("E1 against the real special function and the defining integral") {
  for (double x : {0.05, 0.7, 1.5, 3.0, 12.0})
    CHECK(std::abs(expint_e1(cplx(x, 0.0)) - boost::math::expint(1, x)) < 1e-13 * boost::math::expint(1, x) + 1e-300);
  boost::math::quadrature::exp_sinh<double> es;
  for (cplx z : {cplx(1.0, 1.0), cplx(0.5, 0.5), cplx(4.0, 3.0), cplx(0.3, 2.0)}) {
    double re = es.integrate([&](double t) { return (std::exp(-z * t) / t).real(); }, 1.0,
                             std::numeric_limits<double>::infinity());
    double im = es.integrate([&](double t) { return (std::exp(-z * t) / t).imag(); }, 1.0,
                             std::numeric_limits<double>::infinity());
    CHECK(std::abs(expint_e1(z) - cplx(re, im)) < 1e-10 * std::abs(cplx(re, im)));
    CHECK(std::abs(expint_e1(std::conj(z)) - std::conj(expint_e1(z))) < 1e-14);
  }
}

TEST_CASE("decay fit recovers an exact power law") {
  std::vector<double> t, v;
  for (int i = 0; i < 20; ++i) {
    t.push_back(20.0 * std::pow(10.0, i / 19.0));
    v.push_back(3.0 * std::pow(t.back(), -2.0));
  }
  auto f = fit_decay(t, v, 20, 200, "psi");
  CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.samples == 20);
  std::vector<double> noisy = v;
  for (size_t i = 0; i < noisy.size(); ++i) noisy[i] *= (i % 2 ? 20.0 : 0.05);
  CHECK_THROWS_AS(fit_decay(t, noisy, 20, 200, "psi"), Error);
  CHECK_THROWS_AS(fit_decay({20, 30}, {1, 0.5}, 20, 200, "psi"), Error);
}

TEST_CASE("Hk3 norm of sin(pi y)") {
  for (int k : {1, 3}) {
    double ref = 0.0;
    for (int a = 0; a <= 3; ++a) ref += std::pow(k, 3 - a) * std::pow(kPi, a) / std::sqrt(2.0);
    CHECK(hk3_norm(k, [](double y) { return cplx(std::sin(kPi * y), 0.0); }) == doctest::Approx(ref).epsilon(1e-8));  // third derivative on the grid
  }
}

TEST_CASE("couette main term with wall lines against the exact evolution") {
  // b = y: psi_k(t) = elliptic solve of e^{-ikyt} omega0
  auto prof = make_couette();
  auto om = [](double y) { return cplx(1.0 + y, 0.0); };
  const int k = 1;
  std::vector<double> ys;
  for (int i = 1; i < 16; ++i) ys.push_back(i / 16.0);
  auto ap = compute_phis(prof, k, om, ys);
  auto fine = ChannelGrid::uniform(128, 10);
  EllipticSolver es(fine, k);
  auto rel = [&](double t, bool lines) {
    CVector rhs = fine.sample([&](double y) { return std::polar(1.0, -k * y * t) * om(y); });
    CVector ex = es.solve_at(rhs, ys).psi;
    MainTermOptions o;
    o.boundary_lines = lines;
    return sup_norm(main_term_psi(ap, t, o) - ex) / sup_norm(ex);
  };
  double r50 = rel(50, true), r200 = rel(200, true);
  CHECK(r200 < r50);
  CHECK(r200 < 0.05);
  CHECK(rel(200, false) > 0.5);
}

TEST_CASE("wall amplitudes satisfy the eps = 0 identity") {
  auto prof = make_sine_perturbed(0.1);
  std::vector<double> ys{0.2, 0.5, 0.8};
  auto ap = compute_phis(prof, 1, [](double y) { return cplx(1.0 + y, 0.0); }, ys);
  for (Eigen::Index j = 0; j < 3; ++j) {
    cplx id3 = cplx(0, kPi) * ap.db0 * ap.omega0_at0 * ap.phi5[j];
    cplx id4 = cplx(0, -kPi) * ap.db1 * ap.omega0_at1 * ap.phi6[j];
    CHECK(std::abs(ap.phi3[j] - id3) < 1e-12 * std::max(1.0, std::abs(id3)));
    CHECK(std::abs(ap.phi4[j] - id4) < 1e-12 * std::max(1.0, std::abs(id4)));
  }
  // independent paths for phi2 agree
  CHECK(ap.phi2_path_diff < 1e-8);
}

TEST_CASE("leading field is real for a conjugate pair") {
  auto prof = make_sine_perturbed(0.1);
  std::vector<double> ys{0.25, 0.5, 0.75};
  auto om = [](double y) { return cplx(std::sin(kPi * y), 0.0); };
  std::vector<AsymptoticProfile> aps{compute_phis(prof, 1, om, ys), compute_phis(prof, -1, om, ys)};
  CMatrix P = assemble_Psi(aps, {0.0, 1.0, 2.5});
  CHECK(P.imag().cwiseAbs().maxCoeff() < 1e-10 * P.cwiseAbs().maxCoeff());
}

TEST_CASE("decreasing profiles are refused") {
  auto prof = make_polynomial({2.0, -1.0});
  CHECK_THROWS_AS(compute_phis(prof, 1, [](double) { return cplx(1.0, 0.0); }, {0.5}), Error);
}
