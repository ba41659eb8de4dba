#include <cmath>

#include "doctest.h"
#include "idamp/greens.hpp"
#include "idamp/spectral.hpp"

using namespace idamp;

namespace {
DensityConfig light() {
  DensityConfig c;
  c.out_panels = 4;
  c.out_order = 6;
  c.diag_levels = 1;
  c.edge_levels = 4;
  c.y0_order = 6;
  c.nys_base = 12;
  c.h_min = 1e-5;
  c.eps_checks = 0;
  return c;
}
}  // namespace

TEST_CASE("couette density equals the Plemelj jump") {
  // psi^- - psi^+ = 2 pi i G(y, y0) omega0(y0) when b = y
  auto prof = make_couette();
  auto om = [](double y) { return cplx(std::sin(kPi * y), 0.0); };
  auto d = build_density(prof, 1, om, light());
  GreensKernel g(1);
  double err = 0.0, ref = 0.0;
  for (size_t a = 0; a < d.y0_nodes.size(); a += 7)
    for (size_t j = 0; j < d.y().size(); ++j) {
      cplx want = cplx(0, 2 * kPi) * g.eval(d.y()[j], d.y0_nodes[a]) * om(d.y0_nodes[a]);
      err = std::max(err, std::abs(d.D(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j)) - want));
      ref = std::max(ref, std::abs(want));
    }
  CHECK(err < 1e-4 * ref);
}

TEST_CASE("t = 0 reproduces the elliptic solve") {
  auto prof = make_sine_perturbed(0.1);
  auto om = [](double y) { return cplx(std::sin(kPi * y) * y * (1 - y), 0.0); };
  auto d = build_density(prof, 2, om, light());
  CVector psi0 = evolve_psi_k(d, 0.0);
  auto fine = ChannelGrid::uniform(16, 8);
  auto es = EllipticSolver(fine, 2);
  CVector ref = es.solve_at(fine.sample(om), d.y()).psi;
  CHECK(sup_norm(psi0 - ref) < 1e-3 * sup_norm(ref));
}

TEST_CASE("zero data give a zero density") {
  auto prof = make_couette();
  auto d = build_density(prof, 3, [](double) { return cplx(0.0, 0.0); }, light());
  CHECK(d.D.cwiseAbs().maxCoeff() == 0.0);
  CHECK(sup_norm(evolve_psi_k(d, 5.0)) == 0.0);
}

TEST_CASE("trajectory shape, conjugation and csv") {
  auto prof = make_couette();
  auto d = build_density(prof, 1, [](double y) { return cplx(std::sin(kPi * y), 0.0); }, light());
  auto tr = spectral_trajectory(d, {0.0, 1.0, 2.0});
  CHECK(tr.psi.rows() == 3);
  CHECK(tr.psi.cols() == static_cast<Eigen::Index>(tr.y.size()));
  auto cj = conjugate_trajectory(tr);
  CHECK(cj.k == -1);
  CHECK((cj.psi - tr.psi.conjugate()).cwiseAbs().maxCoeff() == 0.0);
  std::string csv = to_csv(tr);
  CHECK(csv.rfind("k,t,y,re_psi,im_psi", 0) == 0);
}

TEST_CASE("couette evolution matches the closed form") {
  // b'' = 0: omega_k(t) = e^{-ikyt} omega0, psi = elliptic solve of that
  auto prof = make_couette();
  auto om = [](double y) { return cplx(std::sin(kPi * y), 0.0); };
  auto d = build_density(prof, 1, om, light());
  const double t = 10.0;
  auto fine = ChannelGrid::uniform(64, 8);
  EllipticSolver es(fine, 1);
  CVector rhs = fine.sample([&](double y) { return std::polar(1.0, -y * t) * om(y); });
  CVector ref = es.solve_at(rhs, d.y()).psi;
  CHECK(sup_norm(evolve_psi_k(d, t) - ref) < 1e-4 * sup_norm(ref));
  CVector dref = es.solve_at(rhs, d.y()).dpsi;
  CHECK(sup_norm(evolve_dy_psi_k(d, t) - dref) < 1e-3 * sup_norm(dref));
}
