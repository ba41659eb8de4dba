#include <cmath>

#include "doctest.h"
#include "idamp/norms.hpp"

using namespace idamp;

TEST_CASE("Y norm of constants and of y") {
  auto prof = make_couette();
  SpectralPoint pt{1, 0.5, 0.1, +1};
  auto grid = resolvent_grid(prof, pt);
  CVector one = CVector::Ones(grid.size());
  CHECK(y_norm(prof, pt, grid, one, 1).value == doctest::Approx(1.0).epsilon(1e-12));
  CVector y = grid.sample([](double z) { return cplx(z, 0.0); });
  // 1 + sup |1/(log(y - 0.5 + 0.1 i) - 1/theta)^2| evaluated on the grid
  double w = 0.0;
  for (double z : grid.nodes()) w = std::max(w, 1.0 / std::norm(std::log(cplx(z - 0.5, 0.1)) - 1.0 / prof.theta()));
  double sup = 0.0;
  for (double z : grid.nodes()) sup = std::max(sup, z);
  CHECK(y_norm(prof, pt, grid, y, 1).value == doctest::Approx(sup + w).epsilon(1e-10));
  CHECK(y_norm(prof, pt, grid, CVector(2.0 * y), 1).value == doctest::Approx(2 * y_norm(prof, pt, grid, y, 1).value));
  CHECK_THROWS_AS(y_norm(prof, pt, grid, y, 0), Error);
}

TEST_CASE("Z upper bound with the trivial witness") {
  auto prof = make_sine_perturbed(0.1);
  SpectralPoint pt{3, 0.3, 0.02, +1};
  auto grid = resolvent_grid(prof, pt);
  CVector f = grid.sample([](double z) { return cplx(std::sin(3 * z), 0.0); });
  CVector df = grid.sample([](double z) { return cplx(3 * std::cos(3 * z), 0.0); });
  CVector zero = CVector::Zero(grid.size());
  auto z = z_norm_upper(prof, pt, grid, f, df, zero, df, 1);
  double expect = sup_norm(f) + y_norm(prof, pt, grid, df, 2).value / 3.0;
  CHECK(z.value == doctest::Approx(expect).epsilon(1e-12));
  CHECK(z.value >= z.sup_part);
  auto z2 = z_norm_upper(prof, pt, grid, CVector(2.0 * f), CVector(2.0 * df), zero, CVector(2.0 * df), 1);
  CHECK(z2.value == doctest::Approx(2 * z.value));
  try {
    z_norm_upper(prof, pt, grid, f, df, zero, CVector(1.001 * df), 1);
    FAIL("expected WitnessMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WitnessMismatch);
  }
}

TEST_CASE("witness for T applied to a constant") {
  // (T1)' = g L + h with g = -1/b' and h read off the integration by parts
  auto prof = make_sine_perturbed(0.1);
  SpectralPoint pt{2, 0.6, 0.01, +1};
  auto grid = resolvent_grid(prof, pt);
  ResolventOperator op(prof, pt.k, LogWeight(prof, pt), grid, false, false);
  CVector one = CVector::Ones(grid.size());
  CVector Tf = op.T_rows(grid.nodes()) * one, dTf = op.dyT_rows(grid.nodes()) * one;
  LogWeight L(prof, pt);
  CVector g(grid.size()), h(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    g[i] = -1.0 / prof.db(grid.node(i));
    h[i] = dTf[i] - g[i] * L(grid.node(i));
  }
  auto z = z_norm_upper(prof, pt, grid, Tf, dTf, g, h, 1);
  CHECK(std::isfinite(z.value));
  CHECK(z.g.size() == grid.size());
}

TEST_CASE("grid refinement changes a Y norm by under 2%") {
  auto prof = make_sine_perturbed(0.1);
  SpectralPoint pt{4, 0.4, 0.01, +1};
  auto fn = [](double z) { return cplx(std::cos(5 * z), z * z); };
  auto g1 = resolvent_grid(prof, pt, 16), g2 = resolvent_grid(prof, pt, 32);
  double a = y_norm(prof, pt, g1, g1.sample(fn), 1).value, b = y_norm(prof, pt, g2, g2.sample(fn), 1).value;
  CHECK(std::abs(a - b) < 0.02 * b);
}

TEST_CASE("lemma sweep is finite and does not blow up") {
  auto prof = make_couette();
  LemmaSweepConfig c;
  c.ks = {1, 4, 9};
  c.samples = 4;
  c.y0s = {0.0, 0.5};
  auto reps = lemma_sweep(prof, {LemmaTag::bX1, LemmaTag::X11, LemmaTag::bX17, LemmaTag::bX17Corollary}, c);
  REQUIRE(reps.size() == 4);
  for (auto& r : reps) {
    CHECK(r.finite);
    CHECK(!r.monotone_blowup);
    CHECK(r.max_ratio > 0.0);
    CHECK(r.max_by_eps.size() == 4);
    // beyond k = 8 the measured ratio does not grow with k
    CHECK(r.max_by_k.at(9) <= r.max_by_k.at(4));
  }
  auto j = nlohmann::json::parse(to_json(reps));
  CHECK(j[3]["lemma"] == "bX17_corollary");
}
