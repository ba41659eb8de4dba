#include <cmath>
#include <random>

#include "doctest.h"
#include "idamp/greens.hpp"

using namespace idamp;

namespace {
// closed form sinh(k min) sinh(k(1-max)) / (k sinh k) for moderate k
double G_ref(double k, double y, double z) {
  double a = std::min(y, z), b = std::max(y, z);
  return std::sinh(k * a) * std::sinh(k * (1 - b)) / (k * std::sinh(k));
}
double Gyz_ref(double k, double y, double z) {
  // off-diagonal mixed derivative
  if (y < z) return -k * std::cosh(k * y) * std::cosh(k * (1 - z)) / std::sinh(k);
  return -k * std::cosh(k * z) * std::cosh(k * (1 - y)) / std::sinh(k);
}
}  // namespace

TEST_CASE("Green's function matches the closed form") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k : {1, -3, 7, 20}) {
    GreensKernel g(k);
    for (int i = 0; i < 20; ++i) {
      double y = u(rng), z = u(rng);
      CHECK(std::abs(g.eval(y, z) - G_ref(std::abs(k), y, z)) < 1e-13);
      if (std::abs(y - z) > 1e-6)
        CHECK(std::abs(g.eval_prime(y, z) - Gyz_ref(std::abs(k), y, z)) < 1e-10 * std::max(1.0, std::abs(k) * 1.0));
    }
  }
}

TEST_CASE("symmetry, Dirichlet and derivative jump") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k : {1, 2, -5, 32, -32}) {
    GreensKernel g(k);
    for (int i = 0; i < 30; ++i) {
      double y = u(rng), z = u(rng);
      CHECK(std::abs(g.eval(y, z) - g.eval(z, y)) < 1e-14);
      CHECK(g.eval(0.0, z) == doctest::Approx(0.0));
      CHECK(std::abs(g.eval(1.0, z)) < 1e-14);
      auto lo = g.eval_all(z, z);  // branch y <= z
      double above = g.eval_dy(z + 1e-13 > 1 ? z : z + 1e-13, z);
      if (z + 1e-13 <= 1) CHECK(std::abs(above - lo.Gy - (-1.0)) < 1e-10 * std::max(1.0, std::abs(k) / 4.0));
    }
  }
}

TEST_CASE("large k uses a stable form") {
  GreensKernel g(400);
  double v = g.eval(0.5, 0.5);
  // sinh^2(k/2)/(k sinh k) -> 1/(2k)
  CHECK(v == doctest::Approx(1.0 / 800.0).epsilon(1e-10));
  CHECK(std::isfinite(g.eval_prime(0.2, 0.7)));
}

TEST_CASE("elliptic solve inverts the operator") {
  auto grid = ChannelGrid::uniform(16, 8);
  for (int k : {1, 4, 15}) {
    double lam = kPi * kPi + k * k;
    CVector rhs = grid.sample([&](double y) { return cplx(-lam * std::sin(kPi * y), 0.0); });
    CVector exact = grid.sample([&](double y) { return cplx(std::sin(kPi * y), 0.0); });
    CHECK(sup_norm(elliptic_solve(k, rhs, grid) - exact) < 1e-12 * lam);
    CHECK(sup_norm(elliptic_solve(k, rhs, grid, EllipticMethod::Banded) - exact) < 1e-10);
    CHECK(sup_norm(apply_laplacian(k, exact, grid) - rhs) < 1e-8 * lam);
  }
}

TEST_CASE("operator norm bound") {
  for (int k : {1, 8}) {
    GreensKernel g(k);
    // sup_y int G dz = (1 - 1/cosh(k/2)) / k^2 at y = 1/2
    double ref = (1 - 1 / std::cosh(k / 2.0)) / (k * k);
    CHECK(g.op_norm() == doctest::Approx(ref).epsilon(1e-6));
  }
}
