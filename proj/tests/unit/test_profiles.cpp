#include <cmath>

#include "doctest.h"
#include "idamp/profiles.hpp"

using namespace idamp;

TEST_CASE("couette is certified with capped theta") {
  auto p = make_profile(std::string("couette"));
  CHECK(p.b(0.3) == doctest::Approx(0.3));
  CHECK(p.db(0.7) == 1.0);
  CHECK(p.d2b(0.7) == 0.0);
  CHECK(p.sign_aleph() == 1);
  CHECK(p.shear_free());
  // |b'| = 1 so theta = min(100, 1/100)
  CHECK(p.theta() == doctest::Approx(0.01).epsilon(1e-14));
}

TEST_CASE("sine-perturbed slope extrema match the closed form") {
  auto p = make_sine_perturbed(0.1);
  // b' = 1 + 0.1 cos(2 pi y) has extrema 0.9 and 1.1
  CHECK(p.min_abs_db() == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(p.max_abs_db() == doctest::Approx(1.1).epsilon(1e-6));
  CHECK(p.b(0.25) == doctest::Approx(0.25 + 0.1 / (2 * kPi)).epsilon(1e-14));
  CHECK(p.d2b(0.25) == doctest::Approx(-0.2 * kPi).epsilon(1e-12));
  // theta/100 <= |b'| <= 1/(100 theta)
  CHECK(p.theta() / 100 <= p.min_abs_db());
  CHECK(p.max_abs_db() <= 1.0 / (100 * p.theta()));
}

TEST_CASE("decreasing profile has negative sign") {
  auto p = make_polynomial({2.0, -1.0});
  CHECK(p.sign_aleph() == -1);
  CHECK(p.b(1.0) == doctest::Approx(1.0));
}

TEST_CASE("non-monotone and inconsistent profiles are rejected") {
  try {
    make_polynomial({0.0, 1.0, -2.0});  // b' = 1 - 4y changes sign
    FAIL("expected NonMonotone");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonMonotone);
  }
  CHECK_THROWS_AS(make_sine_perturbed(1.5), Error);
}

TEST_CASE("descriptor forms agree") {
  auto a = make_profile(std::string("sine-perturbed(0.1)"));
  auto b = make_profile(nlohmann::json{{"kind", "sine-perturbed"}, {"a", 0.1}});
  for (double y : {0.0, 0.13, 0.5, 0.91, 1.0}) {
    CHECK(a.b(y) == b.b(y));
    CHECK(a.d2b(y) == b.d2b(y));
  }
  auto t = make_profile(std::string("tanh-monotone(2)"));
  CHECK(t.sign_aleph() == 1);
}

TEST_CASE("tabulated profile reproduces a smooth b") {
  std::vector<double> s;
  for (int i = 0; i <= 64; ++i) {
    double y = i / 64.0;
    s.push_back(y + 0.05 * y * y);
  }
  auto p = make_tabulated(s);
  CHECK(p.b(0.37) == doctest::Approx(0.37 + 0.05 * 0.37 * 0.37).epsilon(1e-8));
  CHECK(p.db(0.37) == doctest::Approx(1 + 0.1 * 0.37).epsilon(1e-6));
}

TEST_CASE("b_inverse round trip") {
  auto p = make_sine_perturbed(0.1);
  for (double y : {0.0, 0.2, 0.55, 1.0}) CHECK(b_inverse(p, p.b(y)) == doctest::Approx(y).epsilon(1e-13));
  CHECK_THROWS_AS(b_inverse(p, 2.0), Error);
}

TEST_CASE("Fourier convention reconstructs the field") {
  // omega(x) = cos 2x + 0.3 sin x, modes by the trapezoid rule (exact for
  // trigonometric polynomials), then rebuilt with c0
  const int N = 64;
  auto om = [](double x) { return std::cos(2 * x) + 0.3 * std::sin(x); };
  std::vector<std::complex<double>> modes;
  for (int k = -8; k <= 8; ++k) {
    std::complex<double> s = 0;
    for (int j = 0; j < N; ++j) {
      double x = 2 * kPi * j / N;
      s += om(x) * std::polar(1.0, -k * x) * (2 * kPi / N);
    }
    modes.push_back(s);
  }
  for (double x : {0.1, 1.7, 4.0}) {
    std::complex<double> r = 0;
    for (int k = -8; k <= 8; ++k) r += FourierConvention::c0 * modes[static_cast<size_t>(k + 8)] * std::polar(1.0, k * x);
    CHECK(std::abs(r - om(x)) < 1e-12);
  }
}
