// Exercises the C interface only.
#include <cmath>
#include <cstdio>
#include <cstring>
#include <vector>

#include "idamp/idamp.h"

static int failures = 0;
#define EXPECT(c)                                              \
  do {                                                         \
    if (!(c)) {                                                \
      std::printf("FAILED %s:%d  %s\n", __FILE__, __LINE__, #c); \
      ++failures;                                              \
    }                                                          \
  } while (0)

static void sine(double y, void*, double* re, double* im) {
  *re = std::sin(3.14159265358979323846 * y);
  *im = 0.0;
}

int main() {
  idamp_profile* p = nullptr;
  EXPECT(idamp_profile_create("sine-perturbed(0.1)", &p) == 0);
  double v[3];
  EXPECT(idamp_profile_eval(p, 0.25, v) == 0);
  EXPECT(std::abs(v[1] - 1.0) < 1e-12);
  double th = 0;
  EXPECT(idamp_profile_theta(p, &th) == 0 && th > 0 && th < 0.1);
  EXPECT(idamp_profile_eval(p, 1.5, v) != 0);
  EXPECT(std::strlen(idamp_last_error()) > 0);

  idamp_profile* bad = nullptr;
  int rc = idamp_profile_create("sine-perturbed(1.5)", &bad);
  EXPECT(rc != 0 && bad == nullptr);
  EXPECT(std::strcmp(idamp_error_name(rc), "NonMonotone") == 0);
  EXPECT(idamp_profile_create("{\"kind\": \"couette\"}", &bad) == 0);

  double g = 0;
  EXPECT(idamp_green(1, 0.3, 0.3, &g) == 0);
  EXPECT(std::abs(g - std::sinh(0.3) * std::sinh(0.7) / std::sinh(1.0)) < 1e-14);
  EXPECT(idamp_green(0, 0.3, 0.3, &g) != 0);
  EXPECT(idamp_green(1, 0.3, 0.3, nullptr) != 0);

  double s = 0;
  EXPECT(idamp_sigma_min(bad, 2, 0.5, 0.1, 64, &s) == 0 && s == 1.0);

  idamp_density* d = nullptr;
  EXPECT(idamp_density_create(bad, 1, sine, nullptr, &d) == 0);
  size_t n = 0;
  EXPECT(idamp_density_size(d, &n) == 0 && n > 0);
  std::vector<double> y(n), re(n), im(n), dre(n), dim(n);
  EXPECT(idamp_density_y(d, y.data()) == 0);
  EXPECT(idamp_density_psi(d, 4.0, re.data(), im.data()) == 0);
  EXPECT(idamp_direct_psi(bad, 1, sine, nullptr, 4.0, n, y.data(), dre.data(), dim.data()) == 0);
  double err = 0, ref = 0;
  for (size_t i = 0; i < n; ++i) {
    err = std::fmax(err, std::hypot(re[i] - dre[i], im[i] - dim[i]));
    ref = std::fmax(ref, std::hypot(dre[i], dim[i]));
  }
  EXPECT(err < 1e-4 * ref);
  EXPECT(idamp_density_psi(d, -1.0, re.data(), im.data()) != 0);
  idamp_density_destroy(d);

  size_t need = 0;
  EXPECT(idamp_lemma_sweep(bad, 2, 2, nullptr, 0, &need) == 0 && need > 10);
  std::vector<char> buf(need);
  EXPECT(idamp_lemma_sweep(bad, 2, 2, buf.data(), buf.size(), &need) == 0);
  EXPECT(std::strstr(buf.data(), "bX17_corollary") != nullptr);

  int code = -1;
  EXPECT(idamp_run("/nonexistent/config.json", nullptr, &code) == 0 && code == 2);

  idamp_profile_destroy(bad);
  idamp_profile_destroy(p);
  std::printf("%s (%d failures)\n", failures ? "capi_test FAILED" : "capi_test passed", failures);
  return failures ? 1 : 0;
}
