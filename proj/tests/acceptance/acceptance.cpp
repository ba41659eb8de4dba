// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "idamp/asymptotics.hpp"
#include "idamp/direct.hpp"
#include "idamp/greens.hpp"
#include "idamp/norms.hpp"
#include "idamp/resolvent.hpp"
#include "idamp/runner.hpp"
#include "idamp/spectral.hpp"
#include "idamp/spectrum.hpp"

using namespace idamp;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double secs(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string f6(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

int failures = 0;

// budget < 0: no runtime limit. extra: seconds of shared work counted in.
void report(int id, const std::string& name, double budget, double extra, const std::function<Outcome()>& body) {
  auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  double t = secs(t0) + extra;
  bool in_time = budget < 0 || t <= budget;
  bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::printf("[%s] %2d %-28s %8.1f s%s  %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), t,
              in_time ? "" : " (over budget)", o.detail.c_str());
  std::fflush(stdout);
}

ModeFn data_a() {
  return [](double y) { return cplx(std::sin(kPi * y) * y * (1 - y), 0.0); };
}
ModeFn data_b() {
  return [](double y) { return cplx(1.0 + y + 0.5 * std::sin(3 * y), 0.0); };
}

DensityConfig light_density() {
  DensityConfig c;
  c.out_panels = 6;  // same output grid as the default density
  c.out_order = 8;
  c.diag_levels = 1;
  c.edge_levels = 4;
  c.y0_order = 6;
  c.eps_checks = 0;
  return c;
}

cplx couette_quadrature(int k, double y, double y0, double eps, const std::function<double(double)>& w) {
  GreensKernel g(k);
  std::vector<double> cuts{0.0, 1.0, y, y0};
  for (double d : {-4 * eps, -eps, eps, 4 * eps})
    if (y0 + d > 0 && y0 + d < 1) cuts.push_back(y0 + d);
  std::sort(cuts.begin(), cuts.end());
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  cplx s = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    double a = cuts[i], b = cuts[i + 1];
    if (b - a < 1e-15) continue;
    auto re = [&](double z) { return (g.eval(y, z) * w(z) / cplx(z - y0, eps)).real(); };
    auto im = [&](double z) { return (g.eval(y, z) * w(z) / cplx(z - y0, eps)).imag(); };
    s += cplx(GK::integrate(re, a, b, 12, 1e-13), GK::integrate(im, a, b, 12, 1e-13));
  }
  return s;
}

std::vector<double> range(double a, double b, double h) {
  std::vector<double> v;
  for (int i = 0; a + i * h <= b + 1e-9; ++i) v.push_back(a + i * h);
  return v;
}

// psi-only trajectory (enough for the scattering integral)
ModeTrajectory psi_trajectory(const SpectralDensity& d, const std::vector<double>& times) {
  ModeTrajectory tr;
  tr.k = d.k;
  tr.times = times;
  tr.y = d.y();
  tr.psi.resize(static_cast<Eigen::Index>(times.size()), static_cast<Eigen::Index>(tr.y.size()));
  for (size_t i = 0; i < times.size(); ++i) tr.psi.row(static_cast<Eigen::Index>(i)) = evolve_psi_k(d, times[i]).transpose();
  tr.dpsi = tr.omega = tr.psi;
  return tr;
}

}  // namespace

int main() {
  std::printf("acceptance run (threads: %s)\n", std::getenv("ARTIFACT_THREADS") ? std::getenv("ARTIFACT_THREADS") : "default");
  const auto sine = make_sine_perturbed(0.1);
  const auto couette = make_couette();

  report(1, "Green identities", 10, 0, [] {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_int_distribution<int> kd(1, 32);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      int k = kd(rng) * (i % 2 ? -1 : 1);
      double y = u(rng), z = u(rng);
      GreensKernel g(k);
      const double ka = std::abs(k);
      worst = std::max(worst, std::abs(g.eval(y, z) - g.eval(z, y)));
      worst = std::max(worst, std::abs(g.eval(0.0, z)) + std::abs(g.eval(1.0, z)));
      // dG/dy jumps by -1 across y = z: the branch y > z is read through symmetry
      auto d = g.eval_all(z, z);
      worst = std::max(worst, std::abs((d.Gz - d.Gy) + 1.0));
      // mixed derivative off the diagonal against the closed form
      if (std::abs(y - z) > 1e-3) {
        double lo = std::min(y, z), hi = std::max(y, z);
        double ref = -ka * std::cosh(ka * lo) * std::cosh(ka * (1 - hi)) / std::sinh(ka);
        worst = std::max(worst, std::abs(g.eval_prime(y, z) - ref) / std::max(1.0, std::abs(ref)));
      }
    }
    return Outcome{worst <= 1e-10, "max defect " + f6(worst)};
  });

  report(2, "Couette closed form", 30, 0, [&] {
    auto w = [](double z) { return std::sin(kPi * z) + 0.5 * z; };
    double worst = 0.0;
    for (double eps : {1e-1, 1e-2})
      for (auto [k, y0] : std::vector<std::pair<int, double>>{{1, 0.37}, {5, 0.81}}) {
        SpectralPoint pt{k, y0, eps, +1};
        auto grid = resolvent_grid_total(couette, pt, 512);
        auto sol = solve_psi(couette, pt, grid.sample([&](double z) { return cplx(w(z), 0.0); }), grid);
        double err = 0.0, ref = 0.0;
        for (int i = 0; i < grid.size(); i += 23) {
          cplx q = couette_quadrature(k, grid.node(i), y0, eps, w);
          err = std::max(err, std::abs(sol.psi[i] - q));
          ref = std::max(ref, std::abs(q));
        }
        worst = std::max(worst, err / ref);
      }
    return Outcome{worst <= 1e-8, "max relative error " + f6(worst)};
  });

  report(3, "Nystrom vs ODE backend", 120, 0, [&] {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_int_distribution<int> kd(1, 16);
    double worst = 0.0, worst_rel = 0.0;
    for (int i = 0; i < 20; ++i) {
      SpectralPoint pt{kd(rng), u(rng), 1e-2, +1};
      auto grid = resolvent_grid(sine, pt);
      CVector om = grid.sample([](double z) { return cplx(std::cos(2 * z) + z, 0.0); });
      auto a = solve_psi(sine, pt, om, grid), b = solve_psi_ode(sine, pt, om, grid);
      double d = sup_norm(a.psi - b.psi);
      worst = std::max(worst, d);
      worst_rel = std::max(worst_rel, d / sup_norm(a.psi));
    }
    return Outcome{worst <= 1e-6, "max sup difference " + f6(worst) + " (relative " + f6(worst_rel) + ")"};
  });

  report(4, "limiting absorption", 300, 0, [&] {
    bool ok = true;
    std::string d;
    double worst_eps = 0.0, worst_n = 0.0, min_delta = 1e300;
    for (int k = 1; k <= 8; ++k) {
      ScanConfig lo, hi;
      lo.delta_n = 256;
      hi.delta_n = 512;
      SpectrumReport rl, rh;
      measure_delta(sine, k, lo, rl);
      measure_delta(sine, k, hi, rh);
      min_delta = std::min(min_delta, std::min(rl.delta_hat, rh.delta_hat));
      for (const auto* r : {&rl, &rh})
        for (size_t j = 1; j < r->delta_by_eps.size(); ++j)
          worst_eps = std::max(worst_eps, std::abs(r->delta_by_eps[j] - r->delta_by_eps[j - 1]) / r->delta_by_eps[j - 1]);
      worst_n = std::max(worst_n, std::abs(rl.delta_hat - rh.delta_hat) / rh.delta_hat);
    }
    SpectrumReport rc;
    measure_delta(couette, 1, ScanConfig{}, rc);
    ok = min_delta > 0 && worst_eps <= 0.10 && worst_n <= 0.10 && rc.delta_hat == 1.0;
    d = "min delta " + f6(min_delta) + ", eps-halving " + f6(worst_eps) + ", n " + f6(worst_n) + ", couette " +
        f6(rc.delta_hat);
    return Outcome{ok, d};
  });

  report(5, "completeness at t = 0", 120, 0, [&] {
    double worst = 0.0;
    for (int k : {1, 2, 3}) {
      DensityConfig c = light_density();
      c.out_order = 6;
      c.nys_base = 12;
      c.h_min = 1e-5;
      auto d = build_density(sine, k, data_a(), c);
      auto fine = ChannelGrid::uniform(16, 8);
      CVector ref = EllipticSolver(fine, k).solve_at(fine.sample(data_a()), d.y()).psi;
      worst = std::max(worst, sup_norm(evolve_psi_k(d, 0.0) - ref));
    }
    return Outcome{worst <= 1e-3, "max sup error " + f6(worst)};
  });

  // shared k = 1 work: densities for data A (boundary vanishing) and B
  auto t_shared = Clock::now();
  std::vector<SpectralDensity> dens;
  std::string shared_err;
  try {
    dens = build_densities(sine, 1, {data_a(), data_b()});
  } catch (const std::exception& e) {
    shared_err = e.what();
  }
  const double density_s = secs(t_shared);
  std::printf("     shared k=1 densities: %.1f s\n", density_s);

  std::vector<double> t_direct = range(0, 50, 2.5);
  t_direct.push_back(200.0);
  ModeTrajectory direct;
  double direct_s = 0.0;
  report(6, "spectral vs direct", 600, density_s, [&] {
    if (!shared_err.empty()) return Outcome{false, shared_err};
    auto t0 = Clock::now();
    direct = evolve_direct(sine, 1, data_a(), t_direct, dens[0].y());
    direct_s = secs(t0);
    double worst = 0.0;
    for (size_t i = 0; i < t_direct.size() && t_direct[i] <= 50; ++i) {
      CVector s = evolve_psi_k(dens[0], t_direct[i]);
      CVector r = direct.psi.row(static_cast<Eigen::Index>(i)).transpose();
      worst = std::max(worst, sup_norm(s - r) / sup_norm(r));
    }
    return Outcome{worst <= 1e-3, "max relative difference " + f6(worst) + " for t <= 50"};
  });

  std::vector<double> t_fit;
  for (int i = 0; i < 40; ++i) t_fit.push_back(20.0 * std::pow(10.0, i / 39.0));
  report(7, "decay exponents", 900, density_s, [&] {
    if (!shared_err.empty()) return Outcome{false, shared_err};
    auto tr = spectral_trajectory(dens[0], t_fit);
    auto fp = fit_decay(tr, DecayQuantity::SupPsi, 20, 200, false);
    auto fd = fit_decay(tr, DecayQuantity::SupDyPsi, 20, 200, false);
    bool ok = fp.slope >= -2.15 && fp.slope <= -1.85 && fd.slope >= -1.15 && fd.slope <= -0.85 && fp.r2 >= 0.95 &&
              fd.r2 >= 0.95;
    return Outcome{ok, "psi slope " + f6(fp.slope) + " (r2 " + f6(fp.r2) + "), dy psi slope " + f6(fd.slope) +
                           " (r2 " + f6(fd.r2) + ")"};
  });

  std::vector<double> yout;
  AsymptoticProfile ap_a, ap_b;
  report(8, "boundary lines", -1, 0, [&] {
    if (!shared_err.empty()) return Outcome{false, shared_err};
    yout = dens[1].y();
    ap_b = compute_phis(sine, 1, data_b(), yout);
    std::vector<double> with, without, as_written;
    for (double t : {50.0, 75.0, 100.0, 150.0, 200.0}) {
      CVector psi = evolve_psi_k(dens[1], t);
      MainTermOptions off, printed;
      off.boundary_lines = false;
      printed.form = SwitchForm::AsWritten;
      with.push_back(sup_norm(psi - main_term_psi(ap_b, t)) / sup_norm(psi));
      without.push_back(sup_norm(psi - main_term_psi(ap_b, t, off)) / sup_norm(psi));
      as_written.push_back(sup_norm(psi - main_term_psi(ap_b, t, printed)) / sup_norm(psi));
    }
    auto decreasing = [](const std::vector<double>& v) {
      bool mono = true;
      for (size_t i = 1; i < v.size(); ++i) mono &= v[i] < v[i - 1];
      return mono && v.back() < 0.7 * v.front();
    };
    bool ok = decreasing(with) && !decreasing(without);
    return Outcome{ok, "with lines " + f6(with.front()) + " -> " + f6(with.back()) + ", without " + f6(without.front()) +
                           " -> " + f6(without.back()) + ", other k-sign switch " + f6(as_written.front()) +
                           " -> " + f6(as_written.back())};
  });

  report(9, "scattering", -1, 0, [&] {
    if (!shared_err.empty() || direct.times.empty()) return Outcome{false, "needs the shared density and direct run"};
    ap_a = compute_phis(sine, 1, data_a(), dens[0].y());
    // (a) f_1(200) from the direct solver vs F_1 from the spectral psi
    auto tr = psi_trajectory(dens[0], range(0, 200, 0.02));
    ScatterEntry se = scattering_profile(tr, ap_a);
    const auto last = static_cast<Eigen::Index>(direct.times.size() - 1);
    double err_f = 0.0;
    for (size_t j = 0; j < direct.y.size(); ++j) {
      cplx fk = std::polar(1.0, sine.b(direct.y[j]) * 200.0) * direct.omega(last, static_cast<Eigen::Index>(j));
      err_f = std::max(err_f, std::abs(fk - se.F[static_cast<Eigen::Index>(j)]));
    }
    bool ok_a = err_f <= 2.0 * se.tail_estimate;
    // (b) t^2 phi(200) vs Psi, K_max = 4
    std::vector<ModeTrajectory> trs;
    std::vector<AsymptoticProfile> aps;
    for (int k = 1; k <= 4; ++k) {
      SpectralDensity dk = k == 1 ? dens[0] : build_density(sine, k, data_a(), light_density());
      auto t200 = spectral_trajectory(dk, {200.0});
      trs.push_back(t200);
      trs.push_back(conjugate_trajectory(t200));
      aps.push_back(k == 1 ? ap_a : compute_phis(sine, k, data_a(), dk.y()));
      aps.push_back(compute_phis(sine, -k, data_a(), dk.y()));
      if (dk.y() != trs.front().y) return Outcome{false, "output grids differ"};
    }
    auto pf = assemble_physical(sine, trs, 32);
    CMatrix Psi = assemble_Psi(aps, pf.x);
    double err_p = (200.0 * 200.0 * pf.phi.back() - Psi).cwiseAbs().maxCoeff(), ref = Psi.cwiseAbs().maxCoeff();
    bool ok_b = err_p <= 0.1 * ref;
    return Outcome{ok_a && ok_b, "|f(200)-F| " + f6(err_f) + " vs 2*tail " + f6(2 * se.tail_estimate) +
                                     "; |t^2 phi - Psi|/|Psi| " + f6(err_p / ref)};
  });

  report(10, "norm lemma sweeps", 600, 0, [&] {
    LemmaSweepConfig c;  // k = 1..32, 50 inputs, eps 1/16 .. 1/128
    auto reps = lemma_sweep(sine, {LemmaTag::bX1, LemmaTag::X11, LemmaTag::bX17, LemmaTag::bX17Corollary}, c);
    bool ok = true;
    std::string d;
    for (auto& r : reps) {
      ok &= r.finite && !r.monotone_blowup;
      d += lemma_name(r.tag) + " " + f6(r.max_ratio) + (r.monotone_blowup ? " growing" : "") + "; ";
    }
    return Outcome{ok, d};
  });

  report(11, "conjugation and reality", -1, 0, [&] {
    double worst = 0.0;
    for (auto [k, y0] : std::vector<std::pair<int, double>>{{1, 0.3}, {4, 0.77}, {9, 0.5}}) {
      SpectralPoint p{k, y0, 1e-2, +1}, m{k, y0, 1e-2, -1};
      auto grid = resolvent_grid(sine, p);
      CVector om = grid.sample(data_b());
      auto a = solve_psi(sine, p, om, grid), b = solve_psi(sine, m, om, grid);
      worst = std::max(worst, sup_norm(a.psi.conjugate() - b.psi) / sup_norm(a.psi));
    }
    double imag = 0.0;
    if (!dens.empty()) {
      auto tr = spectral_trajectory(dens[0], {0.0, 10.0, 100.0});
      imag = assemble_physical(sine, {tr, conjugate_trajectory(tr)}, 32).max_imag;
    }
    return Outcome{worst <= 1e-10 && imag <= 1e-10 && !dens.empty(),
                   "psi- vs conj psi+ " + f6(worst) + ", physical Im ratio " + f6(imag)};
  });

  std::printf("%d criteria failed\n", failures);
  return failures ? 1 : 0;
}
