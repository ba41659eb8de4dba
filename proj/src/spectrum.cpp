#include "idamp/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "idamp/logint.hpp"
#include "idamp/parallel.hpp"
#include "json.hpp"

namespace idamp {

CRect default_rect(const ShearProfile& prof) {
  double lo = std::min(prof.b(0.0), prof.b(1.0)), hi = std::max(prof.b(0.0), prof.b(1.0));
  double m = 0.25 * (hi - lo);
  return {lo - m, hi + m, -0.5 * (hi - lo), 0.5 * (hi - lo)};
}

namespace {

// I - S with the pole kernel G/(b - c) integrated by plain quadrature on a
// grid graded about the pole. Unlike the integrated-by-parts form this has
// no differentiation matrix inside, so the inf-norm of its inverse converges
// with the grid.
double inverse_norm_pole(const ShearProfile& prof, int k, const LogWeight& L, const ChannelGrid& g) {
  GreensKernel green(k);
  auto coef = [](double, KernelCoef& c) {
    c = KernelCoef{};
    c.c[0][kG] = 1.0;
  };
  CMatrix A = log_integral_rows(g, green, g.nodes(), 0, coef, [&L](double z) { return L.inv(z); });
  for (int j = 0; j < g.size(); ++j) A.col(j) *= prof.d2b(g.node(j));
  A.diagonal().array() += 1.0;
  CMatrix inv = A.partialPivLu().inverse();
  return inv.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

double sigma_min_at(const ShearProfile& prof, int k, cplx c, int n, int q, double h_floor) {
  if (prof.shear_free()) return 1.0;  // S = 0
  {
    // inside the range the pole must stay resolvable by the graded grid
    const double lo = std::min(prof.b(0.0), prof.b(1.0)), hi = std::max(prof.b(0.0), prof.b(1.0));
    const double floor_im = (c.real() >= lo && c.real() <= hi) ? 16.0 * h_floor * prof.min_abs_db() : 1e-12;
    if (std::abs(c.imag()) < floor_im) c.imag(c.imag() < 0 ? -floor_im : floor_im);
  }
  LogWeight L(prof, c);
  ChannelGrid g = ChannelGrid::with_total(n, q, L.center(), std::max(h_floor, std::abs(c.imag()) / 16.0));
  double nrm = inverse_norm_pole(prof, k, L, g);
  if (!std::isfinite(nrm) || nrm <= 0.0) return 0.0;
  return 1.0 / nrm;
}

void measure_delta(const ShearProfile& prof, int k, const ScanConfig& cfg, SpectrumReport& rep) {
  const int L = cfg.eps.levels, m = std::max(2, cfg.delta_y0);
  rep.eps.clear();
  for (int j = 0; j < L; ++j) rep.eps.push_back(cfg.eps.at(j));
  if (prof.shear_free()) {
    rep.delta_by_eps.assign(L, 1.0);
    rep.delta_hat = 1.0;
    return;
  }
  std::vector<double> vals(static_cast<size_t>(L) * m);
  parallel_for(vals.size(), [&](std::size_t idx) {
    const int j = static_cast<int>(idx / m), i = static_cast<int>(idx % m);
    SpectralPoint pt{k, static_cast<double>(i) / (m - 1), cfg.eps.at(j), +1};
    ChannelGrid g = resolvent_grid_total(prof, pt, cfg.delta_n, cfg.q, cfg.h_floor);
    vals[idx] = 1.0 / inverse_norm_pole(prof, k, LogWeight(prof, pt), g);
  });
  rep.delta_by_eps.assign(L, HUGE_VAL);
  for (int j = 0; j < L; ++j)
    for (int i = 0; i < m; ++i) rep.delta_by_eps[j] = std::min(rep.delta_by_eps[j], vals[j * m + i]);
  rep.delta_hat = *std::min_element(rep.delta_by_eps.begin(), rep.delta_by_eps.end());
}

namespace {

// Nelder-Mead in (Re c, Im c).
std::pair<cplx, double> refine(const std::function<double(cplx)>& f, cplx c0, double step) {
  std::array<cplx, 3> x{c0, c0 + step, c0 + cplx(0, step)};
  std::array<double, 3> v{f(x[0]), f(x[1]), f(x[2])};
  for (int it = 0; it < 200; ++it) {
    std::array<int, 3> o{0, 1, 2};
    std::sort(o.begin(), o.end(), [&](int a, int b) { return v[a] < v[b]; });
    const int lo = o[0], mid = o[1], hi = o[2];
    if (std::abs(x[hi] - x[lo]) < 1e-12 || v[lo] < 1e-14) break;
    const cplx cen = 0.5 * (x[lo] + x[mid]);
    const cplx xr = cen + (cen - x[hi]);
    const double vr = f(xr);
    if (vr < v[lo]) {
      const cplx xe = cen + 2.0 * (cen - x[hi]);
      const double ve = f(xe);
      if (ve < vr) {
        x[hi] = xe;
        v[hi] = ve;
      } else {
        x[hi] = xr;
        v[hi] = vr;
      }
    } else if (vr < v[mid]) {
      x[hi] = xr;
      v[hi] = vr;
    } else {
      const cplx xc = cen + 0.5 * (x[hi] - cen);
      const double vc = f(xc);
      if (vc < v[hi]) {
        x[hi] = xc;
        v[hi] = vc;
      } else {
        for (int i : {mid, hi}) {
          x[i] = x[lo] + 0.5 * (x[i] - x[lo]);
          v[i] = f(x[i]);
        }
      }
    }
  }
  int best = static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
  return {x[best], v[best]};
}

}  // namespace

SpectrumReport scan(const ShearProfile& prof, int k, const CRect& rect, const ScanConfig& cfg) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "scan needs k != 0");
  if (cfg.n_re < 32 || cfg.n_im < 16) fail(ErrorCode::InvalidArgument, "scan resolution below 32x16");
  const double blo = std::min(prof.b(0.0), prof.b(1.0)), bhi = std::max(prof.b(0.0), prof.b(1.0));
  if (!(rect.re_lo < blo && rect.re_hi > bhi && rect.im_lo < 0.0 && rect.im_hi > 0.0))
    fail(ErrorCode::InvalidArgument, "c rectangle must contain [b(0), b(1)] with margin");

  SpectrumReport rep;
  rep.k = k;
  rep.n = cfg.n;
  for (int i = 0; i < cfg.n_re; ++i) rep.c_re.push_back(rect.re_lo + (rect.re_hi - rect.re_lo) * i / (cfg.n_re - 1));
  // cell centers, so the real axis itself is never sampled
  for (int j = 0; j < cfg.n_im; ++j)
    rep.c_im.push_back(rect.im_lo + (rect.im_hi - rect.im_lo) * (j + 0.5) / cfg.n_im);
  rep.sigma_min.resize(cfg.n_im, cfg.n_re);
  parallel_for(static_cast<std::size_t>(cfg.n_re) * cfg.n_im, [&](std::size_t idx) {
    const int j = static_cast<int>(idx / cfg.n_re), i = static_cast<int>(idx % cfg.n_re);
    rep.sigma_min(j, i) = sigma_min_at(prof, k, cplx(rep.c_re[i], rep.c_im[j]), cfg.n, cfg.q, cfg.h_floor);
  });

  const double dre = (rect.re_hi - rect.re_lo) / (cfg.n_re - 1);
  for (double x : rep.c_re)
    if (x < blo - 1e-12 || x > bhi + 1e-12) rep.axis_re.push_back(x);
  rep.axis_sigma.resize(rep.axis_re.size());
  parallel_for(rep.axis_re.size(), [&](std::size_t i) {
    rep.axis_sigma[i] = sigma_min_at(prof, k, cplx(rep.axis_re[i], 0.0), cfg.n, cfg.q, cfg.h_floor);
  });

  // local minima of the field and of the axis samples, the lowest refined
  if (!prof.shear_free()) {
    auto f = [&](cplx c) { return sigma_min_at(prof, k, c, cfg.n, cfg.q, cfg.h_floor); };
    std::vector<std::pair<double, cplx>> minima;
    for (int j = 0; j < cfg.n_im; ++j)
      for (int i = 0; i < cfg.n_re; ++i) {
        const double s = rep.sigma_min(j, i);
        bool is_min = true;
        for (int dj = -1; dj <= 1 && is_min; ++dj)
          for (int di = -1; di <= 1; ++di) {
            int jj = j + dj, ii = i + di;
            if ((dj || di) && jj >= 0 && jj < cfg.n_im && ii >= 0 && ii < cfg.n_re && rep.sigma_min(jj, ii) < s) {
              is_min = false;
              break;
            }
          }
        if (is_min) minima.push_back({s, cplx(rep.c_re[i], rep.c_im[j])});
      }
    const int na = static_cast<int>(rep.axis_re.size());
    for (int i = 0; i < na; ++i) {
      const double s = rep.axis_sigma[i];
      bool is_min = true;
      for (int d : {-1, 1}) {
        int ii = i + d;
        if (ii >= 0 && ii < na && std::abs(rep.axis_re[ii] - rep.axis_re[i]) < 1.5 * dre && rep.axis_sigma[ii] < s)
          is_min = false;
      }
      if (is_min) minima.push_back({s, cplx(rep.axis_re[i], 0.0)});
    }
    std::sort(minima.begin(), minima.end(), [](auto& a, auto& b) { return a.first < b.first; });
    while (!minima.empty() && minima.back().first > 0.2) minima.pop_back();
    if (minima.size() > 4) minima.resize(4);
    for (auto& mn : minima) {
      auto [c, s] = refine(f, mn.second, 0.5 * dre);
      if (s < cfg.threshold) {
        bool dup = false;
        for (auto& fl : rep.flags) dup = dup || std::abs(fl.c - c) < 1e-6;
        if (!dup) rep.flags.push_back({c, s});
      }
    }
  }
  measure_delta(prof, k, cfg, rep);
  return rep;
}

Certificate certify(const SpectrumReport& lo, const SpectrumReport& hi) {
  if (lo.k != hi.k) fail(ErrorCode::InvalidArgument, "reports for different k");
  if (!lo.flags.empty() || !hi.flags.empty()) {
    const auto& fl = lo.flags.empty() ? hi.flags.front() : lo.flags.front();
    fail(ErrorCode::Rejected, "suspected eigenvalue near c = " + std::to_string(fl.c.real()) + " + " +
                                  std::to_string(fl.c.imag()) + "i (k = " + std::to_string(lo.k) + ")");
  }
  if (!(lo.delta_hat > 0.0 && hi.delta_hat > 0.0)) fail(ErrorCode::Rejected, "delta_hat not positive");
  Certificate c;
  c.k = lo.k;
  c.delta_hat = std::min(lo.delta_hat, hi.delta_hat);
  c.delta_spread = std::abs(lo.delta_hat - hi.delta_hat) / std::max(lo.delta_hat, hi.delta_hat);
  if (c.delta_spread > 0.2) fail(ErrorCode::Rejected, "delta_hat unstable across resolutions");
  return c;
}

std::string to_json(const SpectrumReport& rep) {
  nlohmann::ordered_json j;
  j["k"] = rep.k;
  j["n"] = rep.n;
  j["c_re"] = rep.c_re;
  j["c_im"] = rep.c_im;
  auto rows = nlohmann::ordered_json::array();
  for (int r = 0; r < rep.sigma_min.rows(); ++r) {
    std::vector<double> row(rep.sigma_min.cols());
    for (int c = 0; c < rep.sigma_min.cols(); ++c) row[c] = rep.sigma_min(r, c);
    rows.push_back(row);
  }
  j["sigma_min"] = rows;
  j["axis_re"] = rep.axis_re;
  j["axis_sigma"] = rep.axis_sigma;
  j["delta_hat"] = rep.delta_hat;
  j["eps"] = rep.eps;
  j["delta_by_eps"] = rep.delta_by_eps;
  auto fl = nlohmann::ordered_json::array();
  for (auto& f : rep.flags) fl.push_back({{"re", f.c.real()}, {"im", f.c.imag()}, {"sigma", f.sigma}});
  j["flags"] = fl;
  return j.dump(1);
}

}  // namespace idamp
