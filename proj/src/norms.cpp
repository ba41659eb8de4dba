#include "idamp/norms.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "idamp/parallel.hpp"
#include "json.hpp"

namespace idamp {

CVector y_weight(const ShearProfile& prof, const SpectralPoint& pt, const ChannelGrid& grid, int m) {
  validate(pt);
  LogWeight L(prof, pt);
  const double inv_theta = 1.0 / prof.theta();
  CVector w(grid.size());
  for (int i = 0; i < grid.size(); ++i) w[i] = std::pow(L(grid.node(i)) - inv_theta, 1 + m);
  return w;
}

WeightedNormValue y_norm(const ShearProfile& prof, const SpectralPoint& pt, const ChannelGrid& grid, const CVector& f,
                         const CVector& fprime, int m) {
  if (m < 1 || m > 5) fail(ErrorCode::InvalidArgument, "m must be in 1..5");
  if (f.size() != grid.size() || fprime.size() != grid.size()) fail(ErrorCode::InvalidArgument, "size mismatch");
  CVector w = y_weight(prof, pt, grid, m);
  WeightedNormValue r;
  r.kind = "Y1m";
  r.m = m;
  r.sup_part = sup_norm(f);
  r.deriv_part = sup_norm(fprime.cwiseQuotient(w)) / std::abs(static_cast<double>(pt.k));
  r.value = r.sup_part + r.deriv_part;
  return r;
}

WeightedNormValue y_norm(const ShearProfile& prof, const SpectralPoint& pt, const ChannelGrid& grid, const CVector& f,
                         int m) {
  return y_norm(prof, pt, grid, f, grid.differentiate(f), m);
}

WeightedNormValue z_norm_upper(const ShearProfile& prof, const SpectralPoint& pt, const ChannelGrid& grid,
                               const CVector& f, const CVector& fprime, const CVector& g, const CVector& h, int m) {
  if (g.size() != grid.size() || h.size() != grid.size()) fail(ErrorCode::InvalidArgument, "witness size mismatch");
  LogWeight L(prof, pt);
  double miss = 0.0, scale = 1.0;
  for (int i = 0; i < grid.size(); ++i) {
    cplx rebuilt = g[i] * L(grid.node(i)) + h[i];
    miss = std::max(miss, std::abs(rebuilt - fprime[i]));
    scale = std::max(scale, std::abs(fprime[i]));
  }
  if (miss > 1e-8 * scale) fail(ErrorCode::WitnessMismatch, "witness misses f' by " + std::to_string(miss));
  WeightedNormValue yg = y_norm(prof, pt, grid, g, m);
  WeightedNormValue yh = y_norm(prof, pt, grid, h, m + 1);
  WeightedNormValue r;
  r.kind = "Z1m_upper";
  r.m = m;
  r.sup_part = sup_norm(f);
  r.deriv_part = (yg.value + yh.value) / std::abs(static_cast<double>(pt.k));
  r.value = r.sup_part + r.deriv_part;
  r.g = g;
  r.h = h;
  return r;
}

std::string lemma_name(LemmaTag t) {
  switch (t) {
    case LemmaTag::bX1: return "bX1";
    case LemmaTag::X11: return "X11";
    case LemmaTag::bX17: return "bX17";
    case LemmaTag::bX17Corollary: return "bX17_corollary";
  }
  return "?";
}

namespace {

// Random smooth input: trigonometric polynomial with decaying real
// coefficients. sine_only gives u(0) = u(1) = 0.
struct RandomSmooth {
  std::vector<double> a, s;
  cplx value(double y) const {
    double v = 0.0;
    for (size_t j = 0; j < a.size(); ++j) v += a[j] * std::cos(kPi * j * y) + s[j] * std::sin(kPi * j * y);
    return v;
  }
  cplx deriv(double y) const {
    double v = 0.0;
    for (size_t j = 0; j < a.size(); ++j)
      v += kPi * j * (-a[j] * std::sin(kPi * j * y) + s[j] * std::cos(kPi * j * y));
    return v;
  }
};

std::vector<RandomSmooth> draw_inputs(int n, std::uint64_t seed, bool sine_only) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<RandomSmooth> out(static_cast<size_t>(n));
  for (auto& r : out) {
    r.a.assign(6, 0.0);
    r.s.assign(6, 0.0);
    for (int j = 0; j < 6; ++j) {
      double d = 1.0 + j * j;
      double ca = nd(rng) / d, cs = nd(rng) / d;
      if (!sine_only) r.a[j] = ca;
      r.s[j] = cs;
    }
  }
  return out;
}

// Z^{1,1} of a smooth function with the trivial witness (0, u').
double z1_smooth(const ShearProfile& prof, const SpectralPoint& pt, const ChannelGrid& grid, const CVector& u,
                 const CVector& du) {
  CVector zero = CVector::Zero(grid.size());
  return z_norm_upper(prof, pt, grid, u, du, zero, du, 1).value;
}

struct Cell {
  int k;
  double y0;
  int level;
};

}  // namespace

std::vector<LemmaReport> lemma_sweep(const ShearProfile& prof, const std::vector<LemmaTag>& tags,
                                     const LemmaSweepConfig& cfg_in) {
  LemmaSweepConfig cfg = cfg_in;
  if (cfg.ks.empty())
    for (int k = 1; k <= 32; ++k) cfg.ks.push_back(k);
  if (cfg.samples < 1 || cfg.eps.levels < 1 || cfg.m < 1 || cfg.m > 5)
    fail(ErrorCode::InvalidArgument, "lemma sweep configuration");
  if (cfg.eps.eps0 > 0.25) fail(ErrorCode::InvalidArgument, "eps must not exceed 1/4");

  std::vector<Cell> cells;
  for (int k : cfg.ks)
    for (double y0 : cfg.y0s)
      for (int l = 0; l < cfg.eps.levels; ++l) cells.push_back({k, y0, l});

  const auto general = draw_inputs(cfg.samples, cfg.seed, false);
  const auto vanishing = draw_inputs(cfg.samples, cfg.seed ^ 0x9e3779b97f4a7c15ULL, true);
  const size_t nt = tags.size();
  // ratio[cell][tag] = max over samples
  std::vector<std::vector<double>> ratio(cells.size(), std::vector<double>(nt, 0.0));
  bool need_f2 = false;
  for (auto t : tags) need_f2 |= (t == LemmaTag::bX17 || t == LemmaTag::bX17Corollary);

  parallel_for(cells.size(), [&](size_t ci) {
    const Cell& cell = cells[ci];
    SpectralPoint pt{cell.k, cell.y0, cfg.eps.at(cell.level), +1};
    ChannelGrid grid = resolvent_grid(prof, pt, cfg.base_panels, cfg.q);
    LogWeight L(prof, pt);
    ResolventOperator op(prof, pt.k, L, grid, false, false);
    const auto& ys = grid.nodes();
    const int n = grid.size();
    const double ka = std::abs(static_cast<double>(pt.k));
    const double lk = std::log(jbracket(ka));
    const double inv_theta = 1.0 / prof.theta();
    CMatrix T = op.T_rows(ys), DT = op.dyT_rows(ys), F2;
    if (need_f2) F2 = op.F2_rows(ys);
    CVector Ln(n), invbc(n);
    RVector d1(n), d2(n);
    for (int i = 0; i < n; ++i) {
      Ln[i] = L(ys[i]);
      invbc[i] = L.inv(ys[i]);
      d1[i] = prof.db(ys[i]);
      d2[i] = prof.d2b(ys[i]);
    }
    const double b0 = prof.db(0.0), b1 = prof.db(1.0);
    const cplx L0 = L(0.0), L1 = L(1.0);
    // sinh(ka a)/sinh(ka) and cosh(ka a)/sinh(ka) without overflow
    const double e2 = std::exp(-2.0 * ka);
    auto sr = [&](double a) { return std::exp(ka * (a - 1.0)) * (1.0 - std::exp(-2.0 * ka * a)) / (1.0 - e2); };
    auto cr = [&](double a) { return std::exp(ka * (a - 1.0)) * (1.0 + std::exp(-2.0 * ka * a)) / (1.0 - e2); };
    auto nodal = [&](const RandomSmooth& r, CVector& u, CVector& du) {
      u.resize(n);
      du.resize(n);
      for (int i = 0; i < n; ++i) {
        u[i] = r.value(ys[i]);
        du[i] = r.deriv(ys[i]);
      }
    };

    for (size_t ti = 0; ti < nt; ++ti) {
      const LemmaTag tag = tags[ti];
      const auto& inputs = tag == LemmaTag::bX17Corollary ? vanishing : general;
      double best = 0.0;
      for (const auto& r : inputs) {
        CVector u, du;
        nodal(r, u, du);
        double val = 0.0;
        if (tag == LemmaTag::bX1) {
          // witness for (Tf)': g = -f/b', h = (Tf)' - g L
          CVector Tf = T * u, dTf = DT * u;
          CVector g(n), dg(n);
          for (int i = 0; i < n; ++i) {
            g[i] = -u[i] / d1[i];
            dg[i] = -(du[i] / d1[i] - u[i] * d2[i] / (d1[i] * d1[i]));
          }
          CVector h = dTf - g.cwiseProduct(Ln);
          WeightedNormValue yg = y_norm(prof, pt, grid, g, dg, cfg.m);
          WeightedNormValue yh = y_norm(prof, pt, grid, h, cfg.m + 1);
          double lhs = sup_norm(Tf) + (yg.value + yh.value) / ka;
          double rhs = std::pow(lk, cfg.m + 2) / ka * y_norm(prof, pt, grid, u, du, cfg.m).value;
          val = lhs / rhs;
        } else if (tag == LemmaTag::X11) {
          // f = g (L - 1/theta), g the random input
          CVector f = u.cwiseProduct((Ln.array() - inv_theta).matrix());
          CVector Tf = T * f, dTf = DT * f;
          double lhs = y_norm(prof, pt, grid, Tf, dTf, 1).value;
          double rhs = std::pow(lk, 4) / ka * z1_smooth(prof, pt, grid, u, du);
          val = lhs / rhs;
        } else {
          // f = g/(b - c); R = Tf - g L/b'^2 + B
          const bool cor = tag == LemmaTag::bX17Corollary;
          CVector f = u.cwiseProduct(invbc);
          CVector Tf = F2 * u, dTf = DT * f;
          CVector R(n), dR(n);
          CVector w2(n), dw2(n), v(n), dv(n);  // w2 = g/b'^2, v = g/b'
          const cplx g0 = r.value(0.0), g1 = r.value(1.0);
          for (int i = 0; i < n; ++i) {
            double y = ys[i];
            v[i] = u[i] / d1[i];
            dv[i] = du[i] / d1[i] - u[i] * d2[i] / (d1[i] * d1[i]);
            w2[i] = v[i] / d1[i];
            dw2[i] = dv[i] / d1[i] - v[i] * d2[i] / (d1[i] * d1[i]);
            cplx B = g1 * sr(y) / (b1 * b1) * L1 + g0 * sr(1.0 - y) / (b0 * b0) * L0;
            cplx dB = g1 * ka * cr(y) / (b1 * b1) * L1 - g0 * ka * cr(1.0 - y) / (b0 * b0) * L0;
            R[i] = Tf[i] - w2[i] * Ln[i] + B;
            dR[i] = dTf[i] - v[i] * invbc[i] - dw2[i] * Ln[i] + dB;
          }
          double fx3 = ka * z1_smooth(prof, pt, grid, u, du);
          if (!cor) {
            double lhs = y_norm(prof, pt, grid, R, dR, 1).value;
            val = lhs / (std::pow(lk, 4) / ka * fx3);
          } else {
            // Tf = w2 (L - 1/theta) + [R + w2/theta]
            CVector Ry = R + w2 / prof.theta(), dRy = dR + dw2 / prof.theta();
            double tf_norm = z1_smooth(prof, pt, grid, w2, dw2) + y_norm(prof, pt, grid, Ry, dRy, 1).value;
            // (Tf)' = v/(b-c) + [-(v'/b') L + J]
            CVector g1w(n), g0w(n);
            for (int i = 0; i < n; ++i) {
              g1w[i] = -dv[i] / d1[i];
              g0w[i] = dTf[i] - v[i] * invbc[i] - g1w[i] * Ln[i];
            }
            double x3 = ka * z1_smooth(prof, pt, grid, v, dv);
            double x12 = y_norm(prof, pt, grid, g0w, 3).value + y_norm(prof, pt, grid, g1w, 2).value;
            double lhs = ka * tf_norm + x3 + x12;
            val = lhs / (std::pow(lk, 4) * fx3);
          }
        }
        if (!std::isfinite(val)) {
          best = val;
          break;
        }
        best = std::max(best, val);
      }
      ratio[ci][ti] = best;
    }
  });

  std::vector<LemmaReport> out;
  for (size_t ti = 0; ti < nt; ++ti) {
    LemmaReport rep;
    rep.tag = tags[ti];
    for (int l = 0; l < cfg.eps.levels; ++l) rep.eps.push_back(cfg.eps.at(l));
    rep.max_by_eps.assign(static_cast<size_t>(cfg.eps.levels), 0.0);
    for (size_t ci = 0; ci < cells.size(); ++ci) {
      double v = ratio[ci][ti];
      if (!std::isfinite(v)) {
        rep.finite = false;
        continue;
      }
      rep.max_ratio = std::max(rep.max_ratio, v);
      auto& mk = rep.max_by_k[cells[ci].k];
      mk = std::max(mk, v);
      auto& me = rep.max_by_eps[static_cast<size_t>(cells[ci].level)];
      me = std::max(me, v);
    }
    bool increasing = rep.max_by_eps.size() > 1;
    for (size_t l = 1; l < rep.max_by_eps.size(); ++l) increasing &= rep.max_by_eps[l] > rep.max_by_eps[l - 1];
    rep.monotone_blowup = increasing && rep.max_by_eps.back() > 1.5 * rep.max_by_eps.front();
    out.push_back(std::move(rep));
  }
  return out;
}

std::string to_json(const std::vector<LemmaReport>& reps) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : reps) {
    nlohmann::ordered_json e;
    e["lemma"] = lemma_name(r.tag);
    e["max_ratio"] = r.max_ratio;
    e["finite"] = r.finite;
    e["monotone_blowup"] = r.monotone_blowup;
    e["eps"] = r.eps;
    e["max_by_eps"] = r.max_by_eps;
    nlohmann::ordered_json bk = nlohmann::ordered_json::object();
    for (auto& [k, v] : r.max_by_k) bk[std::to_string(k)] = v;
    e["max_by_k"] = bk;
    j.push_back(e);
  }
  return j.dump(2);
}

}  // namespace idamp
